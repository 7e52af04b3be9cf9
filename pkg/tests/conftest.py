import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bubbletx.meshes import (crisscross_square, diagonal_square, interval_mesh, reference_simplex,
                             two_tetrahedra)

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def interval3():
    return interval_mesh((0.0, 0.5, 1.0))


@pytest.fixture(scope="session")
def crisscross():
    return crisscross_square()


@pytest.fixture(scope="session")
def diagonal8():
    return diagonal_square(2)


@pytest.fixture(scope="session")
def triangle():
    return reference_simplex(2)


@pytest.fixture(scope="session")
def two_tets():
    return two_tetrahedra()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_points_in_cells(mesh, rng, count, margin=0.0):
    """Random (cells, barycentric) pairs with every coordinate above ``margin``."""
    cells = rng.integers(0, len(mesh.cells), count)
    bary = rng.dirichlet(np.ones(mesh.dim + 1), count)
    bary = margin + (1 - (mesh.dim + 1) * margin) * bary
    pts = np.einsum("pk,pkd->pd", bary, mesh.vertices[np.array(mesh.cells)[cells]])
    return cells, bary, pts


# -- one summary line per acceptance criterion --------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and item.name.startswith("test_criterion_"):
        if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            if getattr(item, "callspec", None) is not None:
                doc += f" [{item.callspec.id}]"
            status = "PASS" if rep.outcome == "passed" else "FAIL"
            _ACCEPTANCE.append((item.name, status, doc, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, doc, duration in sorted(_ACCEPTANCE, key=lambda t: int(t[0].split("_")[2])):
        terminalreporter.write_line(f"{status}  {doc}  ({duration:.2f} s)")
