"""The bubble transform: residual recursion over face dimension and local components.

With ``u^0 = u`` and, for m = 0..n,

    B_f u = C_f u^m  (f of dimension m),    u^{m+1} = u^m - sum_{dim f = m} B_f u,

the components sum to ``u`` and, for piecewise polynomial ``u``, each
``B_f u`` is a degree-r bubble on the macroelement of ``f``.

Two paths are provided: :func:`transform_poly` works on lattice values
(float or exact rational) and :func:`transform_sampled` evaluates
components pointwise for a general function by nested quadrature.
"""
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import arith
from .bubble_ops import composite_eval, cf_values
from .fe_space import PiecewisePolynomial, is_in_zero_trace_space
from .geometry import lambda_from_bary
from .mesh import LOCATE_TOL
from .quadrature import evaluate as evaluate_at

SCHEMA_VERSION = 1


class InvariantError(RuntimeError):
    """An identity that must hold for piecewise polynomial input failed during the recursion."""

    def __init__(self, message, m=None, face=None):
        super().__init__(message)
        self.m = m
        self.face = face


class SkeletonPointError(ValueError):
    """A sampled component was requested on a mesh face without a cell hint."""


def default_workers():
    env = os.environ.get("BUBBLETX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class BubbleDecomposition:
    """Components ``B_f u`` keyed by subsimplex, with the residuals ``u^0 .. u^n``.

    ``kind`` is ``"poly"`` (components are :class:`PiecewisePolynomial`) or
    ``"sampled"`` (components are pointwise evaluators).
    """
    mesh: object
    source: object
    components: dict
    residuals: list
    kind: str = "poly"
    info: dict = field(default_factory=dict)

    def faces(self, dim=None):
        return [f for f in self.components if dim is None or len(f) - 1 == dim]

    def __getitem__(self, f):
        return self.components[tuple(f)]

    def reconstruct(self):
        """Sum of all components (piecewise polynomial path only)."""
        if self.kind != "poly":
            raise TypeError("use evaluate_sum for sampled decompositions")
        total = None
        for f in self.components:
            total = self.components[f] if total is None else total + self.components[f]
        return total

    def evaluate_sum(self, cells, bary):
        total = 0
        for f in self.components:
            total = total + evaluate_at(self.components[f], self.mesh, cells, bary)
        return total

    def to_dict(self, report=None):
        if self.kind != "poly":
            raise TypeError("only piecewise polynomial decompositions are exported")
        u = self.source
        out = {
            "schema_version": SCHEMA_VERSION,
            "degree": u.degree,
            "mode": u.mode,
            "mesh": self.mesh.to_dict(),
            "points": u.space.points.tolist(),
            "input": arith.fmt_array(u.values),
            "components": [
                {"face": list(f), "dim": len(f) - 1, "values": arith.fmt_array(c.values)}
                for f, c in self.components.items()
            ],
        }
        if report is not None:
            out["report"] = report
        return out

    def to_json(self, report=None):
        return json.dumps(self.to_dict(report), sort_keys=True)


# -- polynomial path -------------------------------------------------------------

def _low_dim_dofs(space, m):
    """Domain points on faces of dimension < m (support with at most m vertices)."""
    return np.array([p for p, s in enumerate(space.supports) if len(s) <= m], dtype=int)


def _nonzero(values, tol):
    if tol == 0:
        return np.array([x != 0 for x in values.ravel()]).reshape(values.shape)
    return np.abs(arith.to_float(values)) > tol


def _check_skeleton(space, residual, m, tol):
    idx = _low_dim_dofs(space, m)
    if not len(idx):
        return
    bad = _nonzero(residual[idx], tol)
    if bad.any():
        row = np.argwhere(bad)[0]
        g = space.supports[idx[row[0]]]
        value = residual[(idx[row[0]],) + tuple(row[1:])]
        raise InvariantError(
            f"residual u^{m} has nonzero trace on face {g} of dimension {len(g) - 1} "
            f"(value {arith.fmt(value)})", m=m, face=g)


def _check_trace(space, comp, residual, f, m, tol):
    idx = space.dofs_on(f)
    bad = _nonzero(comp[idx] - residual[idx], tol)
    if bad.any():
        raise InvariantError(f"trace of B_f u differs from trace of u^{m} on f = {f}", m=m, face=f)


def transform_values(space, values, tol=None, check=True, workers=1):
    """Components and residuals for lattice values (N,) or (N, K).

    Returns ``(components, residuals)``; ``components[f]`` has the shape of
    ``values``. With ``check`` every pass verifies that u^m vanishes on all
    faces of dimension < m and that tr_f B_f u = tr_f u^m, raising
    :class:`InvariantError` with the offending (m, face) otherwise.
    """
    mesh = space.mesh
    mode = arith.mode_of(values)
    if tol is None:
        tol = arith.zero_tolerance(values, mode)
    residual = values
    residuals = [residual]
    components = {}
    pool = ThreadPoolExecutor(workers) if workers and workers > 1 else None
    try:
        for m in range(mesh.dim + 1):
            if check:
                _check_skeleton(space, residual, m, tol)
            faces = mesh.subsimplexes[m]
            if pool is None:
                comps = [cf_values(space, f, residual, tol, check) for f in faces]
            else:
                comps = list(pool.map(lambda f: cf_values(space, f, residual, tol, check), faces))
            nxt = residual
            for f, c in zip(faces, comps):
                if check:
                    _check_trace(space, c, residual, f, m, tol)
                components[f] = c
                nxt = nxt - c
            residual = nxt
            residuals.append(residual)
    finally:
        if pool is not None:
            pool.shutdown()
    return components, residuals


def transform_poly(u, tol=None, check=True, workers=1):
    """Bubble transform of a piecewise polynomial, exact in rational mode.

    Faces are processed by dimension, then lexicographically; ``workers``
    threads may compute the components of one dimension concurrently, and
    the reduction order stays fixed.
    """
    comps, res = transform_values(u.space, u.values, tol, check, workers)
    space = u.space
    components = {f: PiecewisePolynomial(space, c) for f, c in comps.items()}
    residuals = [PiecewisePolynomial(space, r) for r in res]
    return BubbleDecomposition(u.mesh, u, components, residuals, "poly")


def _squared_norms(u, kind, cells=None):
    """Squared L2 or H1 norm over ``cells`` from the Gram matrix (exact in rational mode)."""
    gram = u.space.gram(kind, cells, u.mode)
    return u.values @ gram @ u.values


def certify(dec, tol=None):
    """Report on an exact-path decomposition.

    Contains the reconstruction defect, per-face support verdicts and the
    sums of squared component norms over their macroelements next to the
    squared norms of ``u``. Nothing is asserted; callers decide.
    """
    if dec.kind != "poly":
        raise TypeError("certification needs a piecewise polynomial decomposition")
    u = dec.source
    mode = u.mode
    if tol is None:
        tol = arith.zero_tolerance(u.values, mode)
    defect = (dec.reconstruct() - u).max_abs()
    faces = {}
    sums = {"l2": 0, "h1": 0}
    for f, c in dec.components.items():
        ok = is_in_zero_trace_space(c, f, tol)
        faces[",".join(map(str, f))] = {"dim": len(f) - 1, "zero_trace": bool(ok),
                                        "max_abs": arith.fmt(c.max_abs())}
        cells = dec.mesh.cells_containing(f)
        for kind in sums:
            sums[kind] = sums[kind] + _squared_norms(c, kind, cells)
    norms = {kind: _squared_norms(u, kind) for kind in sums}
    ratios = {kind: (float(sums[kind]) / float(norms[kind]) if norms[kind] else math.nan)
              for kind in sums}
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "degree": u.degree,
        "reconstruction_defect": arith.fmt(defect),
        "all_zero_trace": all(v["zero_trace"] for v in faces.values()),
        "faces": faces,
        "component_sum_sq": {k: arith.fmt(v) for k, v in sums.items()},
        "input_norm_sq": {k: arith.fmt(v) for k, v in norms.items()},
        "ratio": ratios,
    }


# -- sampled path ----------------------------------------------------------------

class _Residual:
    """u^m as a cell-aware evaluator."""

    def __init__(self, sampler, m):
        self.sampler = sampler
        self.m = m

    def evaluate_barycentric(self, cells, bary):
        return self.sampler.residual(self.m, cells, bary)


class SampledComponent:
    """Pointwise evaluator of B_f u for a general function ``u``.

    Points are passed as (cells, barycentric coordinates). Physical points
    are accepted through :meth:`__call__`; a point on a mesh face needs a
    ``cells`` hint, otherwise :class:`SkeletonPointError` is raised.
    """

    def __init__(self, sampler, f):
        self.sampler = sampler
        self.f = tuple(f)

    def __repr__(self):
        return f"SampledComponent(f={self.f})"

    def evaluate_barycentric(self, cells, bary):
        return self.sampler.component(self.f, cells, bary)

    def gradient_barycentric(self, cells, bary):
        return finite_difference_gradient(self, self.sampler.mesh, cells, bary)

    def __call__(self, x, cells=None):
        return self.sampler.at_points(self.f, x, cells)


def finite_difference_gradient(v, mesh, cells, bary, h=1e-6):
    """Central-difference gradient of a cell-aware evaluator, staying inside each cell.

    The step shrinks near the cell boundary so both stencil points keep
    nonnegative barycentric coordinates.
    """
    cells = np.asarray(cells, dtype=int)
    bary = np.atleast_2d(np.asarray(bary, dtype=float))
    n = mesh.dim
    out = np.empty((len(cells), n))
    grads = np.stack([mesh.barycentric_gradients(c) for c in cells])  # (P, n+1, n)
    gmax = np.abs(grads).max(axis=(1, 2))
    step = np.minimum(h, 0.5 * bary.min(axis=1) / gmax)
    for j in range(n):
        delta = grads[:, :, j] * step[:, None]
        plus = evaluate_at(v, mesh, cells, bary + delta)
        minus = evaluate_at(v, mesh, cells, bary - delta)
        out[:, j] = (plus - minus) / (2 * step)
    return out


class _Sampler:
    def __init__(self, mesh, u, degree, chunk):
        self.mesh = mesh
        self.u = u
        self.degree = degree
        self.chunk = chunk
        self.caches = {f: {} for f in mesh.all_subsimplexes()}

    def source(self, cells, bary):
        return evaluate_at(self.u, self.mesh, cells, bary)

    def residual(self, m, cells, bary):
        cells = np.asarray(cells, dtype=int)
        bary = np.atleast_2d(bary)
        out = self.source(cells, bary)
        for j in range(m):
            for g in self.mesh.subsimplexes[j]:
                out = out - self.component(g, cells, bary)
        return out

    def component(self, f, cells, bary):
        cells = np.asarray(cells, dtype=int)
        bary = np.atleast_2d(np.asarray(bary, dtype=float))
        m = len(f) - 1
        out = np.zeros(len(cells))
        if m < self.mesh.dim:
            lam = lambda_from_bary(self.mesh, f, cells, bary)
            live = np.flatnonzero(np.all(lam > 0, axis=1))
        else:
            live = np.flatnonzero([self.mesh.cells[c] == f for c in cells])
        resid = _Residual(self, m)
        for start in range(0, len(live), self.chunk):
            sel = live[start:start + self.chunk]
            out[sel] = composite_eval(self.mesh, f, resid, cells[sel], bary[sel], self.degree,
                                      self.caches[f])
        return out

    def at_points(self, f, x, cells=None):
        mesh = self.mesh
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1 and mesh.dim > 1 or x.ndim == 0
        pts = x.reshape(-1, mesh.dim)
        if cells is None:
            cells, bary = mesh.locate(pts)
            if np.any(bary.min(axis=1) <= LOCATE_TOL):
                p = int(np.flatnonzero(bary.min(axis=1) <= LOCATE_TOL)[0])
                raise SkeletonPointError(
                    f"point {pts[p].tolist()} lies on a mesh face; pass cells= to choose a side")
        else:
            cells = np.broadcast_to(np.asarray(cells, dtype=int), (len(pts),))
            bary = np.vstack([mesh.barycentric(int(c), p) for c, p in zip(cells, pts)])
            bary = np.clip(bary, 0.0, None)
        out = self.component(tuple(f), cells, bary)
        return out[0] if single else out


def transform_sampled(mesh, u, degree=20, allow_3d=False, chunk=64):
    """Bubble transform of a general function by nested quadrature.

    ``u`` is a callable on (P, n) points or a cell-aware evaluator.
    ``degree`` is the exactness of the rules used for every face average.
    The nesting depth equals n, so n = 3 needs ``allow_3d``. Averages
    A_f u^m(lam) are memoized per face, keyed by lam.
    """
    if mesh.dim == 3 and not allow_3d:
        raise ValueError("the sampled transform in 3D is expensive; pass allow_3d=True")
    sampler = _Sampler(mesh, u, degree, chunk)
    faces = mesh.all_subsimplexes()
    components = {f: SampledComponent(sampler, f) for f in faces}
    residuals = [_Residual(sampler, m) for m in range(mesh.dim + 2)]
    return BubbleDecomposition(mesh, u, components, residuals, "sampled",
                               {"degree": degree, "sampler": sampler})
