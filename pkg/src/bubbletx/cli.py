"""Command-line front end.

Subcommands: ``verify``, ``decompose``, ``norms``, ``project``,
``geometry`` and ``mesh``. Reports are JSON (norm tables CSV) with a
``schema_version`` and the resolved configuration. Exit codes: 0 success,
2 verification failure, 3 input error; failures print an error JSON
carrying the underlying message.
"""
import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import arith, geometry
from .arith import FLOAT, RATIONAL
from .expr import ExpressionError, ExpressionFunction
from .fe_space import FESpace, interpolate, random_element
from .mesh import MeshError, PointLocationError, load_mesh
from .meshes import NAMED
from .projection import DimensionCapError, global_projection, operator_norm_on_Pr
from .quadrature import integrate, norm_l2
from .transform import (SCHEMA_VERSION, InvariantError, certify, default_workers,
                        transform_poly)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 2, 3


class InputError(ValueError):
    """Invalid command-line configuration."""


class VerificationFailure(RuntimeError):
    """A checked identity did not hold."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class RunConfig:
    command: str
    mesh: str
    degrees: list = field(default_factory=lambda: [1])
    quad_degree: int = None
    mode: str = FLOAT
    seed: int = 0
    samples: int = 1
    tol: float = None
    expr: str = None
    norm: str = "h1"
    operator: str = "B"
    inner: str = None
    sample_degree: int = 20
    threads: int = 1
    output: str = None

    def validate(self):
        if self.mode not in arith.MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if not self.degrees or min(self.degrees) < 1:
            raise InputError("degrees must be >= 1")
        if self.quad_degree is not None and self.quad_degree < 2 * max(self.degrees):
            raise InputError(f"quadrature degree {self.quad_degree} is below 2r = {2 * max(self.degrees)}")
        if self.mode == RATIONAL and self.expr is not None:
            raise InputError("rational mode takes piecewise polynomial input only, not --expr")
        if self.samples < 1:
            raise InputError("samples must be >= 1")
        return self


def parse_degrees(text):
    """'4', '1..8' or '1,3,5' to a list of ints."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse degrees {text!r}; use e.g. 3, 1..8 or 1,2,4") from None
    if not out:
        raise InputError(f"empty degree range {text!r}")
    return out


def resolve_mesh(source):
    """A mesh file path, or the name of a built-in mesh."""
    if os.path.exists(source):
        return load_mesh(source)
    if source in NAMED:
        return NAMED[source]()
    raise InputError(f"mesh {source!r} is neither a file nor one of {sorted(NAMED)}")


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- commands ---------------------------------------------------------------

def run_verify(cfg, mesh):
    results = []
    failed = []
    for r in cfg.degrees:
        space = FESpace(mesh, r)
        for k in range(cfg.samples):
            u = random_element(space, cfg.seed + k, cfg.mode)
            try:
                dec = transform_poly(u, cfg.tol, workers=cfg.threads)
            except InvariantError as err:
                raise VerificationFailure(str(err)) from err
            rep = certify(dec, cfg.tol)
            entry = {"degree": r, "seed": cfg.seed + k,
                     "reconstruction_defect": rep["reconstruction_defect"],
                     "all_zero_trace": rep["all_zero_trace"], "ratio": rep["ratio"]}
            defect = rep["reconstruction_defect"]
            if cfg.mode == RATIONAL:
                exact = arith.rational(defect) == 0
            else:
                tol = cfg.tol if cfg.tol is not None else arith.FLOAT_ZERO_TOL * float(u.max_abs())
                exact = defect <= tol
            if not (rep["all_zero_trace"] and exact):
                failed.append(entry)
            results.append(entry)
    report = {"results": results, "passed": not failed}
    if failed:
        raise VerificationFailure(f"{len(failed)} decompositions failed certification", report)
    return report


def run_decompose(cfg, mesh):
    if len(cfg.degrees) != 1:
        raise InputError("decompose takes a single degree")
    space = FESpace(mesh, cfg.degrees[0])
    if cfg.expr is not None:
        u = interpolate(space, ExpressionFunction(cfg.expr, mesh.dim), FLOAT)
    else:
        u = random_element(space, cfg.seed, cfg.mode)
    try:
        dec = transform_poly(u, cfg.tol, workers=cfg.threads)
    except InvariantError as err:
        raise VerificationFailure(str(err)) from err
    return dec.to_dict(certify(dec, cfg.tol))


def norm_rows(cfg, mesh):
    ops = ["B", "pi"] if cfg.operator == "both" else [cfg.operator]
    norms = ["l2", "h1"] if cfg.norm == "both" else [cfg.norm]
    rows = []
    for r in cfg.degrees:
        for op in ops:
            for nt in norms:
                rows.append((r, op, nt, operator_norm_on_Pr(mesh, op, r, nt, cfg.inner)))
    return rows


def run_norms(cfg, mesh):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "operator", "norm_type", "value"])
    for r, op, nt, value in norm_rows(cfg, mesh):
        writer.writerow([r, op, nt, repr(value)])
    return buf.getvalue()


def run_project(cfg, mesh):
    if cfg.expr is None:
        raise InputError("project needs --expr")
    func = ExpressionFunction(cfg.expr, mesh.dim)
    inner = cfg.inner or "l2"
    rows = []
    for r in cfg.degrees:
        space = FESpace(mesh, r)
        d = cfg.quad_degree or 2 * r + 2
        pu = global_projection(space, func, inner, d, cfg.sample_degree)
        err = _Difference(func, pu)
        rows.append({"degree": r, "error_l2": norm_l2(err, mesh, degree=d + 4),
                     "norm_l2": norm_l2(func, mesh, degree=d + 4)})
    return {"inner": inner, "results": rows}


class _Difference:
    def __init__(self, func, poly):
        self.func, self.poly = func, poly

    def __call__(self, x):
        return self.func(x) - self.poly.evaluate(x)


def _quadratic(x):
    return 1.0 + (x * x).sum(axis=1) + x[:, 0]


def run_geometry(cfg, mesh):
    rng = np.random.default_rng(cfg.seed)
    n = mesh.dim
    worst = {"composition": 0.0, "slack_product": 0.0, "polar_reconstruction": 0.0,
             "polar_integration": 0.0}
    for f in mesh.all_subsimplexes():
        m = len(f) - 1
        if m == n:
            continue
        lam = rng.dirichlet(np.ones(m + 2), cfg.samples)[:, :m + 1]
        mu = rng.dirichlet(np.ones(m + 2), cfg.samples)[:, :m + 1]
        for c in mesh.cells_containing(f):
            bary = rng.dirichlet(np.ones(n + 1), cfg.samples)
            y = bary @ mesh.vertices[list(mesh.cells[c])]
            verts = mesh.vertices[list(f)]
            lhs = geometry.contract(verts, lam, geometry.contract(verts, mu, y))
            rhs = geometry.contract(verts, geometry.compose_weights(lam, mu), y)
            worst["composition"] = max(worst["composition"],
                                       float(np.abs(lhs - rhs).max() / max(1.0, np.abs(y).max())))
            for x in y:
                pc = geometry.polar_decompose(mesh, f, x, cell=c)
                back = geometry.polar_reconstruct(mesh, pc)
                worst["polar_reconstruction"] = max(worst["polar_reconstruction"],
                                                    float(np.abs(back - x).max() / max(1.0, np.abs(x).max())))
        prod = geometry.slack(geometry.compose_weights(lam, mu)) - geometry.slack(lam) * geometry.slack(mu)
        worst["slack_product"] = max(worst["slack_product"], float(np.abs(prod).max()))
        exact = integrate(_quadratic, mesh, mesh.cells_containing(f), degree=2)
        approx = geometry.polar_integral(
            mesh, f, lambda L, Q: _quadratic(geometry.contract(mesh.vertices[list(f)], L, Q)),
            4 + n)
        worst["polar_integration"] = max(worst["polar_integration"], abs(approx - exact) / abs(exact))
    tol = cfg.tol if cfg.tol is not None else 1e-10
    report = {"max_relative_error": worst, "tolerance": tol,
              "passed": all(v <= tol for v in worst.values())}
    if not report["passed"]:
        raise VerificationFailure("geometric identity above tolerance", report)
    return report


def run_mesh(cfg, mesh):
    return mesh.to_dict()


COMMANDS = {"verify": run_verify, "decompose": run_decompose, "norms": run_norms,
            "project": run_project, "geometry": run_geometry, "mesh": run_mesh}


# -- argument handling ---------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="bubbletx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, degrees="1"):
        p.add_argument("--mesh", required=True, help="mesh JSON file or built-in name")
        p.add_argument("--degree", "--degrees", dest="degrees", default=degrees,
                       help="degree, range a..b or list a,b,c")
        p.add_argument("--mode", choices=arith.MODES, default=FLOAT)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None, help="override zero tolerance")
        p.add_argument("--quad-degree", type=int, default=None, help="quadrature exactness d")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (BUBBLETX_THREADS overrides)")
        p.add_argument("-o", "--output", default=None, help="write the report here")
        return p

    p = common(sub.add_parser("verify", help="certify the transform on random polynomials"))
    p.add_argument("--samples", type=int, default=1)
    p = common(sub.add_parser("decompose", help="export a decomposition as JSON"))
    p.add_argument("--expr", default=None, help="function of x, y, z interpolated at degree r")
    p = common(sub.add_parser("norms", help="operator norms on the degree-r space (CSV)"), "1..4")
    p.add_argument("--norm", choices=["l2", "h1", "both"], default="h1")
    p.add_argument("--operator", choices=["B", "pi", "both"], default="B")
    p.add_argument("--inner", choices=["l2", "h1"], default=None,
                   help="inner product of the local projections (default: --norm)")
    p = common(sub.add_parser("project", help="project an expression and report the L2 error"))
    p.add_argument("--expr", required=True)
    p.add_argument("--inner", choices=["l2", "h1"], default="l2")
    p.add_argument("--sample-degree", type=int, default=20,
                   help="quadrature exactness of the face averages")
    p = common(sub.add_parser("geometry", help="check polar and contraction identities"))
    p.add_argument("--samples", type=int, default=20)
    p = sub.add_parser("mesh", help="print a mesh (e.g. a built-in one) as JSON")
    p.add_argument("--mesh", required=True, help="mesh JSON file or built-in name")
    p.add_argument("-o", "--output", default=None)
    return parser


def make_config(args):
    env = os.environ.get("BUBBLETX_THREADS")
    threads = int(env) if env else (getattr(args, "threads", None) or default_workers())
    cfg = RunConfig(command=args.command, mesh=args.mesh, threads=max(1, threads),
                    output=args.output)
    if hasattr(args, "degrees"):
        cfg.degrees = parse_degrees(args.degrees)
    for name in ("quad_degree", "mode", "seed", "tol", "samples", "expr", "norm", "operator", "inner", "sample_degree"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    return cfg.validate()


def _error(kind, err, code, cfg=None, report=None):
    out = {"schema_version": SCHEMA_VERSION, "exit_code": code,
           "error": {"type": kind, "message": str(err)}}
    if cfg is not None:
        out["config"] = asdict(cfg)
    if report is not None:
        out["report"] = report
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = None
    try:
        cfg = make_config(args)
        mesh = resolve_mesh(cfg.mesh)
        result = COMMANDS[cfg.command](cfg, mesh)
    except VerificationFailure as err:
        sys.stdout.write(_dump(_error("VerificationFailure", err, EXIT_VERIFY, cfg, err.report)))
        return EXIT_VERIFY
    except (InputError, MeshError, ExpressionError, PointLocationError, DimensionCapError,
            OSError, json.JSONDecodeError, ValueError, KeyError) as err:
        sys.stdout.write(_dump(_error(type(err).__name__, err, EXIT_INPUT, cfg)))
        return EXIT_INPUT
    if isinstance(result, str):
        text = result
    else:
        text = _dump({"schema_version": SCHEMA_VERSION, "config": asdict(cfg), **result})
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
