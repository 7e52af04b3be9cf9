"""Scalar arithmetic shared by the float64 and exact rational code paths.

Exact values are carried as ``gmpy2.mpq`` in numpy object arrays; the
same numpy expressions then run in either arithmetic.
"""
from fractions import Fraction
from numbers import Rational

import numpy as np
from gmpy2 import mpq
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

FLOAT = "float"
RATIONAL = "rational"
MODES = (FLOAT, RATIONAL)

#: relative tolerance for zero tests in float mode
FLOAT_ZERO_TOL = 1e-9


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def rational(x):
    """Exact rational from an int, float, Fraction, mpq or 'p/q' string."""
    if isinstance(x, str):
        return mpq(Fraction(x))
    if isinstance(x, (float, np.floating)):
        return mpq(float(x))
    if isinstance(x, (int, np.integer)):
        return mpq(int(x))
    if isinstance(x, Rational) or type(x) is type(mpq(0)):
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def exact_array(a):
    """Object array of mpq with the shape of ``a``."""
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = rational(x)
    return out


def to_float(a):
    return np.asarray(a, dtype=object).astype(float) if np.asarray(a).dtype == object \
        else np.asarray(a, dtype=float)


def convert(a, mode):
    """Cast an exact (object) array to the working arithmetic of ``mode``."""
    if check_mode(mode) == FLOAT:
        return to_float(a)
    return a if np.asarray(a).dtype == object else exact_array(a)


def zeros(shape, mode):
    if check_mode(mode) == FLOAT:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(mpq(0))
    return out


def mode_of(values):
    return RATIONAL if np.asarray(values).dtype == object else FLOAT


def zero_tolerance(values, mode=None):
    """Absolute tolerance for "is zero" tests on data scaled like ``values``."""
    mode = mode or mode_of(values)
    if mode == RATIONAL:
        return 0
    values = np.asarray(values, dtype=float)
    return FLOAT_ZERO_TOL * (float(np.abs(values).max()) if values.size else 0.0)


def _domain_matrix(a):
    a = exact_array(a)
    rows, cols = a.shape
    return DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in a],
                        (rows, cols), QQ)


def _from_domain(d):
    return np.array([[mpq(x) for x in row] for row in d.to_list()], dtype=object)


def exact_inverse(a):
    """Exact inverse of a square rational matrix."""
    return _from_domain(_domain_matrix(a).inv())


def exact_solve(a, b):
    """Exact solution of ``a @ x = b``; ``b`` may be a vector or a matrix."""
    b = np.asarray(b, dtype=object)
    vec = b.ndim == 1
    rhs = b.reshape(len(b), -1)
    x = _from_domain(_domain_matrix(a).lu_solve(_domain_matrix(rhs)))
    return x[:, 0] if vec else x


def exact_rank(a):
    return _domain_matrix(a).rank()


def fmt(x):
    """JSON-friendly scalar: floats pass through, rationals become 'p/q'."""
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    q = rational(x)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_array(values):
    return [fmt(x) for x in np.asarray(values).ravel()]
