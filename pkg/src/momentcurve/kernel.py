"""Closed-form machinery for weighted sums of two twisted-cubic points.

For positive integer weights ``k, l`` the surface swept by
``k*(s, s^2, s^3) + l*(t, t^2, t^3)`` with ``-1 <= s <= t <= 1`` is cut out by
the quadratic-in-z polynomial

    f(x, y, z) = A z^2 + B(x, y) z + C(x, y)

together with a handful of inequalities.  Everything here is written with
plain arithmetic so that the coefficient functions also accept numpy arrays
and ``numpy.polynomial.Polynomial`` objects (the latter is how the moment
solver builds univariate restrictions).
"""

from typing import NamedTuple

import numpy as np

from .tolerance import DEFAULT_TOL, Tolerance, slack


class Infeasible(ValueError):
    """Raised when a point has no preimage in the requested parameter set."""


class QuadraticInZ(NamedTuple):
    A: float
    B: float
    C: float
    D: float


class ParamPair(NamedTuple):
    s: float
    t: float


def _check_weights(k, l):
    if np.any(np.asarray(k) < 1) or np.any(np.asarray(l) < 1):
        raise ValueError(f"weights must be >= 1, got k={k}, l={l}")


def eval_coeffs(k, l, x, y) -> QuadraticInZ:
    w = k + l
    A = k * l * w**2
    B = 2 * k * l * x * (2 * x**2 - 3 * w * y)
    C = (
        x**6
        - 3 * w * x**4 * y
        + 3 * (k**2 + k * l + l**2) * x**2 * y**2
        - (k - l) ** 2 * w * y**3
    )
    D = w * y - x**2
    return QuadraticInZ(A, B, C, D)


def _c_monomials(k, l, x, y):
    w = k + l
    return (
        x**6,
        3 * w * x**4 * y,
        3 * (k**2 + k * l + l**2) * x**2 * y**2,
        (k - l) ** 2 * w * y**3,
    )


def eval_f(k, l, x, y, z):
    A, B, C, _ = eval_coeffs(k, l, x, y)
    return A * z**2 + B * z + C


def f_scale(k, l, x, y, z):
    """Largest monomial magnitude entering ``eval_f``; the sign-test scale."""
    A, B, _, _ = eval_coeffs(k, l, x, y)
    return np.maximum.reduce(
        [np.abs(A * z**2), np.abs(B * z), *map(np.abs, _c_monomials(k, l, x, y))]
    )


def vertex_z(k, l, x, y):
    """z of the minimum of the parabola ``z -> f(x, y, z)``."""
    A, B, _, _ = eval_coeffs(k, l, x, y)
    return -B / (2 * A)


def segment_sum(k, l, s, t):
    return (k * s + l * t, k * s**2 + l * t**2, k * s**3 + l * t**3)


def solve_st_arrays(k, l, x, y, tol: Tolerance = DEFAULT_TOL):
    """Vectorised (s, t) reconstruction from the (x, y) projection.

    Returns ``(s, t, ok)``; entries where ``ok`` is False are NaN.  The
    feasibility test is done on squared quantities so that seams (s = -1,
    t = 1, s = t) survive roundoff, and the result is clamped into [-1, 1].
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    k = np.asarray(k)
    l = np.asarray(l)
    w = k + l
    kld = k * l * (w * y - x**2)
    lo_bound = k**2 * (w + x) ** 2
    hi_bound = l**2 * (w - x) ** 2
    sl = slack(tol, w * y, x**2, lo_bound, hi_bound) * np.maximum(k * l, 1)
    ok = (
        (np.abs(x) <= w * (1 + tol.eps))
        & (kld >= -sl)
        & (kld <= lo_bound + sl)
        & (kld <= hi_bound + sl)
    )
    root = np.sqrt(np.where(ok, np.maximum(kld, 0.0), 0.0))
    s = np.clip((k * x - root) / (w * k), -1.0, 1.0)
    t = np.clip((l * x + root) / (w * l), -1.0, 1.0)
    t = np.maximum(s, t)
    return np.where(ok, s, np.nan), np.where(ok, t, np.nan), ok


def solve_st(k: int, l: int, x: float, y: float, tol: Tolerance = DEFAULT_TOL) -> ParamPair:
    _check_weights(k, l)
    s, t, ok = solve_st_arrays(k, l, x, y, tol)
    if not ok:
        raise Infeasible(f"({x}, {y}) is not in the projection of {k}C + {l}C")
    return ParamPair(float(s), float(t))


def segment_membership(k, l, x, y, z, tol: Tolerance = DEFAULT_TOL):
    """Semi-algebraic test for ``{k c(s) + l c(t) : -1 <= s <= t <= 1}``.

    Box bounds, ``f = 0``, the bound on ``k*l*D`` and the side condition on
    which root of ``f(x, y, .)`` is taken.  Broadcasts over array inputs.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(v, float) for v in (x, y, z)))
    w = k + l
    bound = w * (1 + tol.eps)
    in_box = (np.abs(x) <= bound) & (y >= -tol.eps) & (y <= bound) & (np.abs(z) <= bound)

    on_surface = np.abs(eval_f(k, l, x, y, z)) <= tol.eps * np.maximum(1.0, f_scale(k, l, x, y, z))

    kld = k * l * (w * y - x**2)
    lo_bound = k**2 * (w + x) ** 2
    hi_bound = l**2 * (w - x) ** 2
    sl = slack(tol, w * y, x**2, lo_bound, hi_bound) * k * l
    d_ok = (kld >= -sl) & (kld <= lo_bound + sl) & (kld <= hi_bound + sl)

    v = vertex_z(k, l, x, y)
    zsl = slack(tol, z, v)
    if k < l:
        side = z <= v + zsl
    elif k == l:
        side = np.abs(z - v) <= zsl
    else:
        side = z >= v - zsl
    out = in_box & on_surface & d_ok & side
    return bool(out) if out.ndim == 0 else out
