"""Real root isolation for low-degree univariate polynomials.

Roots of ``p`` on ``[lo, hi]`` are found by first isolating the roots of
``p'`` (recursively), which splits the interval into pieces on which ``p`` is
monotone, and then bisecting every piece with a sign change.  Critical points
where ``|p|`` is negligible are reported too, so tangential (even
multiplicity) roots are not lost.

Coefficient sequences are lowest degree first, as in ``numpy.polynomial``.
"""

import math


def _trim(coeffs, rel=1e-14):
    c = [float(a) for a in coeffs]
    big = max((abs(a) for a in c), default=0.0)
    while c and abs(c[-1]) <= rel * big:
        c.pop()
    return c


def horner(coeffs, x):
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def derivative(coeffs):
    return [i * a for i, a in enumerate(coeffs)][1:]


def _bisect(c, a, b, fa, eps):
    while b - a > eps:
        m = 0.5 * (a + b)
        fm = horner(c, m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _quadratic_roots(c, touch):
    c0, c1, c2 = c
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        if -disc <= touch * max(c1 * c1, abs(4 * c2 * c0), 1e-300):
            return [-c1 / (2 * c2)]
        return []
    sq = math.sqrt(disc)
    # avoid cancellation: compute the larger-magnitude root first
    q = -0.5 * (c1 + math.copysign(sq, c1))
    if q == 0.0:
        return [0.0]
    return sorted({q / c2, c0 / q})


def real_roots(coeffs, lo=-1.0, hi=1.0, eps=1e-10, touch=1e-12):
    """Sorted real roots of the polynomial in ``[lo, hi]``.

    ``eps`` is the bracket width at which bisection stops; ``touch`` is the
    relative threshold below which a local extremum counts as a double root.
    """
    c = _trim(coeffs)
    deg = len(c) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [r] if lo <= r <= hi else []
    if deg == 2:
        return [r for r in _quadratic_roots(c, touch) if lo <= r <= hi]

    crit = real_roots(derivative(c), lo, hi, eps, touch)
    knots = [lo, *[r for r in crit if lo < r < hi], hi]
    scale = max(abs(a) for a in c) * max(1.0, abs(lo), abs(hi)) ** deg
    found = []
    values = [horner(c, x) for x in knots]
    for x, v in zip(knots, values):
        if abs(v) <= touch * scale:
            found.append(x)
    for (a, fa), (b, fb) in zip(zip(knots, values), zip(knots[1:], values[1:])):
        if fa != 0.0 and fb != 0.0 and (fa < 0) != (fb < 0):
            found.append(_bisect(c, a, b, fa, eps))
    return dedupe(sorted(found), eps)


def dedupe(xs, radius):
    """Collapse a sorted sequence so consecutive survivors differ by more than ``radius``."""
    out = []
    for x in xs:
        if not out or x - out[-1] > radius:
            out.append(x)
    return out
