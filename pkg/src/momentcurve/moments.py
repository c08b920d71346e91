"""From matrix traces to eigenvalue configurations.

A real orthogonal ``(2n+1) x (2n+1)`` matrix has eigenvalues ``det`` and
``exp(+-i theta_j)``, so ``tr(A^j) = det^j + 2 sum_i T_j(cos theta_i)`` with
``T_j`` the Chebyshev polynomials.  Undoing the Chebyshev triangle turns the
first three traces into the power sums ``x_j = sum_i t_i^j`` of the numbers
``t_i = cos theta_i`` in [-1, 1].

Recovering the ``t_i`` from three power sums is underdetermined for n > 3.
The solution set is explored one coordinate at a time: the feasible values
of ``t_n`` are those for which the remaining power sums stay inside the
Minkowski sum of ``n - 1`` curve segments, which the membership test in
:mod:`momentcurve.region` decides.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from . import kernel, roots
from .intervals import IntervalSet
from .kernel import Infeasible
from .region import RegionConfig, WitnessTuple, member_many
from .tolerance import DEFAULT_TOL, Tolerance

BREAKPOINT_RADIUS = 1e-8
# slack on |root| <= 1 before giving up on a leaf
ROOT_CLAMP = 1e-6


@dataclass(frozen=True)
class TraceInput:
    dim: int
    traces: Tuple[float, float, float]
    det: Optional[int] = None

    def __post_init__(self):
        if self.dim < 3 or self.dim % 2 == 0:
            raise ValueError(f"dimension must be odd and >= 3, got {self.dim}")
        if len(self.traces) != 3:
            raise ValueError("need exactly three traces")
        if self.det not in (None, 1, -1):
            raise ValueError(f"det must be +1 or -1, got {self.det}")
        if any(abs(t) > self.dim * (1 + 1e-12) for t in self.traces):
            raise ValueError(f"|tr(A^j)| cannot exceed the dimension {self.dim}")

    @property
    def n(self):
        return (self.dim - 1) // 2


@dataclass(frozen=True)
class MomentVector:
    n: int
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    def as_tuple(self):
        return (self.x1, self.x2, self.x3)

    def is_admissible(self, eps=1e-9):
        n, e = self.n, eps * max(1, self.n)
        return abs(self.x1) <= n + e and -e <= self.x2 <= n + e and abs(self.x3) <= n + e

    def minus(self, t):
        return MomentVector(self.n - 1, self.x1 - t, self.x2 - t * t, self.x3 - t**3)


def power_sums(ts):
    ts = np.asarray(ts, dtype=float)
    return tuple(float(np.sum(ts**j)) for j in (1, 2, 3))


def traces_from_angles(thetas, det):
    """Forward map: traces of A, A^2, A^3 for the given rotation angles."""
    thetas = np.asarray(thetas, dtype=float)
    return tuple(det**j + 2 * float(np.sum(np.cos(j * thetas))) for j in (1, 2, 3))


def traces_to_power_sums(ti: TraceInput, tol: Tolerance = DEFAULT_TOL):
    """Power sums of ``cos(theta_i)`` for each admissible determinant sign.

    Raises :class:`Infeasible` when neither sign gives admissible power sums.
    """
    n = ti.n
    out = []
    for det in (ti.det,) if ti.det is not None else (1, -1):
        m1, m2, m3 = ((tr - det**j) / 2 for j, tr in enumerate(ti.traces, start=1))
        # T1 = x, T2 = 2x^2 - 1, T3 = 4x^3 - 3x
        mv = MomentVector(n, m1, (m2 + n) / 2, (m3 + 3 * m1) / 4)
        if mv.is_admissible(tol.eps):
            out.append((det, mv))
    if not out:
        raise Infeasible(f"no determinant sign gives admissible power sums for {ti.traces}")
    return out


# --------------------------------------------------------------------------
# exact recovery for n <= 3


def _cubic_roots(e1, e2, e3):
    """Real roots of x^3 - e1 x^2 + e2 x - e3, or None if two are complex."""
    shift = e1 / 3
    p = e2 - e1 * e1 / 3
    q = -2 * e1**3 / 27 + e1 * e2 / 3 - e3
    if abs(p) <= 1e-14 * max(1.0, e1 * e1, abs(e2)):
        # (near) triple root; anything else is caught by the moment check
        return [shift] * 3
    if p > 0:
        return None
    r = 2 * math.sqrt(-p / 3)
    # |arg| > 1 means a complex pair; clamping yields the nearest double root
    # and the caller's moment check rejects it if it is not a solution
    arg = 3 * q / (2 * p) * math.sqrt(-3 / p)
    phi = math.acos(max(-1.0, min(1.0, arg))) / 3
    return sorted(shift + r * math.cos(phi - 2 * math.pi * j / 3) for j in range(3))


def _candidate_roots(mv: MomentVector):
    x1, x2, x3 = mv.as_tuple()
    if mv.n == 1:
        return [x1]
    if mv.n == 2:
        # t^2 - e1 t + e2 with e2 = (x1^2 - x2) / 2
        disc = 2 * x2 - x1 * x1
        if disc < -ROOT_CLAMP * max(1.0, x2):
            return None
        h = math.sqrt(max(disc, 0.0)) / 2
        return [x1 / 2 - h, x1 / 2 + h]
    if mv.n == 3:
        e1 = x1
        e2 = (x1 * x1 - x2) / 2
        e3 = (x1**3 - 3 * x1 * x2 + 2 * x3) / 6
        return _cubic_roots(e1, e2, e3)
    raise ValueError(f"exact recovery needs n <= 3, got n={mv.n}")


def solve_exact(mv: MomentVector, tol: Tolerance = DEFAULT_TOL) -> List[WitnessTuple]:
    """All solutions (at most one multiset) when n <= 3.

    For n = 3 the power sums fix the elementary symmetric polynomials
    (Newton's identities) and the t_i are the roots of the resulting cubic.
    For n < 3 the leading moments determine the t_i and the rest must agree.
    """
    cand = _candidate_roots(mv)
    if cand is None:
        return []
    if any(abs(t) > 1 + ROOT_CLAMP for t in cand):
        return []

    def error(ts):
        return max(abs(a - b) for a, b in zip(power_sums(ts), mv.as_tuple()))

    # a near-multiple root splits into values off by ~sqrt(eps); the cluster
    # mean is the better estimate whenever it fits the moments to roundoff
    raw = [min(1.0, max(-1.0, t)) for t in cand]
    merged = [min(1.0, max(-1.0, t)) for t in _merge_clusters(cand)]
    ts = merged if error(merged) <= error(raw) + 1e-14 * max(1, mv.n) else raw
    if error(ts) > 1e-7 * max(1, mv.n):
        return []
    return [WitnessTuple.from_pairs([(t, 1) for t in ts])]


def _merge_clusters(ts, radius=ROOT_CLAMP):
    ts = sorted(ts)
    groups = [[ts[0]]]
    for t in ts[1:]:
        if t - groups[-1][-1] <= radius:
            groups[-1].append(t)
        else:
            groups.append([t])
    return [sum(g) / len(g) for g in groups for _ in g]


def solve_exact_n3(mv: MomentVector, tol: Tolerance = DEFAULT_TOL) -> List[WitnessTuple]:
    if mv.n != 3:
        raise ValueError(f"solve_exact_n3 needs n == 3, got n={mv.n}")
    return solve_exact(mv, tol)


# --------------------------------------------------------------------------
# feasible values of the last coordinate


def _restricted_polynomials(mv: MomentVector):
    """Every polynomial of the membership predicate for n - 1, as a polynomial in t."""
    m = mv.n - 1
    t = Polynomial([0.0, 1.0])
    X, Y, Z = mv.x1 - t, mv.x2 - t**2, mv.x3 - t**3
    polys = [m - X, m + X, Y, m - Y, m - Z, m + Z]
    for j in range(1, m):
        a = m - j - 1
        # upper sheet j: weights (j, 1), shifted by a(1, 1, 1)
        qx, qy, qz = X - a, Y - a, Z - a
        polys += [
            j + (qx + j) ** 2 - qy,
            qy - qx**2 / (j + 1),
            1 + (qx - 1) ** 2 / j - qy,
            kernel.vertex_z(j, 1, qx, qy) - qz,
            kernel.eval_f(j, 1, qx, qy, qz),
        ]
        # lower sheet j: weights (1, j), shifted by a(-1, 1, -1)
        qx, qy, qz = X + a, Y - a, Z + a
        polys += [
            j + (qx - j) ** 2 - qy,
            qy - qx**2 / (j + 1),
            1 + (qx + 1) ** 2 / j - qy,
            kernel.vertex_z(1, j, qx, qy) - qz,
            kernel.eval_f(1, j, qx, qy, qz),
        ]
    return polys


def breakpoints(mv: MomentVector, tol: Tolerance = DEFAULT_TOL):
    found = []
    for poly in _restricted_polynomials(mv):
        found += roots.real_roots(poly.coef, -1.0, 1.0, tol.root_eps)
    inner = [r for r in found if -1 + BREAKPOINT_RADIUS < r < 1 - BREAKPOINT_RADIUS]
    return [-1.0, *roots.dedupe(sorted(inner), BREAKPOINT_RADIUS), 1.0]


def feasible_tn(mv: MomentVector, tol: Tolerance = DEFAULT_TOL) -> IntervalSet:
    """Values ``t`` in [-1, 1] such that ``x - (t, t^2, t^3)`` is attainable by n - 1 numbers.

    Between consecutive breakpoints (real roots of every polynomial in the
    membership predicate) the verdict is constant, so one midpoint decides
    each open piece; breakpoints are tested on their own.
    """
    if mv.n < 4:
        raise ValueError("feasible_tn needs n >= 4; use solve_exact for n <= 3")
    bps = np.array(breakpoints(mv, tol))
    mids = 0.5 * (bps[:-1] + bps[1:])
    probe = np.empty(2 * len(bps) - 1)
    probe[0::2] = bps
    probe[1::2] = mids
    pts = np.stack([mv.x1 - probe, mv.x2 - probe**2, mv.x3 - probe**3], axis=1)
    ok = member_many(RegionConfig(mv.n - 1, tol), pts)

    # a feasible open piece contributes its closure (the set is closed)
    pieces = [(b, b) for b, good in zip(bps, ok[0::2]) if good]
    pieces += [(lo, hi) for lo, hi, good in zip(bps, bps[1:], ok[1::2]) if good]
    return IntervalSet.from_pieces(pieces)


# --------------------------------------------------------------------------
# recursive sampling of the solution set


@dataclass
class SolveNode:
    level: int
    moments: Tuple[float, float, float]
    feasible: Optional[IntervalSet] = None
    children: List[Tuple[float, "SolveNode"]] = field(default_factory=list)
    leaf_solutions: Optional[List[WitnessTuple]] = None
    truncated: bool = False

    @property
    def empty(self):
        if self.leaf_solutions is not None:
            return not self.leaf_solutions
        return not self.children and not self.truncated

    def solutions(self, prefix=()):
        """Full tuples (sampled prefix + leaf multiset) reachable from this node."""
        if self.leaf_solutions is not None:
            for w in self.leaf_solutions:
                yield WitnessTuple.from_pairs([(t, 1) for t in (*prefix, *w.values())])
        for t, child in self.children:
            yield from child.solutions((*prefix, t))

    def to_dict(self):
        d = {"level": self.level, "moments": list(self.moments)}
        if self.feasible is not None:
            d["feasible"] = self.feasible.to_list()
            d["degenerate"] = bool(self.feasible.degenerate())
        d["children"] = [{"t": t, "node": c.to_dict()} for t, c in self.children]
        if self.leaf_solutions is not None:
            d["leaf_solutions"] = [w.to_list() for w in self.leaf_solutions]
        if self.truncated:
            d["truncated"] = True
        return d


def sample_points(iset: IntervalSet, cap: int):
    """Endpoints first, then midpoints, then repeated halving, at most ``cap`` values."""
    if cap < 1:
        raise ValueError("need at least one sample per level")
    chosen = []

    def add(v):
        if len(chosen) < cap and all(abs(v - c) > BREAKPOINT_RADIUS for c in chosen):
            chosen.append(float(v))

    for lo, hi in iset:
        add(lo)
        add(hi)
    # each refinement round halves every gap between already chosen points
    grids = [[lo, hi] for lo, hi in iset if hi - lo > BREAKPOINT_RADIUS]
    while len(chosen) < cap and grids:
        nxt = []
        for g in grids:
            pts = [g[0]]
            for a, b in zip(g, g[1:]):
                m = 0.5 * (a + b)
                add(m)
                pts += [m, b]
            nxt.append(pts)
        grids = nxt
        if max(b - a for g in grids for a, b in zip(g, g[1:])) < BREAKPOINT_RADIUS:
            break
    return sorted(chosen)


def solve_recursive(
    mv: MomentVector,
    depth_budget: Optional[int] = None,
    samples_per_level: int = 3,
    tol: Tolerance = DEFAULT_TOL,
) -> SolveNode:
    """Sampled tree of solutions of the three-moment problem.

    ``depth_budget`` caps how many coordinates are peeled off by sampling
    (None: all the way down to the exact n = 3 solve).  Branches whose
    subtree turns out empty are dropped.
    """
    if mv.n < 3:
        raise ValueError("solve_recursive needs n >= 3; use solve_exact")
    if samples_per_level < 1:
        raise ValueError("samples_per_level must be >= 1")
    node = SolveNode(mv.n, mv.as_tuple())
    if mv.n == 3:
        node.leaf_solutions = solve_exact(mv, tol)
        return node
    node.feasible = feasible_tn(mv, tol)
    if depth_budget is not None and depth_budget <= 0:
        node.truncated = bool(node.feasible)
        return node
    budget = None if depth_budget is None else depth_budget - 1
    for t in sample_points(node.feasible, samples_per_level) if node.feasible else []:
        child = solve_recursive(mv.minus(t), budget, samples_per_level, tol)
        if not child.empty:
            node.children.append((t, child))
    return node
