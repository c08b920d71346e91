"""Membership, z-range and boundary classification for the Minkowski sum of
``n`` twisted-cubic segments ``{(t, t^2, t^3) : -1 <= t <= 1}``.

The set is an "oyster": an upper and a lower shell over a common planar
region ``bflat``.  Each shell is a union of ``n - 1`` ridge sheets; sheet ``k``
of the upper shell is ``k c(s) + c(t) + (n-k-1)(1, 1, 1)`` and sheet ``l`` of
the lower shell is ``c(s) + l c(t) + (n-l-1)(-1, 1, -1)``, with
``-1 <= s <= t <= 1``.

Functions with a ``_many`` suffix take an ``(N, 2)`` or ``(N, 3)`` array and
return arrays; the others are scalar conveniences built on them.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import kernel
from .kernel import Infeasible
from .tolerance import DEFAULT_TOL, Tolerance, slack

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class RegionConfig:
    n: int
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"RegionConfig needs an integer n >= 3, got {self.n!r}")

    @property
    def band(self) -> float:
        """Half-width of the z band treated as lying on a shell."""
        return 10 * self.tol.eps * max(1, self.n**3)


class Flat(str, Enum):
    INSIDE = "Inside"
    ON_BOUNDARY = "OnBoundary"
    OUTSIDE = "Outside"


class Verdict(str, Enum):
    OUTSIDE = "Outside"
    INTERIOR = "Interior"
    UPPER = "BoundaryUpper"
    LOWER = "BoundaryLower"
    RIM = "BoundaryRim"


@dataclass(frozen=True)
class SheetIndex:
    sign: str
    index: int
    shift: int

    def to_dict(self):
        return {"sign": self.sign, "index": self.index, "shift": self.shift}


@dataclass(frozen=True)
class ZRange:
    z_minus: float
    z_plus: float
    upper_sheet: SheetIndex
    lower_sheet: SheetIndex


@dataclass(frozen=True)
class WitnessTuple:
    """A multiset of parameters in [-1, 1] as sorted ``(value, multiplicity)`` pairs."""

    pairs: tuple

    @classmethod
    def from_pairs(cls, pairs, merge_tol=1e-9):
        items = sorted((float(v), int(m)) for v, m in pairs if m > 0)
        merged = []
        for v, m in items:
            if merged and abs(v - merged[-1][0]) <= merge_tol:
                pv, pm = merged[-1]
                if abs(pv) == 1.0:
                    nv = pv
                elif abs(v) == 1.0:
                    nv = v
                else:
                    nv = (pv * pm + v * m) / (pm + m)
                merged[-1] = (nv, pm + m)
            else:
                merged.append((v, m))
        return cls(tuple(merged))

    @property
    def n(self) -> int:
        return sum(m for _, m in self.pairs)

    def values(self):
        return [v for v, m in self.pairs for _ in range(m)]

    def power_sums(self):
        return tuple(sum(m * v**j for v, m in self.pairs) for j in (1, 2, 3))

    def free_values(self):
        """Entries other than -1 and 1."""
        return [v for v, _ in self.pairs if abs(v) != 1.0]

    def to_list(self):
        return [[v, m] for v, m in self.pairs]


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: Optional[WitnessTuple] = None
    z_range: Optional[ZRange] = None


def _as_points(points, dim):
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[-1] != dim:
        raise ValueError(f"expected points with {dim} coordinates, got shape {arr.shape}")
    return arr


# --------------------------------------------------------------------------
# planar region


def _bflat_constraints(n, x, y):
    """Rows of (value, scale) for the n + 1 inequalities ``value >= 0``."""
    rows = [(n * y - x**2, np.maximum(np.abs(n * y), x**2))]
    for i in range(n):
        sq = (x + 2 * i - (n - 1)) ** 2
        rows.append((n - 1 + sq - y, np.maximum(n - 1 + sq, np.abs(y))))
    return rows


def bflat_status_many(cfg: RegionConfig, xy):
    """Return ``(inside, on_boundary)`` boolean arrays; inside includes the boundary."""
    xy = _as_points(xy, 2)
    x, y = xy[:, 0], xy[:, 1]
    inside = np.ones(len(xy), bool)
    touching = np.zeros(len(xy), bool)
    for value, scale in _bflat_constraints(cfg.n, x, y):
        sl = cfg.tol.eps * np.maximum(1.0, scale)
        inside &= value >= -sl
        touching |= np.abs(value) <= sl
    return inside, inside & touching


def bflat_contains(cfg: RegionConfig, p2) -> Flat:
    inside, boundary = bflat_status_many(cfg, [p2])
    if not inside[0]:
        return Flat.OUTSIDE
    return Flat.ON_BOUNDARY if boundary[0] else Flat.INSIDE


# --------------------------------------------------------------------------
# sheets


def _shift(n, idx):
    return n - idx - 1


def _sheet_blocks(cfg: RegionConfig, x, y, sign):
    """(N, n-1) mask: column j says (x, y) is in the projection of sheet j+1."""
    n, tol = cfg.n, cfg.tol
    cols = []
    for idx in range(1, n):
        a = _shift(n, idx)
        if sign == UPPER:
            qx, qy = x - a, y - a
            c1 = idx + (qx + idx) ** 2 - qy
            c3 = 1 + (qx - 1) ** 2 / idx - qy
        else:
            qx, qy = x + a, y - a
            c1 = idx + (qx - idx) ** 2 - qy
            c3 = 1 + (qx + 1) ** 2 / idx - qy
        c2 = qy - qx**2 / (idx + 1)
        ok = (
            (c1 >= -slack(tol, qy, c1 + qy))
            & (c2 >= -slack(tol, qy, qx**2 / (idx + 1)))
            & (c3 >= -slack(tol, qy, c3 + qy))
        )
        cols.append(ok)
    return np.stack(cols, axis=1)


def _sheet_params(cfg, x, y, idx, sign):
    """(s, t, ok) on sheet ``idx`` (array) of the given shell."""
    a = _shift(cfg.n, idx)
    if sign == UPPER:
        return kernel.solve_st_arrays(idx, 1, x - a, y - a, cfg.tol)
    return kernel.solve_st_arrays(1, idx, x + a, y - a, cfg.tol)


def _shell_z(cfg, s, t, idx, sign):
    a = _shift(cfg.n, idx)
    if sign == UPPER:
        return idx * s**3 + t**3 + a
    return s**3 + idx * t**3 - a


def _locate_many(cfg, x, y, sign):
    """Smallest sheet index whose block holds and whose (s, t) solve succeeds.

    Returns ``(idx, s, t, ok)``; idx is 0 where no sheet fits.
    """
    blocks = _sheet_blocks(cfg, x, y, sign)
    N = len(x)
    idx = np.zeros(N, int)
    s = np.full(N, np.nan)
    t = np.full(N, np.nan)
    pending = np.ones(N, bool)
    for j in range(1, cfg.n):
        cand = pending & blocks[:, j - 1]
        if not cand.any():
            continue
        sj, tj, okj = _sheet_params(cfg, x[cand], y[cand], j, sign)
        hit = np.flatnonzero(cand)[okj]
        idx[hit] = j
        s[hit] = sj[okj]
        t[hit] = tj[okj]
        pending[hit] = False
    # fall back to any solvable sheet for points whose block test was marginal
    for j in range(1, cfg.n):
        if not pending.any():
            break
        sj, tj, okj = _sheet_params(cfg, x[pending], y[pending], j, sign)
        hit = np.flatnonzero(pending)[okj]
        idx[hit] = j
        s[hit] = sj[okj]
        t[hit] = tj[okj]
        pending[hit] = False
    return idx, s, t, idx > 0


def locate_sheet(cfg: RegionConfig, p2, sign=UPPER) -> SheetIndex:
    if sign not in (UPPER, LOWER):
        raise ValueError(f"sign must be {UPPER!r} or {LOWER!r}")
    inside, _ = bflat_status_many(cfg, [p2])
    if not inside[0]:
        raise Infeasible(f"{tuple(p2)} lies outside the planar region for n={cfg.n}")
    x, y = np.array([p2[0]], float), np.array([p2[1]], float)
    idx, _, _, ok = _locate_many(cfg, x, y, sign)
    if not ok[0]:
        raise Infeasible(f"no {sign} sheet contains {tuple(p2)}")
    j = int(idx[0])
    return SheetIndex(sign, j, _shift(cfg.n, j))


def z_range_many(cfg: RegionConfig, xy):
    """Vectorised z range: ``(z_minus, z_plus, k, l, ok)``."""
    xy = _as_points(xy, 2)
    x, y = xy[:, 0], xy[:, 1]
    inside, _ = bflat_status_many(cfg, xy)
    k, s, t, ok_u = _locate_many(cfg, x, y, UPPER)
    l, s2, t2, ok_l = _locate_many(cfg, x, y, LOWER)
    ok = inside & ok_u & ok_l
    z_plus = np.where(ok, _shell_z(cfg, s, t, np.maximum(k, 1), UPPER), np.nan)
    z_minus = np.where(ok, _shell_z(cfg, s2, t2, np.maximum(l, 1), LOWER), np.nan)
    return z_minus, z_plus, k, l, ok


def z_range(cfg: RegionConfig, p2) -> ZRange:
    zm, zp, k, l, ok = z_range_many(cfg, [p2])
    if not ok[0]:
        raise Infeasible(f"{tuple(p2)} lies outside the planar region for n={cfg.n}")
    n = cfg.n
    return ZRange(
        float(zm[0]),
        float(zp[0]),
        SheetIndex(UPPER, int(k[0]), _shift(n, int(k[0]))),
        SheetIndex(LOWER, int(l[0]), _shift(n, int(l[0]))),
    )


# --------------------------------------------------------------------------
# membership


def _in_box(cfg, x, y, z):
    n, e = cfg.n, cfg.tol.eps * max(1, cfg.n)
    return (np.abs(x) <= n + e) & (y >= -e) & (y <= n + e) & (np.abs(z) <= n + e)


def member_many(cfg: RegionConfig, points):
    """Semi-algebraic membership test, one boolean per row of ``points``.

    A point is in the set iff it lies under some upper sheet (``X``) and over
    some lower sheet (``Y``).  "Under sheet k" is: the shifted (x, y) is in
    the sheet's projection and z is either below the vertex of
    ``f_{k1}(x, y, .)`` or between its roots.
    """
    pts = _as_points(points, 3)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    box = _in_box(cfg, x, y, z)
    tol = cfg.tol
    in_x = np.zeros(len(pts), bool)
    in_y = np.zeros(len(pts), bool)
    # evaluate only the points that survived the cheap box guard
    sel = np.flatnonzero(box)
    xs, ys, zs = x[sel], y[sel], z[sel]
    up = _sheet_blocks(cfg, xs, ys, UPPER)
    lo = _sheet_blocks(cfg, xs, ys, LOWER)
    hx = np.zeros(len(sel), bool)
    hy = np.zeros(len(sel), bool)
    for j in range(1, cfg.n):
        a = _shift(cfg.n, j)
        qx, qy, qz = xs - a, ys - a, zs - a
        v = kernel.vertex_z(j, 1, qx, qy)
        f = kernel.eval_f(j, 1, qx, qy, qz)
        under = (qz <= v + slack(tol, qz, v)) | (
            f <= tol.eps * np.maximum(1.0, kernel.f_scale(j, 1, qx, qy, qz))
        )
        hx |= up[:, j - 1] & under

        qx, qy, qz = xs + a, ys - a, zs + a
        v = kernel.vertex_z(1, j, qx, qy)
        f = kernel.eval_f(1, j, qx, qy, qz)
        over = (qz >= v - slack(tol, qz, v)) | (
            f <= tol.eps * np.maximum(1.0, kernel.f_scale(1, j, qx, qy, qz))
        )
        hy |= lo[:, j - 1] & over
    in_x[sel] = hx
    in_y[sel] = hy
    return in_x & in_y


def member(cfg: RegionConfig, p) -> bool:
    return bool(member_many(cfg, [p])[0])


def member_small_n(n: int, p, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership for one curve (n = 1) or the sum of two (n = 2)."""
    x, y, z = map(float, p)
    if n == 1:
        t = min(1.0, max(-1.0, x))
        return all(abs(a - b) <= slack(tol, b) for a, b in ((x, t), (y, t * t), (z, t**3)))
    if n == 2:
        return bool(kernel.segment_membership(1, 1, x, y, z, tol))
    raise ValueError(f"member_small_n handles n in {{1, 2}}, got {n}")


# --------------------------------------------------------------------------
# classification and witnesses


def _upper_witness(n, k, s, t):
    return WitnessTuple.from_pairs([(s, k), (t, 1), (1.0, n - k - 1)])


def _lower_witness(n, l, s, t):
    return WitnessTuple.from_pairs([(s, 1), (t, l), (-1.0, n - l - 1)])


def _reproduction_error(w: WitnessTuple, p):
    return max(abs(a - b) for a, b in zip(w.power_sums(), p))


def shell_witness(cfg: RegionConfig, p2, sign) -> WitnessTuple:
    """Witness for the point of the given shell above/below ``p2``."""
    x, y = np.array([p2[0]], float), np.array([p2[1]], float)
    idx, s, t, ok = _locate_many(cfg, x, y, sign)
    if not ok[0]:
        raise Infeasible(f"{tuple(p2)} lies outside the planar region for n={cfg.n}")
    make = _upper_witness if sign == UPPER else _lower_witness
    return make(cfg.n, int(idx[0]), float(s[0]), float(t[0]))


def interior_witness(cfg: RegionConfig, p) -> Optional[WitnessTuple]:
    """One tuple realising ``p``, taken from a single-sample descent.

    Interior fibres are positive-dimensional, so this is *a* witness, not
    *the* witness.
    """
    from .moments import MomentVector, solve_recursive  # circular at import time

    tree = solve_recursive(MomentVector(cfg.n, *p), samples_per_level=1, tol=cfg.tol)
    return next(tree.solutions(), None)


def classify(cfg: RegionConfig, p, want_witness: bool = False) -> Classification:
    p = tuple(map(float, p))
    if not member(cfg, p):
        return Classification(Verdict.OUTSIDE)
    zr = z_range(cfg, p[:2])
    z, band = p[2], cfg.band
    if zr.z_plus - zr.z_minus <= band:
        verdict = Verdict.RIM
    elif abs(z - zr.z_plus) <= band:
        verdict = Verdict.UPPER
    elif abs(z - zr.z_minus) <= band:
        verdict = Verdict.LOWER
    else:
        verdict = Verdict.INTERIOR
    witness = None
    if want_witness and verdict is Verdict.INTERIOR:
        witness = interior_witness(cfg, p)
    elif want_witness:
        if verdict is Verdict.UPPER:
            witness = shell_witness(cfg, p[:2], UPPER)
        elif verdict is Verdict.LOWER:
            witness = shell_witness(cfg, p[:2], LOWER)
        else:
            # both shells meet on the rim; their witnesses agree up to
            # roundoff, keep whichever reproduces the point best
            candidates = [shell_witness(cfg, p[:2], sign) for sign in (UPPER, LOWER)]
            witness = min(candidates, key=lambda w: _reproduction_error(w, p))
    return Classification(verdict, witness, zr)
