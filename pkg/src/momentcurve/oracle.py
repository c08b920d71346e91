"""Brute-force ground truth for small n.

Every multiset of n values from a uniform grid on [-1, 1] is summed into a
point of the Minkowski sum.  The sum map is Lipschitz on [-1, 1]^n, so a point
whose distance to the nearest stored sum exceeds ``3 n h`` cannot be in the
set; stored sums themselves must all be accepted.
"""

import itertools
import math

import numpy as np
from scipy.spatial import cKDTree

from .region import RegionConfig, member_many

MAX_TUPLES = 10**7


class OracleBudgetError(RuntimeError):
    pass


def grid_size(h: float) -> int:
    """Number of grid values for step ``h``; ``2 / h`` must be an integer."""
    if not (h > 0) or not math.isfinite(h):
        raise ValueError(f"grid step must be positive, got {h}")
    steps = round(2 / h)
    if steps < 1 or abs(steps * h - 2) > 1e-9:
        raise ValueError(f"grid step {h} does not divide 2")
    return steps + 1


class GridOracle:
    def __init__(self, n: int, h: float):
        if n not in (3, 4):
            raise ValueError(f"grid oracle supports n in {{3, 4}}, got {n}")
        g = grid_size(h)
        count = math.comb(g + n - 1, n)
        if count > MAX_TUPLES:
            raise OracleBudgetError(f"{count} tuples exceeds the budget of {MAX_TUPLES}")
        self.n, self.h = n, 2 / (g - 1)
        self.grid = np.linspace(-1.0, 1.0, g)
        idx = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations_with_replacement(range(g), n)),
            dtype=np.int64,
            count=count * n,
        ).reshape(count, n)
        t = self.grid[idx]
        self.tuples = t
        self.points = np.stack([t.sum(1), (t**2).sum(1), (t**3).sum(1)], axis=1)
        self._tree = cKDTree(self.points)

    def __len__(self):
        return len(self.points)

    @property
    def lipschitz_radius(self):
        return 3 * self.n * self.h

    def nearest_distance(self, p):
        p = np.asarray(p, dtype=float)
        d, _ = self._tree.query(p)
        return d

    def agreement(self, probes, cfg: RegionConfig = None):
        """Count disagreements between the oracle and ``member_many``.

        Soundness: stored sums that are rejected.  Completeness: probes
        farther than the Lipschitz radius from every stored sum that are
        nevertheless accepted.
        """
        cfg = cfg or RegionConfig(self.n)
        sound = int((~member_many(cfg, self.points)).sum())
        probes = np.atleast_2d(np.asarray(probes, dtype=float))
        far = self.nearest_distance(probes) > self.lipschitz_radius
        accepted = member_many(cfg, probes)
        return {
            "n": self.n,
            "step": self.h,
            "tuples": len(self),
            "probes": len(probes),
            "far_probes": int(far.sum()),
            "sound_violations": sound,
            "complete_violations": int((far & accepted).sum()),
        }


def build(n: int, h: float) -> GridOracle:
    return GridOracle(n, h)


def random_probes(n: int, count: int, rng=None):
    """Uniform probes in the box [-n, n] x [-1, n + 1] x [-n, n]."""
    rng = np.random.default_rng(rng)
    lo = np.array([-n, -1.0, -n])
    hi = np.array([n, n + 1.0, n])
    return rng.uniform(lo, hi, size=(count, 3))
