from dataclasses import dataclass


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed subintervals of [-1, 1].

    Zero-length intervals ``[a, a]`` are allowed; they are how isolated
    feasible values (e.g. a parameter forced to 1) are represented.
    """

    intervals: tuple = ()

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.intervals:
            if not (-1.0 <= lo <= hi <= 1.0):
                raise ValueError(f"bad interval [{lo}, {hi}]")
            if prev_hi is not None and lo <= prev_hi:
                raise ValueError("intervals must be sorted and disjoint")
            prev_hi = hi

    @classmethod
    def from_pieces(cls, pieces, gap=0.0):
        """Merge possibly overlapping pieces; pieces closer than ``gap`` are joined."""
        merged = []
        for lo, hi in sorted((float(a), float(b)) for a, b in pieces):
            if merged and lo <= merged[-1][1] + gap:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        return cls(tuple(merged))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def contains(self, t, tol=0.0):
        return any(lo - tol <= t <= hi + tol for lo, hi in self.intervals)

    __contains__ = contains

    @property
    def measure(self):
        return sum(hi - lo for lo, hi in self.intervals)

    def degenerate(self, width=1e-8):
        """Intervals no wider than ``width``."""
        return [(lo, hi) for lo, hi in self.intervals if hi - lo <= width]

    def to_list(self):
        return [[lo, hi] for lo, hi in self.intervals]
