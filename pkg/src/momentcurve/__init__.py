"""Membership, boundary and moment-recovery tools for Minkowski sums of
twisted-cubic segments ``{(t, t^2, t^3) : t in [-1, 1]}``."""

from .intervals import IntervalSet
from .kernel import Infeasible, ParamPair, QuadraticInZ, eval_coeffs, segment_membership, solve_st
from .moments import (
    MomentVector,
    SolveNode,
    TraceInput,
    feasible_tn,
    solve_exact,
    solve_exact_n3,
    solve_recursive,
    traces_to_power_sums,
)
from .region import (
    Classification,
    Flat,
    RegionConfig,
    SheetIndex,
    Verdict,
    WitnessTuple,
    ZRange,
    bflat_contains,
    classify,
    locate_sheet,
    member,
    member_many,
    z_range,
)
from .tolerance import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"
