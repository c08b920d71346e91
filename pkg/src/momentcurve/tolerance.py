from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    """Slack used by every sign test.

    ``eps`` is relative to the magnitude of the quantities being compared
    (see :func:`slack`); ``root_eps`` is the bracket width at which
    univariate root isolation stops.
    """

    eps: float = 1e-9
    root_eps: float = 1e-10

    def __post_init__(self):
        if not (self.eps > 0 and self.root_eps > 0):
            raise ValueError("tolerances must be positive")

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.eps * factor, self.root_eps * factor)


DEFAULT_TOL = Tolerance()


def slack(tol: Tolerance, *terms):
    """eps * max(1, |t| for t in terms), broadcasting over arrays."""
    scale = np.ones(np.broadcast(*terms).shape) if terms else 1.0
    for term in terms:
        scale = np.maximum(scale, np.abs(term))
    return tol.eps * scale
