"""Global numerical tolerances, collected in one place."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    relative: float = 1e-9            # default check tolerance
    matrix_identity: float = 1e-10    # extracted order-k matrix vs closed form
    rank: float = 1e-10               # singular value cut, relative to the largest
    degeneracy: float = 1e-12         # |S| below this fraction of sum |w̄w| is degenerate
    det_match: float = 1e-10
    interpolation_holdout: float = 1e-8
    root_cluster: float = 1e-6
    root_grouping: float = 0.35       # radius used to attach eigenvalues to an integer
    saturation: float = 1e-14


TOL = Tolerances()
