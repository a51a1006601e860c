"""Restricted low-rank approximation: nearest rank-K matrix inside a convex set."""
from .admm import (AdmmConfig, AdmmState, RlraProblem, SolveReport, Termination, admm_solve,
                   admm_step_convex_first, admm_step_rank_first, recover_rank1_vector,
                   x_update_target)
from .baselines import BaselineReport, adp_solve, nmf_solve, tsvd_baseline
from .constraints import (Box, ConstraintSpec, FixedEntries, HankelStructure, Intersection,
                          NonNegative, ProjectionResult, PsdCone, ToeplitzStructure,
                          TraceHalfSpace, TraceHyperplane, Unconstrained, membership, project)
from .errors import EnumerationError, ValidationError
from .fixed_points import (FixedPointSet, HMapContext, candidate_limit_set,
                           enumerate_fixed_points, is_fixed_point, map_H)
from .linalg import SvdTriple, frob_dist, numerical_rank, svd, truncated_svd

__version__ = "0.1.0"
