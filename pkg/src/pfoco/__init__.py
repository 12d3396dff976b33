"""Projection-free online convex optimization under long-term stochastic
constraints: LMO-based domains, perturbed-leader and conditional-gradient
oracles, two primal-dual drivers, built-in benchmark problems, and a
sweep harness."""

from ._kernels import BACKEND as kernel_backend
from .blocked import (BlockedParams, RunLog, block_dual_update,
                      derive_blocked_params, run_blocked)
from .domains import (Box, Domain, L1Ball, NuclearBall, NullMatrixError, Point,
                      Simplex, power_iteration)
from .ftpl import FollowPerturbedLeader, policy_delta
from .functions import (NON_SMOOTH, DualState, ProblemBounds, RoundFunctions,
                        aug_lagrangian_value, dual_grad, penalized_grad)
from .meta_fw import (MetaFwParams, derive_meta_fw_params, dual_update, fw_step,
                      primal_update, run_meta_fw)
from .metrics import (RoundRecord, RunSummary, prepare_metric, regret_curve,
                      slope_fit, violation_curve, violation_slope_policy)
from .ocg import OnlineConditionalGradient, OracleMeta, ocg_factory, regret_audit
from .problems import (BenchmarkResult, MatrixCompletionInstance, OfflineProblem,
                       StochasticQuadratic, benchmark_solve,
                       gen_matrix_completion)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BenchmarkResult",
    "BlockedParams",
    "Box",
    "Domain",
    "DualState",
    "FollowPerturbedLeader",
    "L1Ball",
    "MatrixCompletionInstance",
    "MetaFwParams",
    "NON_SMOOTH",
    "NuclearBall",
    "NullMatrixError",
    "OfflineProblem",
    "OnlineConditionalGradient",
    "OracleMeta",
    "Point",
    "ProblemBounds",
    "RoundFunctions",
    "RoundRecord",
    "RunLog",
    "RunSummary",
    "Simplex",
    "StochasticQuadratic",
    "aug_lagrangian_value",
    "benchmark_solve",
    "block_dual_update",
    "derive_blocked_params",
    "derive_meta_fw_params",
    "dual_grad",
    "dual_update",
    "fw_step",
    "gen_matrix_completion",
    "kernel_backend",
    "ocg_factory",
    "penalized_grad",
    "policy_delta",
    "power_iteration",
    "prepare_metric",
    "primal_update",
    "regret_audit",
    "regret_curve",
    "run_blocked",
    "run_meta_fw",
    "slope_fit",
    "violation_curve",
    "violation_slope_policy",
]
