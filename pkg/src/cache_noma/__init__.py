"""Two-user cache-aided NOMA downlink: rate regions, Pareto boundaries,
delivery-time-minimal allocation, baselines and a Monte Carlo harness."""
from ._accel import BACKEND
from .baselines import NomaSolution, OmaSolution, noma_solve, oma_solve
from .caching import CacheCase, CacheSpec, InvalidCacheError, classify_case, mds_subfile_packets, subfile_volumes
from .channel import ChannelState, GeometryConfig, effective_alpha, noise_power_w, path_loss_db, sample_placement
from .delivery import (
    DeliverySolution, interference_for, powers_for_gamma, solve_case_iv, solve_delivery, solve_gamma,
    verify_lemma1,
)
from .pareto import ParetoPoint, RateProfile, feasible_p0n, linearize_constraint, pareto_sweep, solve_p0
from .region import (
    Branch, ContractError, DecodingPlan, InfeasibleOrderError, RateBounds, feasible_orders,
    power_region_contains, rate_bounds, region_contains,
)
from .sim import ExperimentConfig, TrialRecord, run_experiment, summarize

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "NomaSolution", "OmaSolution", "noma_solve", "oma_solve",
    "CacheCase", "CacheSpec", "InvalidCacheError", "classify_case", "mds_subfile_packets", "subfile_volumes",
    "ChannelState", "GeometryConfig", "effective_alpha", "noise_power_w", "path_loss_db", "sample_placement",
    "DeliverySolution", "interference_for", "powers_for_gamma", "solve_case_iv", "solve_delivery",
    "solve_gamma", "verify_lemma1",
    "ParetoPoint", "RateProfile", "feasible_p0n", "linearize_constraint", "pareto_sweep", "solve_p0",
    "Branch", "ContractError", "DecodingPlan", "InfeasibleOrderError", "RateBounds", "feasible_orders",
    "power_region_contains", "rate_bounds", "region_contains",
    "ExperimentConfig", "TrialRecord", "run_experiment", "summarize",
]
