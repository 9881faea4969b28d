"""esqoe: QoE-driven allocation of crowdsourced wireless energy services.

A microcell owner collects energy services offered by provider devices and
energy requests from consumer devices, then assigns services to time slots
to maximize an importance-weighted quality-of-experience metric.  Provider
willingness per slot comes from CP-net preference rankings; allocations are
priced through the owner's incentive model.

The allocation inner loop runs on a compiled Cython kernel when available
and on a pure-Python twin otherwise; see ``kernel_backend()``.
"""

from .allocation import (
    STRATEGIES,
    AllocationPlan,
    StrategyInput,
    compose_demand_priority,
    compose_fcfs,
    compose_importance,
    kernel_backend,
    use_kernel,
    validate_plan,
)
from .bench import BenchConfig, BenchRecord, run_bench
from .cpnet import CPNet, OutcomeSlotMap, dominates, optimal_outcome, rank_outcomes, to_ptp
from .incentive import RewardQuote, pref_rank, reward
from .metrics import QoEReport, fulfillment, qoe, total_reward
from .model import (
    TOLERANCE,
    BusinessModel,
    EnergyDemandDistribution,
    EnergyRequest,
    EnergyService,
    Horizon,
    IncentiveModel,
    Instance,
    ProviderTemporalPreferences,
    aggregate_edd,
    build_horizon,
)
from .workload import GenParams, generate, load_instance, save_instance

__version__ = "0.1.0"

__all__ = [
    "STRATEGIES",
    "AllocationPlan",
    "BenchConfig",
    "BenchRecord",
    "BusinessModel",
    "CPNet",
    "EnergyDemandDistribution",
    "EnergyRequest",
    "EnergyService",
    "GenParams",
    "Horizon",
    "IncentiveModel",
    "Instance",
    "OutcomeSlotMap",
    "ProviderTemporalPreferences",
    "QoEReport",
    "RewardQuote",
    "StrategyInput",
    "TOLERANCE",
    "aggregate_edd",
    "build_horizon",
    "compose_demand_priority",
    "compose_fcfs",
    "compose_importance",
    "dominates",
    "fulfillment",
    "generate",
    "kernel_backend",
    "load_instance",
    "optimal_outcome",
    "pref_rank",
    "qoe",
    "rank_outcomes",
    "reward",
    "run_bench",
    "save_instance",
    "to_ptp",
    "total_reward",
    "use_kernel",
    "validate_plan",
]
