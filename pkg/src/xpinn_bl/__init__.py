"""XPINN solver and benchmark harness for the Buckley-Leverett equation.

Two subnetworks on dynamically decomposed pre-/post-shock space-time
regions, coupled through a Rankine-Hugoniot interface loss, benchmarked
against four single-net PINN variants and graded against the exact entropy
solution.
"""

__version__ = "0.1.0"

from .flux import FluxModel, ModifiedFluxKind, ShockAnalysis, welge_analysis
from .losses import LossBreakdown, Mode, VariantConfig
from .network import SubnetParams, init
from .oracle import ExactSolution
from .sampling import CollocationPlan, SampleCounts, build_plan, stitch_prediction
from .training import TrainConfig, TrainingHistory, train

__all__ = [
    "FluxModel",
    "ModifiedFluxKind",
    "ShockAnalysis",
    "welge_analysis",
    "LossBreakdown",
    "Mode",
    "VariantConfig",
    "SubnetParams",
    "init",
    "ExactSolution",
    "CollocationPlan",
    "SampleCounts",
    "build_plan",
    "stitch_prediction",
    "TrainConfig",
    "TrainingHistory",
    "train",
]
