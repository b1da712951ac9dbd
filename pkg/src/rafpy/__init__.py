"""
Copyright (c) 2025 Kai Germaschewski. All rights reserved.

rafpy: matrix-free reweighted amplitude flow for phase retrieval
"""

from __future__ import annotations

from . import util
from ._version import version as __version__
from .experiments import Experiment, ExperimentReport, SweepSpec, run
from .init import InitConfig, InitResult, initialize, power_method
from .metrics import EvalReport, distance, evaluate
from .sensing import (
    ProblemInstance,
    SensingModel,
    Variant,
    apply_adjoint,
    apply_forward,
    measure,
    sample_instance,
    sample_model,
    sample_signal,
)
from .solver import (
    SolverConfig,
    SolverResult,
    TraceRecord,
    WeightScheme,
    compute_weights,
    generalized_gradient,
    loss,
    solve,
    step,
)

__all__ = [
    "EvalReport",
    "Experiment",
    "ExperimentReport",
    "InitConfig",
    "InitResult",
    "ProblemInstance",
    "SensingModel",
    "SolverConfig",
    "SolverResult",
    "SweepSpec",
    "TraceRecord",
    "Variant",
    "WeightScheme",
    "__version__",
    "apply_adjoint",
    "apply_forward",
    "compute_weights",
    "distance",
    "evaluate",
    "generalized_gradient",
    "initialize",
    "loss",
    "measure",
    "power_method",
    "run",
    "sample_instance",
    "sample_model",
    "sample_signal",
    "solve",
    "step",
    "util",
]
