"""Simulation and exact analysis of information cascades with fake agents.

Four independent routes to the same quantity, kept separate so they can
check one another: a random-walk engine with Monte Carlo and an exact
lattice DP, a raw-history Bayesian agent engine with an exhaustive
oracle, a comfort-zone tree iteration, and a stage-structured sequence
lower bound.
"""
from __future__ import annotations

from .errors import ParameterError, UndecidedRateError, UnsupportedRegimeError
from .model import (
    DerivedModel,
    ModelParams,
    ThresholdPoint,
    bayesian_threshold,
    cascade_thresholds,
    derive,
)
from .walk import (
    CascadeOutcome,
    MCEstimate,
    ProbInterval,
    WalkState,
    classify,
    exact_interval,
    mc_estimate,
    simulate,
    step,
)
from .agents import (
    AgentBelief,
    AgentDraw,
    decide,
    exhaustive_oracle,
    observe,
    posterior,
    simulate_agents,
)
from .approx import (
    ComfortZone,
    StageDecomposition,
    comfort_zone,
    enumerate_cascade_sequences,
    sequence_lower_bound,
    stage_decomposition,
    tree_approx,
)
from .sweep import SweepRow, SweepSpec, detect_drops, read_table, sweep_eps, write_table

__version__ = "0.1.0"

__all__ = [
    "AgentBelief",
    "AgentDraw",
    "CascadeOutcome",
    "ComfortZone",
    "DerivedModel",
    "MCEstimate",
    "ModelParams",
    "ParameterError",
    "ProbInterval",
    "StageDecomposition",
    "SweepRow",
    "SweepSpec",
    "ThresholdPoint",
    "UndecidedRateError",
    "UnsupportedRegimeError",
    "WalkState",
    "bayesian_threshold",
    "cascade_thresholds",
    "classify",
    "comfort_zone",
    "decide",
    "derive",
    "detect_drops",
    "enumerate_cascade_sequences",
    "exact_interval",
    "exhaustive_oracle",
    "mc_estimate",
    "observe",
    "posterior",
    "read_table",
    "sequence_lower_bound",
    "simulate",
    "simulate_agents",
    "stage_decomposition",
    "step",
    "sweep_eps",
    "tree_approx",
    "write_table",
    "__version__",
]
