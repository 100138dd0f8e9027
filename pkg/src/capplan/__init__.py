"""Load flow, loss-sensitivity ranking and capacitor sizing toolkit.

Typical use: parse or build a :class:`Network`, run :func:`solve` for the
operating point, rank compensation candidates with :func:`loss_sensitivity`
and :func:`select_candidates`, then let :func:`run_placement` size shunt
capacitors against the annual cost of losses.
"""

from .cdf import parse_network, parse_network_file
from .config import RunConfig, VoltageLimits, load_config, parse_config
from .errors import (CapplanError, CdfParseError, ConfigError,
                     ConvergenceError, SolverError, ValidationError)
from .network import (AdmittanceMatrix, Branch, Bus, BusKind, Network,
                      apply_capacitors, branch_admittances, build_ybus,
                      total_reactive_load, with_voltage_limits)
from .placement import (CapacitorPlan, CostReport, PenaltyWeights,
                        PlacementResult, Tariffs, evaluate_plan,
                        penalized_fitness, run_placement)
from .power_flow import (BranchFlow, PowerFlowSolution, PowerFlowState,
                         SolverOptions, build_jacobian, compute_branch_flows,
                         compute_injections, compute_mismatch,
                         flat_start_state, mismatch_order, solve,
                         total_losses)
from .pso import (OptimizationResult, Particle, PsoParams, Swarm, initialize,
                  optimize, step)
from .sensitivity import (CandidateSet, LossSensitivityRecord,
                          SensitivityConfig, loss_sensitivity,
                          select_candidates)
from . import cases

__version__ = "0.1.0"

__all__ = [
    "AdmittanceMatrix", "Branch", "BranchFlow", "Bus", "BusKind",
    "CandidateSet", "CapacitorPlan", "CapplanError", "CdfParseError",
    "ConfigError", "ConvergenceError", "CostReport", "LossSensitivityRecord",
    "Network", "OptimizationResult", "Particle", "PenaltyWeights",
    "PlacementResult", "PowerFlowSolution", "PowerFlowState", "PsoParams",
    "RunConfig", "SensitivityConfig", "SolverError", "SolverOptions",
    "Swarm", "Tariffs", "ValidationError", "VoltageLimits",
    "apply_capacitors", "branch_admittances", "build_jacobian", "build_ybus",
    "cases", "compute_branch_flows", "compute_injections", "compute_mismatch",
    "evaluate_plan", "flat_start_state", "initialize", "load_config",
    "loss_sensitivity", "mismatch_order", "optimize", "parse_config",
    "parse_network", "parse_network_file", "penalized_fitness",
    "run_placement", "select_candidates", "solve", "step",
    "total_losses", "total_reactive_load", "with_voltage_limits",
]
