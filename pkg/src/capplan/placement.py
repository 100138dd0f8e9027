"""Capacitor sizing: annual-cost objective, constraint penalties, and the
sensitivity -> swarm-search pipeline.

The objective is the yearly bill: loss tariff times real loss plus a
purchase tariff times installed kVar. Voltage-band, aggregate-size and
branch-loading limits enter the swarm's fitness as quadratic penalties so
the search space stays a plain box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import ConvergenceError, ValidationError
from .network import Network, apply_capacitors, total_reactive_load
from .power_flow import PowerFlowSolution, SolverOptions, solve
from .pso import OptimizationResult, PsoParams, optimize
from .sensitivity import (CandidateSet, SensitivityConfig, loss_sensitivity,
                          select_candidates)


@dataclass(frozen=True)
class Tariffs:
    """Annual prices: k_p in $/kW/year of loss, k_c in $/kVar/year installed."""

    k_p: float = 168.0
    k_c: float = 4.9

    def __post_init__(self) -> None:
        if self.k_p <= 0:
            raise ValueError(f"k_p must be positive, got {self.k_p}")
        if self.k_c < 0:
            raise ValueError(f"k_c must be non-negative, got {self.k_c}")

    def loss_cost(self, p_loss_kw: float) -> float:
        return self.k_p * p_loss_kw

    def capacitor_cost(self, total_kvar: float) -> float:
        return self.k_c * total_kvar


@dataclass(frozen=True)
class PenaltyWeights:
    """Quadratic penalty weights in cost units, plus the flat fitness
    assigned to plans whose power flow does not converge."""

    voltage: float = 1e6
    reactive: float = 1e6
    flow: float = 1e6
    divergence: float = 1e9

    def __post_init__(self) -> None:
        for name in ("voltage", "reactive", "flow", "divergence"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} weight must be non-negative")


@dataclass(frozen=True)
class CapacitorPlan:
    """Shunt sizes keyed by bus id, stored per-unit on the system base."""

    sizes_pu: Mapping[int, float]
    base_mva: float

    def __post_init__(self) -> None:
        sizes = {int(b): float(s) for b, s in self.sizes_pu.items()}
        for bus_id, size in sizes.items():
            if not math.isfinite(size) or size < 0:
                raise ValidationError(
                    f"capacitor size at bus {bus_id} must be >= 0, got {size}")
        object.__setattr__(self, "sizes_pu", sizes)

    @classmethod
    def empty(cls, base_mva: float) -> "CapacitorPlan":
        return cls(sizes_pu={}, base_mva=base_mva)

    @classmethod
    def from_mvar(cls, sizes_mvar: Mapping[int, float],
                  base_mva: float) -> "CapacitorPlan":
        return cls(sizes_pu={b: s / base_mva for b, s in sizes_mvar.items()},
                   base_mva=base_mva)

    @classmethod
    def from_kvar(cls, sizes_kvar: Mapping[int, float],
                  base_mva: float) -> "CapacitorPlan":
        return cls.from_mvar({b: s / 1000.0 for b, s in sizes_kvar.items()}, base_mva)

    def size_mvar(self, bus_id: int) -> float:
        return self.sizes_pu.get(bus_id, 0.0) * self.base_mva

    @property
    def total_pu(self) -> float:
        return sum(self.sizes_pu.values())

    @property
    def total_mvar(self) -> float:
        return self.total_pu * self.base_mva

    @property
    def total_kvar(self) -> float:
        return self.total_mvar * 1000.0

    def items_mvar(self) -> list[tuple[int, float]]:
        return [(b, s * self.base_mva) for b, s in sorted(self.sizes_pu.items())]

    def rounded(self, bank_step_mvar: float) -> "CapacitorPlan":
        """Snap every size to the nearest multiple of a bank step (MVar)."""
        if bank_step_mvar <= 0:
            raise ValueError(f"bank step must be positive, got {bank_step_mvar}")
        sizes = {b: round(s * self.base_mva / bank_step_mvar) * bank_step_mvar
                 for b, s in self.sizes_pu.items()}
        return CapacitorPlan.from_mvar(sizes, self.base_mva)

    def __bool__(self) -> bool:
        return any(s > 0 for s in self.sizes_pu.values())


@dataclass(frozen=True)
class CostReport:
    p_loss_kw: float
    loss_cost: float
    capacitor_cost: float
    total_cost: float
    min_voltage: float
    max_voltage: float
    penalty: float
    feasible: bool
    converged: bool
    # raw squared-violation sums, before weighting
    voltage_violation: float
    reactive_violation: float
    flow_violation: float
    bus_voltages: tuple[float, ...]


@dataclass(frozen=True)
class PlacementResult:
    plan: CapacitorPlan
    before: CostReport
    after: CostReport
    candidate_buses: CandidateSet
    trace: tuple[float, ...]
    loss_trace: tuple[float, ...]
    seed: int
    evaluations: int
    diagnostics: tuple[str, ...] = field(default=())


def _violations(network: Network, solution: PowerFlowSolution,
                plan: CapacitorPlan) -> tuple[float, float, float]:
    """Raw squared violation sums for voltage band, aggregate size, loading."""
    v_viol = 0.0
    for i, bus in enumerate(network.buses):
        v = float(solution.state.v_mag[i])
        v_viol += max(0.0, bus.v_min - v, v - bus.v_max) ** 2

    q_total = total_reactive_load(network)
    q_viol = max(0.0, plan.total_pu - q_total) ** 2

    f_viol = 0.0
    for branch, flow in zip(network.branches, solution.branch_flows):
        if branch.flow_limit is None:
            continue
        loading = max(flow.mva_from, flow.mva_to)
        f_viol += max(0.0, loading - branch.flow_limit) ** 2
    return v_viol, q_viol, f_viol


def evaluate_plan(network: Network, plan: CapacitorPlan, tariffs: Tariffs,
                  solver_options: SolverOptions | None = None,
                  weights: PenaltyWeights | None = None) -> CostReport:
    """Install the plan, solve the flow, and price the outcome."""
    if weights is None:
        weights = PenaltyWeights()
    compensated = apply_capacitors(network, plan)
    solution = solve(compensated, solver_options)

    p_loss_kw = float(solution.p_loss_total) * network.base_mva * 1000.0
    loss_cost = tariffs.loss_cost(p_loss_kw)
    capacitor_cost = tariffs.capacitor_cost(plan.total_kvar)
    v_viol, q_viol, f_viol = _violations(network, solution, plan)
    v_viol, q_viol, f_viol = float(v_viol), float(q_viol), float(f_viol)

    if solution.converged:
        penalty = (weights.voltage * v_viol + weights.reactive * q_viol
                   + weights.flow * f_viol)
    else:
        penalty = weights.divergence
    return CostReport(
        p_loss_kw=p_loss_kw,
        loss_cost=loss_cost,
        capacitor_cost=capacitor_cost,
        total_cost=loss_cost + capacitor_cost,
        min_voltage=float(solution.state.v_mag.min()),
        max_voltage=float(solution.state.v_mag.max()),
        penalty=penalty,
        feasible=solution.converged and penalty == 0.0,
        converged=solution.converged,
        voltage_violation=v_viol,
        reactive_violation=q_viol,
        flow_violation=f_viol,
        bus_voltages=tuple(float(v) for v in solution.state.v_mag),
    )


def penalized_fitness(report: CostReport,
                      weights: PenaltyWeights | None = None) -> float:
    """Annual cost plus weighted squared violations; flat ceiling when the
    underlying flow diverged so the swarm retreats from that region."""
    if weights is None:
        weights = PenaltyWeights()
    if not report.converged:
        return weights.divergence
    return (report.total_cost
            + weights.voltage * report.voltage_violation
            + weights.reactive * report.reactive_violation
            + weights.flow * report.flow_violation)


def run_placement(network: Network, tariffs: Tariffs | None = None,
                  sensitivity_config: SensitivityConfig | None = None,
                  pso_params: PsoParams | None = None,
                  solver_options: SolverOptions | None = None,
                  weights: PenaltyWeights | None = None,
                  bank_step_mvar: float | None = None) -> PlacementResult:
    """Full pipeline: base solve, candidate ranking, swarm sizing, report.

    The decision vector holds one MVar size per candidate bus, boxed by
    that bus's own reactive load. The zero plan is always compared against
    the swarm's best so compensation is never reported when doing nothing
    is cheaper.
    """
    if tariffs is None:
        tariffs = Tariffs()
    if sensitivity_config is None:
        sensitivity_config = SensitivityConfig()
    if pso_params is None:
        pso_params = PsoParams()
    if weights is None:
        weights = PenaltyWeights()
    diagnostics: list[str] = []

    base_solution = solve(network, solver_options)
    if not base_solution.converged:
        raise ConvergenceError(
            f"base case did not converge within "
            f"{(solver_options or SolverOptions()).max_iterations} iterations")
    empty_plan = CapacitorPlan.empty(network.base_mva)
    before = evaluate_plan(network, empty_plan, tariffs, solver_options, weights)

    records = loss_sensitivity(base_solution, network)
    candidates = select_candidates(records, network, sensitivity_config)
    if not candidates:
        diagnostics.append(
            "no bus sagged below the normalized-voltage screen; ranking all "
            "PQ buses instead")
        unfiltered = replace(sensitivity_config, norm_threshold=math.inf)
        candidates = select_candidates(records, network, unfiltered)

    sized = [b for b in candidates if network.bus(b).q_load > 0]
    dropped = [b for b in candidates if b not in sized]
    if dropped:
        diagnostics.append(
            f"candidate buses without reactive load skipped: {dropped}")
    if not sized:
        diagnostics.append("no candidate bus carries reactive load; "
                           "nothing to compensate")
        return PlacementResult(
            plan=empty_plan, before=before, after=before,
            candidate_buses=candidates, trace=(), loss_trace=(),
            seed=pso_params.seed, evaluations=0, diagnostics=tuple(diagnostics))

    # Box per bus: no more MVar than the bus's own reactive demand.
    bounds = [(0.0, network.bus(b).q_load * network.base_mva) for b in sized]
    reports: dict[float, CostReport] = {}

    def fitness(x: np.ndarray) -> float:
        plan = CapacitorPlan.from_mvar(dict(zip(sized, x)), network.base_mva)
        report = evaluate_plan(network, plan, tariffs, solver_options, weights)
        value = penalized_fitness(report, weights)
        reports.setdefault(value, report)
        return value

    result: OptimizationResult = optimize(fitness, bounds, pso_params)
    best_plan = CapacitorPlan.from_mvar(dict(zip(sized, result.gbest_position)),
                                        network.base_mva)
    if bank_step_mvar is not None:
        best_plan = best_plan.rounded(bank_step_mvar)

    after = evaluate_plan(network, best_plan, tariffs, solver_options, weights)
    if penalized_fitness(before, weights) < penalized_fitness(after, weights):
        diagnostics.append("compensation cannot beat the uncompensated case; "
                           "keeping the empty plan")
        best_plan = empty_plan
        after = before

    loss_trace = tuple(reports[v].p_loss_kw if v in reports else math.nan
                       for v in result.history)
    return PlacementResult(
        plan=best_plan,
        before=before,
        after=after,
        candidate_buses=candidates,
        trace=result.history,
        loss_trace=loss_trace,
        seed=pso_params.seed,
        evaluations=result.evaluations,
        diagnostics=tuple(diagnostics),
    )
