"""Loss sensitivity ranking of capacitor candidate buses.

For each branch the receiving end is the terminal with the lower voltage
magnitude, and the sensitivity of total real loss to reactive injection
there is 2 Q r / V^2 (the derivative of the branch loss Q^2 r / V^2).
Buses are ranked by their largest branch sensitivity; a normalized-voltage
screen keeps only buses that actually sag.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SolverError
from .network import BusKind, Network
from .power_flow import PowerFlowSolution

# Table rows normalize bus voltage against the usual 0.95 pu lower limit.
NORM_BASE = 0.95


@dataclass(frozen=True)
class SensitivityConfig:
    max_candidates: int = 3
    norm_threshold: float = 1.01

    def __post_init__(self) -> None:
        if self.max_candidates < 1:
            raise ValueError(
                f"max_candidates must be at least 1, got {self.max_candidates}")
        if self.norm_threshold <= 0:
            raise ValueError(
                f"norm_threshold must be positive, got {self.norm_threshold}")


@dataclass(frozen=True)
class LossSensitivityRecord:
    from_bus: int
    to_bus: int
    lsf: float
    end_bus: int
    end_bus_voltage: float
    norm_voltage: float


@dataclass(frozen=True)
class CandidateSet:
    """Bus ids in descending sensitivity order with their scores."""

    buses: tuple[int, ...]
    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.buses) != len(self.scores):
            raise ValueError("buses and scores must be parallel")
        if len(set(self.buses)) != len(self.buses):
            raise ValueError("candidate buses must be unique")

    def __len__(self) -> int:
        return len(self.buses)

    def __iter__(self):
        return iter(self.buses)

    def __bool__(self) -> bool:
        return bool(self.buses)

    def score_of(self, bus_id: int) -> float:
        return self.scores[self.buses.index(bus_id)]


def loss_sensitivity(solution: PowerFlowSolution,
                     network: Network) -> list[LossSensitivityRecord]:
    """One record per branch, ordered like ``network.branches``."""
    if not solution.converged:
        raise SolverError("loss sensitivity needs a converged power flow")
    records = []
    for branch, flow in zip(network.branches, solution.branch_flows):
        f = network.index_of[branch.from_bus]
        t = network.index_of[branch.to_bus]
        v_f = solution.state.v_mag[f]
        v_t = solution.state.v_mag[t]
        if v_f < v_t:
            end_bus, v_end, s_end = branch.from_bus, float(v_f), flow.s_from
        else:
            end_bus, v_end, s_end = branch.to_bus, float(v_t), flow.s_to
        # s_end is power leaving the bus into the branch; the receiving end
        # absorbs, so the inflow is its negation.
        q_eff = -s_end.imag
        lsf = 2.0 * q_eff * branch.r / v_end ** 2
        records.append(LossSensitivityRecord(
            from_bus=branch.from_bus, to_bus=branch.to_bus, lsf=float(lsf),
            end_bus=end_bus, end_bus_voltage=v_end,
            norm_voltage=v_end / NORM_BASE))
    return records


def _chain_score(records: list[LossSensitivityRecord], bus_id: int,
                 visiting: frozenset[int]) -> float:
    """Best cumulative sensitivity of any supply chain ending at ``bus_id``.

    A capacitor at a bus relieves reactive flow on every branch feeding it,
    so the bus score follows the receiving-end links upstream and sums the
    per-branch values along the strongest chain. The visiting set breaks
    ties-in-voltage cycles, which can only occur with zero flow anyway.
    """
    if bus_id in visiting:
        return 0.0
    best = 0.0
    for rec in records:
        if rec.end_bus != bus_id:
            continue
        other = rec.from_bus if rec.end_bus == rec.to_bus else rec.to_bus
        best = max(best, rec.lsf + _chain_score(records, other,
                                                visiting | {bus_id}))
    return best


def select_candidates(records: list[LossSensitivityRecord], network: Network,
                      config: SensitivityConfig | None = None) -> CandidateSet:
    """Rank PQ buses by their aggregated (supply-chain) sensitivity.

    Buses whose normalized voltage is at or above the threshold are screened
    out; an empty result means nothing qualified and the caller decides how
    to proceed. Ties break toward the lower voltage, then the lower id.
    """
    if not records:
        raise ValueError("no sensitivity records to rank")
    if config is None:
        config = SensitivityConfig()

    seen: dict[int, LossSensitivityRecord] = {}
    for rec in records:
        if network.bus(rec.end_bus).kind is BusKind.PQ:
            seen.setdefault(rec.end_bus, rec)

    scored = [(rec, _chain_score(records, bus_id, frozenset()))
              for bus_id, rec in seen.items()]
    eligible = [(rec, score) for rec, score in scored
                if rec.norm_voltage < config.norm_threshold]
    eligible.sort(key=lambda item: (-item[1], item[0].end_bus_voltage,
                                    item[0].end_bus))
    top = eligible[:config.max_candidates]
    return CandidateSet(buses=tuple(rec.end_bus for rec, _ in top),
                        scores=tuple(score for _, score in top))
