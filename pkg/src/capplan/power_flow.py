"""Newton-Raphson AC power flow.

State vector ordering, used by the mismatch vector and both Jacobian axes:
angles of all non-slack buses first (in bus order), then voltage magnitudes
of all PQ buses (in bus order). Specified injections are p_gen - p_load for
P and -q_load for Q; the slack angle stays at 0 and slack/PV magnitudes
stay at their setpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .network import AdmittanceMatrix, Network, branch_admittances, build_ybus


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-6
    max_iterations: int = 20
    flat_start: bool = True

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(
                f"max_iterations must be at least 1, got {self.max_iterations}")


@dataclass(frozen=True, eq=False)
class PowerFlowState:
    """Bus voltages as parallel arrays, indexed like ``network.buses``."""

    v_mag: np.ndarray
    v_ang: np.ndarray
    iteration: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "v_mag", np.array(self.v_mag, dtype=float))
        object.__setattr__(self, "v_ang", np.array(self.v_ang, dtype=float))
        if self.v_mag.shape != self.v_ang.shape:
            raise ValueError("v_mag and v_ang must have the same shape")

    @property
    def voltages(self) -> np.ndarray:
        """Complex bus voltages V = |V| e^{j angle}."""
        return self.v_mag * np.exp(1j * self.v_ang)


@dataclass(frozen=True, eq=False)
class BranchFlow:
    """Complex power entering a branch at each terminal (per-unit)."""

    from_bus: int
    to_bus: int
    s_from: complex
    s_to: complex

    @property
    def p_loss(self) -> float:
        return (self.s_from + self.s_to).real

    @property
    def q_loss(self) -> float:
        return (self.s_from + self.s_to).imag

    @property
    def mva_from(self) -> float:
        return abs(self.s_from)

    @property
    def mva_to(self) -> float:
        return abs(self.s_to)


@dataclass(frozen=True, eq=False)
class PowerFlowSolution:
    state: PowerFlowState
    p_inj: np.ndarray
    q_inj: np.ndarray
    branch_flows: tuple[BranchFlow, ...]
    p_loss_total: float
    q_loss_total: float
    converged: bool
    max_mismatch: float
    mismatch_history: tuple[float, ...] = field(default=())

    @property
    def iterations(self) -> int:
        return self.state.iteration


def flat_start_state(network: Network) -> PowerFlowState:
    """All angles 0; PQ magnitudes 1.0, PV/slack at their setpoints."""
    v_mag = np.ones(len(network.buses))
    for i, bus in enumerate(network.buses):
        if not bus.kind.is_pq:
            v_mag[i] = bus.v_setpoint
    return PowerFlowState(v_mag=v_mag, v_ang=np.zeros(len(network.buses)))


def compute_injections(ybus: AdmittanceMatrix,
                       state: PowerFlowState) -> tuple[np.ndarray, np.ndarray]:
    """Net bus injections P_i, Q_i from S = V (Y V)*."""
    v = state.voltages
    s = v * np.conj(ybus.values @ v)
    return s.real, s.imag


def specified_injections(network: Network) -> tuple[np.ndarray, np.ndarray]:
    """Scheduled P (all buses) and Q (meaningful for PQ buses only)."""
    p = np.array([b.p_gen - b.p_load for b in network.buses])
    q = np.array([-b.q_load for b in network.buses])
    return p, q


def mismatch_order(network: Network) -> tuple[list[int], list[int]]:
    """Bus indices behind the mismatch rows: P rows, then Q rows."""
    p_rows = network.non_slack_indices
    q_rows = network.pq_indices
    return list(p_rows), list(q_rows)


def compute_mismatch(network: Network, ybus: AdmittanceMatrix,
                     state: PowerFlowState) -> np.ndarray:
    """Power residues [dP non-slack..., dQ PQ...], scheduled minus computed."""
    p_calc, q_calc = compute_injections(ybus, state)
    p_spec, q_spec = specified_injections(network)
    p_rows, q_rows = mismatch_order(network)
    return np.concatenate([
        p_spec[p_rows] - p_calc[p_rows],
        q_spec[q_rows] - q_calc[q_rows],
    ])


def build_jacobian(network: Network, ybus: AdmittanceMatrix,
                   state: PowerFlowState) -> np.ndarray:
    """Partial derivatives of computed injections over the mismatch order.

    Blocks [dP/dAng dP/dV; dQ/dAng dQ/dV], plain (unscaled) derivatives,
    assembled from the complex identities dS/dAng = jV (I - Y V)* and
    dS/d|V| = V (Y V/|V|)* + I* V/|V| evaluated elementwise on diagonals.
    """
    v = state.voltages
    i_bus = ybus.values @ v
    diag_v = np.diag(v)
    diag_i = np.diag(i_bus)
    diag_vnorm = np.diag(v / np.abs(v))

    ds_dang = 1j * diag_v @ np.conj(diag_i - ybus.values @ diag_v)
    ds_dmag = diag_v @ np.conj(ybus.values @ diag_vnorm) + np.conj(diag_i) @ diag_vnorm

    p_rows, q_rows = mismatch_order(network)
    j11 = ds_dang[np.ix_(p_rows, p_rows)].real
    j12 = ds_dmag[np.ix_(p_rows, q_rows)].real
    j21 = ds_dang[np.ix_(q_rows, p_rows)].imag
    j22 = ds_dmag[np.ix_(q_rows, q_rows)].imag
    return np.block([[j11, j12], [j21, j22]])


def compute_branch_flows(network: Network,
                         state: PowerFlowState) -> tuple[BranchFlow, ...]:
    v = state.voltages
    flows = []
    for branch in network.branches:
        f = network.index_of[branch.from_bus]
        t = network.index_of[branch.to_bus]
        yff, yft, ytf, ytt = branch_admittances(branch)
        s_from = v[f] * np.conj(yff * v[f] + yft * v[t])
        s_to = v[t] * np.conj(ytf * v[f] + ytt * v[t])
        flows.append(BranchFlow(from_bus=branch.from_bus, to_bus=branch.to_bus,
                                s_from=complex(s_from), s_to=complex(s_to)))
    return tuple(flows)


def total_losses(network: Network, state: PowerFlowState,
                 ybus: AdmittanceMatrix | None = None) -> tuple[float, float]:
    """Real and reactive branch losses, cross-checked against injections.

    Real loss is computed both as the sum of terminal powers per branch and
    as the sum of net bus injections; the two are the same quantity by
    conservation, so disagreement beyond rounding means the model is
    inconsistent. The branch-wise value is returned.
    """
    if ybus is None:
        ybus = build_ybus(network)
    flows = compute_branch_flows(network, state)
    p_branch = sum(f.p_loss for f in flows)
    q_branch = sum(f.q_loss for f in flows)
    p_inj, _ = compute_injections(ybus, state)
    if abs(p_inj.sum() - p_branch) >= 1e-8:
        raise SolverError(
            f"loss bookkeeping mismatch: injections sum to {p_inj.sum():.3e} pu "
            f"but branch losses sum to {p_branch:.3e} pu")
    return p_branch, q_branch


def solve(network: Network, options: SolverOptions | None = None,
          initial_state: PowerFlowState | None = None) -> PowerFlowSolution:
    """Run Newton-Raphson iterations until the largest residue is tolerable.

    Convergence is checked before each update, so a network whose start
    state already balances converges at iteration 0. Hitting the iteration
    cap is reported through ``converged=False``, not an exception; a
    singular Jacobian raises :class:`SolverError`.
    """
    if options is None:
        options = SolverOptions()
    network.validate()
    ybus = build_ybus(network)

    if options.flat_start or initial_state is None:
        state = flat_start_state(network)
    else:
        state = initial_state
    v_mag = state.v_mag.copy()
    v_ang = state.v_ang.copy()

    p_rows, q_rows = mismatch_order(network)
    n_p = len(p_rows)
    history: list[float] = []
    converged = False
    iteration = 0
    max_mismatch = np.inf

    for it in range(options.max_iterations + 1):
        state = PowerFlowState(v_mag=v_mag, v_ang=v_ang, iteration=it)
        mismatch = compute_mismatch(network, ybus, state)
        max_mismatch = float(np.max(np.abs(mismatch))) if mismatch.size else 0.0
        history.append(max_mismatch)
        iteration = it
        if max_mismatch < options.tolerance:
            converged = True
            break
        if it >= options.max_iterations:
            break
        jac = build_jacobian(network, ybus, state)
        try:
            dx = np.linalg.solve(jac, mismatch)
        except np.linalg.LinAlgError:
            raise SolverError(f"singular Jacobian at iteration {it}") from None
        v_ang[p_rows] += dx[:n_p]
        v_mag[q_rows] += dx[n_p:]

    p_inj, q_inj = compute_injections(ybus, state)
    flows = compute_branch_flows(network, state)
    p_loss, q_loss = total_losses(network, state, ybus)
    return PowerFlowSolution(
        state=state,
        p_inj=p_inj,
        q_inj=q_inj,
        branch_flows=flows,
        p_loss_total=p_loss,
        q_loss_total=q_loss,
        converged=converged,
        max_mismatch=max_mismatch,
        mismatch_history=tuple(history),
    )
