"""Electrical network model: buses, branches, admittance assembly.

All quantities are per-unit on the network's MVA base. Buses are classified
the usual way: one slack bus fixes voltage magnitude and angle, PV buses fix
real power and voltage magnitude, PQ buses fix real and reactive demand.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError


class BusKind(enum.Enum):
    SLACK = "slack"
    PV = "pv"
    PQ = "pq"

    @property
    def is_pq(self) -> bool:
        return self is BusKind.PQ


@dataclass(frozen=True)
class Bus:
    """One network node.

    Loads, generation and shunt susceptance are per-unit on the system base.
    ``v_setpoint`` is the regulated magnitude for slack/PV buses and the
    initial guess for PQ buses. ``shunt_b`` is a fixed susceptance to ground;
    at 1.0 pu voltage it injects ``shunt_b`` pu of reactive power.
    """

    id: int
    kind: BusKind
    p_load: float = 0.0
    q_load: float = 0.0
    p_gen: float = 0.0
    v_setpoint: float = 1.0
    shunt_b: float = 0.0
    v_min: float = 0.95
    v_max: float = 1.06
    name: str = ""


@dataclass(frozen=True)
class Branch:
    """Series element between two buses (line or two-winding transformer).

    ``tap`` is the off-nominal turns ratio on the ``from_bus`` side (1.0 for
    plain lines). ``b_charging`` is the total line-charging susceptance,
    split half-and-half between the two terminals. ``flow_limit`` is an
    optional apparent-power limit in pu.
    """

    from_bus: int
    to_bus: int
    r: float
    x: float
    b_charging: float = 0.0
    tap: float = 1.0
    flow_limit: float | None = None


@dataclass(frozen=True)
class Network:
    """Immutable container for a solved-ready per-unit network."""

    base_mva: float
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]

    @cached_property
    def index_of(self) -> dict[int, int]:
        """Bus id -> position in ``buses``."""
        return {bus.id: i for i, bus in enumerate(self.buses)}

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @cached_property
    def slack_index(self) -> int:
        return next(i for i, b in enumerate(self.buses) if b.kind is BusKind.SLACK)

    @cached_property
    def pv_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.buses) if b.kind is BusKind.PV)

    @cached_property
    def pq_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.buses) if b.kind is BusKind.PQ)

    @cached_property
    def non_slack_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.buses) if b.kind is not BusKind.SLACK)

    def bus(self, bus_id: int) -> Bus:
        return self.buses[self.index_of[bus_id]]

    def validate(self) -> None:
        """Raise :class:`ValidationError` on the first broken invariant."""
        if self.base_mva <= 0:
            raise ValidationError(f"base MVA must be positive, got {self.base_mva}")
        if not self.buses:
            raise ValidationError("network has no buses")

        seen: set[int] = set()
        for bus in self.buses:
            if bus.id in seen:
                raise ValidationError(f"duplicate bus id {bus.id}")
            seen.add(bus.id)
            for label, value in (("p_load", bus.p_load), ("q_load", bus.q_load),
                                 ("p_gen", bus.p_gen), ("shunt_b", bus.shunt_b)):
                if not math.isfinite(value):
                    raise ValidationError(f"bus {bus.id}: {label} is not finite")
            if bus.v_setpoint <= 0:
                raise ValidationError(f"bus {bus.id}: voltage setpoint must be positive")
            if not bus.v_min < bus.v_max:
                raise ValidationError(
                    f"bus {bus.id}: v_min {bus.v_min} must be below v_max {bus.v_max}")

        slack_count = sum(1 for b in self.buses if b.kind is BusKind.SLACK)
        if slack_count != 1:
            raise ValidationError(f"expected exactly one slack bus, found {slack_count}")

        for k, br in enumerate(self.branches):
            for end in (br.from_bus, br.to_bus):
                if end not in self.index_of:
                    raise ValidationError(
                        f"branch {k + 1} ({br.from_bus}-{br.to_bus}) references "
                        f"unknown bus {end}")
            if br.from_bus == br.to_bus:
                raise ValidationError(f"branch {k + 1} connects bus {br.from_bus} to itself")
            if br.r < 0:
                raise ValidationError(f"branch {br.from_bus}-{br.to_bus}: negative resistance")
            if br.r == 0 and br.x == 0:
                raise ValidationError(
                    f"branch {br.from_bus}-{br.to_bus}: r and x are both zero")
            if br.tap <= 0:
                raise ValidationError(
                    f"branch {br.from_bus}-{br.to_bus}: tap ratio must be positive")

        self._check_connected()

    def _check_connected(self) -> None:
        if not self.branches and self.n_buses > 1:
            raise ValidationError("network has multiple buses but no branches")
        adjacency: dict[int, list[int]] = {b.id: [] for b in self.buses}
        for br in self.branches:
            adjacency[br.from_bus].append(br.to_bus)
            adjacency[br.to_bus].append(br.from_bus)
        start = self.buses[0].id
        seen = {start}
        stack = [start]
        while stack:
            for neighbor in adjacency[stack.pop()]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    stack.append(neighbor)
        missing = sorted(b.id for b in self.buses if b.id not in seen)
        if missing:
            raise ValidationError(f"network is not connected; unreachable buses: {missing}")

    # --- native (JSON) serialization -------------------------------------

    def to_dict(self) -> dict:
        return {
            "base_mva": self.base_mva,
            "buses": [
                {
                    "id": b.id, "kind": b.kind.value, "p_load": b.p_load,
                    "q_load": b.q_load, "p_gen": b.p_gen,
                    "v_setpoint": b.v_setpoint, "shunt_b": b.shunt_b,
                    "v_min": b.v_min, "v_max": b.v_max, "name": b.name,
                }
                for b in self.buses
            ],
            "branches": [
                {
                    "from_bus": br.from_bus, "to_bus": br.to_bus, "r": br.r,
                    "x": br.x, "b_charging": br.b_charging, "tap": br.tap,
                    "flow_limit": br.flow_limit,
                }
                for br in self.branches
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Network":
        buses = tuple(
            Bus(id=d["id"], kind=BusKind(d["kind"]), p_load=d["p_load"],
                q_load=d["q_load"], p_gen=d["p_gen"], v_setpoint=d["v_setpoint"],
                shunt_b=d["shunt_b"], v_min=d["v_min"], v_max=d["v_max"],
                name=d.get("name", ""))
            for d in data["buses"]
        )
        branches = tuple(
            Branch(from_bus=d["from_bus"], to_bus=d["to_bus"], r=d["r"], x=d["x"],
                   b_charging=d["b_charging"], tap=d["tap"],
                   flow_limit=d.get("flow_limit"))
            for d in data["branches"]
        )
        net = cls(base_mva=data["base_mva"], buses=buses, branches=branches)
        net.validate()
        return net

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Network":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class AdmittanceMatrix:
    """Dense nodal admittance matrix, entries G + jB in pu."""

    n: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, key) -> complex:
        return self.values[key]

    @property
    def g(self) -> np.ndarray:
        return self.values.real

    @property
    def b(self) -> np.ndarray:
        return self.values.imag


def branch_admittances(branch: Branch) -> tuple[complex, complex, complex, complex]:
    """Two-port admittance stamps (yff, yft, ytf, ytt) for one branch.

    The ideal-transformer model with tap t on the from side:

        [If]   [ (y + jb/2)/t^2   -y/t      ] [Vf]
        [It] = [ -y/t              y + jb/2 ] [Vt]
    """
    if branch.r == 0 and branch.x == 0:
        raise ValidationError(
            f"branch {branch.from_bus}-{branch.to_bus}: series impedance is zero")
    y = 1.0 / complex(branch.r, branch.x)
    shunt = 0.5j * branch.b_charging
    t = branch.tap
    yff = (y + shunt) / (t * t)
    yft = -y / t
    ytf = -y / t
    ytt = y + shunt
    return yff, yft, ytf, ytt


def build_ybus(network: Network) -> AdmittanceMatrix:
    """Assemble the dense bus admittance matrix for ``network``."""
    n = network.n_buses
    y = np.zeros((n, n), dtype=complex)
    for branch in network.branches:
        i = network.index_of[branch.from_bus]
        j = network.index_of[branch.to_bus]
        yff, yft, ytf, ytt = branch_admittances(branch)
        y[i, i] += yff
        y[i, j] += yft
        y[j, i] += ytf
        y[j, j] += ytt
    for i, bus in enumerate(network.buses):
        y[i, i] += 1j * bus.shunt_b
    return AdmittanceMatrix(n=n, values=y)


def apply_capacitors(network: Network, sizes_pu: Mapping[int, float]) -> Network:
    """Return a copy of ``network`` with shunt capacitors installed.

    ``sizes_pu`` maps bus id to capacitor susceptance in pu; at 1.0 pu
    voltage a susceptance b injects b pu of reactive power. Only PQ buses
    may receive capacitors and sizes must be non-negative. Anything with a
    ``sizes_pu`` attribute (a placement plan) is accepted in place of the
    mapping.
    """
    sizes_pu = getattr(sizes_pu, "sizes_pu", sizes_pu)
    for bus_id, size in sizes_pu.items():
        if bus_id not in network.index_of:
            raise ValidationError(f"capacitor plan references unknown bus {bus_id}")
        if network.bus(bus_id).kind is not BusKind.PQ:
            raise ValidationError(
                f"capacitor plan targets bus {bus_id}, which is not a PQ bus")
        if not math.isfinite(size) or size < 0:
            raise ValidationError(f"capacitor size at bus {bus_id} must be >= 0, got {size}")
    if not sizes_pu:
        return network
    buses = tuple(
        replace(b, shunt_b=b.shunt_b + sizes_pu[b.id]) if b.id in sizes_pu else b
        for b in network.buses
    )
    return replace(network, buses=buses)


def with_voltage_limits(network: Network, v_min: float, v_max: float) -> Network:
    """Return a copy with the same voltage band applied to every bus."""
    if not v_min < v_max:
        raise ValidationError(f"v_min {v_min} must be below v_max {v_max}")
    buses = tuple(replace(b, v_min=v_min, v_max=v_max) for b in network.buses)
    return replace(network, buses=buses)


def total_reactive_load(network: Network, buses: Iterable[int] | None = None) -> float:
    """Sum of positive reactive loads in pu (capacitive loads excluded)."""
    ids = set(buses) if buses is not None else None
    return sum(max(b.q_load, 0.0) for b in network.buses
               if ids is None or b.id in ids)
