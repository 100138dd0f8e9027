import dataclasses
import math

import numpy as np
import pytest

import oracles
from capplan import (
    Branch,
    Bus,
    BusKind,
    Network,
    ValidationError,
    apply_capacitors,
    branch_admittances,
    build_ybus,
    cases,
    total_reactive_load,
    with_voltage_limits,
)


def small_net(**overrides):
    fields = dict(
        base_mva=100.0,
        buses=(
            Bus(id=1, kind=BusKind.SLACK),
            Bus(id=2, kind=BusKind.PQ, p_load=0.3, q_load=0.1),
            Bus(id=3, kind=BusKind.PV, p_gen=0.2, v_setpoint=1.02),
        ),
        branches=(
            Branch(from_bus=1, to_bus=2, r=0.02, x=0.1),
            Branch(from_bus=2, to_bus=3, r=0.01, x=0.05),
        ),
    )
    fields.update(overrides)
    return Network(**fields)


def test_bus_kind_is_pq():
    assert BusKind.PQ.is_pq
    assert not BusKind.SLACK.is_pq
    assert not BusKind.PV.is_pq


def test_index_helpers():
    net = small_net()
    assert net.n_buses == 3
    assert net.index_of == {1: 0, 2: 1, 3: 2}
    assert net.slack_index == 0
    assert net.pv_indices == (2,)
    assert net.pq_indices == (1,)
    assert net.non_slack_indices == (1, 2)
    assert net.bus(3).v_setpoint == 1.02


def test_validate_accepts_good_network():
    small_net().validate()


@pytest.mark.parametrize("mutate, fragment", [
    (dict(base_mva=0.0), "base MVA"),
    (dict(base_mva=-10.0), "base MVA"),
    (dict(buses=()), "no buses"),
    (dict(buses=(Bus(id=1, kind=BusKind.SLACK), Bus(id=1, kind=BusKind.PQ)),
          branches=(Branch(from_bus=1, to_bus=1, r=0.1, x=0.1),)),
     "duplicate bus id 1"),
])
def test_validate_rejects_shape_problems(mutate, fragment):
    with pytest.raises(ValidationError, match=fragment):
        small_net(**mutate).validate()


def test_validate_requires_exactly_one_slack():
    buses = (Bus(id=1, kind=BusKind.PQ), Bus(id=2, kind=BusKind.PQ))
    net = small_net(buses=buses,
                    branches=(Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),))
    with pytest.raises(ValidationError, match="exactly one slack"):
        net.validate()

    buses = (Bus(id=1, kind=BusKind.SLACK), Bus(id=2, kind=BusKind.SLACK))
    net = small_net(buses=buses,
                    branches=(Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),))
    with pytest.raises(ValidationError, match="found 2"):
        net.validate()


@pytest.mark.parametrize("branch, fragment", [
    (Branch(from_bus=1, to_bus=9, r=0.1, x=0.1), "unknown bus 9"),
    (Branch(from_bus=2, to_bus=2, r=0.1, x=0.1), "to itself"),
    (Branch(from_bus=1, to_bus=2, r=-0.1, x=0.1), "negative resistance"),
    (Branch(from_bus=1, to_bus=2, r=0.0, x=0.0), "both zero"),
    (Branch(from_bus=1, to_bus=2, r=0.1, x=0.1, tap=0.0), "tap ratio"),
])
def test_validate_rejects_bad_branches(branch, fragment):
    net = small_net(branches=(Branch(from_bus=1, to_bus=2, r=0.02, x=0.1),
                              Branch(from_bus=2, to_bus=3, r=0.01, x=0.05),
                              branch))
    with pytest.raises(ValidationError, match=fragment):
        net.validate()


def test_validate_rejects_non_finite_load():
    buses = (Bus(id=1, kind=BusKind.SLACK),
             Bus(id=2, kind=BusKind.PQ, q_load=math.nan))
    net = small_net(buses=buses,
                    branches=(Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),))
    with pytest.raises(ValidationError, match="q_load is not finite"):
        net.validate()


def test_validate_rejects_inverted_voltage_band():
    buses = (Bus(id=1, kind=BusKind.SLACK),
             Bus(id=2, kind=BusKind.PQ, v_min=1.1, v_max=0.9))
    net = small_net(buses=buses,
                    branches=(Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),))
    with pytest.raises(ValidationError, match="v_min"):
        net.validate()


def test_validate_rejects_disconnected_network():
    buses = (Bus(id=1, kind=BusKind.SLACK), Bus(id=2, kind=BusKind.PQ),
             Bus(id=3, kind=BusKind.PQ), Bus(id=4, kind=BusKind.PQ))
    branches = (Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),
                Branch(from_bus=3, to_bus=4, r=0.1, x=0.1))
    net = small_net(buses=buses, branches=branches)
    with pytest.raises(ValidationError, match=r"unreachable buses: \[3, 4\]"):
        net.validate()

    islanded = small_net(buses=buses[:2], branches=())
    with pytest.raises(ValidationError, match="no branches"):
        islanded.validate()


def test_json_round_trip():
    net = small_net()
    back = Network.from_json(net.to_json())
    assert back == net


def test_branch_admittances_plain_line():
    br = Branch(from_bus=1, to_bus=2, r=0.02, x=0.1, b_charging=0.04)
    y = 1.0 / complex(0.02, 0.1)
    yff, yft, ytf, ytt = branch_admittances(br)
    assert yff == pytest.approx(y + 0.02j)
    assert ytt == pytest.approx(yff)
    assert yft == pytest.approx(-y)
    assert ytf == pytest.approx(-y)


def test_branch_admittances_with_tap():
    br = Branch(from_bus=1, to_bus=2, r=0.0, x=0.2, tap=0.95)
    y = 1.0 / 0.2j
    yff, yft, ytf, ytt = branch_admittances(br)
    assert yff == pytest.approx(y / 0.95 ** 2)
    assert ytt == pytest.approx(y)
    assert yft == pytest.approx(-y / 0.95)
    assert ytf == pytest.approx(yft)


def test_branch_admittances_rejects_zero_impedance():
    with pytest.raises(ValidationError, match="series impedance is zero"):
        branch_admittances(Branch(from_bus=1, to_bus=2, r=0.0, x=0.0))


def test_build_ybus_matches_loop_oracle_on_ieee14(ieee14):
    ybus = build_ybus(ieee14)
    reference = oracles.loop_ybus(ieee14)
    assert np.allclose(ybus.values, reference, atol=1e-12, rtol=0.0)
    assert ybus.n == 14
    assert np.array_equal(ybus.g, ybus.values.real)
    assert np.array_equal(ybus.b, ybus.values.imag)
    assert ybus[0, 0] == ybus.values[0, 0]


def test_apply_capacitors_adds_shunt():
    net = small_net()
    out = apply_capacitors(net, {2: 0.15})
    assert out.bus(2).shunt_b == pytest.approx(0.15)
    assert out.bus(1).shunt_b == 0.0
    # untouched otherwise
    assert out.bus(2).q_load == net.bus(2).q_load


def test_apply_capacitors_accepts_plan_like_objects():
    class PlanLike:
        sizes_pu = {2: 0.1}

    out = apply_capacitors(small_net(), PlanLike())
    assert out.bus(2).shunt_b == pytest.approx(0.1)


def test_apply_capacitors_rejections():
    net = small_net()
    with pytest.raises(ValidationError, match="unknown bus 7"):
        apply_capacitors(net, {7: 0.1})
    with pytest.raises(ValidationError, match="not a PQ bus"):
        apply_capacitors(net, {1: 0.1})
    with pytest.raises(ValidationError, match="must be >= 0"):
        apply_capacitors(net, {2: -0.1})


def test_apply_capacitors_empty_is_identity():
    net = small_net()
    assert apply_capacitors(net, {}) is net


def test_with_voltage_limits():
    out = with_voltage_limits(small_net(), 0.9, 1.1)
    assert all(b.v_min == 0.9 and b.v_max == 1.1 for b in out.buses)
    with pytest.raises(ValidationError):
        with_voltage_limits(small_net(), 1.1, 0.9)


def test_total_reactive_load_ignores_capacitive_loads():
    buses = (Bus(id=1, kind=BusKind.SLACK),
             Bus(id=2, kind=BusKind.PQ, q_load=0.2),
             Bus(id=3, kind=BusKind.PQ, q_load=-0.5))
    net = small_net(buses=buses,
                    branches=(Branch(from_bus=1, to_bus=2, r=0.1, x=0.1),
                              Branch(from_bus=2, to_bus=3, r=0.1, x=0.1)))
    assert total_reactive_load(net) == pytest.approx(0.2)
    assert total_reactive_load(net, buses=[3]) == 0.0
    assert total_reactive_load(net, buses=[2, 3]) == pytest.approx(0.2)


def test_bundled_ieee14_shape(ieee14):
    assert ieee14.base_mva == 100.0
    assert ieee14.n_buses == 14
    assert len(ieee14.branches) == 20
    assert ieee14.bus(1).kind is BusKind.SLACK
    assert {b.id for b in ieee14.buses if b.kind is BusKind.PV} == {2, 3, 6, 8}
    assert ieee14.bus(9).shunt_b == pytest.approx(0.19)
    taps = {(br.from_bus, br.to_bus): br.tap for br in ieee14.branches
            if br.tap != 1.0}
    assert taps == {(4, 7): pytest.approx(0.978),
                    (4, 9): pytest.approx(0.969),
                    (5, 6): pytest.approx(0.932)}


def test_networks_are_immutable():
    net = small_net()
    with pytest.raises(dataclasses.FrozenInstanceError):
        net.base_mva = 50.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        net.buses[0].p_load = 1.0
