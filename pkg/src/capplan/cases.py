"""Bundled study cases.

``ieee14`` is parsed from the packaged Common Data Format file. The other
builders are small synthetic networks used in examples and tests.
"""

from __future__ import annotations

from importlib import resources

from .cdf import parse_network
from .network import Branch, Bus, BusKind, Network


def ieee14() -> Network:
    """The IEEE 14-bus test case, per-unit on a 100 MVA base."""
    text = resources.files("capplan.data").joinpath("ieee14.cdf").read_text()
    return parse_network(text)


def two_bus(r: float = 0.0, x: float = 0.1, p_load: float = 0.5,
            q_load: float = 0.0) -> Network:
    """Slack feeding a single PQ load over one line. Handy for hand checks."""
    return Network(
        base_mva=100.0,
        buses=(
            Bus(id=1, kind=BusKind.SLACK, name="source"),
            Bus(id=2, kind=BusKind.PQ, p_load=p_load, q_load=q_load, name="load"),
        ),
        branches=(Branch(from_bus=1, to_bus=2, r=r, x=x),),
    )


def radial_feeder() -> Network:
    """Six-bus radial distribution feeder on a 10 MVA base.

    Heavily reactive loads (power factor near 0.6) drag the tail buses to
    roughly 0.93-0.95 pu, so shunt compensation genuinely pays for itself
    here: sized against the default tariffs it roughly halves the losses
    and lifts every bus back above 0.95 pu. Loads in the table are
    MW / MVAr.
    """
    base = 10.0
    loads = {2: (0.50, 0.70), 3: (0.45, 0.65), 4: (0.70, 1.00),
             5: (0.35, 0.50), 6: (0.50, 0.75)}
    buses = [Bus(id=1, kind=BusKind.SLACK, v_setpoint=1.0, name="substation")]
    for i in range(2, 7):
        p, q = loads[i]
        buses.append(Bus(id=i, kind=BusKind.PQ, p_load=p / base, q_load=q / base,
                         name=f"feeder {i}"))
    branches = (
        Branch(from_bus=1, to_bus=2, r=0.030, x=0.054),
        Branch(from_bus=2, to_bus=3, r=0.035, x=0.063),
        Branch(from_bus=3, to_bus=4, r=0.040, x=0.072),
        Branch(from_bus=4, to_bus=5, r=0.045, x=0.081),
        Branch(from_bus=2, to_bus=6, r=0.050, x=0.090),
    )
    return Network(base_mva=base, buses=tuple(buses), branches=branches)
