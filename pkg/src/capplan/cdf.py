"""IEEE Common Data Format (CDF) reader.

The CDF is the fixed-column text format distributed with the classic IEEE
test cases (14, 30, 57, 118 bus). Only the title, bus and branch sections
are consumed; loss-zone, interchange and tie-line sections are skipped.
Column positions follow the published format description; quantities given
in MW/MVAR are converted to per-unit on the case's MVA base.
"""

from __future__ import annotations

from .errors import CdfParseError, ValidationError
from .network import Branch, Bus, BusKind, Network

# CDF bus type codes -> bus kind
_BUS_KIND = {0: BusKind.PQ, 1: BusKind.PQ, 2: BusKind.PV, 3: BusKind.SLACK}


def _field(line: str, start: int, stop: int) -> str:
    """1-indexed inclusive column range, padded if the line is short."""
    return line[start - 1:stop].strip()


def _float(line: str, start: int, stop: int, line_no: int, what: str) -> float:
    raw = _field(line, start, stop)
    if not raw:
        return 0.0
    try:
        return float(raw)
    except ValueError:
        raise CdfParseError(f"cannot read {what} from columns {start}-{stop}: {raw!r}",
                            line_no) from None


def _int(line: str, start: int, stop: int, line_no: int, what: str) -> int:
    raw = _field(line, start, stop)
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CdfParseError(f"cannot read {what} from columns {start}-{stop}: {raw!r}",
                            line_no) from None


def _pad(line: str) -> str:
    return line.rstrip("\r\n").ljust(133)


def _section_lines(lines: list[str], keyword: str) -> tuple[list[tuple[int, str]], bool]:
    """Record lines of the section whose header starts with ``keyword``.

    Returns (numbered record lines, header found). A section runs until a
    line beginning with ``-999`` (or ``-99``/``-9`` used by some files).
    """
    records: list[tuple[int, str]] = []
    in_section = False
    found = False
    for no, line in enumerate(lines, start=1):
        upper = line.upper()
        if not in_section:
            if upper.lstrip().startswith(keyword):
                in_section = True
                found = True
            continue
        if line.lstrip().startswith("-9"):
            return records, True
        if line.strip():
            records.append((no, line))
    if found:
        raise CdfParseError(f"section {keyword!r} is missing its end-of-section marker",
                            len(lines))
    return records, False


def _parse_bus(line: str, line_no: int) -> tuple[Bus, float]:
    """Returns the bus (loads in MW/MVAR still on file units) and shunt G."""
    line = _pad(line)
    number = _int(line, 1, 4, line_no, "bus number")
    name = _field(line, 6, 17)
    kind_code = _int(line, 25, 26, line_no, "bus type")
    if kind_code not in _BUS_KIND:
        raise CdfParseError(f"unknown bus type code {kind_code} for bus {number}", line_no)
    final_v = _float(line, 28, 33, line_no, "final voltage")
    p_load = _float(line, 41, 49, line_no, "load MW")
    q_load = _float(line, 50, 59, line_no, "load MVAR")
    p_gen = _float(line, 60, 67, line_no, "generation MW")
    desired_v = _float(line, 85, 90, line_no, "desired voltage")
    shunt_g = _float(line, 107, 114, line_no, "shunt conductance")
    shunt_b = _float(line, 115, 122, line_no, "shunt susceptance")

    kind = _BUS_KIND[kind_code]
    setpoint = desired_v if desired_v > 0 else (final_v if final_v > 0 else 1.0)
    bus = Bus(id=number, kind=kind, p_load=p_load, q_load=q_load, p_gen=p_gen,
              v_setpoint=setpoint, shunt_b=shunt_b, name=name or f"Bus {number}")
    return bus, shunt_g


def _parse_branch(line: str, line_no: int) -> Branch:
    line = _pad(line)
    from_bus = _int(line, 1, 4, line_no, "from bus")
    to_bus = _int(line, 6, 9, line_no, "to bus")
    r = _float(line, 20, 29, line_no, "resistance")
    x = _float(line, 30, 40, line_no, "reactance")
    b = _float(line, 41, 50, line_no, "line charging")
    rating = _float(line, 51, 55, line_no, "MVA rating")
    ratio = _float(line, 77, 82, line_no, "turns ratio")
    shift = _float(line, 84, 90, line_no, "phase shift")
    if shift != 0.0:
        raise CdfParseError(
            f"branch {from_bus}-{to_bus}: phase-shifting transformers are not supported",
            line_no)
    tap = ratio if ratio > 0 else 1.0
    flow_limit = rating if rating > 0 else None
    return Branch(from_bus=from_bus, to_bus=to_bus, r=r, x=x, b_charging=b,
                  tap=tap, flow_limit=flow_limit)


def parse_network(text: str) -> Network:
    """Parse a CDF document into a validated per-unit :class:`Network`.

    Bus ids are renumbered to 1..n in file order (the published cases are
    already contiguous, so this is usually the identity); the original
    number is preserved in the bus name. Raises :class:`CdfParseError` for
    malformed text and :class:`ValidationError` for inconsistent data.
    """
    lines = text.splitlines()
    if not lines:
        raise CdfParseError("empty document", 1)

    base_mva = _float(_pad(lines[0]), 32, 37, 1, "MVA base")
    if base_mva <= 0:
        raise CdfParseError(f"MVA base must be positive, got {base_mva}", 1)

    bus_lines, found = _section_lines(lines, "BUS DATA")
    if not found:
        raise CdfParseError("no BUS DATA section", len(lines))
    branch_lines, found = _section_lines(lines, "BRANCH DATA")
    if not found:
        raise CdfParseError("no BRANCH DATA section", len(lines))

    raw_buses: list[Bus] = []
    for no, line in bus_lines:
        bus, shunt_g = _parse_bus(line, no)
        if shunt_g != 0.0:
            raise ValidationError(
                f"bus {bus.id}: shunt conductance is not supported by this model")
        raw_buses.append(bus)

    raw_branches = [_parse_branch(line, no) for no, line in branch_lines]

    seen: set[int] = set()
    for bus in raw_buses:
        if bus.id in seen:
            raise ValidationError(f"duplicate bus id {bus.id}")
        seen.add(bus.id)
    for br in raw_branches:
        for end in (br.from_bus, br.to_bus):
            if end not in seen:
                raise ValidationError(
                    f"branch {br.from_bus}-{br.to_bus} references unknown bus {end}")

    # Renumber to contiguous ids in file order and convert to per-unit.
    renumber = {bus.id: i + 1 for i, bus in enumerate(raw_buses)}
    buses = tuple(
        Bus(id=renumber[b.id], kind=b.kind, p_load=b.p_load / base_mva,
            q_load=b.q_load / base_mva, p_gen=b.p_gen / base_mva,
            v_setpoint=b.v_setpoint, shunt_b=b.shunt_b, name=b.name)
        for b in raw_buses
    )
    branches = tuple(
        Branch(from_bus=renumber[br.from_bus], to_bus=renumber[br.to_bus], r=br.r,
               x=br.x, b_charging=br.b_charging, tap=br.tap,
               flow_limit=br.flow_limit / base_mva if br.flow_limit else None)
        for br in raw_branches
    )
    network = Network(base_mva=base_mva, buses=buses, branches=branches)
    network.validate()
    return network


def parse_network_file(path) -> Network:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_network(handle.read())
