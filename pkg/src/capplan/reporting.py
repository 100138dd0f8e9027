"""Human tables and machine outputs for solve, ranking and placement runs.

All emitters are pure string builders with fixed number formatting and no
timestamps, so identical inputs give byte-identical documents. The CSV
column layouts are part of the tool's interface and are covered by tests.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

import numpy as np

from .network import Network
from .placement import PlacementResult
from .power_flow import PowerFlowSolution
from .sensitivity import CandidateSet, LossSensitivityRecord


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    out = []
    fmt_row = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    out.append(fmt_row(headers))
    out.append("  ".join("-" * w for w in widths))
    out.extend(fmt_row(row) for row in rows)
    return "\n".join(out)


def _csv_doc(headers: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue()


def _json_doc(payload) -> str:
    def clean(value):
        if isinstance(value, dict):
            return {k: clean(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [clean(v) for v in value]
        if isinstance(value, np.ndarray):
            return [clean(v) for v in value.tolist()]
        if isinstance(value, (np.floating, np.integer, np.bool_)):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value

    return json.dumps(clean(payload), indent=2, sort_keys=True) + "\n"


# --- power flow -----------------------------------------------------------

def solution_table(network: Network, solution: PowerFlowSolution) -> str:
    rows = []
    for i, bus in enumerate(network.buses):
        rows.append([
            str(bus.id),
            bus.kind.value,
            f"{solution.state.v_mag[i]:.4f}",
            f"{math.degrees(solution.state.v_ang[i]):.2f}",
            f"{solution.p_inj[i] * network.base_mva:.3f}",
            f"{solution.q_inj[i] * network.base_mva:.3f}",
        ])
    table = _table(["bus", "kind", "V (pu)", "angle (deg)", "P (MW)", "Q (MVAr)"],
                   rows)
    status = "converged" if solution.converged else "did not converge"
    lines = [
        table,
        "",
        f"{status} after {solution.iterations} iterations "
        f"(max mismatch {solution.max_mismatch:.3e} pu)",
        f"real loss: {solution.p_loss_total * network.base_mva:.4f} MW",
        f"reactive loss: {solution.q_loss_total * network.base_mva:.4f} MVAr",
    ]
    return "\n".join(lines) + "\n"


def solution_json(network: Network, solution: PowerFlowSolution) -> str:
    payload = {
        "base_mva": network.base_mva,
        "converged": solution.converged,
        "iterations": solution.iterations,
        "max_mismatch": solution.max_mismatch,
        "p_loss_pu": solution.p_loss_total,
        "q_loss_pu": solution.q_loss_total,
        "buses": [
            {
                "id": bus.id,
                "kind": bus.kind.value,
                "v_mag": solution.state.v_mag[i],
                "v_ang_rad": solution.state.v_ang[i],
                "p_inj_pu": solution.p_inj[i],
                "q_inj_pu": solution.q_inj[i],
            }
            for i, bus in enumerate(network.buses)
        ],
        "branch_flows": [
            {
                "from_bus": f.from_bus,
                "to_bus": f.to_bus,
                "p_from_pu": f.s_from.real,
                "q_from_pu": f.s_from.imag,
                "p_to_pu": f.s_to.real,
                "q_to_pu": f.s_to.imag,
                "p_loss_pu": f.p_loss,
            }
            for f in solution.branch_flows
        ],
    }
    return _json_doc(payload)


def solution_csv(network: Network, solution: PowerFlowSolution) -> str:
    rows = [[bus.id, bus.kind.value, repr(float(solution.state.v_mag[i])),
             repr(float(solution.state.v_ang[i]))]
            for i, bus in enumerate(network.buses)]
    return _csv_doc(["bus", "kind", "v_mag", "v_ang_rad"], rows)


# --- sensitivity ----------------------------------------------------------

def sensitivity_csv(records: list[LossSensitivityRecord]) -> str:
    rows = [[r.from_bus, r.to_bus, repr(float(r.lsf)), r.end_bus,
             repr(float(r.end_bus_voltage)), repr(float(r.norm_voltage))]
            for r in records]
    return _csv_doc(["From", "To", "LSF", "End Bus", "Bus Voltage", "Norm"], rows)


def sensitivity_table(records: list[LossSensitivityRecord],
                      candidates: CandidateSet) -> str:
    rows = [[str(r.from_bus), str(r.to_bus), f"{r.lsf:.6f}", str(r.end_bus),
             f"{r.end_bus_voltage:.4f}", f"{r.norm_voltage:.4f}"]
            for r in records]
    table = _table(["from", "to", "LSF", "end bus", "V (pu)", "norm V"], rows)
    if candidates:
        ranked = ", ".join(f"{b} (lsf {s:.6f})"
                           for b, s in zip(candidates.buses, candidates.scores))
    else:
        ranked = "none passed the voltage screen"
    return f"{table}\n\ncandidate buses: {ranked}\n"


def sensitivity_json(records: list[LossSensitivityRecord],
                     candidates: CandidateSet) -> str:
    payload = {
        "records": [asdict(r) for r in records],
        "candidates": {
            "buses": list(candidates.buses),
            "scores": list(candidates.scores),
        },
    }
    return _json_doc(payload)


# --- placement ------------------------------------------------------------

def _finite(values) -> list[float]:
    return [v for v in values if math.isfinite(v)]


def placement_table(result: PlacementResult, network: Network) -> str:
    before, after = result.before, result.after
    cost_rows = [
        ["power loss (kW)", f"{before.p_loss_kw:.4f}", f"{after.p_loss_kw:.4f}"],
        ["loss cost ($/year)", f"{before.loss_cost:.4f}", f"{after.loss_cost:.4f}"],
        ["capacitor cost ($/year)", f"{before.capacitor_cost:.4f}",
         f"{after.capacitor_cost:.4f}"],
        ["total annual cost ($/year)", f"{before.total_cost:.4f}",
         f"{after.total_cost:.4f}"],
        ["minimum voltage (pu)", f"{before.min_voltage:.4f}",
         f"{after.min_voltage:.4f}"],
        ["maximum voltage (pu)", f"{before.max_voltage:.4f}",
         f"{after.max_voltage:.4f}"],
        ["feasible", str(before.feasible), str(after.feasible)],
    ]
    cost_table = _table(["quantity", "before", "after"], cost_rows)

    plan_rows = []
    for bus_id, mvar in result.plan.items_mvar():
        if mvar == 0.0:
            continue
        i = network.index_of[bus_id]
        plan_rows.append([
            str(bus_id),
            f"{mvar:.4f}",
            f"{before.bus_voltages[i]:.4f}",
            f"{after.bus_voltages[i]:.4f}",
        ])
    plan_table = _table(["bus", "size (MVar)", "V before (pu)", "V after (pu)"],
                        plan_rows)

    lines = [cost_table, ""]
    finite_costs = _finite(result.trace)
    finite_losses = _finite(result.loss_trace)
    if finite_costs:
        lines.append(f"swarm objective over {len(result.trace)} iterations: "
                     f"worst {max(finite_costs):.4f}, best {min(finite_costs):.4f}")
    if finite_losses:
        lines.append(f"swarm real loss over iterations (kW): "
                     f"worst {max(finite_losses):.4f}, best {min(finite_losses):.4f}")
    candidates = ", ".join(str(b) for b in result.candidate_buses) or "none"
    lines += [
        f"candidate buses: {candidates}",
        f"seed: {result.seed}    power-flow evaluations: {result.evaluations}",
        "",
        plan_table,
        f"total installed: {result.plan.total_mvar:.4f} MVar",
    ]
    for note in result.diagnostics:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def placement_json(result: PlacementResult, network: Network) -> str:
    payload = {
        "seed": result.seed,
        "evaluations": result.evaluations,
        "candidates": {
            "buses": list(result.candidate_buses.buses),
            "scores": list(result.candidate_buses.scores),
        },
        "plan_mvar": {str(b): mvar for b, mvar in result.plan.items_mvar()},
        "total_mvar": result.plan.total_mvar,
        "before": asdict(result.before),
        "after": asdict(result.after),
        "trace": list(result.trace),
        "loss_trace_kw": list(result.loss_trace),
        "diagnostics": list(result.diagnostics),
        "base_mva": network.base_mva,
    }
    return _json_doc(payload)


def trace_csv(result: PlacementResult) -> str:
    rows = [[i + 1, repr(float(cost))]
            for i, cost in enumerate(result.trace)]
    return _csv_doc(["iteration", "gbest_cost"], rows)


def voltage_csv(result: PlacementResult, network: Network) -> str:
    rows = [[bus.id, repr(float(result.before.bus_voltages[i])),
             repr(float(result.after.bus_voltages[i]))]
            for i, bus in enumerate(network.buses)]
    return _csv_doc(["bus", "v_before", "v_after"], rows)


# --- document bundles -----------------------------------------------------

def emit_solve(network: Network, solution: PowerFlowSolution,
               formats) -> dict[str, str]:
    docs = {}
    if "table" in formats:
        docs["solve.txt"] = solution_table(network, solution)
    if "csv" in formats:
        docs["solve.csv"] = solution_csv(network, solution)
    if "structured" in formats:
        docs["solve.json"] = solution_json(network, solution)
    return docs


def emit_sensitivity(records, candidates, formats) -> dict[str, str]:
    docs = {}
    if "table" in formats:
        docs["sensitivity.txt"] = sensitivity_table(records, candidates)
    if "csv" in formats:
        docs["sensitivity.csv"] = sensitivity_csv(records)
    if "structured" in formats:
        docs["sensitivity.json"] = sensitivity_json(records, candidates)
    return docs


def emit_report(result: PlacementResult, network: Network,
                formats) -> dict[str, str]:
    docs = {}
    if "table" in formats:
        docs["placement.txt"] = placement_table(result, network)
    if "csv" in formats:
        docs["trace.csv"] = trace_csv(result)
        docs["voltages.csv"] = voltage_csv(result, network)
    if "structured" in formats:
        docs["placement.json"] = placement_json(result, network)
    return docs
