"""Command line front end.

Subcommands: ``solve`` (power flow and loss summary), ``sensitivity``
(branch ranking table/CSV), ``place`` (full compensation pipeline). Exit
codes: 0 success, 1 usage error, 2 unreadable or invalid input data,
3 solver did not converge.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .cdf import parse_network
from .config import OUTPUT_FORMATS, RunConfig, load_config
from .errors import (CapplanError, CdfParseError, ConfigError,
                     ConvergenceError, SolverError, ValidationError)
from .network import Network, with_voltage_limits
from .placement import run_placement
from .power_flow import solve
from .reporting import emit_report, emit_sensitivity, emit_solve
from .sensitivity import loss_sensitivity, select_candidates

log = logging.getLogger("capplan")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NO_CONVERGENCE = 3

# --network accepts this name for the packaged study case when no file of
# the same name exists in the working directory.
BUILTIN_CASE = "ieee14"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--network", metavar="PATH",
                        help=f"CDF network file ('{BUILTIN_CASE}' for the "
                             "bundled 14-bus case)")
    common.add_argument("--config", metavar="PATH",
                        help="JSON run config ('default' for built-in defaults)")
    common.add_argument("--seed", type=int, metavar="N",
                        help="override the optimizer seed")
    common.add_argument("--out", metavar="DIR",
                        help="directory for report files")
    common.add_argument("--format", dest="formats", action="append",
                        choices=OUTPUT_FORMATS, metavar="FMT",
                        help="output format (table, csv, structured); repeatable")

    parser = _Parser(prog="capplan",
                     description="Load flow, loss-sensitivity ranking and "
                                 "capacitor sizing for distribution networks")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("solve", parents=[common],
                   help="run the power flow and print a loss summary")
    sub.add_parser("sensitivity", parents=[common],
                   help="rank capacitor candidate buses by loss sensitivity")
    sub.add_parser("place", parents=[common],
                   help="size shunt capacitors to minimize annual cost")
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("CAPPLAN_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_run_config(args) -> RunConfig:
    if args.config in (None, "default"):
        config = RunConfig()
    else:
        config = load_config(args.config)
    if args.network:
        config = replace(config, network_path=args.network)
    if args.out:
        config = replace(config, output_dir=args.out)
    if args.formats:
        config = replace(config, output_formats=tuple(dict.fromkeys(args.formats)))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if config.output_dir is None and any(f != "table" for f in config.output_formats):
        raise UsageError("--out DIR is required for csv/structured output")
    return config


def _load_network(config: RunConfig) -> Network:
    path = config.network_path
    if path is None:
        raise UsageError("a network is required (--network PATH or config entry)")
    if path == BUILTIN_CASE and not Path(path).exists():
        log.info("using the bundled %s case", BUILTIN_CASE)
        text = resources.files("capplan.data").joinpath("ieee14.cdf").read_text()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read network file {path}: "
                                  f"{exc.strerror or exc}") from None
    network = parse_network(text)
    if config.limits is not None:
        network = with_voltage_limits(network, config.limits.v_min,
                                      config.limits.v_max)
    return network


def _write_docs(config: RunConfig, docs: dict[str, str]) -> None:
    non_table = [name for name in docs if not name.endswith(".txt")]
    if config.output_dir is None:
        if non_table:
            raise UsageError("--out DIR is required for csv/structured output")
        return
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in docs.items():
        target = out_dir / name
        target.write_text(text, encoding="utf-8")
        log.info("wrote %s", target)


def _cmd_solve(config: RunConfig) -> int:
    network = _load_network(config)
    solution = solve(network, config.solver)
    docs = emit_solve(network, solution, config.output_formats)
    if "solve.txt" in docs:
        sys.stdout.write(docs["solve.txt"])
    if not solution.converged:
        print("power flow did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    _write_docs(config, docs)
    return EXIT_OK


def _cmd_sensitivity(config: RunConfig) -> int:
    network = _load_network(config)
    solution = solve(network, config.solver)
    if not solution.converged:
        print("power flow did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    records = loss_sensitivity(solution, network)
    candidates = select_candidates(records, network, config.sensitivity)
    docs = emit_sensitivity(records, candidates, config.output_formats)
    if "sensitivity.txt" in docs:
        sys.stdout.write(docs["sensitivity.txt"])
    _write_docs(config, docs)
    return EXIT_OK


def _cmd_place(config: RunConfig) -> int:
    network = _load_network(config)
    result = run_placement(
        network,
        tariffs=config.tariffs,
        sensitivity_config=config.sensitivity,
        pso_params=config.pso,
        solver_options=config.solver,
        weights=config.penalties,
        bank_step_mvar=config.bank_step_mvar,
    )
    docs = emit_report(result, network, config.output_formats)
    if "placement.txt" in docs:
        sys.stdout.write(docs["placement.txt"])
    _write_docs(config, docs)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "sensitivity": _cmd_sensitivity,
    "place": _cmd_place,
}


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help prints and exits 0
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        if args.command is None:
            raise UsageError("a command is required (solve, sensitivity, place)")
        config = _load_run_config(args)
        return _COMMANDS[args.command](config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"capplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CdfParseError, ValidationError, ConfigError, OSError) as exc:
        print(f"capplan: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, SolverError) as exc:
        print(f"capplan: solver error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except CapplanError as exc:
        print(f"capplan: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
