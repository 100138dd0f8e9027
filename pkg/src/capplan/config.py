"""Run configuration: tariffs, limits, solver/optimizer knobs, output wiring.

Configs are JSON documents with optional sections; anything omitted falls
back to the library defaults. Unknown sections or keys are rejected rather
than silently ignored, since a typo in a tariff name would otherwise change
results without warning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .placement import PenaltyWeights, Tariffs
from .power_flow import SolverOptions
from .pso import PsoParams
from .sensitivity import SensitivityConfig

OUTPUT_FORMATS = ("table", "csv", "structured")


@dataclass(frozen=True)
class VoltageLimits:
    v_min: float = 0.95
    v_max: float = 1.06

    def __post_init__(self) -> None:
        if not self.v_min < self.v_max:
            raise ValueError(f"v_min {self.v_min} must be below v_max {self.v_max}")


@dataclass(frozen=True)
class RunConfig:
    network_path: str | None = None
    output_dir: str | None = None
    output_formats: tuple[str, ...] = ("table",)
    tariffs: Tariffs = Tariffs()
    limits: VoltageLimits | None = None
    solver: SolverOptions = SolverOptions()
    pso: PsoParams = PsoParams()
    sensitivity: SensitivityConfig = SensitivityConfig()
    penalties: PenaltyWeights = PenaltyWeights()
    bank_step_mvar: float | None = None

    def __post_init__(self) -> None:
        if not self.output_formats:
            raise ValueError("at least one output format is required")
        for fmt in self.output_formats:
            if fmt not in OUTPUT_FORMATS:
                raise ValueError(f"unknown output format {fmt!r}; "
                                 f"choose from {', '.join(OUTPUT_FORMATS)}")
        if self.network_path is not None and not self.network_path:
            raise ValueError("network path must be non-empty")

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, pso=replace(self.pso, seed=seed))


def _section(data: dict, key: str, cls):
    """Build a config dataclass from one JSON section, strictly."""
    raw = data.pop(key, None)
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"section {key!r} must be an object, got {type(raw).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"section {key!r} has unknown keys: {', '.join(unknown)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section {key!r}: {exc}") from None


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")

    network_path = data.pop("network", None)
    if network_path is not None and not isinstance(network_path, str):
        raise ConfigError("'network' must be a string path")
    output_dir = data.pop("output_dir", None)
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("'output_dir' must be a string path")
    formats = data.pop("output_formats", None)
    if formats is None:
        formats = ("table",)
    elif (not isinstance(formats, list)
          or not all(isinstance(f, str) for f in formats)):
        raise ConfigError("'output_formats' must be a list of strings")

    bank_step = data.pop("bank_step_mvar", None)
    if bank_step is not None and not isinstance(bank_step, (int, float)):
        raise ConfigError("'bank_step_mvar' must be a number")

    limits = _section(data, "limits", VoltageLimits) if "limits" in data else None
    tariffs = _section(data, "tariffs", Tariffs)
    solver = _section(data, "solver", SolverOptions)
    pso = _section(data, "pso", PsoParams)
    sensitivity = _section(data, "sensitivity", SensitivityConfig)
    penalties = _section(data, "penalties", PenaltyWeights)

    if data:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(data))}")
    try:
        return RunConfig(
            network_path=network_path,
            output_dir=output_dir,
            output_formats=tuple(formats),
            tariffs=tariffs,
            limits=limits,
            solver=solver,
            pso=pso,
            sensitivity=sensitivity,
            penalties=penalties,
            bank_step_mvar=bank_step,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
