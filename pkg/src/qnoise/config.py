"""Experiment configuration: scenario parameters, validation and JSON round-trip."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SCENARIOS = ("decay", "symmetrize", "zeno", "qec-benefit", "bounds", "verify-code")
FORMATS = ("csv", "json")
MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    pass


def _int_list(value) -> list[int]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    return [int(v) for v in value]


# name -> (parser, default); rates listed in POSITIVE must be > 0
SCENARIO_PARAMS: dict[str, dict[str, tuple[Any, Any]]] = {
    "decay": {
        "gamma": (float, 1.0),
        "omega0": (float, 100.0),
        "n_modes": (int, 1000),
        "half_window": (float, 50.0),
        "spectrum": (str, "flat"),
        "width": (float, None),
        "t_max": (float, 3.0),
        "steps": (int, 300),
    },
    "qec-benefit": {
        "gamma": (float, 1.0),
        "t_max": (float, 0.3),
        "points": (int, 50),
        "logical": (str, "1"),
        "decay": (str, "markov"),
        "mode": (str, "density"),
        "trials": (int, 200),
    },
    "symmetrize": {
        "r_values": (_int_list, [1, 2, 4, 8]),
        "p": (float, 0.01),
        "state": (str, "+"),
    },
    "zeno": {
        "k": (float, 1.0),
        "n_values": (_int_list, [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]),
    },
    "bounds": {
        "l": (int, 1),
        "t": (int, 1),
        "n_max": (int, 16),
    },
    "verify-code": {
        "code": (str, "five"),
    },
}

NONNEGATIVE = {"k", "p", "t"}
POSITIVE = {"gamma", "omega0", "n_modes", "half_window", "width", "t_max", "steps", "points", "trials"}
CHOICES = {
    "spectrum": ("flat", "gaussian", "lorentzian"),
    "logical": ("0", "1", "+", "-", "+i", "-i"),
    "decay": ("markov", "numeric"),
    "mode": ("density", "mc"),
    "state": ("0", "1", "+", "-", "+i", "-i"),
}


def coerce_params(scenario: str, raw: dict[str, Any]) -> dict[str, Any]:
    """Parse raw values for ``scenario`` and check them; unknown keys are errors."""
    spec = SCENARIO_PARAMS[scenario]
    unknown = set(raw) - set(spec)
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {scenario}: {', '.join(sorted(unknown))}")
    out = {}
    for key, value in raw.items():
        parse = spec[key][0]
        try:
            out[key] = None if value is None else parse(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
        v = out[key]
        if key in POSITIVE and v is not None and not v > 0:
            raise ConfigError(f"{key} must be positive, got {v!r}")
        if key in NONNEGATIVE and v is not None and v < 0:
            raise ConfigError(f"{key} must be nonnegative, got {v!r}")
        if key in CHOICES and v not in CHOICES[key]:
            raise ConfigError(f"{key} must be one of {CHOICES[key]}, got {v!r}")
    return out


@dataclass
class ExperimentConfig:
    scenario: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        params = coerce_params(self.scenario, self.parameters)
        defaults = {k: d for k, (_, d) in SCENARIO_PARAMS[self.scenario].items()}
        self.parameters = defaults | params

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "parameters": dict(self.parameters),
            "output_path": self.output_path,
            "format": self.format,
            "seed": self.seed,
        }

    def render(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        allowed = {"scenario", "parameters", "output_path", "format", "seed"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        if "scenario" not in data:
            raise ConfigError("config needs a scenario")
        return cls(
            scenario=data["scenario"],
            parameters=dict(data.get("parameters") or {}),
            output_path=data.get("output_path"),
            format=data.get("format", "csv"),
            seed=data.get("seed", 0),
        )

    @classmethod
    def parse(cls, text: str) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.parse(text)
