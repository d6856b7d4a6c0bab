"""Run configuration: a flat ``dotted.key = value`` text format resolved to typed fields."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidParameterError, VacradError
from .model import ModelParams, _parse_resonant, validate

TASKS = (
    "flux-density",
    "flux",
    "pair-correlation",
    "voltage-noise",
    "squeezing",
    "wigner",
    "negativity",
    "witness",
    "stability",
)


class ConfigError(VacradError, ValueError):
    """A configuration value is missing, unknown or malformed."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _float(s):
    return float(s)


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


def _order(s):
    return "auto" if str(s).strip() == "auto" else _positive_int(s)


def _drive(s):
    s = str(s).strip()
    if s.startswith("resonant"):
        _parse_resonant(s)
        return s
    return float(s)


def _theta(s):
    s = str(s).strip()
    return "opt" if s == "opt" else float(s)


def _choice(*opts):
    def parse(s):
        s = str(s).strip()
        if s not in opts:
            raise ValueError(f"expected one of {', '.join(opts)}")
        return s

    return parse


def _str(s):
    return str(s).strip()


# key -> (parser, default)
SCHEMA = {
    "task": (_choice(*TASKS), "flux-density"),
    "model.gamma_over_omega_a": (_float, 3e-2),
    "model.eta_over_eta_c": (_float, 0.8),
    "model.epsilon_over_gamma": (_float, 5.0 / 3.0 * 1e-2),
    "model.omega_d": (_drive, "resonant"),
    "model.omega_th_over_omega_a": (_float, 0.0),
    "model.n_harmonics": (_order, "auto"),
    "grid.start": (_float, None),
    "grid.stop": (_float, None),
    "grid.num": (_positive_int, 200),
    "grid.scale": (_choice("linear", "log"), "linear"),
    "grid.second_start": (_float, None),
    "grid.second_stop": (_float, None),
    "grid.second_num": (_positive_int, 50),
    "task.theta": (_theta, "opt"),
    "task.harmonic": (_positive_int, 1),
    "task.delta": (_float, 1e-6),
    "task.window_min": (_float, None),
    "task.window_max": (_float, None),
    "task.rel_tol": (_float, 1e-8),
    "output.path": (_str, "-"),
    "output.format": (_choice("csv", "json"), "csv"),
    "output.omega_a": (_float, None),
    "output.unit": (_choice("rad/s", "Hz"), "rad/s"),
}

RATIO_KEYS = [k for k in SCHEMA if k.startswith("model.")]


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def parse_override(item: str) -> tuple[str, str]:
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError(item, "override must look like key=value")
    return key.strip(), value.strip()


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, raw: dict) -> "RunConfig":
        values = {k: d for k, (_, d) in SCHEMA.items()}
        for key, text in raw.items():
            if key not in SCHEMA:
                raise ConfigError(key, "unknown configuration key")
            parser = SCHEMA[key][0]
            try:
                values[key] = parser(text)
            except (ValueError, InvalidParameterError) as exc:
                raise ConfigError(key, f"invalid value {text!r} ({exc})") from None
        cfg = cls(values)
        cfg.model_params()  # surface ratio errors with their field path
        return cfg

    @classmethod
    def load(cls, path=None, overrides=()) -> "RunConfig":
        raw = {}
        if path is not None:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(str(path), f"cannot read config file ({exc.strerror})") from None
            raw.update(parse_text(text, str(path)))
        for item in overrides:
            k, v = parse_override(item)
            raw[k] = v
        return cls.from_mapping(raw)

    def __getitem__(self, key):
        return self.values[key]

    def replace(self, **changes) -> "RunConfig":
        v = dict(self.values)
        for k, val in changes.items():
            v[k] = val
        return RunConfig(v)

    def with_value(self, key: str, value) -> "RunConfig":
        if key not in SCHEMA:
            raise ConfigError(key, "unknown configuration key")
        v = dict(self.values)
        v[key] = value
        return RunConfig(v)

    def model_params(self) -> ModelParams:
        """Resolve the ratio block (including drive tokens) and validate it."""
        v = self.values
        try:
            p = ModelParams.from_ratios(
                gamma_over_omega_a=v["model.gamma_over_omega_a"],
                eta_over_eta_c=v["model.eta_over_eta_c"],
                epsilon_over_gamma=v["model.epsilon_over_gamma"],
                omega_d=v["model.omega_d"],
                omega_th_over_omega_a=v["model.omega_th_over_omega_a"],
                n_harmonics=1,
            )
        except InvalidParameterError as exc:
            raise ConfigError("model", str(exc)) from None
        if v["task"] == "stability":
            return p
        try:
            return validate(p)
        except InvalidParameterError as exc:
            raise ConfigError("model", str(exc)) from None

    def digest(self) -> str:
        """Stable hash of every value except the output destination."""
        payload = {k: v for k, v in self.values.items() if k != "output.path"}
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def as_text(self) -> str:
        return "".join(f"{k} = {self.values[k]}\n" for k in SCHEMA if self.values[k] is not None)
