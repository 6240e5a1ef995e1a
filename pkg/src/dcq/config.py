"""
Run configuration: one JSON document per analysis.

    {
      "branches": [{"b": 1, "p": "1/2"}, {"b": 1, "p": "1/3"}],
      "toll": {"kind": "impulse", "j": 0},
      "horizon": 1000000,
      "truncation": 1000,
      "replicas": 100,
      "seed": 20240601,
      "tolerances": {"root_tol": 1e-13, "report_tol": 1e-9},
      "envelope": {"c": 1.0, "eta": 0.0},
      "output": {"dir": "out", "formats": ["json", "csv"]},
      "checkpoint_factor": 2.0,
      "mgf": [0.1]
    }

A file toll `{"kind": "file", "path": "tolls.csv", "zero_tail": true}` is zero past
its stored values, which gives `limit` an exact truncation bound.

Only `branches` and `toll` are required. Ratios p are strings so that they
stay exact. `to_dict` returns the echo embedded in every report, and parsing
the echo gives back an equal config.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .constants import (
    DEFAULT_CHECKPOINT_FACTOR,
    DEFAULT_HORIZON,
    DEFAULT_OUTPUT_FORMATS,
    DEFAULT_REPLICAS,
    DEFAULT_REPORT_TOL,
    DEFAULT_ROOT_TOL,
    DEFAULT_SEED,
    DEFAULT_TRUNCATION,
)
from .coefficients import Envelope
from .errors import ConfigParseError, DcqError
from .recurrence import RecurrenceSpec, validate_spec
from .stochastic.drivers import SEED_LIMIT, DriverSpec, sample_toll, variant_from_dict
from .tolls import TollSequence, constant, from_values, impulse, prefix

logger = logging.getLogger(__name__)

TOLL_KINDS = ("impulse", "prefix", "constant", "file", "driver")
OUTPUT_FORMATS = ("json", "csv")

_TOP_LEVEL_KEYS = {
    "branches",
    "toll",
    "horizon",
    "truncation",
    "replicas",
    "seed",
    "tolerances",
    "envelope",
    "output",
    "checkpoint_factor",
    "mgf",
}


@dataclass(frozen=True)
class AnalysisConfig:
    branches: tuple[tuple[int | float, str], ...]
    toll: dict[str, Any]
    horizon: int = DEFAULT_HORIZON
    truncation: int = DEFAULT_TRUNCATION
    replicas: int = DEFAULT_REPLICAS
    seed: int = DEFAULT_SEED
    root_tol: float = DEFAULT_ROOT_TOL
    report_tol: float = DEFAULT_REPORT_TOL
    envelope: tuple[float, float] | None = None
    output_dir: str = "."
    formats: tuple[str, ...] = DEFAULT_OUTPUT_FORMATS
    checkpoint_factor: float = DEFAULT_CHECKPOINT_FACTOR
    mgf_points: tuple[float, ...] = ()
    base_dir: str = field(default=".", compare=False)

    def spec(self) -> RecurrenceSpec:
        return validate_spec(self.branches)

    def envelope_bound(self) -> Envelope | None:
        if self.envelope is None:
            return None
        c, eta = self.envelope
        return Envelope(c=c, eta=eta)

    def driver(self) -> DriverSpec | None:
        if self.toll["kind"] != "driver":
            return None
        return DriverSpec(variant_from_dict(self.toll), seed=self.seed)

    def with_overrides(self, **changes: Any) -> AnalysisConfig:
        """Replace scalar fields (None values are ignored) and re-check them."""
        updates = {k: v for k, v in changes.items() if v is not None}
        if not updates:
            return self
        echo = self.to_dict()
        if "output_dir" in updates:
            echo["output"]["dir"] = updates.pop("output_dir")
        if "mgf_points" in updates:
            echo["mgf"] = list(updates.pop("mgf_points"))
        return parse_config({**echo, **updates}, base_dir=self.base_dir)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "branches": [{"b": b, "p": p} for b, p in self.branches],
            "toll": dict(self.toll),
            "horizon": self.horizon,
            "truncation": self.truncation,
            "replicas": self.replicas,
            "seed": self.seed,
            "tolerances": {"root_tol": self.root_tol, "report_tol": self.report_tol},
            "envelope": None
            if self.envelope is None
            else {"c": self.envelope[0], "eta": self.envelope[1]},
            "output": {"dir": self.output_dir, "formats": list(self.formats)},
            "checkpoint_factor": self.checkpoint_factor,
            "mgf": list(self.mgf_points),
        }
        return out


# =============================================================================
# FIELD READERS
# =============================================================================


def _int(data: dict[str, Any], key: str, default: int, minimum: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f"'{key}' must be an integer, got {value!r}.")
    if value < minimum:
        raise DcqError(f"'{key}' must be >= {minimum}, got {value}.")
    return value


def _number(data: dict[str, Any], key: str, default: float | None = None) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"'{key}' must be a number, got {value!r}.")
    if not math.isfinite(value):
        raise ConfigParseError(f"'{key}' must be finite, got {value!r}.")
    return float(value)


def _object(data: dict[str, Any], key: str) -> dict[str, Any]:
    value = data.get(key)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigParseError(f"'{key}' must be an object, got {value!r}.")
    return value


def _branches(raw: Any) -> tuple[tuple[int | float, str], ...]:
    if not isinstance(raw, list):
        raise ConfigParseError(f"'branches' must be a list of {{b, p}} objects, got {raw!r}.")
    out: list[tuple[int | float, str]] = []
    for j, item in enumerate(raw):
        if not isinstance(item, dict) or set(item) != {"b", "p"}:
            raise ConfigParseError(f"Branch {j} must be an object with keys 'b' and 'p'.")
        b, p = item["b"], item["p"]
        if isinstance(b, bool) or not isinstance(b, (int, float)):
            raise ConfigParseError(f"Branch {j}: weight b must be a number, got {b!r}.")
        if not isinstance(p, str):
            raise ConfigParseError(
                f"Branch {j}: ratio p must be a string such as \"1/3\", got {p!r}."
            )
        out.append((b, p))
    return tuple(out)


def _toll(raw: Any) -> dict[str, Any]:
    if not isinstance(raw, dict) or raw.get("kind") not in TOLL_KINDS:
        raise ConfigParseError(
            f"'toll' must be an object whose 'kind' is one of {TOLL_KINDS}, got {raw!r}."
        )
    kind = raw["kind"]
    if kind == "impulse":
        _int(raw, "j", 0, 0)
    elif kind == "prefix":
        _int(raw, "n0", 0, 0)
    elif kind == "constant":
        _number(raw, "value")
    elif kind == "file":
        if not isinstance(raw.get("path"), str):
            raise ConfigParseError("File toll needs a string 'path'.")
        if not isinstance(raw.get("zero_tail", False), bool):
            raise ConfigParseError(f"'zero_tail' must be true or false, got {raw['zero_tail']!r}.")
    elif kind == "driver":
        variant_from_dict(raw)
    return dict(raw)


def parse_config(data: Any, base_dir: str | Path = ".") -> AnalysisConfig:
    """Build an AnalysisConfig from a decoded JSON document."""
    if not isinstance(data, dict):
        raise ConfigParseError("Config must be a JSON object.")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigParseError(f"Unknown config keys: {sorted(unknown)}.")
    if "branches" not in data or "toll" not in data:
        raise ConfigParseError("Config needs 'branches' and 'toll'.")

    tolerances = _object(data, "tolerances")
    output = _object(data, "output")
    envelope_raw = data.get("envelope")
    envelope: tuple[float, float] | None = None
    if envelope_raw is not None:
        env = _object(data, "envelope")
        envelope = (_number(env, "c"), _number(env, "eta"))

    formats_raw = output.get("formats", list(DEFAULT_OUTPUT_FORMATS))
    if not isinstance(formats_raw, list) or not set(formats_raw) <= set(OUTPUT_FORMATS):
        raise ConfigParseError(f"'output.formats' must list items of {OUTPUT_FORMATS}.")
    out_dir = output.get("dir", ".")
    if not isinstance(out_dir, str):
        raise ConfigParseError(f"'output.dir' must be a string, got {out_dir!r}.")

    mgf_raw = data.get("mgf", [])
    if not isinstance(mgf_raw, list):
        raise ConfigParseError(f"'mgf' must be a list of numbers, got {mgf_raw!r}.")
    mgf_points = tuple(_number({"mgf": t}, "mgf") for t in mgf_raw)

    seed = _int(data, "seed", DEFAULT_SEED, 0)
    if seed >= SEED_LIMIT:
        raise DcqError(f"'seed' must be below 2^64, got {seed}.")

    checkpoint_factor = _number(data, "checkpoint_factor", DEFAULT_CHECKPOINT_FACTOR)
    if not checkpoint_factor > 1.0:
        raise DcqError(f"'checkpoint_factor' must be > 1, got {checkpoint_factor}.")

    config = AnalysisConfig(
        branches=_branches(data["branches"]),
        toll=_toll(data["toll"]),
        horizon=_int(data, "horizon", DEFAULT_HORIZON, 1),
        truncation=_int(data, "truncation", DEFAULT_TRUNCATION, 0),
        replicas=_int(data, "replicas", DEFAULT_REPLICAS, 1),
        seed=seed,
        root_tol=_number(tolerances, "root_tol", DEFAULT_ROOT_TOL),
        report_tol=_number(tolerances, "report_tol", DEFAULT_REPORT_TOL),
        envelope=envelope,
        output_dir=out_dir,
        formats=tuple(formats_raw),
        checkpoint_factor=checkpoint_factor,
        mgf_points=mgf_points,
        base_dir=str(base_dir),
    )
    logger.debug(f"parse_config: {config.to_dict()}")
    return config


def load_config(path: str | Path) -> AnalysisConfig:
    """Read and parse a JSON config file; relative toll paths resolve against its folder."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigParseError(f"Cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"Config {path} is not valid JSON: {e}") from e
    return parse_config(data, base_dir=path.parent)


# =============================================================================
# TOLL RESOLUTION
# =============================================================================


def _read_toll_file(path: Path) -> np.ndarray:
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(path.read_text(encoding="utf-8"))
            if not isinstance(raw, list):
                raise TypeError("expected a JSON list")
            values = np.asarray(raw, dtype=np.float64)
        else:
            values = np.loadtxt(path, dtype=np.float64, ndmin=1, delimiter=",")
    except OSError as e:
        raise ConfigParseError(f"Cannot read toll file {path}: {e}") from e
    except (ValueError, TypeError) as e:
        raise ConfigParseError(f"Toll file {path} does not hold numbers: {e}") from e
    values = values.ravel()
    if values.size == 0:
        raise DcqError(f"Toll file {path} holds no values.")
    return values


def resolve_toll(config: AnalysisConfig, replica: int = 0) -> TollSequence:
    """The toll named by the config; driver tolls are realized for one replica."""
    spec = config.toll
    kind = spec["kind"]
    if kind == "impulse":
        return impulse(spec.get("j", 0))
    if kind == "prefix":
        return prefix(spec.get("n0", 0))
    if kind == "constant":
        return constant(spec["value"])
    if kind == "file":
        path = Path(spec["path"])
        if not path.is_absolute():
            path = Path(config.base_dir) / path
        return from_values(
            _read_toll_file(path),
            origin=dict(spec),
            zero_tail=spec.get("zero_tail", False),
        )
    driver = config.driver()
    assert driver is not None
    return sample_toll(driver, config.horizon, replica=replica)
