"""
Report bundles and their JSON / CSV files.

CSV files are RFC-4180 (csv module, CRLF line ends) with numbers written to
17 significant digits, so every float reads back to the same double.
"""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import pendulum

from .coefficients import CoefficientTable, LimitEstimate
from .constants import CSV_SIGNIFICANT_DIGITS, MC_HEADER, QUANTILE_LEVELS, TRACE_HEADER
from .errors import InternalInconsistency
from .exponent import CriticalExponent, RegimeReport
from .recurrence import Trajectory
from .stochastic.montecarlo import MonteCarloReport

logger = logging.getLogger(__name__)

PACKAGE_NAME = "dcq-recurrence"


def get_app_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except (ImportError, PackageNotFoundError):
        return "0.1.0"


def format_number(value: float | int) -> str:
    if isinstance(value, int):
        return str(value)
    return format(float(value), f".{CSV_SIGNIFICANT_DIGITS}g")


# =============================================================================
# TRACE
# =============================================================================


@dataclass(frozen=True)
class TraceRow:
    n: int
    x_n: float
    ratio: float

    def as_row(self) -> list[str]:
        return [format_number(self.n), format_number(self.x_n), format_number(self.ratio)]


def convergence_trace(
    trajectory: Trajectory, s0: float, checkpoints: Sequence[int]
) -> list[TraceRow]:
    ratios = trajectory.ratios(s0, checkpoints)
    return [
        TraceRow(n=int(n), x_n=float(trajectory.values[n]), ratio=float(r))
        for n, r in zip(checkpoints, ratios)
    ]


def mc_rows(report: MonteCarloReport) -> list[list[str]]:
    rows = []
    for s in report.summary:
        quantiles = [s.quantiles[level] for level in QUANTILE_LEVELS]
        q05, q25, _, q75, q95 = quantiles
        rows.append(
            [
                format_number(s.n),
                format_number(q05),
                format_number(q25),
                format_number(s.median),
                format_number(q75),
                format_number(q95),
                format_number(s.mean),
            ]
        )
    return rows


# =============================================================================
# BUNDLE
# =============================================================================


@dataclass
class ReportBundle:
    """Everything one command produced, with the config echo and tool version."""

    command: str
    config: dict[str, Any]
    exponent: CriticalExponent
    regime: RegimeReport | None = None
    coefficients: CoefficientTable | None = None
    limit: LimitEstimate | None = None
    trace: list[TraceRow] = field(default_factory=list)
    monte_carlo: MonteCarloReport | None = None
    extras: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    version: str = field(default_factory=get_app_version)
    generated_at: str = field(
        default_factory=lambda: pendulum.now("UTC").to_iso8601_string()
    )

    def check_consistency(self) -> None:
        s0 = self.exponent.s0
        others = {
            "regime": None if self.regime is None else self.regime.s0,
            "coefficients": None if self.coefficients is None else self.coefficients.s0,
            "monte_carlo": None if self.monte_carlo is None else self.monte_carlo.s0,
        }
        for name, value in others.items():
            if value is not None and value != s0:
                raise InternalInconsistency(
                    f"Report section '{name}' uses s0={value!r}, expected {s0!r}."
                )

    def to_dict(self) -> dict[str, Any]:
        self.check_consistency()
        out: dict[str, Any] = {
            "command": self.command,
            "version": self.version,
            "generated_at": self.generated_at,
            "config": self.config,
            "exponent": self.exponent.to_dict(),
            "warnings": list(self.warnings),
        }
        if self.regime is not None:
            out["regime"] = self.regime.to_dict()
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients.to_dict()
        if self.limit is not None:
            out["limit"] = self.limit.to_dict()
        if self.trace:
            out["trace"] = [{"n": r.n, "x_n": r.x_n, "ratio": r.ratio} for r in self.trace]
        if self.monte_carlo is not None:
            out["monte_carlo"] = self.monte_carlo.to_dict()
        out.update(self.extras)
        return out


# =============================================================================
# WRITERS
# =============================================================================


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n", encoding="utf-8")
    logger.info(f"write_json: {path}")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"write_csv: {path}")
    return path


def write_trace_csv(path: Path, rows: Sequence[TraceRow]) -> Path:
    return write_csv(path, TRACE_HEADER, [r.as_row() for r in rows])


def write_mc_csv(path: Path, report: MonteCarloReport) -> Path:
    return write_csv(path, MC_HEADER, mc_rows(report))
