"""
Monte Carlo experiments on X_n / n^s0 with random tolls.

Replicas are independent tasks: replica r draws its toll from the substreams
keyed by (seed, r), evaluates the trajectory once and records the ratios at
the checkpoints. Results are stored by replica index, so the report does not
depend on the number of worker threads.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..constants import DEFAULT_CHECKPOINT_FACTOR, MGF_UNSTABLE_SHARE, QUANTILE_LEVELS, THREADS_ENV
from ..errors import DcqError, EmptySample, InternalInconsistency
from ..recurrence import RecurrenceSpec, evaluate_dense, geometric_checkpoints
from ..tolls import TollSequence
from .drivers import DriverSpec, sample_toll

logger = logging.getLogger(__name__)


# =============================================================================
# DIAGNOSTICS
# =============================================================================


@dataclass(frozen=True)
class EmpiricalMgf:
    t: float
    value: float
    max_share: float
    unstable: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "t": self.t,
            "value": self.value,
            "max_share": self.max_share,
            "unstable": self.unstable,
        }


def empirical_mgf(samples: np.ndarray | Sequence[float], t: float) -> EmpiricalMgf:
    """Sample mean of exp(t x) with the share of its largest term.

    Estimates where one sample carries more than half of the mean are
    flagged unstable.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySample()
    with np.errstate(over="ignore"):
        terms = np.exp(t * x)
    total = float(np.sum(terms))
    if not math.isfinite(total):
        return EmpiricalMgf(t=t, value=math.inf, max_share=1.0, unstable=True)
    share = float(np.max(terms)) / total if total > 0 else 0.0
    return EmpiricalMgf(
        t=t, value=total / x.size, max_share=share, unstable=share > MGF_UNSTABLE_SHARE
    )


@dataclass(frozen=True)
class SummabilityTrace:
    checkpoints: list[int]
    partial_sums: list[float]

    def increments(self) -> list[float]:
        return [b - a for a, b in zip(self.partial_sums, self.partial_sums[1:])]


def summability_partial(
    toll: TollSequence,
    s0: float,
    horizon: int,
    checkpoints: Sequence[int] | None = None,
) -> SummabilityTrace:
    """Partial sums of sum_{n=1}^{N} |a_n| / n^(s0+1) at the checkpoints."""
    if horizon < 1:
        raise DcqError(f"Summability needs horizon >= 1, got {horizon}.")
    points = list(checkpoints) if checkpoints is not None else geometric_checkpoints(horizon)
    a = np.abs(toll.dense(horizon)[1:])
    n = np.arange(1, horizon + 1, dtype=np.float64)
    partial = np.cumsum(a / np.power(n, s0 + 1.0))
    return SummabilityTrace(
        checkpoints=points,
        partial_sums=[float(partial[k - 1]) for k in points],
    )


# =============================================================================
# REPORT
# =============================================================================


@dataclass(frozen=True)
class CheckpointSummary:
    n: int
    mean: float
    median: float
    quantiles: dict[float, float]
    mgf: list[EmpiricalMgf] = field(default_factory=list)

    def to_dict(self) -> dict[str, object]:
        return {
            "n": self.n,
            "mean": self.mean,
            "median": self.median,
            "quantiles": {f"{level:g}": value for level, value in self.quantiles.items()},
            "mgf": [m.to_dict() for m in self.mgf],
        }


@dataclass(frozen=True, eq=False)
class MonteCarloReport:
    spec: RecurrenceSpec
    driver: DriverSpec
    s0: float
    horizon: int
    checkpoints: list[int]
    ratios: np.ndarray
    summability: np.ndarray
    summary: list[CheckpointSummary]
    stabilization_gaps: np.ndarray

    @property
    def replicas(self) -> int:
        return int(self.ratios.shape[0])

    def to_dict(self) -> dict[str, object]:
        return {
            "spec": self.spec.to_dict(),
            "driver": self.driver.to_dict(),
            "s0": self.s0,
            "horizon": self.horizon,
            "replicas": self.replicas,
            "checkpoints": self.checkpoints,
            "ratios": self.ratios.tolist(),
            "summability": self.summability.tolist(),
            "summary": [s.to_dict() for s in self.summary],
            "stabilization_gaps": self.stabilization_gaps.tolist(),
        }


def worker_count(replicas: int) -> int:
    """Threads to use: DCQ_THREADS when set, else the CPU count, never above R."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            workers = int(raw)
        except ValueError as e:
            raise DcqError(f"{THREADS_ENV} must be an integer, got {raw!r}.") from e
        if workers < 1:
            raise DcqError(f"{THREADS_ENV} must be >= 1, got {workers}.")
    else:
        workers = os.cpu_count() or 1
    return max(1, min(workers, replicas))


def _summarize(n: int, column: np.ndarray, mgf_points: Sequence[float]) -> CheckpointSummary:
    levels = np.quantile(column, QUANTILE_LEVELS)
    return CheckpointSummary(
        n=n,
        mean=float(np.mean(column)),
        median=float(np.median(column)),
        quantiles={lvl: float(v) for lvl, v in zip(QUANTILE_LEVELS, levels)},
        mgf=[empirical_mgf(np.abs(column), t) for t in mgf_points],
    )


def run_monte_carlo(
    spec: RecurrenceSpec,
    s0: float,
    driver: DriverSpec,
    horizon: int,
    replicas: int,
    checkpoint_factor: float = DEFAULT_CHECKPOINT_FACTOR,
    mgf_points: Sequence[float] = (),
    workers: int | None = None,
) -> MonteCarloReport:
    """Evaluate R independent trajectories and summarize X_n / n^s0 per checkpoint."""
    if replicas < 1:
        raise DcqError(f"Replica count must be >= 1, got {replicas}.")
    checkpoints = geometric_checkpoints(horizon, checkpoint_factor)
    n_workers = worker_count(replicas) if workers is None else max(1, min(workers, replicas))

    def one_replica(r: int) -> tuple[np.ndarray, np.ndarray]:
        toll = sample_toll(driver, horizon, replica=r)
        trajectory = evaluate_dense(spec, toll, horizon)
        summable = summability_partial(toll, s0, horizon, checkpoints)
        return trajectory.ratios(s0, checkpoints), np.array(summable.partial_sums)

    logger.info(
        f"run_monte_carlo: horizon={horizon}, replicas={replicas}, workers={n_workers}, "
        f"checkpoints={len(checkpoints)}"
    )
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        results = list(pool.map(one_replica, range(replicas)))

    ratios = np.vstack([r for r, _ in results])
    summability = np.vstack([s for _, s in results])
    if not np.all(np.isfinite(ratios)):
        raise InternalInconsistency("Monte Carlo produced non-finite ratio samples.")

    if len(checkpoints) >= 2:
        gaps = np.abs(ratios[:, -1] - ratios[:, -2])
    else:
        gaps = np.zeros(replicas, dtype=np.float64)

    summary = [
        _summarize(n, ratios[:, k], mgf_points) for k, n in enumerate(checkpoints)
    ]
    return MonteCarloReport(
        spec=spec,
        driver=driver,
        s0=s0,
        horizon=horizon,
        checkpoints=checkpoints,
        ratios=ratios,
        summability=summability,
        summary=summary,
        stabilization_gaps=gaps,
    )
