"""
Command-line front end.

    dcq solve  --config run.json
    dcq trace  --config run.json --horizon 1000000
    dcq coeffs --config run.json --trunc 1000
    dcq limit  --config run.json --trunc 1000
    dcq mc     --config run.json --replicas 100 --mgf 0.1

Summaries go to stdout, logs to stderr, files to the output directory.
Exit codes: 0 success, 1 parse error, 2 validation or hypothesis error,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import NoReturn

from .coefficients import coefficient_table, limit_estimate
from .config import AnalysisConfig, load_config, resolve_toll
from .constants import LOG_LEVEL_ENV, MC_FILE, REPORT_FILE, TRACE_FILE
from .errors import ConfigParseError, DcqError
from .exponent import regime_report, solve_exponent
from .recurrence import evaluate_dense, geometric_checkpoints
from .reports import (
    ReportBundle,
    convergence_trace,
    format_number,
    write_json,
    write_mc_csv,
    write_trace_csv,
)
from .stochastic import (
    GeometricConvolution,
    MgfBoundParams,
    calibrate_geometric,
    driver_hypotheses,
    estimate_kernel_constant,
    mgf_upper_bound,
    run_monte_carlo,
)

logger = logging.getLogger(__name__)

# Coefficients printed to stdout; the full table goes to report.json.
PRINTED_COEFFICIENTS = 10


def setup_logging() -> None:
    level = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_solve(config: AnalysisConfig) -> ReportBundle:
    """Critical exponent s0 and the moment regime."""
    spec = config.spec()
    exponent = solve_exponent(spec, tol=config.root_tol)
    regime = regime_report(spec, exponent.s0, tol=config.report_tol)
    warnings = [regime.hypothesis_warning] if regime.hypothesis_warning else []
    return ReportBundle(
        command="solve",
        config=config.to_dict(),
        exponent=exponent,
        regime=regime,
        warnings=warnings,
    )


def cmd_trace(config: AnalysisConfig) -> ReportBundle:
    """Ratios X_n / n^s0 at geometric checkpoints."""
    bundle = cmd_solve(config)
    bundle.command = "trace"
    spec = config.spec()
    trajectory = evaluate_dense(spec, resolve_toll(config), config.horizon)
    checkpoints = geometric_checkpoints(config.horizon, config.checkpoint_factor)
    bundle.trace = convergence_trace(trajectory, bundle.exponent.s0, checkpoints)
    return bundle


def cmd_coeffs(config: AnalysisConfig) -> ReportBundle:
    """Limit coefficients l_0..l_J and the tail constant."""
    bundle = cmd_solve(config)
    bundle.command = "coeffs"
    bundle.coefficients = coefficient_table(
        config.spec(), bundle.exponent.s0, config.truncation, identity_tol=config.root_tol
    )
    return bundle


def cmd_limit(config: AnalysisConfig) -> ReportBundle:
    """Limit L = sum_j l_j a_j with a tail bound."""
    bundle = cmd_coeffs(config)
    bundle.command = "limit"
    toll = resolve_toll(config)
    bundle.limit = limit_estimate(
        config.spec(),
        bundle.exponent.s0,
        toll,
        config.truncation,
        envelope=config.envelope_bound(),
        identity_tol=config.root_tol,
    )
    if bundle.limit.heuristic:
        bundle.warnings.append("Tail bound not available; the limit estimate is heuristic.")
    return bundle


def cmd_mc(config: AnalysisConfig) -> ReportBundle:
    """Monte Carlo replicas with a random toll driver."""
    driver = config.driver()
    if driver is None:
        raise DcqError(f"The mc command needs a driver toll, got kind '{config.toll['kind']}'.")
    bundle = cmd_solve(config)
    bundle.command = "mc"
    spec = config.spec()
    s0 = bundle.exponent.s0
    assert bundle.regime is not None
    bundle.warnings.extend(driver_hypotheses(driver, bundle.regime))

    report = run_monte_carlo(
        spec,
        s0,
        driver,
        config.horizon,
        config.replicas,
        checkpoint_factor=config.checkpoint_factor,
        mgf_points=config.mgf_points,
    )
    bundle.monte_carlo = report

    if config.mgf_points and isinstance(driver.variant, GeometricConvolution):
        kernel = estimate_kernel_constant(spec, s0, config.horizon)
        rate, a = calibrate_geometric(driver.variant.q)
        comparison = []
        for summary in report.summary:
            for emp in summary.mgf:
                if emp.t >= rate:
                    bound = None
                else:
                    bound = mgf_upper_bound(
                        MgfBoundParams(M=kernel.M, a=a, rate=rate, s0=s0, n=summary.n, t=emp.t)
                    )
                comparison.append(
                    {
                        "n": summary.n,
                        "t": emp.t,
                        "empirical": emp.value,
                        "unstable": emp.unstable,
                        "bound": bound,
                    }
                )
        bundle.extras["mgf_comparison"] = {
            "kernel_constant": kernel.to_dict(),
            "rate": rate,
            "a": a,
            "rows": comparison,
        }
    return bundle


COMMANDS: dict[str, Callable[[AnalysisConfig], ReportBundle]] = {
    "solve": cmd_solve,
    "trace": cmd_trace,
    "coeffs": cmd_coeffs,
    "limit": cmd_limit,
    "mc": cmd_mc,
}


# =============================================================================
# OUTPUT
# =============================================================================


def print_summary(bundle: ReportBundle) -> None:
    exp = bundle.exponent
    print(f"s0 = {format_number(exp.s0)}  (residual {exp.residual:.3g})")
    if bundle.regime is not None:
        r = bundle.regime
        print(f"sum b_j = {format_number(r.weight_sum)}")
        print(f"sum b_j p_j = {format_number(r.first_moment)}  (s0 > 1: {r.s0_gt_1})")
        print(f"sum b_j p_j^2 = {format_number(r.second_moment)}  (s0 > 2: {r.s0_gt_2})")
        for pair in r.rationality_warnings:
            print(
                f"log p_{pair.j} / log p_{pair.ell} ~ {pair.convergent} "
                f"(error {pair.error:.3g})"
            )
    if bundle.trace:
        print("n,x_n,ratio")
        for row in bundle.trace:
            print(",".join(row.as_row()))
    if bundle.coefficients is not None and bundle.limit is None:
        table = bundle.coefficients
        shown = table.values[: PRINTED_COEFFICIENTS + 1]
        for j, value in enumerate(shown):
            print(f"l_{j} = {format_number(float(value))}")
        print(f"tail constant (J={table.J}) = {format_number(table.tail_constant)}")
    if bundle.limit is not None:
        lim = bundle.limit
        tail = "unavailable" if lim.tail_bound is None else format_number(lim.tail_bound)
        print(f"L ~ {format_number(lim.value)}  (J={lim.J}, tail bound {tail})")
    if bundle.monte_carlo is not None:
        mc = bundle.monte_carlo
        last = mc.summary[-1]
        print(
            f"replicas = {mc.replicas}, n = {last.n}: median ratio "
            f"{format_number(last.median)}, mean {format_number(last.mean)}"
        )
        for emp in last.mgf:
            flag = " (unstable)" if emp.unstable else ""
            print(f"empirical MGF at t={emp.t:g}: {format_number(emp.value)}{flag}")
    comparison = bundle.extras.get("mgf_comparison")
    if comparison:
        final_n = comparison["rows"][-1]["n"]
        for row in comparison["rows"]:
            if row["n"] == final_n:
                bound = "n/a" if row["bound"] is None else format_number(row["bound"])
                print(f"t={row['t']:g}: empirical {format_number(row['empirical'])} <= bound {bound}")
    for message in bundle.warnings:
        print(f"warning: {message}")


def write_outputs(bundle: ReportBundle, config: AnalysisConfig) -> list[Path]:
    out_dir = Path(config.output_dir)
    written: list[Path] = []
    if "json" in config.formats:
        written.append(write_json(out_dir / REPORT_FILE, bundle.to_dict()))
    if "csv" in config.formats:
        if bundle.trace:
            written.append(write_trace_csv(out_dir / TRACE_FILE, bundle.trace))
        if bundle.monte_carlo is not None:
            written.append(write_mc_csv(out_dir / MC_FILE, bundle.monte_carlo))
    return written


# =============================================================================
# ENTRY POINT
# =============================================================================


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise ConfigParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="dcq",
        description="Analyze divide-and-conquer recurrences X_n = a_n + sum_j b_j X_floor(p_j n).",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, fn in COMMANDS.items():
        cmd = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0])
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", help="output directory (overrides output.dir)")
        cmd.add_argument("--seed", type=int, help="64-bit driver seed")
        cmd.add_argument("--horizon", type=int, help="largest index N")
        cmd.add_argument("--replicas", type=int, help="Monte Carlo replica count R")
        cmd.add_argument("--trunc", type=int, help="coefficient truncation index J")
        cmd.add_argument(
            "--mgf", type=float, action="append", help="MGF evaluation point t (repeatable)"
        )
        cmd.add_argument("--checkpoint-factor", type=float, help="geometric checkpoint spacing")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config).with_overrides(
            output_dir=args.out,
            seed=args.seed,
            horizon=args.horizon,
            replicas=args.replicas,
            truncation=args.trunc,
            mgf_points=args.mgf,
            checkpoint_factor=args.checkpoint_factor,
        )
        logger.info(f"Command '{args.command}' called with config {args.config}")
        bundle = COMMANDS[args.command](config)
        print_summary(bundle)
        write_outputs(bundle, config)
    except DcqError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
