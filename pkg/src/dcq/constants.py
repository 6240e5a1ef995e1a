"""
Central defaults for recurrence analysis.

This module contains the tolerances, limits and output conventions shared by
the solver, the coefficient tables, the Monte Carlo runner and the CLI.
"""

from __future__ import annotations

# =============================================================================
# SOLVER
# =============================================================================

DEFAULT_ROOT_TOL = 1e-13
DEFAULT_REPORT_TOL = 1e-9
SOLVER_MAX_ITERATIONS = 400
BRACKET_WIDTH_FACTOR = 64

# Residual tolerance below this multiple of machine epsilon (per branch) is
# not reachable in double precision.
RESOLUTION_EPS_FACTOR = 4.0

# =============================================================================
# RATIONALITY HEURISTIC
# =============================================================================

CONTINUED_FRACTION_DEPTH = 20
CONVERGENT_MAX_DENOMINATOR = 10**6
CONVERGENT_MATCH_TOL = 1e-12
CONVERGENT_MAX_QUALITY = 1e-3

# =============================================================================
# COEFFICIENTS
# =============================================================================

IDENTITY_TOL = 1e-12
DUAL_FORMULA_TOL = 1e-12
EMPIRICAL_WINDOW_SAMPLES = 64

# =============================================================================
# EVALUATION
# =============================================================================

DENSE_HORIZON_LIMIT = 10**8
EXACT_HORIZON_SOFT_LIMIT = 10**3
INT64_MAX = 2**63 - 1

# =============================================================================
# STOCHASTIC
# =============================================================================

SUBSTREAM_BLOCK = 1 << 16
DEFAULT_CONFIDENCE = 0.99
MGF_UNSTABLE_SHARE = 0.5
QUANTILE_LEVELS: tuple[float, ...] = (0.05, 0.25, 0.5, 0.75, 0.95)

# =============================================================================
# CLI / REPORTS
# =============================================================================

DEFAULT_CHECKPOINT_FACTOR = 2.0
DEFAULT_HORIZON = 10**6
DEFAULT_TRUNCATION = 1000
DEFAULT_REPLICAS = 100
DEFAULT_SEED = 20240601
DEFAULT_OUTPUT_FORMATS: tuple[str, ...] = ("json", "csv")
CSV_SIGNIFICANT_DIGITS = 17

TRACE_HEADER: tuple[str, ...] = ("n", "x_n", "ratio")
MC_HEADER: tuple[str, ...] = ("n", "q05", "q25", "median", "q75", "q95", "mean")

REPORT_FILE = "report.json"
TRACE_FILE = "trace.csv"
MC_FILE = "mc.csv"

THREADS_ENV = "DCQ_THREADS"
LOG_LEVEL_ENV = "LOG_LEVEL"
