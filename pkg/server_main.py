from __future__ import annotations

import logging
import os
import sys
from typing import Any

from mcp.server.fastmcp import FastMCP

# Ensure src is in path when run from a checkout
src_path = os.path.join(os.path.dirname(__file__), "src")
if src_path not in sys.path:
    sys.path.append(src_path)

from dcq.cli import cmd_limit, cmd_solve, cmd_trace
from dcq.config import parse_config
from dcq.constants import DEFAULT_CHECKPOINT_FACTOR, DEFAULT_ROOT_TOL, DEFAULT_TRUNCATION
from dcq.reports import get_app_version

# Configure logging to stderr (important for MCP stdio)
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").upper()
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger("dcq-recurrence")

mcp = FastMCP("dcq-recurrence")

# Trajectories requested over MCP are capped below the library limit.
MAX_TOOL_HORIZON = int(os.environ.get("DCQ_MAX_TOOL_HORIZON", "10000000"))


@mcp.tool(name="solve_recurrence")
def solve_recurrence(
    branches: list[dict[str, Any]],
    root_tol: float = DEFAULT_ROOT_TOL,
) -> dict[str, Any]:
    """
    Solve sum_j b_j p_j^s = 1 for the critical exponent s0 of
    X_n = a_n + sum_j b_j X_floor(p_j n).

    Args:
        branches: List of {"b": weight, "p": "u/v"}; p must be a string.
        root_tol: Residual tolerance for |f(s0) - 1|.

    Returns:
        Dictionary with the exponent, the moment regime and rationality warnings
    """
    logger.info(f"Tool 'solve_recurrence' called: branches={branches}")
    try:
        config = parse_config(
            {
                "branches": branches,
                "toll": {"kind": "impulse", "j": 0},
                "tolerances": {"root_tol": root_tol},
            }
        )
        bundle = cmd_solve(config)
        return {
            "exponent": bundle.exponent.to_dict(),
            "regime": bundle.regime.to_dict() if bundle.regime else None,
            "warnings": bundle.warnings,
        }
    except Exception as e:
        logger.error(f"Error solving recurrence: {e}")
        return {"error": str(e)}


@mcp.tool(name="recurrence_limit")
def recurrence_limit(
    branches: list[dict[str, Any]],
    toll: dict[str, Any],
    truncation: int = DEFAULT_TRUNCATION,
    envelope: dict[str, float] | None = None,
) -> dict[str, Any]:
    """
    Limit L = lim X_n / n^s0 = sum_j l_j a_j, truncated at J with a tail bound.

    Example: branches=[{"b": 1, "p": "1/2"}, {"b": 1, "p": "1/3"}],
    toll={"kind": "impulse", "j": 0} -> value = l_0 ~ 1.4694, tail_bound 0.

    Args:
        branches: List of {"b": weight, "p": "u/v"}.
        toll: {"kind": "impulse", "j"} | {"kind": "prefix", "n0"} |
              {"kind": "constant", "value"} | {"kind": "file", "path"}.
        truncation: Truncation index J.
        envelope: Optional {"c", "eta"} with |a_j| <= c j^eta and eta < s0.
    """
    logger.info(f"Tool 'recurrence_limit' called: toll={toll}, truncation={truncation}")
    try:
        config = parse_config(
            {
                "branches": branches,
                "toll": toll,
                "truncation": truncation,
                "envelope": envelope,
            }
        )
        bundle = cmd_limit(config)
        assert bundle.limit is not None and bundle.coefficients is not None
        table = bundle.coefficients
        return {
            "s0": bundle.exponent.s0,
            "limit": bundle.limit.to_dict(),
            "coefficients": [float(v) for v in table.values[:11]],
            "D": table.D,
            "tail_constant": table.tail_constant,
            "warnings": bundle.warnings,
        }
    except Exception as e:
        logger.error(f"Error computing limit: {e}")
        return {"error": str(e)}


@mcp.tool(name="recurrence_trace")
def recurrence_trace(
    branches: list[dict[str, Any]],
    toll: dict[str, Any],
    horizon: int,
    checkpoint_factor: float = DEFAULT_CHECKPOINT_FACTOR,
) -> dict[str, Any]:
    """
    Evaluate X_0..X_N and report X_n / n^s0 at geometric checkpoints.
    """
    logger.info(f"Tool 'recurrence_trace' called: toll={toll}, horizon={horizon}")
    if horizon > MAX_TOOL_HORIZON:
        return {"error": f"Horizon {horizon} exceeds the server limit {MAX_TOOL_HORIZON}."}
    try:
        config = parse_config(
            {
                "branches": branches,
                "toll": toll,
                "horizon": horizon,
                "checkpoint_factor": checkpoint_factor,
            }
        )
        bundle = cmd_trace(config)
        return {
            "s0": bundle.exponent.s0,
            "rows": [{"n": r.n, "x_n": r.x_n, "ratio": r.ratio} for r in bundle.trace],
            "warnings": bundle.warnings,
        }
    except Exception as e:
        logger.error(f"Error tracing recurrence: {e}")
        return {"error": str(e)}


@mcp.tool(name="server_info")
def server_info() -> dict[str, Any]:
    """Basic server info for clients."""
    return {
        "name": "dcq-recurrence",
        "version": get_app_version(),
        "description": "Critical exponents and limit constants of divide-and-conquer recurrences",
        "max_horizon": MAX_TOOL_HORIZON,
        "capabilities": {
            "critical_exponent": True,
            "limit_coefficients": True,
            "convergence_trace": True,
            "monte_carlo": False,
        },
        "tools": [
            "solve_recurrence",
            "recurrence_limit",
            "recurrence_trace",
            "server_info",
        ],
    }


if __name__ == "__main__":
    logger.info(f"Starting dcq-recurrence MCP server v{get_app_version()} (stdio)")
    mcp.run()
