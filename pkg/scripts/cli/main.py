#!/usr/bin/env python3
"""
Köthe algebra workbench command line.

Usage:
    koethe <command> [options]

Examples:
    # Check a space definition
    koethe validate config/spaces/s.json

    # Classify the golden catalog into ./out
    koethe classify config/spaces/*.json --out out --jobs 4

    # One condition, with more levels
    koethe check N config/spaces/entire.json --levels 12

    # Approximate identity for a_i = 2^(-i) on s
    koethe approx-id config/spaces/s.json --element "2^(-i)" --n-max 1500

    # Hadamard product of (1-z)^-1 and exp
    koethe hadamard geometric exp --terms 512 --out out

    # Aggregate profiles
    koethe report out --format markdown
"""

import argparse
import logging
import sys
import time
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from workbench.config import config
from workbench.errors import KoetheError
from workbench.jsonl_utils import JSONLWriter
from cli.commands import COMMANDS, SERIES, CommandResult

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    """Flags shared by every command; they override the config for one run."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, metavar="N",
                        help="Prefix depth (default: analysis.depth from config)")
    common.add_argument("--levels", type=int, metavar="K",
                        help="Level budget (default: analysis.level_budget from config)")
    common.add_argument("--epsilon", type=float, metavar="EPS",
                        help="Convergence threshold (default: analysis.epsilon from config)")
    common.add_argument("--out", type=str, default=".", metavar="DIR",
                        help="Output directory (default: current directory)")
    common.add_argument("--format", choices=["json", "csv", "markdown"], default="json",
                        help="Output format where a command offers a choice (default: json)")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="koethe",
        description="Structural conditions and homological dimensions of Köthe algebras",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0  success
  1  configuration error (bad space definition, failed validation)
  2  precondition failure (not an algebra, missing certificate, ...)
  3  internal consistency violation
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="Parse and axiom-check space definitions")
    p.add_argument("configs", nargs="+", metavar="CONFIG")

    p = sub.add_parser("classify", parents=[common], help="Write <name>.profile.json per space")
    p.add_argument("configs", nargs="+", metavar="CONFIG")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="Classify up to N spaces in parallel (default: 1)")
    p.add_argument("--m-variant", choices=["revised", "classic"], default=None,
                   help="Form of condition (M) (default: revised)")

    p = sub.add_parser("check", parents=[common], help="Run one condition on a space")
    p.add_argument("condition", choices=["U", "N", "B", "M", "log"])
    p.add_argument("config", metavar="CONFIG")
    p.add_argument("--m-variant", choices=["revised", "classic"], default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="Sampling seed for the A = A² battery (default: KOETHE_SEED or 0)")

    p = sub.add_parser("witness", parents=[common], help="Build an explicit counterexample")
    p.add_argument("kind", choices=["non-algebra", "non-idempotent"])
    p.add_argument("config", metavar="CONFIG")
    p.add_argument("--k-max", type=int, default=None, metavar="K",
                   help="Terms of the non-algebra witness (default: witness.k_max)")
    p.add_argument("--blocks", type=int, default=None, metavar="N",
                   help="Blocks of the non-idempotence witness (default: witness.k_max)")
    p.add_argument("--override", action="store_true",
                   help="Scan even when the algebra condition is undecided")

    p = sub.add_parser("approx-id", parents=[common], help="Approximate identity and its convergence")
    p.add_argument("config", metavar="CONFIG")
    p.add_argument("--element", default="2^(-i)", metavar="RULE",
                   help="Element a as a DSL rule in i (default: 2^(-i))")
    p.add_argument("--p-level", type=int, default=1, metavar="K")
    p.add_argument("--q-level", type=int, default=None, metavar="K",
                   help="Level q (default: from the (N) certificate)")
    p.add_argument("--n-max", type=int, default=1500, metavar="N")
    p.add_argument("--n-step", type=int, default=10, metavar="S",
                   help="Build u_n for n = S, 2S, ..., N-max (default: 10)")

    p = sub.add_parser("hadamard", parents=[common], help="Hadamard product of two series")
    p.add_argument("f", metavar="F", help=f"Coefficient CSV or one of: {', '.join(SERIES)}")
    p.add_argument("g", metavar="G", help="Coefficient CSV or builtin series")
    p.add_argument("--terms", type=int, default=512, metavar="N")
    p.add_argument("--name", default="hadamard", help="Output file stem (default: hadamard)")
    p.add_argument("--space", default=None, metavar="CONFIG",
                   help="Also test membership of the product in this space")
    p.add_argument("--tail", default=None, metavar="RULE",
                   help="DSL rule for the product's coefficients past the last term")

    p = sub.add_parser("report", parents=[common], help="Aggregate a directory of profiles")
    p.add_argument("directory", nargs="?", default=None, metavar="DIR",
                   help="Directory of *.profile.json (default: --out)")

    return parser


def _setup_logging(verbose: bool):
    level = logging.DEBUG if verbose else getattr(logging, str(config.get("logging.level", "WARNING")),
                                                  logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _log_run(args, result: CommandResult, started: float):
    """Append one event to the run log in the output directory."""
    event = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": args.command,
        "spaces": result.spaces,
        "status": result.status,
        "elapsed_ms": round((time.perf_counter() - started) * 1000.0, 1),
        "artifacts": result.artifacts,
    }
    try:
        JSONLWriter(Path(args.out) / config.get("logging.run_log", "analysis_log.jsonl")).append(event)
    except OSError as e:
        logger.warning("Could not write run log: %s", e)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    started = time.perf_counter()
    try:
        result = COMMANDS[args.command](args)
    except KoetheError as e:
        print(f"Error: {e}", file=sys.stderr)
        result = CommandResult(status=e.exit_code)
    except Exception as e:
        print(f"Error: {args.command} failed unexpectedly: {e}", file=sys.stderr)
        traceback.print_exc()
        result = CommandResult(status=3)

    _log_run(args, result, started)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
