"""Command-line entry point: argument parsing, logging and exit codes."""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app import __version__
from app.api import commands
from app.api.schemas import InvariantSet
from app.core.config import PROJECT_NAME
from app.core.exceptions import SolverError, UsageError

logger = logging.getLogger(__name__)

SETS = [s.value for s in InvariantSet]


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _add_case_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("-k", type=int, required=required, help="tree order k >= 1")
    p.add_argument("-i", type=int, required=required, help="|A|, 1 <= i <= k+1")
    p.add_argument("--set", choices=SETS, required=required, help="invariant set")


def _add_range_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--lambda-min", type=float, required=required)
    p.add_argument("--lambda-max", type=float, required=required)
    p.add_argument("--steps", type=int, required=required)


def _add_resolution(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resolution", type=int, default=None, help="grid oracle resolution per axis")


def build_parser() -> CliParser:
    parser = CliParser(prog="hardcore", description=PROJECT_NAME)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    solve = sub.add_parser("solve", help="enumerate boundary laws on an invariant set")
    _add_case_args(solve)
    solve.add_argument("--lambda", dest="lam", type=float, required=True)
    solve.add_argument("--format", choices=["human", "csv", "json"], default="human")
    _add_resolution(solve)
    solve.set_defaults(handler=commands.cmd_solve)

    scan = sub.add_parser("scan", help="solution counts over a lambda grid")
    _add_case_args(scan)
    _add_range_args(scan)
    scan.add_argument("--format", choices=["human", "csv", "json", "svg"], default="csv")
    scan.add_argument("-o", "--output", default=None, help="SVG output path")
    _add_resolution(scan)
    scan.set_defaults(handler=commands.cmd_scan)

    critical = sub.add_parser("critical", help="critical activities")
    critical.add_argument("--case", choices=commands.CRITICAL_CASES, required=True)
    critical.add_argument("-k", type=int, default=None)
    critical.add_argument("--format", choices=["human", "json"], default="human")
    critical.set_defaults(handler=commands.cmd_critical)

    verify = sub.add_parser("verify", help="run a named theorem check or all of them")
    verify.add_argument("theorem", help=f"one of {', '.join(commands.theorem_choices())}")
    verify.add_argument("--format", choices=["human", "json"], default="human")
    _add_resolution(verify)
    verify.set_defaults(handler=commands.cmd_verify)

    plot = sub.add_parser("plot", help="write an SVG figure")
    plot.add_argument("curve", choices=["lambda3", "bifurcation", "gamma-cobweb"])
    plot.add_argument("-o", "--output", required=True)
    plot.add_argument("--x-min", type=float, default=1.05)
    plot.add_argument("--x-max", type=float, default=4.0)
    plot.add_argument("--lambda", dest="lam", type=float, default=None)
    _add_case_args(plot, required=False)
    _add_range_args(plot, required=False)
    _add_resolution(plot)
    plot.set_defaults(handler=commands.cmd_plot)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        return args.handler(args, out)
    except UsageError as e:
        print(f"usage error: {str(e)}", file=sys.stderr)
        return e.EXIT_CODE
    except ValidationError as e:
        print(f"error: invalid parameters: {str(e)}", file=sys.stderr)
        return 2
    except SolverError as e:
        print(f"error: {str(e)}", file=sys.stderr)
        return e.EXIT_CODE
    except OSError as e:
        print(f"usage error: {str(e)}", file=sys.stderr)
        return UsageError.EXIT_CODE
