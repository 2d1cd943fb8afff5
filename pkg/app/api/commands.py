"""Handlers behind the solve, scan, critical, verify and plot subcommands."""
import logging
import os
from argparse import Namespace
from typing import TextIO

import numpy as np

from app.api import render
from app.api.schemas import CriticalReport, InvariantSet, ModelParams, OutputFormat
from app.core.exceptions import UsageError
from app.core.system import ti_fixed_point
from app.reductions import gamma, get_reduction
from app.services.critical import lambda_cr_I2, s_lambda_pm, tangency_lambda
from app.services.phases import count_vs_lambda, enumerate_solutions
from app.services.verification import THEOREMS, verify_all, verify_theorem
from app.utils import plotting
from app.utils.rootfind import two_cycle_kesten

logger = logging.getLogger(__name__)

# case selector -> (invariant set, k, i, bracket for the slope -1 search)
TANGENCY_CASES = {
    "I2-k2-i1": (InvariantSet.I2, 2, 1, (3.0, 5.0)),
    "I2-k2-i2": (InvariantSet.I2, 2, 2, (3.0, 5.0)),
}
CRITICAL_CASES = ("I2-k3-i1", "kesten", *TANGENCY_CASES)


def _check_writable(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise UsageError(f"Cannot write output file {path}")
    if os.path.isdir(path):
        raise UsageError(f"Output path {path} is a directory")


def _lambda_grid(args: Namespace) -> np.ndarray:
    if args.steps < 2:
        raise UsageError(f"--steps must be at least 2, got {args.steps}")
    if not 0 < args.lambda_min < args.lambda_max:
        raise UsageError(
            f"Need 0 < --lambda-min < --lambda-max, got {args.lambda_min} and {args.lambda_max}"
        )
    return np.linspace(args.lambda_min, args.lambda_max, args.steps)


def cmd_solve(args: Namespace, out: TextIO) -> int:
    params = ModelParams(k=args.k, i=args.i, lam=args.lam)
    invariant_set = InvariantSet(args.set)
    result = enumerate_solutions(params, invariant_set, args.resolution)
    fmt = OutputFormat(args.format)
    if fmt == OutputFormat.JSON:
        out.write(render.solution_set_json(result))
    elif fmt == OutputFormat.CSV:
        out.write(render.solution_set_csv(result))
    else:
        out.write(render.solution_set_human(result))
    return 0


def cmd_scan(args: Namespace, out: TextIO) -> int:
    lambdas = _lambda_grid(args)
    fmt = OutputFormat(args.format)
    if fmt == OutputFormat.SVG:
        if not args.output:
            raise UsageError("--format svg needs -o/--output")
        _check_writable(args.output)
    # lambda in the template is a placeholder; every row sets its own
    template = ModelParams(k=args.k, i=args.i, lam=float(lambdas[0]))
    invariant_set = InvariantSet(args.set)
    rows = count_vs_lambda(template, invariant_set, [float(lam) for lam in lambdas], args.resolution)

    if fmt == OutputFormat.SVG:
        title = f"{invariant_set.value} k={args.k} i={args.i}"
        plotting.bifurcation_figure(rows, args.output, title)
    elif fmt == OutputFormat.JSON:
        out.write(render.scan_json(template, invariant_set, rows))
    elif fmt == OutputFormat.CSV:
        out.write(render.scan_csv(rows))
    else:
        out.write(render.scan_human(rows))
    return 0


def cmd_critical(args: Namespace, out: TextIO) -> int:
    if args.case == "I2-k3-i1":
        report = lambda_cr_I2()
    elif args.case == "kesten":
        if args.k is None:
            raise UsageError("--case kesten needs -k")
        report = s_lambda_pm(args.k)
    else:
        invariant_set, k, i, bracket = TANGENCY_CASES[args.case]
        lam_cr = tangency_lambda(get_reduction(invariant_set, k, i), bracket)
        x_star = get_reduction(invariant_set, k, i).ti_point(lam_cr)
        report = CriticalReport(case=args.case, lambda_cr=lam_cr, x_star=x_star)

    if OutputFormat(args.format) == OutputFormat.JSON:
        out.write(render.critical_json(report))
    else:
        out.write(render.critical_human(report))
    return 0


def cmd_verify(args: Namespace, out: TextIO) -> int:
    if args.theorem == "all":
        reports = verify_all(args.resolution)
    else:
        reports = [verify_theorem(args.theorem, args.resolution)]
    if OutputFormat(args.format) == OutputFormat.JSON:
        out.write(render.theorem_json(reports))
    else:
        out.write(render.theorem_human(reports))
    return 0 if all(r.passed for r in reports) else 1


def cmd_plot(args: Namespace, out: TextIO) -> int:
    _check_writable(args.output)
    if args.curve == "lambda3":
        if not args.x_min < args.x_max:
            raise UsageError(f"Need --x-min < --x-max, got {args.x_min} and {args.x_max}")
        if not args.x_min > 1.0:
            raise UsageError(f"--x-min must exceed 1, got {args.x_min}")
        report = lambda_cr_I2()
        plotting.lambda3_figure(args.x_min, args.x_max, report.x_star, report.lambda_cr, args.output)
    elif args.curve == "gamma-cobweb":
        if args.k is None or args.lam is None:
            raise UsageError("gamma-cobweb needs -k and --lambda")
        ModelParams(k=args.k, i=1, lam=args.lam)
        xi = ti_fixed_point(args.k, args.lam)
        cycle = two_cycle_kesten(lambda x: gamma(x, args.k, args.lam), xi)
        if cycle is None:
            logger.warning(f"gamma'(xi) >= -1 at k={args.k}, lambda={args.lam}: no 2-cycle drawn")
        plotting.gamma_cobweb_figure(args.k, args.lam, xi, cycle, args.output)
    else:
        if None in (args.k, args.i, args.set, args.lambda_min, args.lambda_max, args.steps):
            raise UsageError("bifurcation needs -k, -i, --set, --lambda-min, --lambda-max and --steps")
        lambdas = _lambda_grid(args)
        invariant_set = InvariantSet(args.set)
        template = ModelParams(k=args.k, i=args.i, lam=float(lambdas[0]))
        rows = count_vs_lambda(template, invariant_set, [float(lam) for lam in lambdas], args.resolution)
        plotting.bifurcation_figure(rows, args.output, f"{invariant_set.value} k={args.k} i={args.i}")
    out.write(f"wrote {args.output}\n")
    return 0


def theorem_choices():
    return [*THEOREMS, "all"]
