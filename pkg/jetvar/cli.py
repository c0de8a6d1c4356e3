"""
jetvar command line
===================
Runs one variational-calculus command on a problem file and writes the
report to stdout. Diagnostics go to stderr.

Usage:
  python -m jetvar el problem.jv
  python -m jetvar inverse --format json problem.jv
  python -m jetvar momentum --gauge quasisym problem.jv
  python -m jetvar run problem.jv          # command taken from the file's `task`

Exit codes: 0 ok, 1 unreadable input, 2 parse error, 3 precondition failure, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from jetvar import config
from jetvar.audit import CheckReport, audit
from jetvar.console import error, log
from jetvar.errors import InvariantViolation, JetvarError, NotVariationalError, PreconditionError
from jetvar.forms import d_v
from jetvar.inverse import is_variationally_trivial, minimal_lagrangian, trivial_primitive, volterra_vainberg
from jetvar.parser import ProblemFile, parse_problem
from jetvar.report import FORMATS, LagrangianReport, MomentumReport, PrimitiveReport, serialize, to_text
from jetvar.varcalc import Gauge, euler_lagrange, helmholtz, kolar_decompose

COMMANDS = ("el", "helmholtz", "momentum", "inverse", "trivial", "check")


# ─── Commands ────────────────────────────────────────────────────────────────

def _require_lagrangian(problem: ProblemFile):
    if problem.lagrangian is None:
        raise PreconditionError("problem file has no Lagrangian (add a line 'L = ...')")
    return problem.lagrangian


def _require_source(problem: ProblemFile):
    if problem.source is not None:
        return problem.source
    if problem.lagrangian is not None:
        return euler_lagrange(problem.lagrangian)
    raise PreconditionError("problem file has no source form (add lines 'E_1 = ...')")


def run(command: str, problem: ProblemFile, gauge: Gauge | None = None, order_cap: int | None = None):
    gauge = gauge or Gauge.parse(config.DEFAULT_GAUGE)
    log("INFO", f"running '{command}' on a chart with n={problem.spec.n}, m={problem.spec.m}")

    if command == "el":
        return euler_lagrange(_require_lagrangian(problem))

    if command == "helmholtz":
        return helmholtz(_require_source(problem))

    if command == "momentum":
        if problem.forms:
            alpha = problem.forms.get("alpha", next(iter(problem.forms.values())))
        else:
            alpha = d_v(_require_lagrangian(problem).form)
        source, momentum = kolar_decompose(alpha, gauge)
        return MomentumReport(source, momentum, gauge.value)

    if command == "inverse":
        source = _require_source(problem)
        lagrangian = minimal_lagrangian(source, order_cap)
        comparison = volterra_vainberg(source).order
        return LagrangianReport(lagrangian, comparison)

    if command == "trivial":
        lagrangian = _require_lagrangian(problem)
        if is_variationally_trivial(lagrangian):
            return PrimitiveReport(lagrangian, trivial_primitive(lagrangian), euler_lagrange(lagrangian))
        return PrimitiveReport(lagrangian, None, euler_lagrange(lagrangian))

    if command == "check":
        return audit(problem)

    raise PreconditionError(f"unknown command '{command}' (use {', '.join(COMMANDS)})")


# ─── Entry point ─────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetvar", description="Exact variational calculus on jet charts")
    parser.add_argument("command", choices=COMMANDS + ("run",),
                        help="Command to run; 'run' takes it from the file's 'task' line.")
    parser.add_argument("file", type=Path, help="Problem file (UTF-8).")
    parser.add_argument("--format", choices=FORMATS, default=config.DEFAULT_FORMAT,
                        help=f"Report format (default: {config.DEFAULT_FORMAT})")
    parser.add_argument("--gauge", default=config.DEFAULT_GAUGE,
                        help=f"Momentum gauge: natural, quasisym or lex (default: {config.DEFAULT_GAUGE})")
    parser.add_argument("--order-cap", type=int, default=None,
                        help="Highest Lagrangian order tried by the minimal-order search (default: 2*order(E)+1)")
    parser.add_argument("--verbose", action="store_true", help="Print diagnostics to stderr.")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        config.VERBOSE = True

    try:
        gauge = Gauge.parse(args.gauge)
    except ValueError as exc:
        error(str(exc))
        return 2
    # a JETVAR_FORMAT default bypasses argparse choices
    if args.format not in FORMATS:
        error(f"unknown format '{args.format}' (use {', '.join(FORMATS)})")
        return 2

    try:
        text = args.file.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        error(f"cannot read {args.file}: {exc}")
        return 1

    try:
        problem = parse_problem(text)
        command = args.command
        if command == "run":
            if not problem.task:
                raise PreconditionError("command 'run' needs a 'task' line in the problem file")
            command = problem.task
        result = run(command, problem, gauge, args.order_cap)
    except NotVariationalError as exc:
        error(str(exc))
        error(to_text(exc.helmholtz))
        return exc.exit_code
    except JetvarError as exc:
        error(str(exc))
        return exc.exit_code

    sys.stdout.buffer.write(serialize(result, args.format))
    sys.stdout.flush()
    if isinstance(result, CheckReport) and not result.passed:
        error(f"{result.failures} check(s) failed")
        return InvariantViolation.exit_code
    return 0
