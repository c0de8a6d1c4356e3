"""
Invariant audit
===============
Runs the exact identities of the engine against whatever a problem file
supplies (a Lagrangian, a source form, named forms) and records each check
as passed or failed with a short detail line. Used by `jetvar check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from jetvar.console import log
from jetvar.errors import JetvarError, ShapeError
from jetvar.forms import Form, d_h, d_v, exterior_d, horizontalize, restrict_zero_section, vertical
from jetvar.inverse import fiber_homotopy, minimal_lagrangian, trivial_primitive, volterra_vainberg
from jetvar.parser import ProblemFile
from jetvar.varcalc import (
    Gauge,
    Lagrangian,
    SourceForm,
    euler_lagrange,
    helmholtz,
    kolar_decompose,
    second_variation,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.results if not r.passed)


def _run(report: CheckReport, name: str, check: Callable[[], tuple[bool, str]]) -> None:
    try:
        passed, detail = check()
    except JetvarError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    report.results.append(CheckResult(name, passed, detail))
    log("CHECK", f"{name}: {'ok' if passed else 'FAILED'} {detail}".rstrip())


# ─── Per-binding suites ──────────────────────────────────────────────────────

def _decomposition_checks(report: CheckReport, label: str, alpha: Form) -> None:
    sources = {}
    for gauge in Gauge:
        def check(gauge=gauge):
            try:
                source, momentum = kolar_decompose(alpha, gauge)
            except ShapeError as exc:
                return True, f"skipped ({exc})"
            sources[gauge] = source
            return alpha == source.form - d_h(momentum), f"{gauge.value} gauge"
        _run(report, f"{label}: first variation α = E - d_h p", check)

    def independent():
        distinct = set(sources.values())
        return len(distinct) <= 1, f"{len(sources)} gauge(s) compared"
    _run(report, f"{label}: source form independent of gauge", independent)


def check_form(report: CheckReport, name: str, a: Form) -> None:
    _run(report, f"{name}: d∘d = 0", lambda: (exterior_d(exterior_d(a)).is_zero(), ""))
    _run(report, f"{name}: d_h∘d_h = 0", lambda: (d_h(d_h(a)).is_zero(), ""))
    _run(report, f"{name}: d_v∘d_v = 0", lambda: (d_v(d_v(a)).is_zero(), ""))
    _run(report, f"{name}: d_h∘d_v + d_v∘d_h = 0", lambda: ((d_h(d_v(a)) + d_v(d_h(a))).is_zero(), ""))
    _run(report, f"{name}: d_h + d_v = d", lambda: (d_h(a) + d_v(a) == exterior_d(a), ""))
    _run(report, f"{name}: h∘h = h", lambda: (horizontalize(horizontalize(a)) == horizontalize(a), ""))
    _run(report, f"{name}: h∘v = 0", lambda: (horizontalize(vertical(a)).is_zero(), ""))
    if a.degree >= 1:
        _run(
            report,
            f"{name}: homotopy identity",
            lambda: (fiber_homotopy(a).defect == restrict_zero_section(a), "a - dK(a) - K(da) at the zero section"),
        )
    if a.degree == a.spec.n + 1 and a.contact_degrees() <= {1}:
        _decomposition_checks(report, name, a)


def check_lagrangian(report: CheckReport, lagrangian: Lagrangian) -> None:
    source = euler_lagrange(lagrangian)
    _run(report, "L: Helmholtz form of EL vanishes", lambda: (helmholtz(source).is_zero(), ""))
    _decomposition_checks(report, "L", d_v(lagrangian.form))
    if source.is_zero():
        def primitive():
            alpha = trivial_primitive(lagrangian)
            return d_h(alpha) == lagrangian.form, f"primitive of degree {alpha.degree}"
        _run(report, "L: trivial primitive reproduces L", primitive)
        return

    def round_trip():
        found = minimal_lagrangian(source)
        return euler_lagrange(found) == source, f"order {found.order} (input order {lagrangian.order})"
    _run(report, "L: minimal Lagrangian round trip", round_trip)
    _run(
        report,
        "L: Volterra-Vainberg round trip",
        lambda: (euler_lagrange(volterra_vainberg(source)) == source, ""),
    )


def check_source(report: CheckReport, source: SourceForm) -> None:
    tensor = helmholtz(source)
    _run(
        report,
        "E: Helmholtz form equals second variation of dE",
        lambda: (second_variation(exterior_d(source.form)).h == tensor.form, ""),
    )
    if not tensor.is_zero():
        report.results.append(CheckResult("E: locally variational", True, "no (inverse checks skipped)"))
        return
    _run(
        report,
        "E: minimal Lagrangian round trip",
        lambda: (euler_lagrange(minimal_lagrangian(source)) == source, ""),
    )
    _run(
        report,
        "E: Volterra-Vainberg round trip",
        lambda: (euler_lagrange(volterra_vainberg(source)) == source, ""),
    )


def audit(problem: ProblemFile) -> CheckReport:
    report = CheckReport()
    if problem.lagrangian is not None:
        check_lagrangian(report, problem.lagrangian)
    if problem.source is not None:
        check_source(report, problem.source)
    for name, a in problem.forms.items():
        check_form(report, name, a)
    log("CHECK", f"{len(report.results)} check(s), {report.failures} failure(s)")
    return report
