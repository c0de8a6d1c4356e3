"""
Command results and their serialization
=======================================
Each command returns one of the result values below (or a SourceForm /
HelmholtzTensor directly); serialize() renders it as text, compact JSON or
LaTeX. JSON key order is fixed by construction, so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from functools import singledispatch

from rich import box
from rich.console import Console
from rich.table import Table

from jetvar.audit import CheckReport
from jetvar.forms import Form
from jetvar.printer import expr_to_latex, expr_to_text, form_to_latex, form_to_text, helmholtz_label
from jetvar.varcalc import HelmholtzTensor, Lagrangian, SourceForm, momentum_components

FORMATS = ("text", "json", "latex")


@dataclass(frozen=True)
class LagrangianReport:
    lagrangian: Lagrangian
    comparison_order: int | None = None


@dataclass(frozen=True)
class MomentumReport:
    source: SourceForm
    momentum: Form
    gauge: str


@dataclass(frozen=True)
class PrimitiveReport:
    lagrangian: Lagrangian
    primitive: Form | None
    source: SourceForm

    @property
    def trivial(self) -> bool:
        return self.primitive is not None


def serialize(result, fmt: str = "text") -> bytes:
    if fmt == "json":
        text = json.dumps(to_json(result), separators=(",", ":"), ensure_ascii=False)
    elif fmt == "latex":
        text = to_latex(result)
    elif fmt == "text":
        text = to_text(result)
    else:
        raise ValueError(f"unknown format '{fmt}' (use {', '.join(FORMATS)})")
    return (text.rstrip("\n") + "\n").encode("utf-8")


def _source_items(source: SourceForm) -> list[dict]:
    return [{"i": i, "expr": expr_to_text(e, source.spec)} for i, e in source.components.items()]


def _source_lines(source: SourceForm) -> list[str]:
    if source.is_zero():
        return ["E = 0"]
    return [f"E_{i} = {expr_to_text(e, source.spec)}" for i, e in source.components.items()]


# ─── Text ────────────────────────────────────────────────────────────────────

@singledispatch
def to_text(result) -> str:
    raise TypeError(f"cannot serialize {type(result).__name__}")


@to_text.register
def _(result: SourceForm) -> str:
    return "\n".join(_source_lines(result))


@to_text.register
def _(result: HelmholtzTensor) -> str:
    if result.is_zero():
        return "variational"
    components = "; ".join(
        f"{helmholtz_label(p, i, j)} = {expr_to_text(e, result.spec)}"
        for (p, i, j), e in result.components.items()
    )
    return f"non-variational; {components}"


@to_text.register
def _(result: LagrangianReport) -> str:
    lagrangian = result.lagrangian
    lines = [f"L = {expr_to_text(lagrangian.density, lagrangian.spec)}", f"order = {lagrangian.order}"]
    if result.comparison_order is not None:
        lines.append(f"volterra_vainberg_order = {result.comparison_order}")
    return "\n".join(lines)


@to_text.register
def _(result: MomentumReport) -> str:
    return "\n".join(_source_lines(result.source) + [f"p = {form_to_text(result.momentum)}"])


@to_text.register
def _(result: PrimitiveReport) -> str:
    if result.trivial:
        return f"trivial; alpha = {form_to_text(result.primitive)}"
    return "\n".join(["not trivial"] + _source_lines(result.source))


@to_text.register
def _(result: CheckReport) -> str:
    table = Table(title="jetvar check", box=box.ROUNDED)
    table.add_column("Check", style="cyan")
    table.add_column("Result", justify="center")
    table.add_column("Detail")
    for r in result.results:
        table.add_row(r.name, "ok" if r.passed else "FAILED", r.detail)
    buffer = io.StringIO()
    console = Console(file=buffer, width=120, color_system=None, force_terminal=False)
    console.print(table)
    console.print(f"{len(result.results)} check(s), {result.failures} failure(s)")
    return buffer.getvalue()


# ─── JSON ────────────────────────────────────────────────────────────────────

@singledispatch
def to_json(result) -> dict:
    raise TypeError(f"cannot serialize {type(result).__name__}")


@to_json.register
def _(result: SourceForm) -> dict:
    return {"source_form": {"E": _source_items(result)}}


@to_json.register
def _(result: HelmholtzTensor) -> dict:
    components = [
        {"p": list(p.entries), "i": i, "j": j, "expr": expr_to_text(e, result.spec)}
        for (p, i, j), e in result.components.items()
    ]
    return {"helmholtz": {"components": components, "variational": result.is_zero()}}


@to_json.register
def _(result: LagrangianReport) -> dict:
    lagrangian = result.lagrangian
    body = {"density": expr_to_text(lagrangian.density, lagrangian.spec), "order": lagrangian.order}
    if result.comparison_order is not None:
        body["volterra_vainberg_order"] = result.comparison_order
    return {"lagrangian": body}


@to_json.register
def _(result: MomentumReport) -> dict:
    spec = result.momentum.spec
    components = [
        {"i": i, "q": list(q.entries), "direction": lam, "expr": expr_to_text(e, spec)}
        for (i, q, lam), e in sorted(momentum_components(result.momentum).items(),
                                     key=lambda kv: (kv[0][0], kv[0][1].sort_key, kv[0][2]))
    ]
    return {"momentum": {"gauge": result.gauge, "E": _source_items(result.source), "components": components}}


@to_json.register
def _(result: PrimitiveReport) -> dict:
    if result.trivial:
        body = {"trivial": True, "degree": result.primitive.degree, "form": form_to_text(result.primitive)}
    else:
        body = {"trivial": False, "E": _source_items(result.source)}
    return {"primitive": body}


@to_json.register
def _(result: CheckReport) -> dict:
    results = [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in result.results]
    return {"check": {"results": results, "passed": result.passed}}


# ─── LaTeX ───────────────────────────────────────────────────────────────────

@singledispatch
def to_latex(result) -> str:
    raise TypeError(f"cannot serialize {type(result).__name__}")


@to_latex.register
def _(result: SourceForm) -> str:
    return form_to_latex(result.form)


@to_latex.register
def _(result: HelmholtzTensor) -> str:
    if result.is_zero():
        return "\\mathcal{H} = 0"
    return ",\\quad ".join(
        f"{helmholtz_label(p, i, j)} = {expr_to_latex(e, result.spec)}"
        for (p, i, j), e in result.components.items()
    )


@to_latex.register
def _(result: LagrangianReport) -> str:
    return form_to_latex(result.lagrangian.form)


@to_latex.register
def _(result: MomentumReport) -> str:
    return form_to_latex(result.momentum)


@to_latex.register
def _(result: PrimitiveReport) -> str:
    if result.trivial:
        return form_to_latex(result.primitive)
    return form_to_latex(result.source.form)


@to_latex.register
def _(result: CheckReport) -> str:
    return to_text(result)
