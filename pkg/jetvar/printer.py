"""
Printers
========
Text output in the parser's own syntax (so printing then parsing gives the
same value back) and LaTeX output in the usual jet notation.
"""

from __future__ import annotations

import sympy
from sympy import QQ

from jetvar.forms import Dx, Form, Theta
from jetvar.jetalg import Base, Expr, JetSpec
from jetvar.multiindex import MultiIndex


# ─── Text ────────────────────────────────────────────────────────────────────

def _rational_text(value) -> str:
    value = QQ.to_sympy(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def _monomial_text(mono, spec: JetSpec) -> str:
    return "*".join(
        spec.coordinate_name(c) + (f"^{e}" if e > 1 else "") for c, e in mono
    )


def _term_text(mono, magnitude, spec: JetSpec) -> str:
    body = _monomial_text(mono, spec)
    if not body:
        return _rational_text(magnitude)
    if magnitude == 1:
        return body
    return f"{_rational_text(magnitude)}*{body}"


def _join_signed(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    negative, body = parts[0]
    out = f"-{body}" if negative else body
    for negative, body in parts[1:]:
        out += f" - {body}" if negative else f" + {body}"
    return out


def expr_to_text(f: Expr, spec: JetSpec) -> str:
    return _join_signed([(coef < 0, _term_text(mono, abs(coef), spec)) for mono, coef in f.items()])


def multi_index_text(p: MultiIndex, spec: JetSpec) -> str:
    return ", ".join(spec.base_names[d - 1] for d in p.directions())


def _covector_text(f, spec: JetSpec) -> str:
    if isinstance(f, Dx):
        return f"dx({spec.base_names[f.direction - 1]})"
    name = spec.field_names[f.i - 1]
    if f.p.is_zero():
        return f"theta({name})"
    return f"theta({name}; {multi_index_text(f.p, spec)})"


def form_to_text(a: Form) -> str:
    spec = a.spec
    if a.degree == 0:
        return expr_to_text(a.coefficient(), spec)
    parts = []
    for factors, coef in a.items():
        wedge = "^".join(_covector_text(f, spec) for f in factors)
        terms = coef.items()
        if len(terms) == 1:
            mono, value = terms[0]
            body = _monomial_text(mono, spec)
            prefix = body if abs(value) == 1 else "*".join(filter(None, (_rational_text(abs(value)), body)))
            parts.append((value < 0, f"{prefix}*{wedge}" if prefix else wedge))
        else:
            parts.append((False, f"({expr_to_text(coef, spec)})*{wedge}"))
    return _join_signed(parts)


# ─── LaTeX ───────────────────────────────────────────────────────────────────

def _subscript_latex(p: MultiIndex, spec: JetSpec) -> str:
    names = [spec.base_names[d - 1] for d in p.directions()]
    sep = "" if all(len(name) == 1 for name in names) else ","
    return sep.join(names)


def _coordinate_latex(c, spec: JetSpec) -> str:
    if isinstance(c, Base):
        return spec.base_names[c.direction - 1]
    name = spec.field_names[c.i - 1]
    if c.p.is_zero():
        return name
    return f"{name}_{{{_subscript_latex(c.p, spec)}}}"


def _monomial_latex(mono, spec: JetSpec) -> str:
    return " ".join(
        _coordinate_latex(c, spec) + (f"^{{{e}}}" if e > 1 else "") for c, e in mono
    )


def _term_latex(mono, magnitude, spec: JetSpec) -> str:
    body = _monomial_latex(mono, spec)
    number = sympy.latex(QQ.to_sympy(magnitude))
    if not body:
        return number
    if magnitude == 1:
        return body
    return f"{number} {body}"


def expr_to_latex(f: Expr, spec: JetSpec) -> str:
    return _join_signed([(coef < 0, _term_latex(mono, abs(coef), spec)) for mono, coef in f.items()])


def _covector_latex(f, spec: JetSpec) -> str:
    if isinstance(f, Dx):
        return f"d^{{{f.direction}}}"
    sub = "" if f.p.is_zero() else f"_{{{_subscript_latex(f.p, spec)}}}"
    return f"\\vartheta^{{{f.i}}}{sub}"


def _wedge_latex(factors, spec: JetSpec) -> str:
    thetas = [f for f in factors if isinstance(f, Theta)]
    dxs = [f for f in factors if isinstance(f, Dx)]
    pieces = [_covector_latex(f, spec) for f in thetas]
    if len(dxs) == spec.n:
        pieces.append("\\omega")
    else:
        pieces.extend(_covector_latex(f, spec) for f in dxs)
    return "\\wedge".join(pieces)


def form_to_latex(a: Form) -> str:
    spec = a.spec
    if a.degree == 0:
        return expr_to_latex(a.coefficient(), spec)
    parts = []
    for factors, coef in a.items():
        wedge = _wedge_latex(factors, spec)
        terms = coef.items()
        if len(terms) == 1:
            mono, value = terms[0]
            body = _term_latex(mono, abs(value), spec)
            if not mono and abs(value) == 1:
                parts.append((value < 0, wedge))
            else:
                parts.append((value < 0, f"{body}\\,{wedge}"))
        else:
            parts.append((False, f"\\left({expr_to_latex(coef, spec)}\\right)\\,{wedge}"))
    return _join_signed(parts)


def helmholtz_label(p: MultiIndex, i: int, j: int) -> str:
    return f"H^{{({','.join(str(e) for e in p.entries)})}}_{{{i}{j}}}"
