"""
Expression, form and problem-file parser
========================================
A single LALR grammar with three start symbols:

  expr       1/2*u_{x}^2 - 1/2*u^2
  form       u_{x}*theta(u; x)^dx(x) + dy(v)^dx(x)
  statement  one line of a problem file

Problem files hold one statement per line; `#` starts a comment. Error
positions carry a 1-based line and the 0-based column offset within it.

  base x
  fields u
  task el
  let f = u_{x}
  L = 1/2*f^2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from jetvar import forms
from jetvar.errors import DimensionError, JetvarError, ParseError, SubscriptError, UnknownIdentifierError
from jetvar.forms import Form
from jetvar.jetalg import Base, Expr, Field, JetSpec
from jetvar.multiindex import MultiIndex
from jetvar.varcalc import Lagrangian, SourceForm

GRAMMAR = r"""
    statement: "base" name_list             -> base_decl
             | "fields" name_list           -> fields_decl
             | "task" NAME                  -> task_decl
             | "let" NAME "=" expr          -> let_decl
             | "form" NAME "=" form         -> form_decl
             | "L" "=" expr                 -> lagrangian_decl
             | COMPONENT "=" expr           -> component_decl

    name_list: NAME ("," NAME)*

    ?expr: sum
    ?sum: product
        | sum "+" product                   -> add
        | sum "-" product                   -> sub
    ?product: signed
        | product "*" power                 -> mul
    ?signed: power
        | "-" power                         -> neg
    ?power: atom
        | atom "^" INT                      -> pow
    ?atom: INT "/" INT                      -> rational
        | INT                               -> integer
        | NAME                              -> name
        | NAME "_{" name_list "}"           -> jet
        | "(" expr ")"

    ?form: fsum
    ?fsum: fterm
        | fsum "+" fterm                    -> fadd
        | fsum "-" fterm                    -> fsub
    ?fterm: fproduct
        | "-" fproduct                      -> fneg
    fproduct: (power "*")* wedge
    wedge: covector ("^" covector)*
    ?covector: "dx" "(" NAME ")"            -> dx
        | "theta" "(" NAME [";" name_list] ")"  -> theta
        | "dy" "(" NAME [";" name_list] ")"     -> dy

    COMPONENT.2: /E_[1-9][0-9]*/
    NAME: /[A-Za-z][A-Za-z0-9]*/
    INT: /[0-9]+/

    %import common.WS_INLINE
    %ignore WS_INLINE
"""

_parser = Lark(GRAMMAR, parser="lalr", start=["statement", "expr", "form"], maybe_placeholders=True)

_COVECTOR = re.compile(r"\b(dx|dy|theta)\s*\(")


# ─── Tree → values ───────────────────────────────────────────────────────────

@v_args(inline=True)
class _Builder(Transformer):
    """Turns parse trees into Expr and Form values on a fixed chart."""

    def __init__(self, spec: JetSpec, bindings: dict | None = None, line_offset: int = 0):
        super().__init__()
        self.spec = spec
        self.bindings = bindings or {}
        self.line_offset = line_offset

    def _where(self, token: Token) -> dict:
        return {"line": token.line + self.line_offset, "column": token.column - 1}

    def _base(self, token: Token) -> int:
        if token not in self.spec.base_names:
            raise SubscriptError(f"'{token}' is not a base variable", **self._where(token))
        return self.spec.base_index(str(token))

    def _field(self, token: Token) -> int:
        if token not in self.spec.field_names:
            raise UnknownIdentifierError(f"'{token}' is not a field", **self._where(token))
        return self.spec.field_index(str(token))

    def _multi_index(self, names) -> MultiIndex:
        p = MultiIndex.zero(self.spec.n)
        for token in names or ():
            p = p.add_direction(self._base(token))
        return p

    # expressions

    def integer(self, token):
        return Expr.constant(int(token))

    def rational(self, numerator, denominator):
        if int(denominator) == 0:
            raise ParseError("zero denominator", **self._where(denominator))
        return Expr.constant(Fraction(int(numerator), int(denominator)))

    def name(self, token):
        if token in self.spec.base_names:
            return Expr.coordinate(Base(self.spec.base_index(str(token))))
        if token in self.spec.field_names:
            return Expr.coordinate(Field(self.spec.field_index(str(token)), MultiIndex.zero(self.spec.n)))
        if token in self.bindings:
            return self.bindings[str(token)]
        raise UnknownIdentifierError(f"unknown identifier '{token}'", **self._where(token))

    def jet(self, token, names):
        if token not in self.spec.field_names:
            raise SubscriptError(f"'{token}' is not a field and cannot carry a derivative subscript",
                                 **self._where(token))
        return Expr.coordinate(Field(self._field(token), self._multi_index(names)))

    def name_list(self, *tokens):
        return list(tokens)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def pow(self, base, exponent):
        return base ** int(exponent)

    # forms

    def dx(self, token):
        return forms.dx(self.spec, self._base(token))

    def theta(self, token, names):
        return forms.theta(self.spec, self._field(token), self._multi_index(names))

    def dy(self, token, names):
        return forms.from_holonomic(self.spec, self._field(token), self._multi_index(names))

    def wedge(self, *covectors):
        return reduce(Form.wedge, covectors)

    def fproduct(self, *items):
        *coefficients, wedge = items
        return reduce(lambda acc, c: acc * c, coefficients, wedge)

    def fadd(self, a, b):
        return a + b

    def fsub(self, a, b):
        return a - b

    def fneg(self, a):
        return -a


def _raise_syntax(exc: UnexpectedInput, line_offset: int = 0):
    line = exc.line + line_offset if exc.line and exc.line > 0 else line_offset + 1
    column = exc.column - 1 if exc.column and exc.column > 0 else 0
    if isinstance(exc, UnexpectedToken):
        found = "end of input" if exc.token.type == "$END" else repr(str(exc.token))
        message = f"syntax error: unexpected {found}"
    elif isinstance(exc, UnexpectedCharacters):
        message = f"syntax error: unexpected character {exc.char!r}"
    else:
        message = "syntax error: unexpected end of input"
    raise ParseError(message, line, column) from None


def _build(tree, builder: _Builder):
    try:
        return builder.transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, JetvarError):
            raise exc.orig_exc from None
        raise


def parse(text: str, spec: JetSpec, kind: str | None = None, bindings: dict | None = None) -> Expr | Form:
    """Parse an expression or a form; kind is "expr", "form" or None to detect covectors."""
    if kind is None:
        kind = "form" if _COVECTOR.search(text) else "expr"
    if kind not in ("expr", "form"):
        raise ValueError(f"kind must be 'expr' or 'form', got {kind!r}")
    try:
        tree = _parser.parse(text, start=kind)
    except UnexpectedInput as exc:
        _raise_syntax(exc)
    return _build(tree, _Builder(spec, bindings))


def parse_expr(text: str, spec: JetSpec, bindings: dict | None = None) -> Expr:
    return parse(text, spec, "expr", bindings)


def parse_form(text: str, spec: JetSpec, bindings: dict | None = None) -> Form:
    return parse(text, spec, "form", bindings)


# ─── Problem files ───────────────────────────────────────────────────────────

@dataclass
class ProblemFile:
    spec: JetSpec
    task: str | None = None
    lets: dict[str, Expr] = field(default_factory=dict)
    forms: dict[str, Form] = field(default_factory=dict)
    density: Expr | None = None
    components: dict[int, Expr] = field(default_factory=dict)

    @property
    def lagrangian(self) -> Lagrangian | None:
        return None if self.density is None else Lagrangian(self.spec, self.density)

    @property
    def source(self) -> SourceForm | None:
        return SourceForm(self.spec, self.components) if self.components else None


def parse_problem(text: str) -> ProblemFile:
    base_names = fields_names = None
    problem = None
    task = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        try:
            tree = _parser.parse(line, start="statement")
        except UnexpectedInput as exc:
            _raise_syntax(exc, number - 1)
        kind = tree.data

        if kind in ("base_decl", "fields_decl"):
            names = [str(t) for t in tree.children[0].children]
            if kind == "base_decl":
                if base_names is not None:
                    raise ParseError("base declared twice", number, 0)
                base_names = names
            else:
                if fields_names is not None:
                    raise ParseError("fields declared twice", number, 0)
                fields_names = names
            if base_names is not None and fields_names is not None:
                try:
                    problem = ProblemFile(JetSpec.from_names(base_names, fields_names), task)
                except DimensionError as exc:
                    raise ParseError(str(exc), number, 0) from None
            continue

        if kind == "task_decl":
            task = str(tree.children[0])
            if problem is not None:
                problem.task = task
            continue

        if problem is None:
            raise ParseError("declare 'base' and 'fields' before using them", number, 0)
        builder = _Builder(problem.spec, problem.lets, number - 1)
        if kind == "let_decl":
            name, value = tree.children
            if name in problem.spec.base_names or name in problem.spec.field_names:
                raise ParseError(f"'{name}' is already a coordinate", number, name.column - 1)
            problem.lets[str(name)] = _build(value, builder)
        elif kind == "form_decl":
            name, value = tree.children
            problem.forms[str(name)] = _build(value, builder)
        elif kind == "lagrangian_decl":
            problem.density = _build(tree.children[0], builder)
        elif kind == "component_decl":
            token, value = tree.children
            i = int(str(token)[2:])
            if i > problem.spec.m:
                raise UnknownIdentifierError(
                    f"{token} names fiber {i} but only {problem.spec.m} field(s) are declared",
                    number, token.column - 1,
                )
            problem.components[i] = _build(value, builder)

    if problem is None:
        raise ParseError("problem file declares no 'base' and 'fields'")
    return problem
