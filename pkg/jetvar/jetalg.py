"""
Jet coordinates and polynomial expressions
==========================================
Exact polynomials in the coordinates x^λ, y^i_p of a jet chart, with rational
coefficients from sympy's QQ domain, and the partial and total derivatives
acting on them.

An Expr is a canonical map monomial → coefficient. A monomial is a tuple of
(coordinate, exponent) pairs sorted by the coordinate key, so two Exprs are
equal exactly when their canonical maps are.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import sympy
from sympy import QQ

from jetvar.errors import DimensionError, JetIndexError, UnboundVariableError
from jetvar.multiindex import MultiIndex

_IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
_RESERVED = {"dx", "dy", "theta", "base", "fields", "task", "let", "form", "L"}


# ─── Chart ───────────────────────────────────────────────────────────────────

def _default_names(prefix: str, short: tuple[str, ...], count: int) -> tuple[str, ...]:
    if count <= len(short):
        return short[:count]
    return tuple(f"{prefix}{k}" for k in range(1, count + 1))


@dataclass(frozen=True)
class JetSpec:
    """Chart data: n base directions, m fiber components and their names."""

    n: int
    m: int
    base_names: tuple[str, ...] = field(default=())
    field_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DimensionError(f"a jet chart needs n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        base = tuple(self.base_names) or _default_names("x", ("x", "y", "z"), self.n)
        fields = tuple(self.field_names) or _default_names("u", ("u", "v", "w"), self.m)
        if len(base) != self.n or len(fields) != self.m:
            raise DimensionError(
                f"expected {self.n} base and {self.m} field names, got {len(base)} and {len(fields)}"
            )
        names = base + fields
        if len(set(names)) != len(names):
            raise DimensionError(f"names must be distinct: {', '.join(names)}")
        for name in names:
            if not _IDENTIFIER.match(name) or name in _RESERVED:
                raise DimensionError(f"'{name}' cannot name a coordinate")
        object.__setattr__(self, "base_names", base)
        object.__setattr__(self, "field_names", fields)

    @classmethod
    def from_names(cls, base_names: Iterable[str], field_names: Iterable[str]) -> JetSpec:
        base, fields = tuple(base_names), tuple(field_names)
        return cls(len(base), len(fields), base, fields)

    def base_index(self, name: str) -> int:
        try:
            return self.base_names.index(name) + 1
        except ValueError:
            raise JetIndexError(f"'{name}' is not a base variable") from None

    def field_index(self, name: str) -> int:
        try:
            return self.field_names.index(name) + 1
        except ValueError:
            raise JetIndexError(f"'{name}' is not a field") from None

    def check_direction(self, direction: int) -> None:
        if not 1 <= direction <= self.n:
            raise JetIndexError(f"base direction {direction} out of range 1..{self.n}")

    def check_fiber(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise JetIndexError(f"fiber index {i} out of range 1..{self.m}")

    def multi_index(self, *directions: str) -> MultiIndex:
        p = MultiIndex.zero(self.n)
        for name in directions:
            p = p.add_direction(self.base_index(name))
        return p

    def base_var(self, name: str) -> Expr:
        return Expr.coordinate(Base(self.base_index(name)))

    def field_var(self, name: str, *directions: str) -> Expr:
        """The jet coordinate of a field, e.g. field_var("u", "x", "x") for u_{x,x}."""
        return Expr.coordinate(Field(self.field_index(name), self.multi_index(*directions)))

    def coordinate_name(self, c: JetCoordinate) -> str:
        if isinstance(c, Base):
            return self.base_names[c.direction - 1]
        name = self.field_names[c.i - 1]
        if c.p.is_zero():
            return name
        subscript = ",".join(self.base_names[d - 1] for d in c.p.directions())
        return f"{name}_{{{subscript}}}"


# ─── Coordinates ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Base:
    direction: int

    def __post_init__(self):
        if self.direction < 1:
            raise JetIndexError(f"base direction must be >= 1, got {self.direction}")

    @property
    def key(self) -> tuple:
        return (0, self.direction)


@dataclass(frozen=True)
class Field:
    i: int
    p: MultiIndex

    def __post_init__(self):
        if self.i < 1:
            raise JetIndexError(f"fiber index must be >= 1, got {self.i}")

    @property
    def key(self) -> tuple:
        return (1, self.i, self.p.sort_key)

    @property
    def order(self) -> int:
        return self.p.degree

    def shifted(self, direction: int) -> Field:
        return Field(self.i, self.p.add_direction(direction))


JetCoordinate = Base | Field

Monomial = tuple  # tuple[tuple[JetCoordinate, int], ...]


def _make_monomial(powers: Mapping) -> Monomial:
    return tuple(sorted(((c, e) for c, e in powers.items() if e), key=lambda ce: ce[0].key))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for c, e in b:
        powers[c] = powers.get(c, 0) + e
    return _make_monomial(powers)


def monomial_key(mono: Monomial) -> tuple:
    """Canonical order of monomials: total degree, then the largest coordinates."""
    degree = sum(e for _, e in mono)
    return (degree, tuple((c.key, e) for c, e in reversed(mono)))


def fiber_degree(mono: Monomial) -> int:
    return sum(e for c, e in mono if isinstance(c, Field))


def base_degree(mono: Monomial) -> int:
    return sum(e for c, e in mono if isinstance(c, Base))


def to_coefficient(value):
    """Coerce an int, Fraction, sympy Rational or QQ element to QQ."""
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, sympy.Rational):
        return QQ.from_sympy(value)
    raise TypeError(f"cannot use {value!r} as an exact coefficient")


# ─── Expressions ─────────────────────────────────────────────────────────────

class Expr:
    """Polynomial in jet coordinates with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        self._terms = {mono: c for mono, c in (terms or {}).items() if c}
        self._hash = None

    # construction

    @classmethod
    def zero(cls) -> Expr:
        return cls()

    @classmethod
    def constant(cls, value) -> Expr:
        return cls({(): to_coefficient(value)})

    @classmethod
    def coordinate(cls, c: JetCoordinate) -> Expr:
        return cls({((c, 1),): QQ(1)})

    @classmethod
    def lift(cls, value) -> Expr:
        return value if isinstance(value, Expr) else cls.constant(value)

    # inspection

    def items(self):
        """(monomial, coefficient) pairs in printing order, leading monomial first."""
        return sorted(self._terms.items(), key=lambda mc: monomial_key(mc[0]), reverse=True)

    def monomials(self):
        return self._terms.keys()

    def coefficient(self, mono: Monomial):
        return self._terms.get(mono, QQ(0))

    def is_zero(self) -> bool:
        return not self._terms

    def coordinates(self) -> set:
        return {c for mono in self._terms for c, _ in mono}

    def fields(self) -> set:
        return {c for c in self.coordinates() if isinstance(c, Field)}

    @property
    def order(self) -> int:
        return max((c.order for c in self.fields()), default=0)

    @property
    def fiber_degree(self) -> int:
        return max((fiber_degree(mono) for mono in self._terms), default=0)

    @property
    def base_degree(self) -> int:
        return max((base_degree(mono) for mono in self._terms), default=0)

    def weighted_degree(self, r: int) -> int:
        """Degree in the coordinates y_p with |p| > r, where y_p weighs |p| - r."""
        return max(
            (sum(e * (c.order - r) for c, e in mono if isinstance(c, Field) and c.order > r)
             for mono in self._terms),
            default=0,
        )

    def at_zero_section(self) -> Expr:
        """The part of the polynomial surviving y^i_p = 0."""
        return Expr({mono: c for mono, c in self._terms.items() if fiber_degree(mono) == 0})

    # arithmetic

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self._terms == other._terms
        try:
            return self._terms == Expr.constant(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __neg__(self):
        return Expr({mono: -c for mono, c in self._terms.items()})

    def __add__(self, other):
        try:
            other = Expr.lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for mono, c in other._terms.items():
            terms[mono] = terms.get(mono, QQ(0)) + c
        return Expr(terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Expr.lift(other))

    def __rsub__(self, other):
        return Expr.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Expr):
            try:
                k = to_coefficient(other)
            except TypeError:
                return NotImplemented
            return Expr({mono: c * k for mono, c in self._terms.items()})
        terms = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                mono = _mono_mul(ma, mb)
                terms[mono] = terms.get(mono, QQ(0)) + ca * cb
        return Expr(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"only natural powers are polynomial, got {exponent!r}")
        result = Expr.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor) -> Expr:
        return self * to_coefficient(factor)

    # derivatives

    def partial(self, c: JetCoordinate) -> Expr:
        terms = {}
        for mono, coef in self._terms.items():
            powers = dict(mono)
            e = powers.get(c, 0)
            if not e:
                continue
            powers[c] = e - 1
            reduced = _make_monomial(powers)
            terms[reduced] = terms.get(reduced, QQ(0)) + coef * e
        return Expr(terms)

    def total_derivative(self, direction: int) -> Expr:
        """D_λ f = ∂_λ f + Σ y^i_{p+λ} ∂f/∂y^i_p.

        An Expr carries no chart. The direction is checked against the
        multi-index length of its field coordinates; an expression in the
        base variables alone only rejects λ < 1.
        """
        if direction < 1:
            raise JetIndexError(f"base direction must be >= 1, got {direction}")
        n = max((c.p.n for c in self.fields()), default=None)
        if n is not None and direction > n:
            raise JetIndexError(f"base direction {direction} out of range 1..{n}")
        terms = {}
        for mono, coef in self._terms.items():
            powers = dict(mono)
            for c, e in mono:
                rest = dict(powers)
                rest[c] = e - 1
                if isinstance(c, Base):
                    if c.direction != direction:
                        continue
                    new = _make_monomial(rest)
                else:
                    new = _mono_mul(_make_monomial(rest), ((c.shifted(direction), 1),))
                terms[new] = terms.get(new, QQ(0)) + coef * e
        return Expr(terms)

    def iterated_total(self, p: MultiIndex) -> Expr:
        result = self
        for direction in p.directions():
            result = result.total_derivative(direction)
        return result

    # evaluation

    def eval(self, assignment: Mapping) -> sympy.Rational:
        values = {c: to_coefficient(v) for c, v in assignment.items()}
        total = QQ(0)
        for mono, coef in self._terms.items():
            term = coef
            for c, e in mono:
                if c not in values:
                    raise UnboundVariableError(c)
                term *= values[c] ** e
            total += term
        return QQ.to_sympy(total)

    def substitute(self, mapping: Mapping) -> Expr:
        """Replace coordinates by expressions; unmapped coordinates stay."""
        result = Expr()
        for mono, coef in self._terms.items():
            term = Expr({(): coef})
            kept = {}
            for c, e in mono:
                if c in mapping:
                    term = term * Expr.lift(mapping[c]) ** e
                else:
                    kept[c] = e
            result = result + term * Expr({_make_monomial(kept): QQ(1)})
        return result

    def pullback(self, section: Mapping[int, Expr]) -> Expr:
        """Evaluate along the prolongation of a polynomial section x ↦ (s^i(x))."""
        mapping = {}
        for c in self.fields():
            if c.i not in section:
                raise UnboundVariableError(Field(c.i, MultiIndex.zero(c.p.n)))
            mapping[c] = prolong(section[c.i], c.p)
        return self.substitute(mapping)

    def to_sympy(self, spec: JetSpec) -> sympy.Expr:
        symbols = {c: sympy.Symbol(spec.coordinate_name(c)) for c in self.coordinates()}
        return sympy.Add(*(
            QQ.to_sympy(coef) * sympy.Mul(*(symbols[c] ** e for c, e in mono))
            for mono, coef in self._terms.items()
        ))

    def __repr__(self):
        if not self._terms:
            return "Expr(0)"
        parts = []
        for mono, coef in self.items():
            factors = "*".join(
                (f"x{c.direction}" if isinstance(c, Base) else f"y{c.i}{list(c.p.entries)}")
                + (f"^{e}" if e > 1 else "")
                for c, e in mono
            )
            parts.append(f"{coef}*{factors}" if factors else f"{coef}")
        return f"Expr({' + '.join(parts)})"


def prolong(s: Expr, p: MultiIndex) -> Expr:
    """∂_p s for a section component s depending on base coordinates only."""
    result = s
    for direction in p.directions():
        result = result.partial(Base(direction))
    return result


# Module-level spellings of the core operations


def partial(f: Expr, c: JetCoordinate) -> Expr:
    return f.partial(c)


def total_derivative(f: Expr, direction: int, spec: JetSpec | None = None) -> Expr:
    if spec is not None:
        spec.check_direction(direction)
    return f.total_derivative(direction)


def iterated_total(f: Expr, p: MultiIndex) -> Expr:
    return f.iterated_total(p)


def evaluate(f: Expr, assignment: Mapping) -> sympy.Rational:
    return f.eval(assignment)
