"""
Differential forms on a jet chart
=================================
Forms are kept in the adapted basis {dx^λ, ϑ^i_p}, where
ϑ^i_p = dy^i_p - y^i_{p+λ} dx^λ. In that basis the contact splitting, the
horizontalization and the split d = d_h + d_v are all groupings of terms.

Factors inside a term are strictly increasing in the covector order
(every ϑ before every dx); the sign of the reordering lives in the coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from jetvar.console import log
from jetvar.errors import DimensionError, ShapeError
from jetvar.jetalg import Expr, Field, JetSpec, to_coefficient
from jetvar.multiindex import MultiIndex


# ─── Basis covectors ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Theta:
    i: int
    p: MultiIndex

    @property
    def key(self) -> tuple:
        return (0, self.i, self.p.sort_key)


@dataclass(frozen=True)
class Dx:
    direction: int

    @property
    def key(self) -> tuple:
        return (1, self.direction)


BasisCovector = Theta | Dx


def _canonical(factors: Iterable) -> tuple[int, tuple] | None:
    """Sort a wedge of covectors; None when a covector repeats."""
    factors = list(factors)
    if len(set(factors)) != len(factors):
        return None
    sign = 1
    # insertion sort, counting transpositions
    for k in range(1, len(factors)):
        j = k
        while j > 0 and factors[j - 1].key > factors[j].key:
            factors[j - 1], factors[j] = factors[j], factors[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(factors)


def contact_degree(factors: tuple) -> int:
    return sum(1 for f in factors if isinstance(f, Theta))


def _term_key(factors: tuple) -> tuple:
    return (contact_degree(factors), tuple(f.key for f in factors))


# ─── Forms ───────────────────────────────────────────────────────────────────

class Form:
    """Homogeneous k-form Σ c_F F with coefficients c_F in Expr."""

    __slots__ = ("spec", "degree", "_terms")

    def __init__(self, spec: JetSpec, degree: int, terms: Mapping | None = None):
        self.spec = spec
        self.degree = degree
        self._terms = {}
        for factors, coef in (terms or {}).items():
            if len(factors) != degree:
                raise ShapeError(f"term of degree {len(factors)} in a {degree}-form")
            if coef:
                self._terms[factors] = coef

    @classmethod
    def zero(cls, spec: JetSpec, degree: int) -> Form:
        return cls(spec, degree)

    @classmethod
    def scalar(cls, spec: JetSpec, f) -> Form:
        return cls(spec, 0, {(): Expr.lift(f)})

    @classmethod
    def basis(cls, spec: JetSpec, *factors, coefficient=1) -> Form:
        """coefficient · F1∧...∧Fk for basis covectors in any order."""
        _check_factors(spec, factors)
        canon = _canonical(factors)
        if canon is None:
            return cls(spec, len(factors))
        sign, ordered = canon
        return cls(spec, len(factors), {ordered: Expr.lift(coefficient) * sign})

    @classmethod
    def from_terms(cls, spec: JetSpec, degree: int, pieces: Iterable) -> Form:
        """Sum of (factors, coefficient) pieces, factors in any order."""
        terms = {}
        for factors, coef in pieces:
            canon = _canonical(factors)
            if canon is None or not coef:
                continue
            sign, ordered = canon
            terms[ordered] = terms.get(ordered, Expr()) + coef * sign
        return cls(spec, degree, terms)

    # inspection

    def items(self):
        return sorted(self._terms.items(), key=lambda fc: _term_key(fc[0]))

    def coefficient(self, *factors) -> Expr:
        canon = _canonical(factors)
        if canon is None:
            return Expr()
        sign, ordered = canon
        return self._terms.get(ordered, Expr()) * sign

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def order(self) -> int:
        orders = [0]
        for factors, coef in self._terms.items():
            orders.append(coef.order)
            orders.extend(f.p.degree for f in factors if isinstance(f, Theta))
        return max(orders)

    def contact_degrees(self) -> set[int]:
        return {contact_degree(factors) for factors in self._terms}

    def map_coefficients(self, fn: Callable[[Expr], Expr]) -> Form:
        return Form(self.spec, self.degree, {f: fn(c) for f, c in self._terms.items()})

    # arithmetic

    def _check_compatible(self, other: Form) -> None:
        if self.spec != other.spec:
            raise DimensionError("forms live on different jet charts")

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if self.spec != other.spec:
            return False
        if self._terms != other._terms:
            return False
        return self.degree == other.degree or not self._terms

    def __hash__(self):
        return hash((self.spec, frozenset(self._terms.items())))

    def __neg__(self):
        return self.map_coefficients(lambda c: -c)

    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        self._check_compatible(other)
        if self.degree != other.degree:
            if not other._terms:
                return self
            if not self._terms:
                return other
            raise ShapeError(f"cannot add a {self.degree}-form and a {other.degree}-form")
        terms = dict(self._terms)
        for factors, coef in other._terms.items():
            terms[factors] = terms.get(factors, Expr()) + coef
        return Form(self.spec, self.degree, terms)

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Form):
            return NotImplemented
        if not isinstance(other, Expr):
            other = Expr.constant(to_coefficient(other))
        return self.map_coefficients(lambda c: c * other)

    __rmul__ = __mul__

    def wedge(self, other: Form) -> Form:
        self._check_compatible(other)
        pieces = [
            (fa + fb, ca * cb)
            for fa, ca in self._terms.items()
            for fb, cb in other._terms.items()
        ]
        return Form.from_terms(self.spec, self.degree + other.degree, pieces)

    def __xor__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.wedge(other)

    def __repr__(self):
        if not self._terms:
            return f"Form(0, degree={self.degree})"
        parts = []
        for factors, coef in self.items():
            wedge = "^".join(
                f"theta{f.i}{list(f.p.entries)}" if isinstance(f, Theta) else f"dx{f.direction}"
                for f in factors
            ) or "1"
            parts.append(f"({coef!r})*{wedge}")
        return f"Form({' + '.join(parts)})"


def _check_factors(spec: JetSpec, factors) -> None:
    for f in factors:
        if isinstance(f, Dx):
            spec.check_direction(f.direction)
        else:
            spec.check_fiber(f.i)
            if f.p.n != spec.n:
                raise DimensionError(f"multi-index {f.p} does not fit a chart with n={spec.n}")


# ─── Constructors ────────────────────────────────────────────────────────────

def scalar(spec: JetSpec, f) -> Form:
    return Form.scalar(spec, f)


def dx(spec: JetSpec, direction: int) -> Form:
    return Form.basis(spec, Dx(direction))


def theta(spec: JetSpec, i: int, p: MultiIndex | None = None) -> Form:
    return Form.basis(spec, Theta(i, p if p is not None else MultiIndex.zero(spec.n)))


def from_holonomic(spec: JetSpec, i: int, p: MultiIndex | None = None) -> Form:
    """dy^i_p written in the adapted basis: ϑ^i_p + Σ_λ y^i_{p+λ} dx^λ."""
    p = p if p is not None else MultiIndex.zero(spec.n)
    result = theta(spec, i, p)
    for direction in range(1, spec.n + 1):
        shifted = Expr.coordinate(Field(i, p.add_direction(direction)))
        result = result + dx(spec, direction) * shifted
    return result


def omega(spec: JetSpec) -> Form:
    """The volume form dx^1∧...∧dx^n, normalized to coefficient 1."""
    return Form.basis(spec, *(Dx(d) for d in range(1, spec.n + 1)))


def omega_sub(spec: JetSpec, *directions: int) -> Form:
    """ω_λ = i_{D_λ} ω, ω_{λμ} = i_{D_μ} ω_λ, and so on."""
    result = omega(spec)
    for direction in directions:
        result = interior_total(result, direction)
    return result


def wedge(a: Form, b: Form) -> Form:
    return a.wedge(b)


# ─── Contact structure ───────────────────────────────────────────────────────

def contact_split(a: Form) -> list[tuple[int, Form]]:
    groups: dict[int, dict] = {}
    for factors, coef in a.items():
        groups.setdefault(contact_degree(factors), {})[factors] = coef
    return [(c, Form(a.spec, a.degree, groups[c])) for c in sorted(groups)]


def contact_component(a: Form, c: int) -> Form:
    return Form(a.spec, a.degree, {f: v for f, v in a.items() if contact_degree(f) == c})


def horizontalize(a: Form) -> Form:
    """h(a): the contact-degree-0 part for k <= n, the contact-degree-(k-n) part above."""
    return contact_component(a, max(0, a.degree - a.spec.n))


def vertical(a: Form) -> Form:
    return a - horizontalize(a)


def is_contact(a: Form) -> bool:
    """True when the form vanishes along every prolonged section."""
    if a.degree > a.spec.n:
        log("INFO", f"a {a.degree}-form on a chart with n={a.spec.n} is contact by degree")
        return True
    return horizontalize(a).is_zero()


# ─── Exterior derivative and its splitting ───────────────────────────────────

def _differential(a: Form, horizontal: bool, vertical_part: bool) -> Form:
    spec = a.spec
    pieces = []
    for factors, coef in a.items():
        if horizontal:
            for direction in range(1, spec.n + 1):
                pieces.append(((Dx(direction),) + factors, coef.total_derivative(direction)))
            # dϑ^i_p = Σ_λ dx^λ∧ϑ^i_{p+λ}
            for j, f in enumerate(factors):
                if not isinstance(f, Theta):
                    continue
                sign = -1 if j % 2 else 1
                for direction in range(1, spec.n + 1):
                    replaced = (
                        factors[:j] + (Dx(direction), Theta(f.i, f.p.add_direction(direction)))
                        + factors[j + 1:]
                    )
                    pieces.append((replaced, coef * sign))
        if vertical_part:
            for c in coef.fields():
                pieces.append(((Theta(c.i, c.p),) + factors, coef.partial(c)))
    return Form.from_terms(spec, a.degree + 1, pieces)


def exterior_d(a: Form) -> Form:
    return _differential(a, horizontal=True, vertical_part=True)


def d_h(a: Form) -> Form:
    return _differential(a, horizontal=True, vertical_part=False)


def d_v(a: Form) -> Form:
    return _differential(a, horizontal=False, vertical_part=True)


# ─── Contractions and restrictions ───────────────────────────────────────────

def interior_total(a: Form, direction: int) -> Form:
    """Contraction with the total derivative field D_λ; it annihilates every ϑ."""
    a.spec.check_direction(direction)
    target = Dx(direction)
    pieces = []
    for factors, coef in a.items():
        if target in factors:
            j = factors.index(target)
            sign = -1 if j % 2 else 1
            pieces.append((factors[:j] + factors[j + 1:], coef * sign))
    return Form.from_terms(a.spec, a.degree - 1, pieces) if a.degree else Form.zero(a.spec, 0)


def interior_vertical(a: Form, components: Callable[[int, MultiIndex], Expr] | Mapping) -> Form:
    """Contraction with a vertical field Σ V^i_p ∂/∂y^i_p; i_V ϑ^i_p = V^i_p, i_V dx = 0."""
    if isinstance(components, Mapping):
        table = components
        components = lambda i, p: table.get((i, p), Expr())  # noqa: E731
    if a.degree == 0:
        return Form.zero(a.spec, 0)
    pieces = []
    for factors, coef in a.items():
        for j, f in enumerate(factors):
            if isinstance(f, Theta):
                value = components(f.i, f.p)
                if value:
                    sign = -1 if j % 2 else 1
                    pieces.append((factors[:j] + factors[j + 1:], coef * value * sign))
    return Form.from_terms(a.spec, a.degree - 1, pieces)


def pullback(a: Form, section: Mapping[int, Expr]) -> Form:
    """Pull back along the prolongation of a polynomial section; every ϑ goes to 0."""
    return Form(
        a.spec,
        a.degree,
        {f: c.pullback(section) for f, c in a.items() if contact_degree(f) == 0},
    )


def restrict_zero_section(a: Form) -> Form:
    """Restriction to y^i_p = 0, where every ϑ also vanishes."""
    return Form(
        a.spec,
        a.degree,
        {f: c.at_zero_section() for f, c in a.items() if contact_degree(f) == 0},
    )
