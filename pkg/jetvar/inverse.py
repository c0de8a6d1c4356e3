"""
Inverse problems
================
The fiber-radial homotopy operator K on a chart with vector-space fibers,
and the two inverse problems built on it:

  - minimal_lagrangian: a Lagrangian of least order for a locally variational
    source form (homotopy pipeline, then an exact ansatz search below it)
  - trivial_primitive: an (n-1)-form whose horizontal differential is a given
    variationally trivial Lagrangian
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from jetvar import config
from jetvar.console import log
from jetvar.errors import InvariantViolation, NotTrivialError, NotVariationalError
from jetvar.forms import (
    Dx,
    Form,
    contact_degree,
    d_h,
    exterior_d,
    horizontalize,
    interior_vertical,
)
from jetvar.jetalg import Base, Expr, Field, JetSpec, fiber_degree
from jetvar.multiindex import MultiIndex, enumerate_upto
from jetvar.varcalc import (
    Gauge,
    Lagrangian,
    SourceForm,
    euler_lagrange,
    helmholtz,
    kolar_decompose,
)


@dataclass(frozen=True)
class HomotopyResult:
    primitive: Form
    defect: Form


# ─── Homotopy operator ───────────────────────────────────────────────────────

def homotopy_operator(a: Form) -> Form:
    """K(a) = ∫₀¹ A_t^*(i_Δ a) dt/t for the scaling A_t(x, y_p) = (x, t·y_p).

    On a monomial coefficient of fiber degree d in a term with c contact
    factors the t-integral contributes 1/(c + d).
    """
    spec = a.spec
    if a.degree == 0:
        return Form.zero(spec, 0)
    weighted = []
    for factors, coef in a.items():
        c = contact_degree(factors)
        if c == 0:
            continue
        weighted.append((factors, Expr({
            mono: value * QQ(1, c + fiber_degree(mono)) for mono, value in coef.items()
        })))
    return interior_vertical(Form.from_terms(spec, a.degree, weighted), _liouville)


def _liouville(i: int, p: MultiIndex) -> Expr:
    return Expr.coordinate(Field(i, p))


def fiber_homotopy(a: Form) -> HomotopyResult:
    primitive = homotopy_operator(a)
    defect = a - exterior_d(primitive) - homotopy_operator(exterior_d(a))
    return HomotopyResult(primitive, defect)


# ─── Minimal-order Lagrangian ────────────────────────────────────────────────

def _require_variational(source: SourceForm) -> None:
    tensor = helmholtz(source)
    if not tensor.is_zero():
        raise NotVariationalError(
            f"source form is not locally variational ({len(tensor.components)} nonzero Helmholtz component(s))",
            tensor,
        )


def homotopy_lagrangian(source: SourceForm) -> Lagrangian:
    """L = h(K(α - K(dα))) for α = E as a form, with the sign fixed so that EL(L) = E."""
    spec = source.spec
    if source.is_zero():
        return Lagrangian(spec, Expr())
    alpha = source.form
    beta = homotopy_operator(exterior_d(alpha))
    gamma = homotopy_operator(alpha - beta)
    lagrangian = Lagrangian.from_form(horizontalize(gamma))
    found = euler_lagrange(lagrangian)
    if found == -source:
        log("HOMOTOPY", "flipping the sign of the homotopy Lagrangian")
        lagrangian = Lagrangian(spec, -lagrangian.density)
    elif found != source:
        raise InvariantViolation("Euler-Lagrange form of the homotopy Lagrangian does not reproduce the source")
    log("HOMOTOPY", f"homotopy Lagrangian of order {lagrangian.order}")
    return lagrangian


def _base_monomials(n: int, degree: int):
    for exponents in itertools.product(range(degree + 1), repeat=n):
        if sum(exponents) <= degree:
            yield tuple((Base(d), e) for d, e in enumerate(exponents, start=1) if e)


def _ansatz_size(spec: JetSpec, order: int, fiber: int, base: int) -> int:
    coordinates = spec.m * math.comb(spec.n + order, spec.n)
    field_monomials = sum(math.comb(coordinates + d - 1, d) for d in range(1, fiber + 1))
    return field_monomials * math.comb(spec.n + base, spec.n)


def _ansatz(spec: JetSpec, order: int, fiber: int, base: int) -> list[Expr]:
    coordinates = [
        Field(i, p) for i in range(1, spec.m + 1) for p in enumerate_upto(spec.n, order)
    ]
    terms = []
    base_monomials = list(_base_monomials(spec.n, base))
    for d in range(1, fiber + 1):
        for combo in itertools.combinations_with_replacement(coordinates, d):
            field_part = Expr({(): QQ(1)})
            for c in combo:
                field_part = field_part * Expr.coordinate(c)
            for mono in base_monomials:
                terms.append(field_part * Expr({mono: QQ(1)}))
    return terms


def search_lagrangian(source: SourceForm, order: int) -> Lagrangian | None:
    """Solve EL(L) = E exactly for a polynomial L of the given order, or None."""
    spec = source.spec
    if source.is_zero():
        return Lagrangian(spec, Expr())
    fiber = source.fiber_degree + 1
    base = source.base_degree + config.SEARCH_EXTRA_BASE_DEGREE
    size = _ansatz_size(spec, order, fiber, base)
    if size > config.SEARCH_MAX_UNKNOWNS:
        log("SEARCH", f"order {order}: ansatz of {size} unknowns exceeds the cap, skipped")
        return None

    unknowns = []
    images = []
    for candidate in _ansatz(spec, order, fiber, base):
        image = euler_lagrange(Lagrangian(spec, candidate))
        if not image.is_zero():
            unknowns.append(candidate)
            images.append(image)

    rows: dict[tuple, int] = {}
    entries: dict[int, dict[int, object]] = {}

    def row_of(i, mono):
        if (i, mono) not in rows:
            rows[(i, mono)] = len(rows)
        return rows[(i, mono)]

    for col, image in enumerate(images):
        for i, e in image.components.items():
            for mono, value in e.items():
                entries.setdefault(row_of(i, mono), {})[col] = value
    rhs = len(unknowns)
    for i, e in source.components.items():
        for mono, value in e.items():
            entries.setdefault(row_of(i, mono), {})[rhs] = value

    log("SEARCH", f"order {order}: {len(rows)} equation(s) in {len(unknowns)} unknown(s)")
    if not unknowns:
        return None
    system = DomainMatrix(entries, (len(rows), len(unknowns) + 1), QQ)
    reduced, pivots = system.rref()
    if rhs in pivots:
        return None
    table = reduced.to_sparse().rep
    density = Expr()
    for r, col in enumerate(pivots):
        value = table.get(r, {}).get(rhs, QQ(0))
        if value:
            density = density + unknowns[col] * value
    lagrangian = Lagrangian(spec, density)
    if euler_lagrange(lagrangian) != source:
        raise InvariantViolation(f"order-{order} ansatz solution does not reproduce the source form")
    return lagrangian


def minimal_lagrangian(source: SourceForm, order_cap: int | None = None) -> Lagrangian:
    """A Lagrangian of least order among those whose Euler-Lagrange form is E."""
    _require_variational(source)
    spec = source.spec
    if source.is_zero():
        return Lagrangian(spec, Expr())
    if order_cap is None:
        order_cap = 2 * source.order + 1
    candidate = homotopy_lagrangian(source)
    lowest = -(-source.order // 2)
    for order in range(lowest, min(candidate.order, order_cap)):
        found = search_lagrangian(source, order)
        if found is not None:
            log("SEARCH", f"Lagrangian of order {found.order} found")
            return found
    return candidate


def volterra_vainberg(source: SourceForm) -> Lagrangian:
    """density = Σ_i y^i ∫₀¹ E_i(x, t·y) dt, exact on polynomials."""
    _require_variational(source)
    spec = source.spec
    density = Expr()
    for i, e in source.components.items():
        scaled = Expr({mono: value * QQ(1, fiber_degree(mono) + 1) for mono, value in e.items()})
        density = density + Expr.coordinate(Field(i, MultiIndex.zero(spec.n))) * scaled
    return Lagrangian(spec, density)


# ─── Variationally trivial Lagrangians ───────────────────────────────────────

def is_variationally_trivial(lagrangian: Lagrangian) -> bool:
    return euler_lagrange(lagrangian).is_zero()


def _antiderivative(f: Expr, direction: int) -> Expr:
    """∫₀^{x^λ} f dx^λ for a polynomial in base coordinates."""
    target = Base(direction)
    terms = {}
    for mono, value in f.items():
        powers = dict(mono)
        e = powers.get(target, 0)
        powers[target] = e + 1
        key = tuple(sorted(powers.items(), key=lambda ce: ce[0].key))
        terms[key] = value * QQ(1, e + 1)
    return Expr(terms)


def trivial_primitive(lagrangian: Lagrangian) -> Form:
    """An (n-1)-form α with d_h α = L·ω."""
    spec = lagrangian.spec
    source = euler_lagrange(lagrangian)
    if not source.is_zero():
        raise NotTrivialError("Lagrangian has a nonzero Euler-Lagrange form", source)
    if not lagrangian.density:
        return Form.zero(spec, spec.n - 1)
    volume = lagrangian.form
    _, momentum = kolar_decompose(exterior_d(volume), Gauge.LEX)
    eta = volume + momentum
    beta = homotopy_operator(exterior_d(eta))
    gamma = homotopy_operator(eta - beta)
    # primitive of the zero-section part L(x, 0)·ω along x^1
    base_part = lagrangian.density.at_zero_section()
    sigma = Form.basis(
        spec, *(Dx(d) for d in range(2, spec.n + 1)), coefficient=_antiderivative(base_part, 1)
    )
    primitive = horizontalize(gamma + sigma)
    if d_h(primitive) != volume:
        raise InvariantViolation("horizontal differential of the primitive does not reproduce the Lagrangian")
    log("HOMOTOPY", f"primitive of degree {primitive.degree} and order {primitive.order}")
    return primitive
