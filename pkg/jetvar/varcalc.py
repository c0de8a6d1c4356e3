"""
Variational calculus
====================
Euler-Lagrange forms, the first-variation decomposition α = E - d_h p with a
choice of momentum gauge, the second-variation formula and the Helmholtz
operator, plus a numeric first-variation oracle for checking EL forms against
the action integral.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import sympy
from scipy.integrate import simpson

from jetvar import config
from jetvar.console import log, warn
from jetvar.errors import DimensionError, DomainError, ShapeError
from jetvar.forms import (
    Dx,
    Form,
    Theta,
    contact_degree,
    d_v,
    omega,
    omega_sub,
    theta,
)
from jetvar.jetalg import Base, Expr, Field, JetSpec, prolong
from jetvar.multiindex import MultiIndex, enumerate_upto, multinomial


# ─── Types ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Lagrangian:
    """The horizontal n-form density · ω."""

    spec: JetSpec
    density: Expr

    @property
    def order(self) -> int:
        return self.density.order

    @property
    def form(self) -> Form:
        return omega(self.spec) * self.density

    @classmethod
    def from_form(cls, form: Form) -> Lagrangian:
        spec = form.spec
        if form.degree != spec.n or any(contact_degree(f) for f, _ in form.items()):
            raise ShapeError("a Lagrangian is a horizontal n-form")
        return cls(spec, form.coefficient(*(Dx(d) for d in range(1, spec.n + 1))))


@dataclass(frozen=True)
class SourceForm:
    """E = Σ E_i ϑ^i∧ω, stored as its components; zero components are dropped."""

    spec: JetSpec
    components: Mapping[int, Expr] = field(default_factory=dict)

    def __post_init__(self):
        for i in self.components:
            self.spec.check_fiber(i)
        object.__setattr__(
            self, "components", {i: e for i, e in sorted(self.components.items()) if e}
        )

    def __getitem__(self, i: int) -> Expr:
        self.spec.check_fiber(i)
        return self.components.get(i, Expr())

    def __eq__(self, other):
        if not isinstance(other, SourceForm):
            return NotImplemented
        return self.spec == other.spec and self.components == other.components

    def __hash__(self):
        return hash((self.spec, frozenset(self.components.items())))

    def __neg__(self):
        return SourceForm(self.spec, {i: -e for i, e in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    @property
    def order(self) -> int:
        return max((e.order for e in self.components.values()), default=0)

    @property
    def fiber_degree(self) -> int:
        return max((e.fiber_degree for e in self.components.values()), default=0)

    @property
    def base_degree(self) -> int:
        return max((e.base_degree for e in self.components.values()), default=0)

    @property
    def form(self) -> Form:
        spec = self.spec
        result = Form.zero(spec, spec.n + 1)
        for i, e in self.components.items():
            result = result + theta(spec, i).wedge(omega(spec)) * e
        return result

    @classmethod
    def from_form(cls, form: Form) -> SourceForm:
        coefficients = _one_contact_coefficients(form)
        if any(not p.is_zero() for _, p in coefficients):
            raise ShapeError("a source form only has ϑ^i factors of zero multi-index")
        return cls(form.spec, {i: e for (i, _), e in coefficients.items()})


@dataclass(frozen=True)
class HelmholtzTensor:
    """Components H^p_{ij} of H = Σ H^p_{ij} ϑ^i_p∧ϑ^j∧ω; only nonzero ones are stored."""

    spec: JetSpec
    components: Mapping[tuple[MultiIndex, int, int], Expr] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self,
            "components",
            {
                key: e
                for key, e in sorted(self.components.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
                if e
            },
        )

    def __getitem__(self, key: tuple[MultiIndex, int, int]) -> Expr:
        return self.components.get(key, Expr())

    def is_zero(self) -> bool:
        return not self.components

    @property
    def form(self) -> Form:
        spec = self.spec
        pieces = [
            ((Theta(i, p), Theta(j, MultiIndex.zero(spec.n))) + _dxs(spec), e)
            for (p, i, j), e in self.components.items()
        ]
        return Form.from_terms(spec, spec.n + 2, pieces)

    @classmethod
    def from_form(cls, form: Form) -> HelmholtzTensor:
        """Read components off a form ϑ^i_p∧ϑ^j∧ω; the zero block comes out antisymmetric."""
        half = Fraction(1, 2)
        components: dict = {}
        for (p, i, j), e in _two_contact_coefficients(form).items():
            if p.is_zero():
                components[(p, i, j)] = components.get((p, i, j), Expr()) + e * half
                components[(p, j, i)] = components.get((p, j, i), Expr()) - e * half
            else:
                components[(p, i, j)] = components.get((p, i, j), Expr()) + e
        return cls(form.spec, components)


class Gauge(enum.Enum):
    NATURAL = "natural"
    QUASISYMMETRIC = "quasisym"
    LEX = "lex"

    @classmethod
    def parse(cls, name: str) -> Gauge:
        aliases = {
            "natural": cls.NATURAL, "natural-r1": cls.NATURAL,
            "quasisym": cls.QUASISYMMETRIC, "quasisymmetric-r2": cls.QUASISYMMETRIC,
            "lex": cls.LEX, "lex-peel": cls.LEX,
        }
        try:
            return aliases[name.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown gauge '{name}' (use natural, quasisym or lex)") from None


class FirstVariation(NamedTuple):
    source: SourceForm
    momentum: Form


class SecondVariation(NamedTuple):
    h: Form
    residual: Form
    tensor: HelmholtzTensor


# ─── Shape helpers ───────────────────────────────────────────────────────────

def _dxs(spec: JetSpec) -> tuple:
    return tuple(Dx(d) for d in range(1, spec.n + 1))


def _one_contact_coefficients(alpha: Form) -> dict[tuple[int, MultiIndex], Expr]:
    """α = Σ α_i^p ϑ^i_p∧ω  →  {(i, p): α_i^p}."""
    spec = alpha.spec
    if alpha.is_zero():
        return {}
    if alpha.degree != spec.n + 1:
        raise ShapeError(f"expected a 1-contact {spec.n + 1}-form, got degree {alpha.degree}")
    coefficients = {}
    for factors, coef in alpha.items():
        head, rest = factors[0], factors[1:]
        if not isinstance(head, Theta) or rest != _dxs(spec):
            raise ShapeError("expected terms of the shape ϑ^i_p∧ω")
        coefficients[(head.i, head.p)] = coef
    return coefficients


def _two_contact_coefficients(beta: Form) -> dict[tuple[MultiIndex, int, int], Expr]:
    """β = Σ β^p_{ij} ϑ^i_p∧ϑ^j∧ω  →  {(p, i, j): β^p_{ij}}; zero block keyed with i < j."""
    spec = beta.spec
    if beta.is_zero():
        return {}
    if beta.degree != spec.n + 2:
        raise ShapeError(f"expected a 2-contact {spec.n + 2}-form, got degree {beta.degree}")
    coefficients: dict = {}
    for factors, coef in beta.items():
        first, second, rest = factors[0], factors[1], factors[2:]
        if not isinstance(second, Theta) or rest != _dxs(spec):
            raise ShapeError("expected terms of the shape ϑ^i_p∧ϑ^j∧ω")
        if second.p.is_zero():
            key, value = (first.p, first.i, second.i), coef
        elif first.p.is_zero():
            key, value = (second.p, second.i, first.i), -coef
        else:
            raise ShapeError("each term needs one ϑ^j factor of zero multi-index")
        coefficients[key] = coefficients.get(key, Expr()) + value
    return coefficients


def _euler_components(spec: JetSpec, coefficients: Mapping) -> dict[int, Expr]:
    """E_i = Σ_p (-1)^{|p|} J_p α_i^p."""
    components: dict[int, Expr] = {}
    for (i, p), coef in coefficients.items():
        term = coef.iterated_total(p)
        if p.degree % 2:
            term = -term
        components[i] = components.get(i, Expr()) + term
    return components


# ─── First variation ─────────────────────────────────────────────────────────

def _momentum_natural(spec: JetSpec, coefficients: Mapping) -> Form:
    if any(p.degree > 1 for _, p in coefficients):
        raise ShapeError("the natural momentum needs ϑ^i_p factors with |p| <= 1")
    momentum = Form.zero(spec, spec.n)
    for (i, p), coef in coefficients.items():
        if p.degree == 1:
            momentum = momentum + theta(spec, i).wedge(omega_sub(spec, p.largest_direction())) * coef
    return momentum


def _momentum_quasisymmetric(spec: JetSpec, coefficients: Mapping) -> Form:
    if any(p.degree > 2 for _, p in coefficients):
        raise ShapeError("the quasisymmetric momentum needs ϑ^i_p factors with |p| <= 2")
    half = Fraction(1, 2)
    n = spec.n
    momentum = Form.zero(spec, n)
    for i in sorted({i for i, _ in coefficients}):
        # symmetric second-order block A^{μλ}
        second = {}
        for mu in range(1, n + 1):
            for lam in range(1, n + 1):
                p = MultiIndex.unit(n, mu).add_direction(lam)
                value = coefficients.get((i, p), Expr())
                second[(mu, lam)] = value if mu == lam else value * half
        for lam in range(1, n + 1):
            first = coefficients.get((i, MultiIndex.unit(n, lam)), Expr())
            for mu in range(1, n + 1):
                first = first - second[(mu, lam)].total_derivative(mu)
            momentum = momentum + theta(spec, i).wedge(omega_sub(spec, lam)) * first
            for mu in range(1, n + 1):
                if second[(mu, lam)]:
                    momentum = momentum + (
                        theta(spec, i, MultiIndex.unit(n, mu)).wedge(omega_sub(spec, lam))
                        * second[(mu, lam)]
                    )
    return momentum


def _momentum_lex(spec: JetSpec, coefficients: Mapping) -> tuple[Form, dict]:
    """Peel the graded-lex largest ϑ^i_p one direction at a time."""
    remaining = dict(coefficients)
    momentum = Form.zero(spec, spec.n)
    while True:
        pending = [key for key, coef in remaining.items() if key[1].degree >= 1 and coef]
        if not pending:
            break
        i, p = max(pending, key=lambda key: (key[1].sort_key, key[0]))
        coef = remaining.pop((i, p))
        lam = p.largest_direction()
        q = p.remove_direction(lam)
        momentum = momentum + theta(spec, i, q).wedge(omega_sub(spec, lam)) * coef
        remaining[(i, q)] = remaining.get((i, q), Expr()) - coef.total_derivative(lam)
    return momentum, remaining


def kolar_decompose(alpha: Form, gauge: Gauge | str = Gauge.LEX) -> FirstVariation:
    """Split a 1-contact α = Σ α_i^p ϑ^i_p∧ω as E - d_h p."""
    if isinstance(gauge, str):
        gauge = Gauge.parse(gauge)
    spec = alpha.spec
    coefficients = _one_contact_coefficients(alpha)
    source = SourceForm(spec, _euler_components(spec, coefficients))
    if gauge is Gauge.NATURAL:
        momentum = _momentum_natural(spec, coefficients)
    elif gauge is Gauge.QUASISYMMETRIC:
        momentum = _momentum_quasisymmetric(spec, coefficients)
    else:
        momentum, _ = _momentum_lex(spec, coefficients)
    log("INFO", f"first variation in the {gauge.value} gauge: {len(coefficients)} coefficient(s)")
    return FirstVariation(source, momentum)


def momentum_natural_r1(alpha: Form) -> Form:
    return kolar_decompose(alpha, Gauge.NATURAL).momentum


def momentum_quasisymmetric_r2(alpha: Form) -> Form:
    return kolar_decompose(alpha, Gauge.QUASISYMMETRIC).momentum


def momentum_components(momentum: Form) -> dict[tuple[int, MultiIndex, int], Expr]:
    """Read a momentum Σ p_i^{q,λ} ϑ^i_q∧ω_λ as {(i, q, λ): p_i^{q,λ}}."""
    spec = momentum.spec
    components = {}
    for factors, coef in momentum.items():
        head, rest = factors[0], factors[1:]
        if not isinstance(head, Theta) or any(not isinstance(f, Dx) for f in rest):
            raise ShapeError("a momentum has terms ϑ^i_q∧ω_λ")
        missing = sorted(set(range(1, spec.n + 1)) - {f.direction for f in rest})
        if len(missing) != 1:
            raise ShapeError("a momentum has terms ϑ^i_q∧ω_λ")
        lam = missing[0]
        components[(head.i, head.p, lam)] = coef if lam % 2 else -coef
    return components


def s_map(momentum: Form) -> Form:
    """s(p) = Σ p_i^{λ,μ} ϑ^i∧ω_{μλ} over the first-order components p_i^{λ,μ}."""
    spec = momentum.spec
    result = Form.zero(spec, max(spec.n - 1, 0))
    for (i, q, mu), coef in momentum_components(momentum).items():
        if q.degree != 1:
            continue
        lam = q.largest_direction()
        result = result + theta(spec, i).wedge(omega_sub(spec, mu, lam)) * coef
    return result


def euler_lagrange(lagrangian: Lagrangian) -> SourceForm:
    spec = lagrangian.spec
    alpha = d_v(lagrangian.form)
    return SourceForm(spec, _euler_components(spec, _one_contact_coefficients(alpha)))


# ─── Second variation and Helmholtz ──────────────────────────────────────────

def _antisymmetrized(spec: JetSpec, tilde: Mapping) -> Form:
    """½ Σ H̃^p_{ij} ϑ^i_p∧ϑ^j∧ω."""
    pieces = [
        ((Theta(i, p), Theta(j, MultiIndex.zero(spec.n))) + _dxs(spec), e * Fraction(1, 2))
        for (p, i, j), e in tilde.items()
    ]
    return Form.from_terms(spec, spec.n + 2, pieces)


def second_variation(beta: Form) -> SecondVariation:
    spec = beta.spec
    coefficients = _two_contact_coefficients(beta)
    if not coefficients:
        zero = Form.zero(spec, spec.n + 2)
        return SecondVariation(zero, zero, HelmholtzTensor(spec))
    s = max(p.degree for p, _, _ in coefficients)
    tilde = {}
    for p in enumerate_upto(spec.n, s):
        for i in range(1, spec.m + 1):
            for j in range(1, spec.m + 1):
                value = coefficients.get((p, i, j), Expr())
                for q in enumerate_upto(spec.n, s - p.degree):
                    other = coefficients.get((p + q, j, i))
                    if not other:
                        continue
                    term = other.iterated_total(q) * multinomial(p, q)
                    value = value + term if (p + q).degree % 2 else value - term
                if value:
                    tilde[(p, i, j)] = value
    h = _antisymmetrized(spec, tilde)
    return SecondVariation(h, h - beta, HelmholtzTensor.from_form(h))


def helmholtz(source: SourceForm) -> HelmholtzTensor:
    """H^p_{ij} = ½(∂_i^p E_j - Σ_q (-1)^{|p+q|} (p+q)!/(p!q!) J_q ∂_j^{p+q} E_i)."""
    spec = source.spec
    r = source.order
    tilde = {}
    for p in enumerate_upto(spec.n, r):
        for i in range(1, spec.m + 1):
            for j in range(1, spec.m + 1):
                value = source[j].partial(Field(i, p))
                for q in enumerate_upto(spec.n, r - p.degree):
                    derivative = source[i].partial(Field(j, p + q))
                    if not derivative:
                        continue
                    term = derivative.iterated_total(q) * multinomial(p, q)
                    value = value + term if (p + q).degree % 2 else value - term
                if value:
                    tilde[(p, i, j)] = value
    tensor = HelmholtzTensor.from_form(_antisymmetrized(spec, tilde))
    log("INFO", f"helmholtz: {len(tensor.components)} nonzero component(s)")
    return tensor


def is_locally_variational(source: SourceForm) -> bool:
    return helmholtz(source).is_zero()


# ─── Numeric first-variation oracle ──────────────────────────────────────────

def _grid(spec: JetSpec, domain: Sequence[tuple[float, float]], points: int):
    if len(domain) != spec.n:
        raise DomainError(f"the box needs {spec.n} interval(s), got {len(domain)}")
    if points < 3:
        raise DomainError(f"a grid needs at least 3 points per axis, got {points}")
    axes = []
    for lo, hi in domain:
        if not hi > lo:
            raise DomainError(f"degenerate interval [{lo}, {hi}]")
        axes.append(np.linspace(float(lo), float(hi), points))
    mesh = np.meshgrid(*axes, indexing="ij")
    return axes, mesh


def _sample(spec: JetSpec, f: Expr, mesh) -> np.ndarray:
    if f.fields():
        raise DimensionError("only base coordinates can be sampled on a grid")
    symbols = [sympy.Symbol(name) for name in spec.base_names]
    fn = sympy.lambdify(symbols, f.to_sympy(spec), modules="numpy")
    return np.broadcast_to(np.asarray(fn(*mesh), dtype=float), mesh[0].shape)


def _integrate(values: np.ndarray, axes) -> float:
    for axis_points in reversed(axes):
        values = simpson(values, x=axis_points, axis=-1)
    return float(values)


def _check_boundary(spec: JetSpec, lagrangian: Lagrangian, variation: Mapping, mesh) -> None:
    boundary = np.zeros(mesh[0].shape, dtype=bool)
    for axis in range(spec.n):
        index = [slice(None)] * spec.n
        index[axis] = 0
        boundary[tuple(index)] = True
        index[axis] = -1
        boundary[tuple(index)] = True
    worst = 0.0
    for v in variation.values():
        for p in enumerate_upto(spec.n, max(lagrangian.order - 1, 0)):
            values = _sample(spec, prolong(v, p), mesh)
            worst = max(worst, float(np.max(np.abs(values[boundary]))))
    if worst > config.BOUNDARY_TOLERANCE:
        warn(f"variation does not vanish on the boundary (max |∂_p v| = {worst:.3e}); "
             "boundary terms are included in the result")


def numeric_first_variation(
    lagrangian: Lagrangian,
    section: Mapping[int, Expr],
    variation: Mapping[int, Expr],
    domain: Sequence[tuple[float, float]],
    grid: int | None = None,
) -> float:
    """Central difference of ε ↦ ∫ L(j(s + εv)) at ε = 0."""
    spec = lagrangian.spec
    axes, mesh = _grid(spec, domain, grid or config.GRID_POINTS)
    _check_boundary(spec, lagrangian, variation, mesh)
    step = Fraction(str(config.FD_STEP))

    def action(eps: Fraction) -> float:
        moved = {i: s + variation.get(i, Expr()) * eps for i, s in section.items()}
        return _integrate(_sample(spec, lagrangian.density.pullback(moved), mesh), axes)

    value = (action(step) - action(-step)) / (2 * float(step))
    log("INFO", f"numeric first variation {value:.12g} on {len(axes[0])} point(s) per axis")
    return value


def el_pairing(
    lagrangian: Lagrangian,
    section: Mapping[int, Expr],
    variation: Mapping[int, Expr],
    domain: Sequence[tuple[float, float]],
    grid: int | None = None,
) -> float:
    """∫ Σ_i E_i(j s) v^i, the value the first variation must match."""
    spec = lagrangian.spec
    axes, mesh = _grid(spec, domain, grid or config.GRID_POINTS)
    source = euler_lagrange(lagrangian)
    integrand = Expr()
    for i, e in source.components.items():
        integrand = integrand + e.pullback(section) * variation.get(i, Expr())
    return _integrate(_sample(spec, integrand, mesh), axes)
