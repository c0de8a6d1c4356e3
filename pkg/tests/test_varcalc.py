from fractions import Fraction

import pytest

from conftest import CHARTS, random_expr, random_form, random_section
from jetvar.errors import DomainError, ShapeError
from jetvar.forms import Dx, Form, Theta, d_h, dx, exterior_d, horizontalize, omega_sub, theta
from jetvar.jetalg import Expr, JetSpec
from jetvar.multiindex import MultiIndex, enumerate_upto
from jetvar.varcalc import (
    Gauge,
    Lagrangian,
    SourceForm,
    el_pairing,
    euler_lagrange,
    helmholtz,
    is_locally_variational,
    kolar_decompose,
    momentum_components,
    momentum_natural_r1,
    momentum_quasisymmetric_r2,
    numeric_first_variation,
    s_map,
    second_variation,
)


def one_contact(spec, coefficients):
    """Σ c ϑ^i_p∧ω from {(i, p): c}."""
    dxs = tuple(Dx(d) for d in range(1, spec.n + 1))
    return Form.from_terms(spec, spec.n + 1, [((Theta(i, p),) + dxs, c) for (i, p), c in coefficients.items()])


def random_alpha(rng, spec, order=2):
    coefficients = {}
    for i in range(1, spec.m + 1):
        for p in enumerate_upto(spec.n, order):
            if rng.random() < 0.6:
                coefficients[(i, p)] = random_expr(rng, spec, order=order, terms=2)
    return one_contact(spec, coefficients), coefficients


def _p(*entries):
    return MultiIndex(entries)


# ─── First variation ─────────────────────────────────────────────────────────

def test_kolar_first_order(line):
    ux, uxx = line.field_var("u", "x"), line.field_var("u", "x", "x")
    alpha = one_contact(line, {(1, _p(1)): ux})
    for gauge in Gauge:
        source, momentum = kolar_decompose(alpha, gauge)
        assert source == SourceForm(line, {1: -uxx})
        assert momentum == theta(line, 1) * ux


def test_kolar_second_order(line):
    uxx = line.field_var("u", "x", "x")
    uxxx = line.field_var("u", "x", "x", "x")
    uxxxx = line.field_var("u", "x", "x", "x", "x")
    alpha = one_contact(line, {(1, _p(2)): uxx})
    expected = theta(line, 1) * -uxxx + theta(line, 1, _p(1)) * uxx
    for gauge in (Gauge.QUASISYMMETRIC, Gauge.LEX):
        source, momentum = kolar_decompose(alpha, gauge)
        assert source[1] == uxxxx
        assert momentum == expected
    with pytest.raises(ShapeError):
        kolar_decompose(alpha, Gauge.NATURAL)


def test_kolar_zero_order(plane):
    f = plane.base_var("x") * plane.field_var("u")
    alpha = one_contact(plane, {(1, _p(0, 0)): f})
    source, momentum = kolar_decompose(alpha)
    assert source.form == alpha
    assert momentum.is_zero()


def test_kolar_shape_errors(line):
    with pytest.raises(ShapeError):
        kolar_decompose(theta(line, 1) ^ theta(line, 1, _p(1)))
    with pytest.raises(ShapeError):
        kolar_decompose(dx(line, 1))


@pytest.mark.parametrize("spec", CHARTS)
def test_decomposition_identity_and_gauge_independence(spec, rng):
    for _ in range(25):
        alpha, coefficients = random_alpha(rng, spec)
        sources = set()
        for gauge in Gauge:
            if gauge is Gauge.NATURAL and any(p.degree > 1 for _, p in coefficients):
                continue
            source, momentum = kolar_decompose(alpha, gauge)
            assert alpha == source.form - d_h(momentum)
            sources.add(source)
        assert len(sources) == 1
        for i in range(1, spec.m + 1):
            expected = Expr()
            for (j, p), c in coefficients.items():
                if j == i:
                    term = c.iterated_total(p)
                    expected = expected + (term if p.degree % 2 == 0 else -term)
            assert next(iter(sources))[i] == expected


@pytest.mark.parametrize("spec", CHARTS)
def test_source_weighted_degree(spec, rng):
    for r in (1, 2):
        for _ in range(10):
            alpha, _ = random_alpha(rng, spec, order=r)
            source, _ = kolar_decompose(alpha)
            assert all(e.weighted_degree(r) <= r for e in source.components.values())


# ─── Momenta ─────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("spec", [JetSpec(1, 1), JetSpec(2, 1)])
def test_natural_momentum_inverts_d_h(spec):
    u = spec.field_var("u")
    for lam in range(1, spec.n + 1):
        beta = theta(spec, 1).wedge(omega_sub(spec, lam)) * u
        assert momentum_natural_r1(d_h(beta)) == -beta


def test_natural_momentum_of_pure_source(line):
    alpha = one_contact(line, {(1, _p(0)): line.field_var("u")})
    assert momentum_natural_r1(alpha).is_zero()


def test_quasisymmetric_momentum(line):
    uxx, uxxx = line.field_var("u", "x", "x"), line.field_var("u", "x", "x", "x")
    alpha = one_contact(line, {(1, _p(2)): uxx})
    assert momentum_quasisymmetric_r2(alpha) == theta(line, 1) * -uxxx + theta(line, 1, _p(1)) * uxx
    assert momentum_quasisymmetric_r2(Form.zero(line, 2)).is_zero()


@pytest.mark.parametrize("spec", CHARTS)
def test_quasisymmetric_agrees_with_natural_at_first_order(spec, rng):
    for _ in range(10):
        alpha, _ = random_alpha(rng, spec, order=1)
        assert momentum_quasisymmetric_r2(alpha) == momentum_natural_r1(alpha)


@pytest.mark.parametrize("spec", [JetSpec(2, 1), JetSpec(2, 2)])
def test_quasisymmetric_formula_and_s_map(spec, rng):
    half = Fraction(1, 2)
    for _ in range(20):
        alpha, coefficients = random_alpha(rng, spec, order=2)
        momentum = momentum_quasisymmetric_r2(alpha)
        assert s_map(momentum).is_zero()
        components = momentum_components(momentum)
        for i in range(1, spec.m + 1):
            def second(mu, lam):
                c = coefficients.get((i, MultiIndex.unit(2, mu).add_direction(lam)), Expr())
                return c if mu == lam else c * half

            for lam in (1, 2):
                expected = coefficients.get((i, MultiIndex.unit(2, lam)), Expr())
                for mu in (1, 2):
                    expected = expected - second(mu, lam).total_derivative(mu)
                assert components.get((i, _p(0, 0), lam), Expr()) == expected
                for mu in (1, 2):
                    assert components.get((i, MultiIndex.unit(2, mu), lam), Expr()) == second(mu, lam)


# ─── Euler-Lagrange ──────────────────────────────────────────────────────────

def test_euler_lagrange_examples(line):
    u, ux, uxx, x = line.field_var("u"), line.field_var("u", "x"), line.field_var("u", "x", "x"), line.base_var("x")
    half = Fraction(1, 2)
    assert euler_lagrange(Lagrangian(line, ux ** 2 * half))[1] == -uxx
    assert euler_lagrange(Lagrangian(line, ux ** 2 * half - u ** 2 * half))[1] == -(uxx + u)
    assert euler_lagrange(Lagrangian(line, u + x * ux)).is_zero()
    assert euler_lagrange(Lagrangian(line, Expr())).is_zero()


@pytest.mark.parametrize("spec", CHARTS)
def test_euler_lagrange_kills_horizontal_exacts(spec, rng):
    for _ in range(25):
        q = horizontalize(random_form(rng, spec, spec.n - 1))
        lagrangian = Lagrangian.from_form(d_h(q))
        assert euler_lagrange(lagrangian).is_zero()


@pytest.mark.parametrize("spec", CHARTS)
def test_euler_lagrange_order_bound(spec, rng):
    for _ in range(10):
        lagrangian = Lagrangian(spec, random_expr(rng, spec, order=2))
        assert euler_lagrange(lagrangian).order <= 2 * lagrangian.order


# ─── Helmholtz ───────────────────────────────────────────────────────────────

def test_helmholtz_examples(line):
    u, ux, uxx = line.field_var("u"), line.field_var("u", "x"), line.field_var("u", "x", "x")
    assert helmholtz(SourceForm(line, {1: -uxx})).is_zero()
    assert helmholtz(SourceForm(line, {1: -(uxx + u)})).is_zero()
    tensor = helmholtz(SourceForm(line, {1: ux}))
    assert tensor.components == {(_p(1), 1, 1): Expr.constant(1)}
    assert is_locally_variational(SourceForm(line, {1: -uxx}))
    assert not is_locally_variational(SourceForm(line, {1: ux}))
    assert is_locally_variational(SourceForm(line, {}))


@pytest.mark.parametrize("spec", CHARTS)
def test_helmholtz_of_euler_lagrange_vanishes(spec, rng):
    for _ in range(25):
        lagrangian = Lagrangian(spec, random_expr(rng, spec, order=2))
        assert helmholtz(euler_lagrange(lagrangian)).is_zero()


@pytest.mark.parametrize("spec", CHARTS)
def test_helmholtz_is_second_variation_of_dE(spec, rng):
    for _ in range(15):
        source = SourceForm(spec, {i: random_expr(rng, spec, order=2) for i in range(1, spec.m + 1)})
        tensor = helmholtz(source)
        result = second_variation(exterior_d(source.form))
        assert result.h == tensor.form
        assert result.residual == result.h - exterior_d(source.form)
        for (p, i, j), e in tensor.components.items():
            if p.is_zero():
                assert tensor[(p, j, i)] == -e


def test_second_variation_examples(line):
    beta = (theta(line, 1, _p(1)) ^ theta(line, 1)) ^ dx(line, 1)
    result = second_variation(beta)
    assert result.tensor.components == {(_p(1), 1, 1): Expr.constant(1)}
    assert second_variation(Form.zero(line, 3)).h.is_zero()
    with pytest.raises(ShapeError):
        second_variation(theta(line, 1, _p(1)) ^ theta(line, 1, _p(2)) ^ dx(line, 1))


def test_second_variation_of_variational_source(line):
    u, uxx = line.field_var("u"), line.field_var("u", "x", "x")
    beta = exterior_d(SourceForm(line, {1: -(uxx + u)}).form)
    assert second_variation(beta).h.is_zero()


# ─── Numeric first variation ─────────────────────────────────────────────────

def test_first_variation_matches_hand_value(line):
    x = line.base_var("x")
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2 * Fraction(1, 2))
    section, variation = {1: x * x}, {1: (1 - x * x) ** 2}
    expected = -32 / 15
    assert numeric_first_variation(lagrangian, section, variation, [(-1, 1)], 201) == pytest.approx(expected, rel=1e-6)
    assert el_pairing(lagrangian, section, variation, [(-1, 1)], 201) == pytest.approx(expected, rel=1e-6)


def test_first_variation_oracle_random(line, rng):
    x = line.base_var("x")
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2 * Fraction(1, 2))
    bump = (1 - x * x) ** 2
    for _ in range(5):
        section = random_section(rng, line)
        variation = {1: bump * (x * rng.randint(1, 3) + rng.randint(1, 3))}
        numeric = numeric_first_variation(lagrangian, section, variation, [(-1, 1)], 401)
        pairing = el_pairing(lagrangian, section, variation, [(-1, 1)], 401)
        assert numeric == pytest.approx(pairing, rel=1e-6, abs=1e-7)


def test_first_variation_trivial_cases(line):
    x = line.base_var("x")
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2)
    assert numeric_first_variation(lagrangian, {1: x}, {1: Expr()}, [(-1, 1)], 51) == pytest.approx(0, abs=1e-12)
    constant = Lagrangian(line, Expr.constant(3))
    assert numeric_first_variation(constant, {1: x}, {1: (1 - x * x) ** 2}, [(-1, 1)], 51) == pytest.approx(0, abs=1e-9)


def test_first_variation_two_dimensional(plane):
    x, y = plane.base_var("x"), plane.base_var("y")
    half = Fraction(1, 2)
    lagrangian = Lagrangian(plane, (plane.field_var("u", "x") ** 2 + plane.field_var("u", "y") ** 2) * half)
    section = {1: x * x * y * y}
    variation = {1: (1 - x * x) ** 2 * (1 - y * y) ** 2}
    numeric = numeric_first_variation(lagrangian, section, variation, [(-1, 1), (-1, 1)], 201)
    pairing = el_pairing(lagrangian, section, variation, [(-1, 1), (-1, 1)], 201)
    assert numeric == pytest.approx(pairing, rel=1e-5)


def test_first_variation_degenerate_box(line):
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2)
    x = line.base_var("x")
    with pytest.raises(DomainError):
        numeric_first_variation(lagrangian, {1: x}, {1: x}, [(1, 1)])
    with pytest.raises(DomainError):
        numeric_first_variation(lagrangian, {1: x}, {1: x}, [(-1, 1)], 2)
    with pytest.raises(DomainError):
        numeric_first_variation(lagrangian, {1: x}, {1: x}, [(-1, 1), (0, 1)])


def test_first_variation_warns_on_boundary(line, capsys):
    x = line.base_var("x")
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2)
    numeric_first_variation(lagrangian, {1: x}, {1: x}, [(-1, 1)], 21)
    assert "[WARN]" in capsys.readouterr().err
