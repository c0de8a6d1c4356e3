from fractions import Fraction

import pytest

from conftest import CHARTS, random_expr, random_form
from jetvar.errors import ParseError, SubscriptError, UnknownIdentifierError
from jetvar.forms import Form, dx, from_holonomic, theta
from jetvar.jetalg import Field, JetSpec
from jetvar.multiindex import MultiIndex
from jetvar.parser import parse, parse_expr, parse_form, parse_problem
from jetvar.printer import expr_to_text, form_to_text

HALF = Fraction(1, 2)


def test_parse_density(line):
    u, ux = line.field_var("u"), line.field_var("u", "x")
    assert parse("1/2*u_{x}^2 - 1/2*u^2", line) == ux ** 2 * HALF - u ** 2 * HALF


def test_parse_subscripts(plane):
    f = parse_expr("u_{x,x,y}", plane)
    assert f.coordinates() == {Field(1, MultiIndex((2, 1)))}
    assert parse_expr("u_{y,x,x}", plane) == f


def test_parse_precedence(line):
    u, x = line.field_var("u"), line.base_var("x")
    assert parse_expr("-u^2*x", line) == -(u * u * x)
    assert parse_expr("(u + x)^2", line) == u * u + u * x * 2 + x * x
    assert parse_expr("2 - 3*x - 1", line) == 1 - x * 3
    assert parse_expr("0", line).is_zero()


def test_parse_forms(line, plane):
    ux = line.field_var("u", "x")
    assert parse("u_{x}*theta(u; x)^dx(x)", line) == (theta(line, 1, MultiIndex((1,))) ^ dx(line, 1)) * ux
    assert parse_form("dy(u)", line) == from_holonomic(line, 1)
    assert parse_form("dx(x)^dx(y) - dx(y)^dx(x)", plane) == (dx(plane, 1) ^ dx(plane, 2)) * 2
    assert isinstance(parse("theta(u)", line), Form)


def test_syntax_error_position(line):
    with pytest.raises(ParseError) as info:
        parse_expr("1/2*u_{x}^", line)
    assert info.value.line == 1
    assert info.value.column == 9
    assert "end of input" in str(info.value)


def test_unexpected_character(line):
    with pytest.raises(ParseError) as info:
        parse_expr("u + $", line)
    assert info.value.column == 4


def test_unknown_identifier(line):
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expr("u + w", line)
    assert info.value.column == 4


@pytest.mark.parametrize("text", ["u_{t}", "x_{x}", "theta(u; t)"])
def test_bad_subscripts(line, text):
    with pytest.raises(SubscriptError):
        parse(text, line)


def test_zero_denominator(line):
    with pytest.raises(ParseError):
        parse_expr("1/0*u", line)


# ─── Problem files ───────────────────────────────────────────────────────────

def test_problem_file():
    problem = parse_problem(
        "# harmonic oscillator\n"
        "base x\n"
        "fields u\n"
        "task inverse\n"
        "\n"
        "let f = u_{x}   # velocity\n"
        "L = 1/2*f^2 - 1/2*u^2\n"
        "E_1 = -u_{x,x} - u\n"
        "form alpha = u_{x}*theta(u; x)^dx(x)\n"
    )
    spec = problem.spec
    u, ux = spec.field_var("u"), spec.field_var("u", "x")
    assert spec == JetSpec(1, 1)
    assert problem.task == "inverse"
    assert problem.lets == {"f": ux}
    assert problem.lagrangian.density == ux ** 2 * HALF - u ** 2 * HALF
    assert problem.source[1] == -(spec.field_var("u", "x", "x") + u)
    assert set(problem.forms) == {"alpha"}


def test_problem_file_custom_names():
    problem = parse_problem("base t, s\nfields phi, psi\nE_2 = phi_{t,s}\n")
    assert problem.spec.base_names == ("t", "s")
    assert problem.spec.field_names == ("phi", "psi")
    assert problem.source.components == {2: problem.spec.field_var("phi", "t", "s")}
    assert problem.lagrangian is None


def test_problem_file_errors():
    with pytest.raises(ParseError) as info:
        parse_problem("base x\nfields u\nL = u_{x} +\n")
    assert info.value.line == 3
    with pytest.raises(ParseError):
        parse_problem("L = u\nbase x\nfields u\n")
    with pytest.raises(ParseError):
        parse_problem("base x\nbase y\nfields u\n")
    with pytest.raises(ParseError):
        parse_problem("# nothing here\n")
    with pytest.raises(UnknownIdentifierError) as info:
        parse_problem("base x\nfields u\nE_2 = u\n")
    assert (info.value.line, info.value.column) == (3, 0)
    with pytest.raises(UnknownIdentifierError) as info:
        parse_problem("base x\nfields u\nL = g\n")
    assert (info.value.line, info.value.column) == (3, 4)
    with pytest.raises(ParseError):
        parse_problem("base x\nfields u\nlet u = x\n")


# ─── Printing round trip ─────────────────────────────────────────────────────

def test_print_examples(line, plane):
    uxx = line.field_var("u", "x", "x")
    assert expr_to_text(-uxx, line) == "-u_{x,x}"
    assert expr_to_text(line.field_var("u") * 0, line) == "0"
    assert form_to_text(theta(line, 1, MultiIndex((2,))) * HALF) == "1/2*theta(u; x, x)"
    assert expr_to_text(plane.field_var("u", "y", "x"), plane) == "u_{x,y}"


@pytest.mark.parametrize("spec", CHARTS + [JetSpec(3, 1)])
def test_expression_round_trip(spec, rng):
    for _ in range(100):
        f = random_expr(rng, spec, order=2, terms=4, degree=3)
        assert parse_expr(expr_to_text(f, spec), spec) == f


@pytest.mark.parametrize("spec", CHARTS)
def test_form_round_trip(spec, rng):
    for _ in range(25):
        a = random_form(rng, spec, rng.randint(1, spec.n + 1))
        if a.is_zero():
            continue
        assert parse_form(form_to_text(a), spec) == a
