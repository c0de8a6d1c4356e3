"""Shared charts and seeded random generators for the property tests."""

import random
from fractions import Fraction

import pytest

from jetvar.forms import Dx, Form, Theta
from jetvar.jetalg import Base, Expr, Field, JetSpec
from jetvar.multiindex import enumerate_upto


@pytest.fixture
def line():
    """n = 1, m = 1: base x, field u."""
    return JetSpec(1, 1)


@pytest.fixture
def plane():
    """n = 2, m = 1: base x, y, field u."""
    return JetSpec(2, 1)


@pytest.fixture
def rng():
    return random.Random(20240607)


CHARTS = [JetSpec(1, 1), JetSpec(1, 2), JetSpec(2, 1), JetSpec(2, 2)]


def random_coefficient(rng):
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))


def coordinates(spec, order, with_base=True):
    found = [Base(d) for d in range(1, spec.n + 1)] if with_base else []
    found += [Field(i, p) for i in range(1, spec.m + 1) for p in enumerate_upto(spec.n, order)]
    return found


def random_expr(rng, spec, order=2, terms=3, degree=2, base_degree=1):
    """A small random polynomial in the jet coordinates of order <= order."""
    fields = coordinates(spec, order, with_base=False)
    result = Expr()
    for _ in range(rng.randint(1, terms)):
        term = Expr.constant(random_coefficient(rng))
        for _ in range(rng.randint(0, degree)):
            term = term * Expr.coordinate(rng.choice(fields))
        for _ in range(rng.randint(0, base_degree)):
            term = term * Expr.coordinate(Base(rng.randint(1, spec.n)))
        result = result + term
    return result


def random_form(rng, spec, degree, order=2, terms=2):
    covectors = [Dx(d) for d in range(1, spec.n + 1)]
    covectors += [Theta(i, p) for i in range(1, spec.m + 1) for p in enumerate_upto(spec.n, order)]
    pieces = []
    for _ in range(rng.randint(1, terms)):
        factors = rng.sample(covectors, degree)
        pieces.append((tuple(factors), random_expr(rng, spec, order)))
    return Form.from_terms(spec, degree, pieces)


def random_section(rng, spec, degree=3):
    """A polynomial section x ↦ s^i(x) in the base coordinates only."""
    section = {}
    for i in range(1, spec.m + 1):
        s = Expr()
        for _ in range(rng.randint(1, 3)):
            term = Expr.constant(random_coefficient(rng))
            for _ in range(rng.randint(0, degree)):
                term = term * Expr.coordinate(Base(rng.randint(1, spec.n)))
            s = s + term
        section[i] = s
    return section
