import json
from fractions import Fraction

import pytest

from jetvar.audit import CheckReport, CheckResult
from jetvar.forms import d_v, scalar
from jetvar.report import LagrangianReport, MomentumReport, PrimitiveReport, serialize
from jetvar.varcalc import HelmholtzTensor, Lagrangian, SourceForm, helmholtz, kolar_decompose


def test_source_form_formats(line):
    source = SourceForm(line, {1: -line.field_var("u", "x", "x")})
    assert serialize(source, "json") == b'{"source_form":{"E":[{"i":1,"expr":"-u_{x,x}"}]}}\n'
    assert serialize(source, "latex") == b"-u_{xx}\\,\\vartheta^{1}\\wedge\\omega\n"
    assert serialize(source) == b"E_1 = -u_{x,x}\n"
    assert serialize(SourceForm(line, {})) == b"E = 0\n"


def test_helmholtz_formats(line):
    assert serialize(HelmholtzTensor(line), "json") == b'{"helmholtz":{"components":[],"variational":true}}\n'
    assert serialize(HelmholtzTensor(line)) == b"variational\n"
    tensor = helmholtz(SourceForm(line, {1: line.field_var("u", "x")}))
    assert serialize(tensor) == b"non-variational; H^{(1)}_{11} = 1\n"
    assert json.loads(serialize(tensor, "json")) == {
        "helmholtz": {"components": [{"p": [1], "i": 1, "j": 1, "expr": "1"}], "variational": False}
    }


def test_lagrangian_report(line):
    density = line.field_var("u", "x") ** 2 * Fraction(1, 2)
    report = LagrangianReport(Lagrangian(line, density), 2)
    assert serialize(report) == b"L = 1/2*u_{x}^2\norder = 1\nvolterra_vainberg_order = 2\n"
    assert json.loads(serialize(report, "json")) == {
        "lagrangian": {"density": "1/2*u_{x}^2", "order": 1, "volterra_vainberg_order": 2}
    }
    assert serialize(report, "latex") == b"\\frac{1}{2} u_{x}^{2}\\,\\omega\n"


def test_momentum_report(line):
    lagrangian = Lagrangian(line, line.field_var("u", "x") ** 2 * Fraction(1, 2))
    source, momentum = kolar_decompose(d_v(lagrangian.form), "lex")
    report = MomentumReport(source, momentum, "lex")
    assert serialize(report) == b"E_1 = -u_{x,x}\np = u_{x}*theta(u)\n"
    assert json.loads(serialize(report, "json")) == {
        "momentum": {
            "gauge": "lex",
            "E": [{"i": 1, "expr": "-u_{x,x}"}],
            "components": [{"i": 1, "q": [0], "direction": 1, "expr": "u_{x}"}],
        }
    }


def test_primitive_report(line):
    lagrangian = Lagrangian(line, line.field_var("u", "x"))
    trivial = PrimitiveReport(lagrangian, scalar(line, line.field_var("u")), SourceForm(line, {}))
    assert serialize(trivial) == b"trivial; alpha = u\n"
    assert json.loads(serialize(trivial, "json")) == {"primitive": {"trivial": True, "degree": 0, "form": "u"}}
    source = SourceForm(line, {1: -line.field_var("u", "x", "x")})
    nontrivial = PrimitiveReport(lagrangian, None, source)
    assert serialize(nontrivial) == b"not trivial\nE_1 = -u_{x,x}\n"
    assert json.loads(serialize(nontrivial, "json"))["primitive"]["trivial"] is False


def test_check_report():
    report = CheckReport([CheckResult("d∘d = 0", True), CheckResult("h∘h = h", False, "broken")])
    assert not report.passed
    assert report.failures == 1
    text = serialize(report).decode("utf-8")
    assert "FAILED" in text
    assert "2 check(s), 1 failure(s)" in text
    assert json.loads(serialize(report, "json")) == {
        "check": {
            "results": [
                {"name": "d∘d = 0", "passed": True, "detail": ""},
                {"name": "h∘h = h", "passed": False, "detail": "broken"},
            ],
            "passed": False,
        }
    }


def test_json_is_byte_stable(plane):
    source = SourceForm(plane, {1: -(plane.field_var("u", "x", "x") + plane.field_var("u", "y", "y"))})
    assert serialize(helmholtz(source), "json") == serialize(helmholtz(source), "json")
    assert serialize(source, "json") == serialize(SourceForm(plane, dict(reversed(source.components.items()))), "json")


def test_unknown_format_and_type(line):
    with pytest.raises(ValueError):
        serialize(SourceForm(line, {}), "yaml")
    with pytest.raises(TypeError):
        serialize(object())
