"""Expression parsing and elaboration into jets."""

from fractions import Fraction

import pytest

from fedquant.exprparse import ParseError, jet_of, parse, pretty
from fedquant.jets import Chart, DomainError, Jet
from fedquant.rational import CRat


CH = Chart(("q1", "p1"), (0, 0))


def test_arithmetic_elaboration():
    f = jet_of("q1^2*p1 - 3*q1 + 1/2", CH, 5)
    q = Jet.variable(CH, 0, 5)
    p = Jet.variable(CH, 1, 5)
    assert f == q * q * p - q * 3 + Fraction(1, 2)


def test_precedence_and_parentheses():
    a = jet_of("q1 + p1*q1^2", CH, 5)
    b = jet_of("q1 + (p1*(q1^2))", CH, 5)
    assert a == b
    c = jet_of("(q1 + p1)*q1^2", CH, 5)
    assert a != c


def test_unary_minus_binds_correctly():
    f = jet_of("-q1^2", CH, 4)
    q = Jet.variable(CH, 0, 4)
    assert f == -(q * q)


def test_imaginary_unit():
    f = jet_of("i*q1", CH, 3)
    assert f.coeffs[(1, 0)] == CRat(0, 1)


def test_division_and_functions():
    f = jet_of("1/(1 + q1^2)", CH, 6)
    g = jet_of("1 + q1^2", CH, 6)
    assert (f * g).agrees_with(Jet.constant(CH, 1, 6))
    h = jet_of("exp(q1)*exp(-q1)", CH, 6)
    assert h.agrees_with(Jet.constant(CH, 1, 6))
    s2c2 = jet_of("sin(q1)^2 + cos(q1)^2", CH, 6)
    assert s2c2.agrees_with(Jet.constant(CH, 1, 6))


def test_sqrt_of_perfect_square():
    f = jet_of("sqrt(4 + q1)", CH, 5)
    assert f.constant_term == CRat(2)


def test_pretty_roundtrip():
    src = "q1^2*p1 - sin(q1)/2"
    assert jet_of(pretty(parse(src)), CH, 5) == jet_of(src, CH, 5)


def test_unknown_symbol_rejected():
    from fedquant.jets import JetError
    with pytest.raises(JetError):
        jet_of("q1 + w", CH, 4)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse("q1 + * p1")
    assert err.value.pos == 5


def test_fractional_power_rejected():
    with pytest.raises(ParseError):
        jet_of("q1^(1/2)", CH, 4)


def test_log_away_from_domain_fails():
    with pytest.raises(DomainError):
        jet_of("log(q1)", CH, 4)
