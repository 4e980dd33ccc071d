"""Truncated jet arithmetic: ring ops, validity tracking, elementary maps."""

from fractions import Fraction

import pytest

from fedquant.jets import (Chart, ChartMismatch, DomainError, Jet,
                           OrderExhausted, jet_cos, jet_exp, jet_log,
                           jet_sin, jet_sqrt)
from fedquant.rational import CRat


CH = Chart(("x", "y"), (0, 0))


def var(i, order=6):
    return Jet.variable(CH, i, order)


def const(c, order=6):
    return Jet.constant(CH, c, order)


def test_ring_basics():
    x, y = var(0), var(1)
    f = (x + y) * (x - y)
    g = x * x - y * y
    assert f == g
    assert (f - g).is_zero()
    assert (f * 0).is_zero()
    assert (f + 3).coeffs[(0, 0)] == CRat(3)


def test_multiplication_truncates_at_valid_order():
    x = var(0, 3)
    p = (x + 1) ** 5
    assert p.valid_order == 3
    # binomial coefficients survive through degree 3
    assert p.coeffs[(3, 0)] == CRat(10)
    assert (4, 0) not in p.coeffs


def test_partial_consumes_one_order():
    x, y = var(0), var(1)
    f = x * x * y
    fx = f.partial(0)
    assert fx.valid_order == 5
    assert fx == (var(0, 5) * var(1, 5) * 2).truncate(5)


def test_partial_exhaustion_raises():
    x = var(0, 1)
    with pytest.raises(OrderExhausted):
        x.partial(0).partial(0)


def test_partial_of_zero_jet_is_free():
    z = Jet.zero(CH, 0)
    assert z.partial(0).is_zero()


def test_chart_mismatch_detected():
    other = Chart(("u",), (0,))
    with pytest.raises(ChartMismatch):
        var(0) + Jet.variable(other, 0, 6)


def test_variable_includes_base_value():
    ch = Chart(("x",), (Fraction(1, 2),))
    x = Jet.variable(ch, 0, 4)
    assert x.constant_term == CRat(Fraction(1, 2))


def test_invert_roundtrip():
    x = var(0)
    f = const(2) + x + x * x
    assert (f * f.invert()).agrees_with(const(1))


def test_invert_needs_nonzero_base_value():
    with pytest.raises(DomainError):
        var(0).invert()


def test_division_by_jet():
    x = var(0)
    f = x * x + 1
    assert ((f / f)).agrees_with(const(1))


def test_exp_log_inverse():
    x, y = var(0), var(1)
    f = x + y * y * Fraction(1, 3)
    assert jet_log(jet_exp(f) ).agrees_with(f)


def test_exp_adds_products():
    x, y = var(0), var(1)
    lhs = jet_exp(x) * jet_exp(y)
    assert lhs.agrees_with(jet_exp(x + y))


def test_sqrt_squares_back():
    x = var(0)
    f = const(4) + x
    s = jet_sqrt(f)
    assert (s * s).agrees_with(f)
    assert s.constant_term == CRat(2)


def test_sqrt_irrational_base_rejected():
    with pytest.raises(DomainError):
        jet_sqrt(const(2) + var(0))


def test_pythagorean_identity():
    x, y = var(0), var(1)
    f = x + x * y
    s, c = jet_sin(f), jet_cos(f)
    assert (s * s + c * c).agrees_with(const(1))


def test_log_needs_unit_base():
    with pytest.raises(DomainError):
        jet_log(var(0))


def test_truncate_and_agrees_with_shared_order():
    x = var(0)
    f = (x + 1) ** 4
    g = f.truncate(2)
    assert f.agrees_with(g)          # compares through order 2
    with pytest.raises(OrderExhausted):
        f.agrees_with(g, order=3)    # can't certify beyond shared validity


def test_conjugate_on_paired_chart():
    cc = Chart(("z", "zb"), (0, 0), conj=(1, 0))
    z = Jet.variable(cc, 0, 4)
    zb = Jet.variable(cc, 1, 4)
    f = z * z * CRat(0, 1) + zb
    fc = f.conjugate()
    assert fc.agrees_with(zb * zb * CRat(0, -1) + z)


def test_restrict_and_embed():
    x = var(0)
    f = x * x + 2
    sub = f.restrict((0,))
    assert sub.chart.names == ("x",)
    back = sub.embed(CH, (0,))
    assert back.agrees_with(f)


def test_restrict_rejects_dropped_dependence():
    f = var(0) * var(1)
    with pytest.raises(DomainError):
        f.restrict((0,))
