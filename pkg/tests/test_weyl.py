"""Fiberwise Weyl algebra: products, gradings, and the delta homotopy."""

from fractions import Fraction

import pytest

from fedquant.jets import Jet
from fedquant.rational import CRat, I
from fedquant.weyl import (GradingError, WeylForm, divide_hbar,
                           graded_commutator, op_delta, op_delta_inv,
                           op_delta_star, pi_weight, scalar_part, symbol,
                           symbol_mul, weight_truncate, weyl_mul)
from fedquant.geometry import build_flat


ORDER = 6
CAP = 8
FLAT = build_flat(1, ORDER)


def gen(i):
    return WeylForm.fiber_generator(FLAT, CAP, i)


def jconst(c):
    return Jet.constant(FLAT.chart, c, ORDER)


def test_canonical_commutator():
    yq, yp = gen(0), gen(1)
    comm = weyl_mul(yq, yp) - weyl_mul(yp, yq)
    want = WeylForm(FLAT, CAP, {(1, (0, 0), ()): jconst(I)})
    assert comm.agrees_with(want)


def test_same_generator_commutes():
    yq = gen(0)
    assert (weyl_mul(yq, yq) - weyl_mul(yq, yq)).is_zero()


def test_product_associative():
    yq, yp = gen(0), gen(1)
    a = weyl_mul(yq, weyl_mul(yp, yq))
    b = weyl_mul(weyl_mul(yq, yp), yq)
    assert a.agrees_with(b)


def test_one_forms_anticommute():
    # identical fiber content, so only the wedge signs are in play
    a = WeylForm(FLAT, CAP, {(0, (1, 0), (0,)): jconst(1)})
    b = WeylForm(FLAT, CAP, {(0, (1, 0), (1,)): jconst(1)})
    assert (weyl_mul(a, b) + weyl_mul(b, a)).is_zero()


def test_one_form_bracket_contracts():
    # paired fiber directions leave the hbar contraction behind
    a = WeylForm(FLAT, CAP, {(0, (1, 0), (0,)): jconst(1)})
    b = WeylForm(FLAT, CAP, {(0, (0, 1), (1,)): jconst(2)})
    got = weyl_mul(a, b) + weyl_mul(b, a)
    want = WeylForm(FLAT, CAP, {(1, (0, 0), (0, 1)): jconst(CRat(0, 2))})
    assert got.agrees_with(want)


def test_graded_commutator_sign():
    a = WeylForm(FLAT, CAP, {(0, (1, 0), (0,)): jconst(1)})
    b = WeylForm(FLAT, CAP, {(0, (0, 1), (1,)): jconst(2)})
    # both are 1-forms, so the graded bracket is the anticommutator
    assert graded_commutator(a, b).agrees_with(
        weyl_mul(a, b) + weyl_mul(b, a))


def test_delta_squares_to_zero():
    a = WeylForm(FLAT, CAP, {
        (0, (2, 1), ()): jconst(1),
        (1, (0, 1), (0,)): jconst(3),
        (0, (0, 0), (0, 1)): jconst(-2),
    })
    assert op_delta(op_delta(a)).is_zero()
    assert op_delta_star(op_delta_star(a)).is_zero()


def test_homotopy_decomposition():
    q = Jet.variable(FLAT.chart, 0, ORDER)
    a = WeylForm(FLAT, CAP, {
        (0, (2, 1), ()): q * q,
        (1, (0, 1), (0,)): q + 1,
        (0, (0, 0), (0, 1)): q * 3,
        (2, (0, 0), ()): q,
    })
    dd = op_delta(op_delta_inv(a)) + op_delta_inv(op_delta(a)) \
        + scalar_part(a)
    assert dd.agrees_with(a)


def test_number_operator_identity():
    a = WeylForm(FLAT, CAP, {(0, (2, 1), (0,)): jconst(1)})
    anti = op_delta(op_delta_star(a)) + op_delta_star(op_delta(a))
    assert anti.agrees_with(a.scale(4))  # |alpha| + |beta| = 3 + 1


def test_weight_projection_and_truncation():
    a = WeylForm(FLAT, CAP, {
        (0, (2, 0), ()): jconst(1),      # weight 2
        (1, (1, 0), ()): jconst(1),      # weight 3
    })
    assert pi_weight(a, 2).agrees_with(
        WeylForm(FLAT, CAP, {(0, (2, 0), ()): jconst(1)}))
    assert weight_truncate(a, 2).agrees_with(pi_weight(a, 2))


def test_divide_hbar_requires_positive_grade():
    ok = WeylForm(FLAT, CAP, {(1, (0, 0), ()): jconst(1)})
    assert divide_hbar(ok).agrees_with(
        WeylForm(FLAT, CAP, {(0, (0, 0), ()): jconst(1)}))
    bad = WeylForm(FLAT, CAP, {(0, (0, 0), ()): jconst(1)})
    with pytest.raises(GradingError):
        divide_hbar(bad)


def test_symbol_strips_fiber():
    q = Jet.variable(FLAT.chart, 0, ORDER)
    a = WeylForm(FLAT, CAP, {(0, (0, 0), ()): q, (0, (2, 0), ()): q,
                             (1, (0, 0), ()): q * 2})
    sym = symbol(a)
    assert sym[0] == q and sym[1] == q * 2


def test_symbol_mul_matches_full_product():
    """The hbar-resolved scalar projection equals the full Weyl product."""
    q = Jet.variable(FLAT.chart, 0, ORDER)
    a = WeylForm(FLAT, CAP, {(0, (1, 0), ()): q, (0, (0, 2), ()): q + 1})
    b = WeylForm(FLAT, CAP, {(0, (0, 1), ()): q * 2, (0, (2, 0), ()): q})
    sym = symbol_mul(a, b, max_hbar=3)
    full = scalar_part(weyl_mul(a, b))
    acc = WeylForm.zero(FLAT, CAP)
    for k, jet in sym.items():
        acc = acc + WeylForm.from_jet(FLAT, CAP, jet, hbar_power=k)
    assert acc.agrees_with(full)


def test_degree_cap_truncates_products():
    yq = gen(0)
    high = yq
    for _ in range(CAP):
        high = weyl_mul(high, yq)
    # y^(cap+1) exceeds the cap and must vanish
    assert all(2 * k + sum(al) <= CAP for (k, al, _) in high.terms)
