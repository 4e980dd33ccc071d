"""Polarization operators: differential-operator algebra and closed forms."""

from fractions import Fraction

import pytest

from fedquant.jets import Chart, Jet
from fedquant.rational import CRat, I
from fedquant.geometry import (build_flat, build_kaehler, complex_chart,
                               lift_cotangent)
from fedquant.fedosov import solve_r
from fedquant.quantization import (DiffOp, HbarSeries, QuantizationError,
                                   config_chart, diffop_apply, diffop_compose,
                                   flat_reps, gq_cotangent, gq_kaehler,
                                   kinetic_alpha, kinetic_energy_observable,
                                   laplace_beltrami, rho_extend,
                                   scalar_curvature)
from fedquant import sampling


ORDER = 9


@pytest.fixture(scope="module")
def flat():
    return build_flat(1, ORDER)


@pytest.fixture(scope="module")
def flat_state(flat):
    return solve_r(flat, 3)


def test_diffop_commutator(flat):
    sub = config_chart(flat)
    q = Jet.variable(sub, 0, ORDER)
    d = DiffOp.deriv(sub, 0, Jet.constant(sub, 1, ORDER))
    m = DiffOp.mult(q)
    comm = diffop_compose(d, m) - diffop_compose(m, d)
    assert comm.agrees_with(DiffOp.identity(sub, ORDER))


def test_compose_matches_iterated_apply(flat):
    sub = config_chart(flat)
    q = Jet.variable(sub, 0, ORDER)
    d = DiffOp.deriv(sub, 0, q + 2)
    psi = q * q * q + q
    once = diffop_apply(d, psi).coeffs[0]
    twice = diffop_apply(d, once).coeffs[0]
    assert diffop_apply(diffop_compose(d, d), psi).agrees_with(
        HbarSeries.of(twice))


def test_flat_momentum_operator(flat):
    sub = config_chart(flat)
    p = Jet.variable(flat.chart, 1, ORDER)
    op = gq_cotangent(p, flat)
    want = DiffOp.deriv(sub, 0, Jet.constant(sub, -I, ORDER), 1)
    assert op.agrees_with(want)


def test_flat_position_operator(flat):
    sub = config_chart(flat)
    q = Jet.variable(flat.chart, 0, ORDER)
    op = gq_cotangent(q, flat)
    assert op.agrees_with(DiffOp.mult(Jet.variable(sub, 0, ORDER)))


def test_momentum_square_is_second_derivative(flat, flat_state):
    sub = config_chart(flat)
    p = Jet.variable(flat.chart, 1, ORDER)
    dp = DiffOp.deriv(sub, 0, Jet.constant(sub, -I, ORDER), 1)
    assert rho_extend(p * p, flat_state).agrees_with(diffop_compose(dp, dp))


def test_mixed_monomial_weyl_symmetrized(flat, flat_state):
    sub = config_chart(flat)
    q = Jet.variable(flat.chart, 0, ORDER)
    p = Jet.variable(flat.chart, 1, ORDER)
    qj = Jet.variable(sub, 0, ORDER)
    dp = DiffOp.deriv(sub, 0, Jet.constant(sub, -I, ORDER), 1)
    sym = (diffop_compose(dp, DiffOp.mult(qj))
           + diffop_compose(DiffOp.mult(qj), dp)).scale(Fraction(1, 2))
    assert rho_extend(q * p, flat_state).agrees_with(sym)


def test_factorization_independence(flat, flat_state):
    rng = sampling.make_rng("quant-fact")
    for _ in range(3):
        f = sampling.random_p_polynomial(rng, flat.chart, 1, ORDER,
                                         p_degree=3, q_degree=3)
        a = rho_extend(f, flat_state, split="first")
        b = rho_extend(f, flat_state, split="last")
        assert a.agrees_with(b)


def test_momentum_degree_above_state_order_rejected(flat, flat_state):
    from fedquant.fedosov import FedosovError
    p = Jet.variable(flat.chart, 1, ORDER)
    with pytest.raises(FedosovError):
        rho_extend(p ** 4, flat_state)


@pytest.fixture(scope="module")
def sphere():
    return lift_cotangent(sampling.sphere_metric(ORDER), ORDER)


def test_sphere_scalar_curvature(sphere):
    rt = scalar_curvature(sphere)
    sub = config_chart(sphere)
    assert rt.agrees_with(Jet.constant(sub, 2, 0))


def test_half_form_scalar_curvature_coefficient(sphere):
    state = solve_r(sphere, 2)
    assert kinetic_alpha(sphere, state) == Fraction(1, 4)


def test_laplace_beltrami_flat_is_plain(flat):
    sub = config_chart(flat)
    q = Jet.variable(sub, 0, ORDER)
    psi = q ** 4
    lap = laplace_beltrami(flat)
    assert diffop_apply(lap, psi).coeffs[0].agrees_with(
        psi.partial(0).partial(0))


def test_kaehler_flat_fock_lowering():
    order = 8
    cc = complex_chart(1)
    z = Jet.variable(cc, 0, order)
    zb = Jet.variable(cc, 1, order)
    geom = build_kaehler(z * zb, order)
    sub = Chart(cc.names[:1], cc.base[:1])
    op = gq_kaehler(zb, geom)
    assert op.agrees_with(
        DiffOp.deriv(sub, 0, Jet.constant(sub, 1, order), 1))


def test_kaehler_affine_observable():
    order = 8
    cc = complex_chart(1)
    z = Jet.variable(cc, 0, order)
    zb = Jet.variable(cc, 1, order)
    K = z * zb + (z * zb) ** 2 * Fraction(1, 3)
    geom = build_kaehler(K, order)
    f = z * K.partial(0) + z * z     # u = z, v = z^2
    op = gq_kaehler(f, geom)
    sub = Chart(cc.names[:1], cc.base[:1])
    zc = Jet.variable(sub, 0, order)
    want = DiffOp.deriv(sub, 0, zc, 1) + DiffOp.mult(zc * zc) \
        + DiffOp.mult(Jet.constant(sub, Fraction(1, 2), order)).shift_hbar(1)
    assert op.agrees_with(want)


def test_kaehler_rejects_nonaffine():
    order = 8
    cc = complex_chart(1)
    z = Jet.variable(cc, 0, order)
    zb = Jet.variable(cc, 1, order)
    K = z * zb + (z * zb) ** 2 * Fraction(1, 3)
    geom = build_kaehler(K, order)
    from fedquant.jets import DomainError
    with pytest.raises(DomainError):
        gq_kaehler(z + zb, geom)     # u would not be holomorphic


def test_flat_representations():
    order = ORDER
    cc = complex_chart(1)
    fock = build_kaehler(
        Jet.variable(cc, 0, order) * Jet.variable(cc, 1, order), order)
    samples = [(((1,), (1,)), ((0,), (2,))),
               (((2,), (1,)), ((1,), (2,))),
               (((0,), (3,)), ((2,), (0,)))]
    rep = flat_reps(1, 3, samples, build_flat(1, order), fock)
    assert rep.passed, str(rep)


def test_kinetic_observable_is_metric_contraction(sphere):
    ke = kinetic_energy_observable(sphere)
    # p-degree exactly two everywhere
    assert all(sum(key[2:]) == 2 for key in ke.coeffs)
