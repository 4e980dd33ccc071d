"""The flatness recursion, flat sections, and the induced star product."""

from fractions import Fraction

import pytest

from fedquant.jets import Jet
from fedquant.rational import CRat, HALF_I, I
from fedquant.weyl import pi_weight
from fedquant.geometry import (build_darboux, build_flat, hamiltonian_vf,
                               omega_pair, poisson)
from fedquant.fedosov import (FedosovError, check_flatness, flat_section,
                              moyal_reference, section_defect, solve_r, star)
from fedquant import sampling
from fedquant.suites import _r3_oracle, _r4_oracle


ORDER = 11


def darboux_state(tag, n_hbar=3, order=9):
    rng = sampling.make_rng(("fedosov-test", tag))
    return solve_r(
        build_darboux(1, sampling.random_darboux_gamma(rng, 1, order), order),
        n_hbar)


def test_flat_r_vanishes():
    st = solve_r(build_flat(1, ORDER), 4)
    assert st.r.is_zero()
    assert st.converged
    assert check_flatness(st) == {}


def test_flat_star_is_direct_product():
    flat = build_flat(1, ORDER)
    st = solve_r(flat, 4)
    q = Jet.variable(flat.chart, 0, ORDER)
    p = Jet.variable(flat.chart, 1, ORDER)
    f = q * q * p + p * p * p - q * 2 + 3
    g = q * p * p + q * q * q + p
    assert star(f, g, st).agrees_with(moyal_reference(f, g, flat, 4))


def test_flat_first_order_coefficient():
    flat = build_flat(1, ORDER)
    st = solve_r(flat, 2)
    q = Jet.variable(flat.chart, 0, ORDER)
    p = Jet.variable(flat.chart, 1, ORDER)
    c1 = star(q, p, st).coefficient(1)
    assert c1.constant_term == CRat(0, Fraction(1, 2))


def test_unit_is_neutral():
    st = darboux_state("unit")
    chart = st.geometry.chart
    one = Jet.constant(chart, 1, st.geometry.order)
    f = Jet.variable(chart, 0, st.geometry.order) \
        * Jet.variable(chart, 1, st.geometry.order)
    s = star(f, one, st)
    assert s.coefficient(0).agrees_with(f)
    assert all(s.coefficient(k).is_zero() for k in range(1, 4))


def test_insufficient_jet_order_rejected():
    flat = build_flat(1, 6)
    with pytest.raises(FedosovError):
        solve_r(flat, 3)    # needs valid_order >= 9


def test_recursion_reaches_fixed_point():
    st = darboux_state("fp")
    assert st.converged
    assert check_flatness(st) == {}


def test_r_series_leading_terms():
    st = darboux_state("r34")
    geom = st.geometry
    assert pi_weight(st.r, 3).agrees_with(_r3_oracle(geom, st.degree_cap))
    assert pi_weight(st.r, 4).agrees_with(_r4_oracle(geom, st.degree_cap))


def test_section_is_flat():
    st = darboux_state("section")
    chart = st.geometry.chart
    f = Jet.variable(chart, 0, st.geometry.order) ** 2 \
        + Jet.variable(chart, 1, st.geometry.order)
    sec = flat_section(f, st)
    assert section_defect(sec, st) == {}


def test_low_order_star_coefficients():
    st = darboux_state("low")
    geom = st.geometry
    order = geom.order
    q = Jet.variable(geom.chart, 0, order)
    p = Jet.variable(geom.chart, 1, order)
    f = q * q * p - p * 2
    g = q * p * p + q * 3
    ss = star(f, g, st)
    assert ss.coefficient(0).agrees_with(f * g)
    xf = hamiltonian_vf(f, geom)
    xg = hamiltonian_vf(g, geom)
    assert ss.coefficient(1).agrees_with(omega_pair(xf, xg, geom) * (-HALF_I))


def test_correspondence_principle():
    st = darboux_state("corr")
    geom = st.geometry
    order = geom.order
    f = Jet.variable(geom.chart, 0, order) * Jet.variable(geom.chart, 1,
                                                          order)
    g = Jet.variable(geom.chart, 1, order) ** 2
    diff = star(f, g, st).coefficient(1) - star(g, f, st).coefficient(1)
    assert diff.agrees_with(poisson(f, g, geom) * I)


def test_star_truncation_argument():
    st = darboux_state("trunc")
    chart = st.geometry.chart
    f = Jet.variable(chart, 0, st.geometry.order)
    g = Jet.variable(chart, 1, st.geometry.order)
    short = star(f, g, st, 1)
    assert short.valid_hbar_order == 1
    full = star(f, g, st)
    assert short.coefficient(1).agrees_with(full.coefficient(1))
    with pytest.raises(FedosovError):
        short.coefficient(2)
