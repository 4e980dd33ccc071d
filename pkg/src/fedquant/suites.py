"""Named check suites over seeded random inputs.

Each suite builds its own geometries from a seed, runs an exact property
battery, and returns a CompatReport; the command line and the test suite
both call these entry points.
"""

from __future__ import annotations

from fractions import Fraction

from .jets import Jet
from .rational import CRat, I, HALF_I
from .weyl import (WeylForm, graded_commutator, mul_i_divide_hbar, op_delta,
                   op_delta_inv, op_delta_star, pi_weight, scalar_part,
                   weyl_mul)
from .geometry import (build_darboux, build_flat, build_kaehler,
                       complex_chart, covariant_dv, hamiltonian_vf,
                       lift_cotangent, nabla, omega_pair, poisson,
                       validate_connection)
from .fedosov import moyal_reference, solve_r, star
from .quantization import (CompatReport, check_homogeneity,
                           check_kaehler_orders, check_kompi, flat_reps,
                           kinetic_alpha, rho_extend)
from . import sampling


_STATES = {}


def _solved(key, build, n_hbar):
    """Cache converged states across suites within one process."""
    state = _STATES.get(key)
    if state is None or state.n_hbar < n_hbar:
        state = solve_r(build(), n_hbar)
        _STATES[key] = state
    return state


def _flat_state(n, order, n_hbar):
    return _solved(("flat", n, order), lambda: build_flat(n, order), n_hbar)


def _darboux_state(n, order, seed, n_hbar):
    def build():
        rng = sampling.make_rng(("darboux", n, seed))
        return build_darboux(n, sampling.random_darboux_gamma(rng, n, order),
                             order)
    return _solved(("darboux", n, order, seed), build, n_hbar)


def _cotangent_state(n, order, seed, n_hbar):
    def build():
        rng = sampling.make_rng(("cotangent", n, seed))
        return lift_cotangent(sampling.random_metric(rng, n, order), order)
    return _solved(("cotangent", n, order, seed), build, n_hbar)


def _kaehler_state(n, order, seed, n_hbar):
    def build():
        rng = sampling.make_rng(("kaehler", n, seed))
        return build_kaehler(
            sampling.random_kaehler_potential(rng, n, order), order)
    return _solved(("kaehler", n, order, seed), build, n_hbar)


# -- flat Moyal equality ---------------------------------------------------

def moyal_flat_suite(order=11, seed=0, samples=50, n_hbar=4):
    """star == direct exponential product on flat charts, exact."""
    rep = CompatReport()
    rng = sampling.make_rng(("moyal-flat", seed))
    for t in range(samples):
        n = 1 + t % 2
        state = _flat_state(n, order, n_hbar)
        chart = state.geometry.chart
        f = sampling.random_polynomial(rng, chart, order, degree=4)
        g = sampling.random_polynomial(rng, chart, order, degree=4)
        got = star(f, g, state)
        want = moyal_reference(f, g, state.geometry, n_hbar)
        rep.add("flat star equals direct product", range(n_hbar + 1),
                got.agrees_with(want), f"sample {t} (n={n})")
    return rep


# -- explicit low-order coefficients ---------------------------------------

def second_order_suite(order=9, seed=0, samples=10, n=1):
    """hbar^1 and hbar^2 star coefficients against contracted oracles.

    hbar^1 = -(i/2) omega(X_f, X_g); hbar^2 = (1/8)(nabla_j X_f)^b
    (nabla_b X_g)^j, the normalization fixed by the flat limit.
    """
    rep = CompatReport()
    rng = sampling.make_rng(("second-order", seed))
    dim = 2 * n
    for t in range(samples):
        state = _darboux_state(n, order, (seed, t), 2)
        geom = state.geometry
        f = sampling.random_polynomial(rng, geom.chart, order, degree=3)
        g = sampling.random_polynomial(rng, geom.chart, order, degree=3)
        ss = star(f, g, state)
        rep.add("hbar^0 = fg", (0,), ss.coefficient(0).agrees_with(f * g),
                f"sample {t}")
        xf = hamiltonian_vf(f, geom)
        xg = hamiltonian_vf(g, geom)
        w1 = omega_pair(xf, xg, geom) * (-HALF_I)
        rep.add("hbar^1 = -(i/2) omega(Xf, Xg)", (1,),
                ss.coefficient(1).agrees_with(w1), f"sample {t}")
        dxf = covariant_dv(xf, geom)
        dxg = covariant_dv(xg, geom)
        acc = geom.zero_jet()
        for j in range(dim):
            for b in range(dim):
                a_ = dxf.get((b, j))
                b_ = dxg.get((j, b))
                if a_ is not None and b_ is not None:
                    acc = acc + a_ * b_
        rep.add("hbar^2 = (1/8)(nabla Xf)(nabla Xg)", (2,),
                ss.coefficient(2).agrees_with(acc * Fraction(1, 8)),
                f"sample {t}")
    return rep


# -- r-series closed forms -------------------------------------------------

def _r3_oracle(geom, cap):
    curv = geom.curvature()
    dim = 2 * geom.n
    zero = geom.zero_jet()
    terms = {}
    for (i, j, k, l), jet in list(curv.r_low.items()):
        jet = jet * Fraction(-1, 8)
        if jet.is_zero():
            continue
        alpha = [0] * dim
        alpha[i] += 1
        alpha[j] += 1
        alpha[k] += 1
        key = (0, tuple(alpha), (l,))
        terms[key] = terms[key] + jet if key in terms else jet
    return WeylForm(geom, cap, terms)


def _cov_rlow(geom, m, i, j, k, l):
    curv = geom.curvature()
    zero = geom.zero_jet()

    def rlow(*idx):
        return curv.r_low.get(tuple(idx), zero)

    acc = rlow(i, j, k, l).partial(m)
    for a in range(2 * geom.n):
        for pos, idx in enumerate((i, j, k, l)):
            g = geom.gamma.get((a, m, idx))
            if g is None:
                continue
            slots = [i, j, k, l]
            slots[pos] = a
            acc = acc - g * rlow(*slots)
    return acc


def _r4_oracle(geom, cap):
    dim = 2 * geom.n
    terms = {}
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    for m in range(dim):
                        jet = _cov_rlow(geom, m, i, j, k, l) * Fraction(-1, 40)
                        if jet.is_zero():
                            continue
                        alpha = [0] * dim
                        for idx in (i, j, k, m):
                            alpha[idx] += 1
                        key = (0, tuple(alpha), (l,))
                        terms[key] = terms[key] + jet if key in terms else jet
    return WeylForm(geom, cap, terms)


def r_terms_suite(order=9, seed=0, samples=3, n=1):
    """First two curvature terms of the flatness solution, exact."""
    rep = CompatReport()
    for t in range(samples):
        state = _darboux_state(n, order, (seed, "r", t), 3)
        geom = state.geometry
        cap = state.degree_cap
        rep.add("r_(3) = -(1/8) R y^3 dx", (3,),
                pi_weight(state.r, 3).agrees_with(_r3_oracle(geom, cap)),
                f"sample {t}")
        rep.add("r_(4) = -(1/40) nabla R y^4 dx", (4,),
                pi_weight(state.r, 4).agrees_with(_r4_oracle(geom, cap)),
                f"sample {t}")
    return rep


# -- associativity and the correspondence principle ------------------------

def _assoc_coefficients(f, g, h, state, left):
    """Coefficients of (f*g)*h (left) or f*(g*h) through the state order."""
    n = state.n_hbar
    inner = star(f, g, state) if left else star(g, h, state)
    out = []
    for m in range(n + 1):
        acc = None
        for k in range(m + 1):
            ck = inner.coefficient(k)
            if ck.is_zero():
                continue
            outer = star(ck, h, state, n - k) if left \
                else star(f, ck, state, n - k)
            t = outer.coefficient(m - k)
            acc = t if acc is None else acc + t
        if acc is None:
            acc = state.geometry.zero_jet()
        out.append(acc)
    return out


_KIND_STATES = {
    "flat": lambda order, seed, n_hbar: _flat_state(1, order, n_hbar),
    "darboux": lambda order, seed, n_hbar:
        _darboux_state(1, order, seed, n_hbar),
    "cotangent": lambda order, seed, n_hbar:
        _cotangent_state(1, max(order, 11), seed, n_hbar),
    "kaehler": lambda order, seed, n_hbar:
        _kaehler_state(1, max(order, 12), seed, n_hbar),
}


def associativity_suite(order=9, seed=0, samples=25, n_hbar=3, kinds=None,
                        state=None):
    """(f*g)*h == f*(g*h) through hbar^N on every geometry kind."""
    rep = CompatReport()
    states = [state] if state is not None else \
        [_KIND_STATES[k](order, seed, n_hbar)
         for k in (kinds or ("flat", "darboux", "cotangent", "kaehler"))]
    for st in states:
        chart = st.geometry.chart
        kind = st.geometry.kind
        rng = sampling.make_rng(("assoc", kind, seed))
        for t in range(samples):
            f = sampling.random_polynomial(rng, chart, order, degree=2,
                                           terms=3)
            g = sampling.random_polynomial(rng, chart, order, degree=2,
                                           terms=3)
            h = sampling.random_polynomial(rng, chart, order, degree=2,
                                           terms=3)
            lhs = _assoc_coefficients(f, g, h, st, True)
            rhs = _assoc_coefficients(f, g, h, st, False)
            ok = all(a.agrees_with(b) for a, b in zip(lhs, rhs))
            rep.add(f"{kind} associativity", range(n_hbar + 1), ok,
                    f"sample {t}")
    return rep


def correspondence_suite(order=9, seed=0, samples=25, kinds=None, state=None):
    """f*g - g*f = i hbar {f, g} + O(hbar^2) on every geometry kind."""
    rep = CompatReport()
    states = [state] if state is not None else \
        [_KIND_STATES[k](order, seed, 1)
         for k in (kinds or ("flat", "darboux", "cotangent", "kaehler"))]
    for st in states:
        geom = st.geometry
        chart = geom.chart
        rng = sampling.make_rng(("corr", geom.kind, seed))
        for t in range(samples):
            f = sampling.random_polynomial(rng, chart, order, degree=3,
                                           terms=4)
            g = sampling.random_polynomial(rng, chart, order, degree=3,
                                           terms=4)
            fg = star(f, g, st, 1)
            gf = star(g, f, st, 1)
            ok0 = (fg.coefficient(0) - gf.coefficient(0)).is_zero()
            pb = poisson(f, g, geom) * I
            ok1 = (fg.coefficient(1) - gf.coefficient(1)).agrees_with(pb)
            rep.add(f"{geom.kind} correspondence", (0, 1), ok0 and ok1,
                    f"sample {t}")
    return rep


# -- cotangent suites ------------------------------------------------------

def _cotangent_battery(order, seed, metrics):
    """Converged states for a seeded mix of base metrics at n = 1 and 2."""
    plan = [1, 1, 2, 1, 2]
    out = []
    for t in range(metrics):
        n = plan[t % len(plan)]
        out.append(_cotangent_state(n, order, (seed, t), 3))
    return out


def _phase_samples(rng, geom, order):
    n = geom.n
    chart = geom.chart
    f = sampling.random_p_polynomial(rng, chart, n, order, p_degree=0,
                                     q_degree=3, terms=3)
    g = sampling.random_p_polynomial(rng, chart, n, order, p_degree=0,
                                     q_degree=3, terms=3)
    h = sampling.random_p_polynomial(rng, chart, n, order, p_degree=1,
                                     q_degree=2, terms=3)
    return f, g, h


def kompi_suite(order=11, seed=0, metrics=5):
    """Polarization-compatibility star conditions on lifted connections."""
    rep = CompatReport()
    for t, state in enumerate(_cotangent_battery(order, seed, metrics)):
        rng = sampling.make_rng(("kompi", seed, t))
        f, g, h = _phase_samples(rng, state.geometry, order)
        check_kompi(state, [(f, g, h)], rep)
    return rep


def cotangent_homogeneity_suite(order=11, seed=0, metrics=5):
    """The momentum Euler field is a derivation of the star product."""
    rep = CompatReport()
    for t, state in enumerate(_cotangent_battery(order, seed, metrics)):
        rng = sampling.make_rng(("homog", seed, t))
        chart = state.geometry.chart
        n = state.geometry.n
        f = sampling.random_p_polynomial(rng, chart, n, order, p_degree=2,
                                         q_degree=2, terms=3)
        g = sampling.random_p_polynomial(rng, chart, n, order, p_degree=2,
                                         q_degree=2, terms=3)
        check_homogeneity(state, [(f, g)], rep)
    return rep


# -- kaehler orders --------------------------------------------------------

def kaehler_orders_suite(order=12, seed=0, potentials=5):
    """Vanishing mixed orders and the third-order curvature contributions."""
    rep = CompatReport()
    plan = [1, 1, 2, 1, 2]
    for t in range(potentials):
        n = plan[t % len(plan)]
        state = _kaehler_state(n, order, (seed, t), 3)
        chart = state.geometry.chart
        rng = sampling.make_rng(("kaehler-orders", seed, t))
        z = Jet.variable(chart, 0, order)
        coeffs = {}
        for _ in range(3):
            alpha = [0] * (2 * n)
            for _ in range(rng.randint(1, 3)):
                alpha[rng.randrange(n)] += 1
            key = tuple(alpha)
            coeffs[key] = coeffs.get(key, 0) + sampling.random_rational(rng)
        hol = Jet(chart, order, order, coeffs)
        check_kaehler_orders(state, [(z, hol)], rep)
    return rep


# -- kinetic energy --------------------------------------------------------

def kinetic_alpha_suite(order=9, seed=0, metrics=3):
    """The half-form scalar-curvature coefficient is exactly 1/4."""
    rep = CompatReport()
    sph = lift_cotangent(sampling.sphere_metric(order), order)
    st = solve_r(sph, 2)
    rep.add("round sphere alpha", (2,),
            kinetic_alpha(sph, st) == Fraction(1, 4))
    for t in range(metrics):
        rng = sampling.make_rng(("kinetic", seed, t))
        geom = lift_cotangent(sampling.random_metric(rng, 2, order), order)
        state = solve_r(geom, 2)
        rep.add("random metric alpha", (2,),
                kinetic_alpha(geom, state) == Fraction(1, 4),
                f"sample {t}")
    return rep


# -- flat representations --------------------------------------------------

def flat_reps_suite(order=11, seed=0, monomials=None, polynomials=10):
    """Representation homomorphisms and factorization independence."""
    rng = sampling.make_rng(("flat-reps", seed))
    if monomials is None:
        monomials = []
        for _ in range(6):
            m1 = ((rng.randint(0, 2),), (rng.randint(0, 3),))
            m2 = ((rng.randint(0, 2),), (rng.randint(0, 3),))
            monomials.append((m1, m2))
    geom_real = build_flat(1, order)
    kf = build_kaehler(
        Jet.variable(complex_chart(1), 0, order)
        * Jet.variable(complex_chart(1), 1, order), order)
    rep = flat_reps(1, 3, monomials, geom_real, kf)
    state = _flat_state(1, order, 3)
    for t in range(polynomials):
        f = sampling.random_p_polynomial(rng, state.geometry.chart, 1, order,
                                         p_degree=3, q_degree=3)
        a = rho_extend(f, state, split="first")
        b = rho_extend(f, state, split="last")
        rep.add("factorization independence", range(4), a.agrees_with(b),
                f"sample {t}")
    return rep


# -- structural identities -------------------------------------------------

def _random_form(rng, geom, cap, order, terms=6):
    dim = 2 * geom.n
    out = {}
    for _ in range(terms):
        k = rng.randint(0, 1)
        alpha = [0] * dim
        for _ in range(rng.randint(0, 3)):
            alpha[rng.randrange(dim)] += 1
        beta = tuple(sorted(rng.sample(range(dim), rng.randint(0, 2))))
        if 2 * k + sum(alpha) > cap:
            continue
        key = (k, tuple(alpha), beta)
        jet = sampling.random_polynomial(rng, geom.chart, order, degree=2,
                                         terms=2)
        out[key] = out[key] + jet if key in out else jet
    return WeylForm(geom, cap, out)


def _number_op(a):
    terms = {}
    for (k, alpha, beta), jet in a.terms.items():
        w = sum(alpha) + len(beta)
        if w:
            terms[(k, alpha, beta)] = jet * w
    return WeylForm(a.geometry, a.degree_cap, terms)


def structural_suite(order=6, seed=0, samples=4, cap=8):
    """Chain identities of delta, its adjoint, and the curvature square."""
    rep = CompatReport()
    rng = sampling.make_rng(("structural", seed))
    geoms = [
        build_darboux(1, sampling.random_darboux_gamma(rng, 1, order), order),
        lift_cotangent(sampling.random_metric(rng, 1, order), order),
        lift_cotangent(sampling.random_metric(rng, 2, order), order),
        build_kaehler(sampling.random_kaehler_potential(rng, 1, order),
                      order),
    ]
    for geom in geoms:
        kind = geom.kind + f" n={geom.n}"
        rep.add(f"{kind} connection validation", (),
                validate_connection(geom).passed)
        rhat = geom.rhat(cap)
        for t in range(samples):
            a = _random_form(rng, geom, cap, order)
            rep.add(f"{kind} delta^2 = 0", (),
                    op_delta(op_delta(a)).is_zero(), f"sample {t}")
            rep.add(f"{kind} delta*^2 = 0", (),
                    op_delta_star(op_delta_star(a)).is_zero(), f"sample {t}")
            anti = op_delta(op_delta_star(a)) + op_delta_star(op_delta(a))
            rep.add(f"{kind} delta delta* + delta* delta = (l+p) id", (),
                    anti.agrees_with(_number_op(a)), f"sample {t}")
            dec = op_delta(op_delta_inv(a)) + op_delta_inv(op_delta(a)) \
                + scalar_part(a)
            rep.add(f"{kind} homotopy decomposition", (),
                    dec.agrees_with(a), f"sample {t}")
        a = _random_form(rng, geom, cap, order, terms=3)
        lhs = nabla(nabla(a, geom), geom)
        rhs = mul_i_divide_hbar(graded_commutator(rhat, a))
        rep.add(f"{kind} nabla^2 = (i/hbar)[Rhat, .]", (),
                lhs.agrees_with(rhs))
    return rep


SUITES = {
    "moyal-flat": moyal_flat_suite,
    "associativity": associativity_suite,
    "correspondence": correspondence_suite,
    "r-terms": r_terms_suite,
    "cotangent-homogeneity": cotangent_homogeneity_suite,
    "kompi": kompi_suite,
    "kaehler-orders": kaehler_orders_suite,
    "kinetic-alpha": kinetic_alpha_suite,
    "flat-reps": flat_reps_suite,
}


def run_suite(name, order=None, seed=0, **kwargs):
    fn = SUITES.get(name)
    if fn is None:
        raise KeyError(f"unknown suite {name!r}; choose from "
                       + ", ".join(sorted(SUITES)))
    if order is not None:
        kwargs["order"] = order
    return fn(seed=seed, **kwargs)
