"""The flatness equation, flat sections, and the induced star product.

The connection D = nabla - delta + (i/hbar)[r, .] on fiber-polynomial forms
is flattened by solving

    delta r = Rhat + nabla r + (i/hbar) r o r,   delta_inv r = 0,

degree by degree in the doubled weight 2k + |alpha|.  Flat sections are then
built by the companion iteration, and the star product of two scalars is the
symbol of the fiberwise product of their flat sections.
"""

from __future__ import annotations

from fractions import Fraction

from .jets import ChartMismatch, Jet, JetError
from .rational import CRat
from .weyl import (WeylForm, graded_commutator, mul_i_divide_hbar, op_delta,
                   op_delta_inv, pi_weight, symbol_mul, weight_truncate,
                   weyl_mul)
from .geometry import nabla


class FedosovError(JetError):
    pass


def default_degree_cap(n_hbar):
    """Doubled working weight for a star product certified through hbar^N.

    Scalar contributions at hbar^m come from section components of doubled
    weight a + b = 2m, so the sections are filled through weight 2N; their
    recursion consumes r through weight 2N + 1, and the weight-by-weight
    solve makes every r component below the cap exact, so cap = 2N + 2.
    """
    return 2 * n_hbar + 2


class StarSeries:
    """Coefficient jets of a star product, indexed by hbar power."""

    __slots__ = ("coefficients", "valid_hbar_order")

    def __init__(self, coefficients, valid_hbar_order):
        self.coefficients = tuple(coefficients)
        self.valid_hbar_order = valid_hbar_order
        if len(self.coefficients) != valid_hbar_order + 1:
            raise FedosovError("coefficient list does not match hbar order")

    def coefficient(self, k):
        if not 0 <= k <= self.valid_hbar_order:
            raise FedosovError(f"hbar power {k} outside certified range")
        return self.coefficients[k]

    def agrees_with(self, other, hbar_order=None, jet_order=None):
        n = min(self.valid_hbar_order, other.valid_hbar_order)
        if hbar_order is not None:
            if hbar_order > n:
                raise FedosovError(
                    f"hbar order {hbar_order} exceeds shared validity {n}")
            n = hbar_order
        return all(self.coefficients[k].agrees_with(other.coefficients[k],
                                                    jet_order)
                   for k in range(n + 1))

    def __repr__(self):
        return f"StarSeries(through hbar^{self.valid_hbar_order})"


class FedosovState:
    """Converged solution of the flatness equation for one geometry."""

    def __init__(self, geometry, n_hbar, degree_cap, r, residual, converged,
                 iterations_used):
        self.geometry = geometry
        self.n_hbar = n_hbar
        self.degree_cap = degree_cap
        self.r = r
        self.residual = residual
        self.converged = converged
        self.iterations_used = iterations_used
        self.section_cap = degree_cap - 2
        self._section_cache = {}
        self._r_parts = None

    def __repr__(self):
        return (f"FedosovState(N={self.n_hbar}, cap={self.degree_cap}, "
                f"converged={self.converged})")


def _geometry_validity(geom):
    orders = [geom.order]
    for row in geom.omega:
        orders.extend(j.valid_order for j in row)
    orders.extend(j.valid_order for j in geom.gamma.values())
    return min(orders)


def solve_r(geom, n_hbar, degree_cap=None):
    """Solve the flatness equation through the working degree cap.

    The weight-(w+1) component of r is determined by the weight-w data, so
    the recursion fills one weight per step; a final full fixed-point pass
    certifies stability of every retained term.
    """
    cap = default_degree_cap(n_hbar) if degree_cap is None else degree_cap
    if _geometry_validity(geom) < 2 * n_hbar + 3:
        raise FedosovError(
            f"geometry jets need valid_order >= {2 * n_hbar + 3} "
            f"for a star product through hbar^{n_hbar}")
    rhat = geom.rhat(cap)
    parts = {3: op_delta_inv(rhat)}
    iterations = 1
    for w in range(3, cap):
        update = nabla(parts[w], geom)
        # the hbar^0 layers of the quadratic term only cancel summed over
        # ordered pairs, so divide the whole sum at once
        quad = None
        for w1 in range(3, w):
            w2 = w + 2 - w1
            if w2 in parts:
                prod = weyl_mul(parts[w1], parts[w2])
                quad = prod if quad is None else quad + prod
        if quad is not None:
            update = update + mul_i_divide_hbar(quad)
        parts[w + 1] = pi_weight(op_delta_inv(update), w + 1)
        iterations += 1
    r = WeylForm.zero(geom, cap)
    for part in parts.values():
        r = r + part

    # full fixed-point pass over the assembled solution; the top weight of
    # the quadratic term is truncated, so stability is certified below it
    quad = mul_i_divide_hbar(weyl_mul(r, r))
    nr = nabla(r, geom)
    refreshed = op_delta_inv(rhat + nr + quad)
    converged = weight_truncate(refreshed, cap - 1).agrees_with(
        weight_truncate(r, cap - 1))
    residual = op_delta(r) - rhat - nr - quad
    state = FedosovState(geom, n_hbar, cap, r, residual, converged,
                         iterations + 1)
    if not converged:
        raise FedosovError("flatness iteration did not reach a fixed point; "
                           "the degree recursion is broken")
    return state


def check_flatness(state):
    """Count nonzero residual terms of the flatness equation per weight.

    The top working weight is corrupted by truncation of the quadratic term
    and is excluded; a converged state reports an empty map.
    """
    out = {}
    for (k, alpha, beta), jet in state.residual.terms.items():
        w = 2 * k + sum(alpha)
        if w >= state.degree_cap - 1:
            continue
        if not jet.is_zero():
            out[w] = out.get(w, 0) + 1
    return out


def flat_section(f, state, max_weight=None):
    """Lift a scalar jet to a section annihilated by the flat connection.

    Filled through doubled weight cap - 2 by default, which is what the
    star product at the state's target order consumes; a smaller
    ``max_weight`` spends fewer derivatives of f.  Partial fills are
    cached per jet and extended on demand.
    """
    geom = state.geometry
    if f.chart != geom.chart:
        raise ChartMismatch("observable lives on a different chart")
    if not state.converged:
        raise FedosovError("state is not converged")
    top = state.section_cap if max_weight is None \
        else min(max_weight, state.section_cap)
    cap = state.degree_cap
    if state._r_parts is None:
        parts = {w: pi_weight(state.r, w) for w in range(3, cap + 1)}
        state._r_parts = {w: p for w, p in parts.items() if not p.is_zero()}
    r_parts = state._r_parts
    cached = state._section_cache.get(f)
    if cached is None:
        cached = [0, {0: WeylForm.from_jet(geom, cap, f)}]
        state._section_cache[f] = cached
    filled, parts = cached
    for s in range(filled, top):
        if s in parts:
            update = nabla(parts[s], geom)
        else:
            update = WeylForm.zero(geom, cap)
        comm = None
        for w, rp in r_parts.items():
            s2 = s + 2 - w
            # the weight-0 part is a plain scalar and commutes with r
            if s2 and s2 in parts:
                c = graded_commutator(rp, parts[s2])
                comm = c if comm is None else comm + c
        if comm is not None:
            update = update + mul_i_divide_hbar(comm)
        nxt = pi_weight(op_delta_inv(update), s + 1)
        if not nxt.is_zero():
            parts[s + 1] = nxt
    cached[0] = max(filled, top)
    out = parts[0]
    for s in range(1, top + 1):
        if s in parts:
            out = out + parts[s]
    return out


def section_defect(section, state):
    """Apply the flat connection to a section; zero on trusted weights."""
    geom = state.geometry
    d = nabla(section, geom) - op_delta(section) \
        + mul_i_divide_hbar(graded_commutator(state.r, section))
    out = {}
    for (k, alpha, beta), jet in d.terms.items():
        w = 2 * k + sum(alpha)
        if w >= state.section_cap:
            continue
        if not jet.is_zero():
            out[w] = out.get(w, 0) + 1
    return out


def star(f, g, state, n_hbar=None):
    """Star product through hbar^N: the symbol of f-hat o g-hat."""
    geom = state.geometry
    n = state.n_hbar if n_hbar is None else min(n_hbar, state.n_hbar)
    fhat = flat_section(f, state, 2 * n)
    ghat = flat_section(g, state, 2 * n)
    sym = symbol_mul(fhat, ghat, max_hbar=n)
    v = min(j.valid_order
            for j in list(sym.values()) + [f, g])
    zero = Jet.zero(geom.chart, v)
    return StarSeries([sym.get(k, zero) for k in range(n + 1)], n)


def moyal_reference(f, g, geom, n_hbar):
    """Direct exponential-bidifferential star product on a constant form.

    Independent of the flatness machinery; requires every entry of the
    inverse symplectic form to be a constant jet.
    """
    dim = geom.dim
    oinv = {}
    for a in range(dim):
        for b in range(dim):
            jet = geom.omega_inv[a][b]
            if jet.is_zero():
                continue
            if any(sum(key) for key in jet.coeffs):
                raise FedosovError(
                    "direct reference product needs a constant inverse form")
            oinv[(a, b)] = jet.constant_term
    half_i = CRat(0, Fraction(1, 2))
    level = [(f, g, CRat(1))]
    coeffs = []
    for m in range(n_hbar + 1):
        if m:
            nxt = []
            inv_m = Fraction(1, m)
            for (fj, gj, c) in level:
                for (a, b), om in oinv.items():
                    fa = fj.partial(a)
                    if fa.is_zero():
                        continue
                    gb = gj.partial(b)
                    if gb.is_zero():
                        continue
                    nxt.append((fa, gb, c * om * half_i * inv_m))
            level = nxt
        acc = None
        for (fj, gj, c) in level:
            t = fj * gj * c
            acc = t if acc is None else acc + t
        if acc is None:
            v = max(min(f.valid_order, g.valid_order) - m, 0)
            acc = Jet.zero(geom.chart, v)
        coeffs.append(acc)
    return StarSeries(coeffs, n_hbar)
