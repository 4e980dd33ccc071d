"""Polarized quantization operators and their star-product compatibility.

Wave functions are jets in the configuration block only (positions for
cotangent charts, the holomorphic block for complex charts).  Operators are
finite-order differential operators whose coefficients are polynomials in
hbar with jet coefficients; the half-form correction appears as the familiar
(1/4) g^{bc} d_a g_{bc} terms rather than as a separate object.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .jets import Chart, ChartMismatch, DomainError, Jet, JetError
from .rational import CRat, I
from .weyl import pi_weight, symbol_mul
from .geometry import christoffels, _curvature_of, poisson
from .fedosov import FedosovError, flat_section, moyal_reference, star


class QuantizationError(JetError):
    pass


# -- hbar-graded jet series ------------------------------------------------

class HbarSeries:
    """A polynomial in hbar with jet coefficients."""

    __slots__ = ("chart", "coeffs")

    def __init__(self, chart, coeffs):
        self.chart = chart
        self.coeffs = {k: j for k, j in coeffs.items() if not j.is_zero()}
        for k in self.coeffs:
            if k < 0:
                raise QuantizationError("negative hbar power")

    @classmethod
    def of(cls, jet, hbar_power=0):
        return cls(jet.chart, {hbar_power: jet})

    def is_zero(self):
        return not self.coeffs

    def get(self, k):
        return self.coeffs.get(k)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, j in other.coeffs.items():
            out[k] = out[k] + j if k in out else j
        return HbarSeries(self.chart, out)

    def __neg__(self):
        return HbarSeries(self.chart, {k: -j for k, j in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HbarSeries):
            out = {}
            for k1, j1 in self.coeffs.items():
                for k2, j2 in other.coeffs.items():
                    k = k1 + k2
                    t = j1 * j2
                    out[k] = out[k] + t if k in out else t
            return HbarSeries(self.chart, out)
        return HbarSeries(self.chart,
                          {k: j * other for k, j in self.coeffs.items()})

    def shift(self, delta):
        return HbarSeries(self.chart,
                          {k + delta: j for k, j in self.coeffs.items()})

    def agrees_with(self, other, jet_order=None):
        for k in set(self.coeffs) | set(other.coeffs):
            a = self.coeffs.get(k)
            b = other.coeffs.get(k)
            if a is None:
                a = Jet(b.chart, b.max_order, b.valid_order, {})
            if b is None:
                b = Jet(a.chart, a.max_order, a.valid_order, {})
            if not a.agrees_with(b, jet_order):
                return False
        return True

    def __repr__(self):
        return f"HbarSeries({sorted(self.coeffs)})"


# -- differential operators ------------------------------------------------

class DiffOp:
    """Finite-order operator sum_I c_I(hbar, x) d^I on configuration jets."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart, terms):
        self.chart = chart
        clean = {}
        for idx, series in terms.items():
            if len(idx) != chart.dim:
                raise QuantizationError("derivative index does not match chart")
            if not series.is_zero():
                clean[tuple(idx)] = series
        self.terms = clean

    @classmethod
    def zero(cls, chart):
        return cls(chart, {})

    @classmethod
    def mult(cls, jet, hbar_power=0):
        z = (0,) * jet.chart.dim
        return cls(jet.chart, {z: HbarSeries.of(jet, hbar_power)})

    @classmethod
    def deriv(cls, chart, i, coeff, hbar_power=0):
        e = tuple(1 if k == i else 0 for k in range(chart.dim))
        return cls(chart, {e: HbarSeries.of(coeff, hbar_power)})

    @classmethod
    def identity(cls, chart, order):
        return cls.mult(Jet.constant(chart, 1, order))

    @property
    def max_hbar(self):
        return max((k for s in self.terms.values() for k in s.coeffs),
                   default=0)

    def order(self):
        return max((sum(idx) for idx in self.terms), default=0)

    def __add__(self, other):
        if self.chart != other.chart:
            raise ChartMismatch("operators on different charts")
        out = dict(self.terms)
        for idx, s in other.terms.items():
            out[idx] = out[idx] + s if idx in out else s
        return DiffOp(self.chart, out)

    def __neg__(self):
        return DiffOp(self.chart, {i: -s for i, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        return DiffOp(self.chart,
                      {i: s * scalar for i, s in self.terms.items()})

    def shift_hbar(self, delta):
        return DiffOp(self.chart,
                      {i: s.shift(delta) for i, s in self.terms.items()})

    def truncate_hbar(self, n):
        """Drop every coefficient beyond hbar^n."""
        out = {}
        for idx, s in self.terms.items():
            kept = {k: j for k, j in s.coeffs.items() if k <= n}
            if kept:
                out[idx] = HbarSeries(self.chart, kept)
        return DiffOp(self.chart, out)

    def agrees_with(self, other, jet_order=None):
        if self.chart != other.chart:
            return False
        for idx in set(self.terms) | set(other.terms):
            a = self.terms.get(idx)
            b = other.terms.get(idx)
            if a is None:
                a = HbarSeries(self.chart, {})
            if b is None:
                b = HbarSeries(self.chart, {})
            if not a.agrees_with(b, jet_order):
                return False
        return True

    def __repr__(self):
        return f"DiffOp(order {self.order()}, {len(self.terms)} terms)"


def _iter_partial(jet, idx):
    out = jet
    for i, e in enumerate(idx):
        for _ in range(e):
            out = out.partial(i)
    return out


def diffop_apply(op, psi):
    """Apply to a configuration jet; returns an hbar series of jets."""
    if psi.chart != op.chart:
        raise ChartMismatch("wave function lives on a different chart")
    acc = HbarSeries(op.chart, {})
    for idx, series in op.terms.items():
        d = _iter_partial(psi, idx)
        if d.is_zero():
            continue
        acc = acc + series * HbarSeries.of(d)
    return acc


def diffop_compose(a, b):
    """Operator product a(b(psi)), expanding coefficients by Leibniz."""
    if a.chart != b.chart:
        raise ChartMismatch("operators on different charts")
    dim = a.chart.dim
    terms = {}

    def add(idx, series):
        idx = tuple(idx)
        terms[idx] = terms[idx] + series if idx in terms else series

    for ia, sa in a.terms.items():
        for ib, sb in b.terms.items():
            # d^{ia} (c_b d^{ib} psi): distribute each of the ia derivatives
            # between c_b and psi
            for split in _splits(ia):
                onto_coeff, onto_psi = split
                mult = 1
                for k in range(dim):
                    mult *= comb(ia[k], onto_coeff[k])
                coeff = {k: _iter_partial(j, onto_coeff)
                         for k, j in sb.coeffs.items()}
                coeff = HbarSeries(a.chart, coeff)
                if coeff.is_zero():
                    continue
                idx = tuple(x + y for x, y in zip(onto_psi, ib))
                add(idx, sa * coeff * Fraction(mult))
    return DiffOp(a.chart, terms)


def _splits(idx):
    """All ways to split a multi-index into two parts."""
    if not idx:
        yield (), ()
        return
    head, tail = idx[0], idx[1:]
    for rest_a, rest_b in _splits(tail):
        for k in range(head + 1):
            yield (k,) + rest_a, (head - k,) + rest_b


# -- observable decomposition ----------------------------------------------

def config_chart(geom):
    """The configuration sub-chart (first block) of a phase-space chart."""
    n = geom.n
    return Chart(geom.chart.names[:n], geom.chart.base[:n])


def fiber_decompose(f, geom):
    """Split a jet into {fiber multidegree: configuration jet}.

    A piece of fiber degree d collects the total-degree k + d coefficients
    of f at base degree k, so its certified order drops by d: the top base
    degrees of a high-fiber-degree piece fall outside f's truncation.
    """
    n = geom.n
    sub = config_chart(geom)
    pieces = {}
    for alpha, c in f.coeffs.items():
        fib = tuple(alpha[n:])
        base = tuple(alpha[:n])
        pieces.setdefault(fib, {})[base] = c
    return {fib: Jet(sub, f.max_order,
                     max(f.valid_order - sum(fib), 0),
                     {b: c for b, c in coeffs.items()
                      if sum(b) <= f.valid_order - sum(fib)})
            for fib, coeffs in pieces.items()}


def _fiber_monomial(geom, fib, order):
    out = Jet.constant(geom.chart, 1, order)
    for a, e in enumerate(fib):
        for _ in range(e):
            out = out.mul_variable(geom.n + a)
    return out


def _attach_fiber(c_full, geom, fib):
    """c(q) p^I as an exact product; keeps c's certified order per degree."""
    out = c_full
    for a, e in enumerate(fib):
        for _ in range(e):
            out = out.mul_variable(geom.n + a)
    return out


def _embed_config(jet, geom):
    return jet.embed(geom.chart, tuple(range(geom.n)))


# -- vertical-polarization operators ---------------------------------------

def base_metric(geom):
    """Metric and inverse restricted to the configuration chart."""
    if geom.kind == "flat":
        n = geom.n
        sub = config_chart(geom)
        eye = [[Jet.constant(sub, 1 if a == b else 0, geom.order)
                for b in range(n)] for a in range(n)]
        return eye, [row[:] for row in eye]
    if geom.kind != "cotangent":
        raise QuantizationError("geometry has no base metric")
    n = geom.n
    idx = tuple(range(n))
    g = [[geom.source["metric"][a][b].restrict(idx) for b in range(n)]
         for a in range(n)]
    ginv = [[geom.source["metric_inv"][a][b].restrict(idx) for b in range(n)]
            for a in range(n)]
    return g, ginv


def _log_vol_gradient(g, ginv, a):
    """(1/2) g^{bc} d_a g_{bc}, the exact gradient of log sqrt(det g)."""
    n = len(g)
    acc = None
    for b in range(n):
        for c in range(n):
            t = ginv[b][c] * g[b][c].partial(a)
            acc = t if acc is None else acc + t
    return acc * Fraction(1, 2)


def gq_cotangent(f, geom):
    """Quantize an observable affine in the momenta.

    For f = a^j(q) p_j + b(q) the operator is
    -i hbar (a^j d_j + (1/2) div a) + b, with the divergence taken with
    respect to the metric volume; the b term carries no hbar factor.
    """
    if geom.kind not in ("cotangent", "flat"):
        raise QuantizationError("vertical polarization needs a cotangent "
                                "or flat geometry")
    n = geom.n
    pieces = fiber_decompose(f, geom)
    zero_fib = (0,) * n
    for fib in pieces:
        if sum(fib) > 1:
            raise DomainError("observable is not affine in the momenta")
    sub = config_chart(geom)
    b = pieces.get(zero_fib, Jet.zero(sub, f.valid_order))
    a_vec = []
    for j in range(n):
        e = tuple(1 if k == j else 0 for k in range(n))
        a_vec.append(pieces.get(e, Jet.zero(sub, f.valid_order)))

    if geom.kind == "cotangent":
        g, ginv = base_metric(geom)
    else:
        g = ginv = None
    div = None
    for j in range(n):
        if a_vec[j].is_zero():
            continue
        t = a_vec[j].partial(j)
        if g is not None:
            t = t + a_vec[j] * _log_vol_gradient(g, ginv, j)
        div = t if div is None else div + t

    terms = {}
    zero_idx = (0,) * n
    for j in range(n):
        if a_vec[j].is_zero():
            continue
        e = tuple(1 if k == j else 0 for k in range(n))
        terms[e] = HbarSeries.of(a_vec[j] * (-I), 1)
    order0 = HbarSeries(sub, {})
    if div is not None:
        order0 = order0 + HbarSeries.of(div * (-I) * Fraction(1, 2), 1)
    if not b.is_zero():
        order0 = order0 + HbarSeries.of(b, 0)
    if not order0.is_zero():
        terms[zero_idx] = order0
    return DiffOp(sub, terms)


# -- holomorphic-polarization operators ------------------------------------

def gq_kaehler(f, geom):
    """Quantize an observable affine in the dK block.

    Writes f = u^a(z) d_a K + v(z) with holomorphic u, v and returns
    hbar (u^a d_a + (1/2) d_a u^a) + v on holomorphic jets.
    """
    if geom.kind != "kaehler":
        raise QuantizationError("holomorphic polarization needs a complex "
                                "chart geometry")
    n = geom.n
    a_inv = geom.source["A_inv"]
    potential = geom.source["potential"]
    # u^a = (d_bbar f) A^{bbar a}
    u = []
    for a in range(n):
        acc = None
        for b in range(n):
            t = f.partial(n + b) * a_inv[b][a]
            acc = t if acc is None else acc + t
        u.append(acc if acc is not None else Jet.zero(geom.chart, f.valid_order))
    v = f
    for a in range(n):
        if not u[a].is_zero():
            v = v - u[a] * potential.partial(a)

    idx = tuple(range(n))
    sub = Chart(geom.chart.names[:n], geom.chart.base[:n])
    try:
        u_sub = [j.restrict(idx) for j in u]
        v_sub = v.restrict(idx)
    except DomainError:
        raise DomainError(
            "observable is not affine in the dK block with holomorphic "
            "coefficients") from None

    terms = {}
    zero_idx = (0,) * n
    order0 = HbarSeries(sub, {})
    for a in range(n):
        if u_sub[a].is_zero():
            continue
        e = tuple(1 if k == a else 0 for k in range(n))
        terms[e] = HbarSeries.of(u_sub[a], 1)
        order0 = order0 + HbarSeries.of(
            u_sub[a].partial(a) * Fraction(1, 2), 1)
    if not v_sub.is_zero():
        order0 = order0 + HbarSeries.of(v_sub, 0)
    if not order0.is_zero():
        terms[zero_idx] = order0
    return DiffOp(sub, terms)


# -- the star-homomorphism extension ---------------------------------------

def p_degree(fib):
    return sum(fib)


def rho_extend(f, state, geom=None, split="first"):
    """Extend quantization to momentum polynomials through star factorization.

    A monomial c(q) p^I is split as (c p_{i1}) * p^{I - e_{i1}}; the star
    product of the factors equals the monomial plus hbar corrections of
    lower momentum degree, so the operator is defined recursively by
    rho(u) rho(w) minus the quantized corrections.  Requires the star
    product's homogeneity in (p, hbar), which holds for flat charts and
    lifted cotangent connections.
    """
    geom = state.geometry if geom is None else geom
    if geom.kind not in ("flat", "cotangent"):
        raise QuantizationError(
            "star factorization is supported on flat and cotangent "
            "geometries only")
    if split not in ("first", "last"):
        raise QuantizationError(f"unknown split rule {split!r}")
    pieces = fiber_decompose(f, geom)
    deg = max((p_degree(fib) for fib in pieces), default=0)
    if deg > state.n_hbar:
        raise FedosovError(
            f"momentum degree {deg} needs a state certified through "
            f"hbar^{deg}")
    sub = config_chart(geom)
    out = DiffOp.zero(sub)
    for fib, c in pieces.items():
        out = out + _rho_monomial(c, fib, state, geom, split)
    return out


def _rho_monomial(c, fib, state, geom, split):
    n = geom.n
    sub = config_chart(geom)
    d = p_degree(fib)
    if d == 0:
        return DiffOp.mult(c)
    full_c = _embed_config(c, geom)
    if d == 1:
        return gq_cotangent(_attach_fiber(full_c, geom, fib), geom)
    nz = [a for a, e in enumerate(fib) if e]
    i1 = nz[0] if split == "first" else nz[-1]
    rest = list(fib)
    rest[i1] -= 1
    rest = tuple(rest)
    order = geom.order
    u = full_c.mul_variable(n + i1)
    w = _fiber_monomial(geom, rest, order)
    s = star(u, w, state, n_hbar=d)
    op = diffop_compose(gq_cotangent(u, geom),
                        _rho_monomial(Jet.constant(sub, 1, order), rest,
                                      state, geom, split))
    for j in range(1, d + 1):
        sj = s.coefficient(j)
        if sj.is_zero():
            continue
        sub_pieces = fiber_decompose(sj, geom)
        if max(p_degree(fb) for fb in sub_pieces) >= d:
            raise QuantizationError(
                "star correction does not lower the momentum degree; the "
                "connection is not homogeneous")
        corr = DiffOp.zero(sub)
        for fb, cc in sub_pieces.items():
            corr = corr + _rho_monomial(cc, fb, state, geom, split)
        op = op - corr.shift_hbar(j)
    return op


# -- independent oracles for the kinetic operator --------------------------

def laplace_beltrami(geom):
    """Delta = g^{ab} d_a d_b + (d_a g^{ab} + g^{ab} (1/2) g^{kl} d_a g_kl) d_b.

    Built directly from the metric jets; no star-product machinery.
    """
    g, ginv = base_metric(geom)
    n = geom.n
    sub = config_chart(geom)
    terms = {}

    def add(idx, jet):
        if jet.is_zero():
            return
        s = HbarSeries.of(jet)
        terms[idx] = terms[idx] + s if idx in terms else s

    for a in range(n):
        for b in range(n):
            idx = [0] * n
            idx[a] += 1
            idx[b] += 1
            add(tuple(idx), ginv[a][b])
    for b in range(n):
        acc = None
        for a in range(n):
            t = ginv[a][b].partial(a) \
                + ginv[a][b] * _log_vol_gradient(g, ginv, a)
            acc = t if acc is None else acc + t
        e = tuple(1 if k == b else 0 for k in range(n))
        if acc is not None and not acc.is_zero():
            terms[e] = terms[e] + HbarSeries.of(acc) if e in terms \
                else HbarSeries.of(acc)
    return DiffOp(sub, terms)


def scalar_curvature(geom):
    """g^{jl} R^i_{jil} of the base metric, from the metric jets alone."""
    g, ginv = base_metric(geom)
    n = geom.n
    gamma = christoffels(g, ginv)
    riem = _curvature_of(gamma, n, list(range(n)))
    sub = config_chart(geom)
    acc = Jet.zero(sub, min(e.valid_order for row in g for e in row) - 2)
    for j in range(n):
        for l in range(n):
            for i in range(n):
                r = riem.get((i, j, i, l))
                if r is not None:
                    acc = acc + ginv[j][l] * r
    return acc


def kinetic_energy_observable(geom):
    """g^{ab} p_a p_b as a jet on the phase-space chart."""
    n = geom.n
    order = geom.order
    acc = None
    for a in range(n):
        for b in range(n):
            gab = geom.source["metric_inv"][a][b]
            t = gab.mul_variable(n + a).mul_variable(n + b)
            acc = t if acc is None else acc + t
    return acc


def kinetic_alpha(geom, state):
    """The curvature coefficient in rho(g^{ab} p_a p_b) = -h^2 (Delta - a R).

    Delta and the scalar curvature come from independent metric-jet oracles;
    the residual after removing -h^2 Delta must be a pure hbar^2
    multiplication operator proportional to the scalar curvature.
    """
    ke = kinetic_energy_observable(geom)
    op = rho_extend(ke, state, geom)
    delta = laplace_beltrami(geom).shift_hbar(2).scale(-1)
    resid = op - delta
    n = geom.n
    zero_idx = (0,) * n

    def certified(jet):
        # keep only coefficients within the jet's certified order
        return Jet(jet.chart, jet.max_order, jet.valid_order,
                   {a: c for a, c in jet.coeffs.items()
                    if sum(a) <= jet.valid_order})

    for idx, series in resid.terms.items():
        for k, jet in series.coeffs.items():
            if certified(jet).is_zero():
                continue
            if idx != zero_idx:
                raise QuantizationError(
                    f"kinetic residual contains a derivative term at {idx}")
            if k != 2:
                raise QuantizationError(
                    f"kinetic residual contains an hbar^{k} term")
    series = resid.terms.get(zero_idx)
    curv = scalar_curvature(geom)
    if series is None or all(certified(j).is_zero()
                             for j in series.coeffs.values()):
        if curv.is_zero():
            return None  # flat metric: coefficient undetermined
        raise QuantizationError("kinetic residual vanishes but the scalar "
                                "curvature does not")
    jet = certified(series.coeffs[2])
    shared = min(jet.valid_order, curv.valid_order)
    pivot = None
    for a, c in sorted(curv.coeffs.items(), key=lambda kv: sum(kv[0])):
        if sum(a) <= shared and c:
            pivot = a
            break
    if pivot is None:
        raise QuantizationError("scalar curvature vanishes through the "
                                "certified order; cannot normalize")
    alpha = jet.coeffs.get(pivot, CRat(0)) / curv.coeffs[pivot]
    if not alpha.is_real:
        raise QuantizationError("curvature coefficient is not real")
    if not jet.agrees_with(curv * alpha.re):
        raise QuantizationError(
            "kinetic residual is not proportional to the scalar curvature")
    return alpha.re


# -- compatibility checkers ------------------------------------------------

@dataclass
class CheckEntry:
    name: str
    orders: tuple
    passed: bool
    location: str = ""


class CompatReport:
    def __init__(self, entries=None):
        self.entries = list(entries or [])

    def add(self, name, orders, passed, location=""):
        self.entries.append(CheckEntry(name, tuple(orders), passed, location))

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def __str__(self):
        lines = []
        for e in self.entries:
            s = "ok" if e.passed else "FAIL"
            loc = f" ({e.location})" if e.location and not e.passed else ""
            lines.append(f"  [{s}] {e.name}{loc}")
        return "\n".join(lines)


def _coeff_zero(series, k):
    return series.coefficient(k).is_zero()


def check_kompi(state, samples, report=None):
    """Star-product conditions for vertical-polarization compatibility.

    For polarized f, g (momentum-free) and h affine in the momenta:
    f*g = fg exactly, and f*h, h*f close at first order in hbar.
    """
    geom = state.geometry
    rep = report if report is not None else CompatReport()
    nmax = state.n_hbar
    for tag, (f, g, h) in enumerate(samples):
        s = star(f, g, state)
        ok = s.coefficient(0).agrees_with(f * g) and all(
            _coeff_zero(s, k) for k in range(1, nmax + 1))
        rep.add("polarized f*g = fg", range(nmax + 1), ok, f"sample {tag}")
        for (x, y, nm) in ((f, h, "f*h"), (h, f, "h*f")):
            s = star(x, y, state)
            pb = poisson(x, y, geom) * CRat(0, Fraction(1, 2))
            ok = (s.coefficient(0).agrees_with(x * y)
                  and s.coefficient(1).agrees_with(pb)
                  and all(_coeff_zero(s, k) for k in range(2, nmax + 1)))
            rep.add(f"{nm} closes at first order", range(nmax + 1), ok,
                    f"sample {tag}")
    return rep


def p_euler(f, geom):
    """p_i df/dp_i, the fiber-scaling derivation on a phase-space jet."""
    n = geom.n
    acc = None
    for i in range(n):
        d = f.partial(n + i)
        if d.is_zero():
            continue
        t = d.mul_variable(n + i)
        acc = t if acc is None else acc + t
    if acc is None:
        return Jet.zero(geom.chart, max(f.valid_order - 1, 0))
    return acc


def check_homogeneity(state, samples, report=None):
    """H = p_i d/dp_i + hbar d/dhbar is a derivation of the star product."""
    geom = state.geometry
    rep = report if report is not None else CompatReport()
    nmax = state.n_hbar
    for tag, (f, g) in enumerate(samples):
        s = star(f, g, state)
        s1 = star(p_euler(f, geom), g, state)
        s2 = star(f, p_euler(g, geom), state)
        ok = True
        where = ""
        for k in range(nmax + 1):
            lhs = p_euler(s.coefficient(k), geom) + s.coefficient(k) * k
            rhs = s1.coefficient(k) + s2.coefficient(k)
            if not lhs.agrees_with(rhs):
                ok, where = False, f"sample {tag}, hbar^{k}"
                break
        rep.add("H is a star derivation", range(nmax + 1), ok, where)
    return rep


def kaehler_third_order_jet(geom, a, m):
    """(1/64) R^a_{b c dbar} R_{m nbar k lbar} A^{dbar k} A^{nbar b} A^{lbar c}.

    The common magnitude of the two cancelling third-order contributions to
    z^a * (-i d_m K).
    """
    n = geom.n
    curv = geom.curvature()
    a_inv = geom.source["A_inv"]
    zero = geom.zero_jet()
    acc = None
    for b in range(n):
        for c in range(n):
            for d in range(n):
                r1 = curv.up(a, b, c, n + d, zero)
                if r1.is_zero():
                    continue
                for k in range(n):
                    for l in range(n):
                        for nn in range(n):
                            r2 = curv.low(m, n + nn, k, n + l, zero)
                            if r2.is_zero():
                                continue
                            t = (r1 * r2 * a_inv[d][k] * a_inv[nn][b]
                                 * a_inv[l][c])
                            acc = t if acc is None else acc + t
    if acc is None:
        return zero
    return acc * Fraction(1, 64)


def check_kaehler_orders(state, samples=None, report=None):
    """Order-by-order behaviour of the star product on a complex chart.

    For each linear holomorphic f = z^a and each h = -i d_m K: the hbar^2
    and hbar^3 coefficients vanish, with the two third-order contributions
    (section weights 3+3 and 5+1 / 1+5) individually matching the curvature
    contraction that cancels between them; holomorphic pairs multiply
    pointwise.
    """
    geom = state.geometry
    if geom.kind != "kaehler":
        raise QuantizationError("complex-chart geometry required")
    rep = report if report is not None else CompatReport()
    n = geom.n
    order = geom.order
    potential = geom.source["potential"]
    nmax = state.n_hbar
    for a in range(n):
        f = Jet.variable(geom.chart, a, order)
        for m in range(n):
            h = potential.partial(m) * (-I)
            s = star(f, h, state)
            pb = poisson(f, h, geom) * CRat(0, Fraction(1, 2))
            ok = (s.coefficient(0).agrees_with(f * h)
                  and s.coefficient(1).agrees_with(pb)
                  and all(_coeff_zero(s, k) for k in range(2, nmax + 1)))
            rep.add("z^a * (-i dK) closes at first order", range(nmax + 1),
                    ok, f"(a,m)=({a},{m})")
            if nmax >= 3:
                fhat = flat_section(f, state)
                hhat = flat_section(h, state)
                contraction = kaehler_third_order_jet(geom, a, m)
                c33 = symbol_mul(pi_weight(fhat, 3), pi_weight(hhat, 3),
                                 max_hbar=3).get(3)
                c51 = symbol_mul(pi_weight(fhat, 5), pi_weight(hhat, 1),
                                 max_hbar=3).get(3)
                c15 = symbol_mul(pi_weight(fhat, 1), pi_weight(hhat, 5),
                                 max_hbar=3).get(3)
                zero = geom.zero_jet()
                c33 = c33 if c33 is not None else zero
                cross = (c51 if c51 is not None else zero) \
                    + (c15 if c15 is not None else zero)
                rep.add("weight (3,3) third-order contribution",
                        (3,), c33.agrees_with(-contraction),
                        f"(a,m)=({a},{m})")
                rep.add("weight (5,1)+(1,5) third-order contribution",
                        (3,), cross.agrees_with(contraction),
                        f"(a,m)=({a},{m})")
    for tag, (f, g) in enumerate(samples or []):
        s = star(f, g, state)
        ok = s.coefficient(0).agrees_with(f * g) and all(
            _coeff_zero(s, k) for k in range(1, nmax + 1))
        rep.add("holomorphic f*g = fg", range(nmax + 1), ok, f"sample {tag}")
    return rep


# -- flat-chart representations --------------------------------------------

def _mccoy(chart, order, var, m, k, base_op):
    """Symmetrized operator for x^m y^k with [x, y-op] canonical.

    (1/2^m) sum_j C(m,j) x^j (y-op)^k x^(m-j), the standard fully
    symmetrized ordering for a single conjugate pair.
    """
    x = Jet.variable(chart, var, order)
    xj = DiffOp.identity(chart, order)
    powers = [xj]
    for _ in range(m):
        powers.append(diffop_compose(DiffOp.mult(x), powers[-1]))
    opk = DiffOp.identity(chart, order)
    for _ in range(k):
        opk = diffop_compose(base_op, opk)
    acc = None
    for j in range(m + 1):
        t = diffop_compose(powers[j],
                           diffop_compose(opk, powers[m - j]))
        t = t.scale(Fraction(comb(m, j), 2 ** m))
        acc = t if acc is None else acc + t
    return acc


def weyl_quantize(geom, fib_coeffs, base_ops):
    """Symmetrized quantization of monomials q^beta p^I on a flat chart.

    ``base_ops[i]`` is the operator representing the i-th fiber variable;
    distinct coordinate pairs commute, so the symmetrization factorizes
    into per-pair symmetrized products.
    """
    n = geom.n
    sub = base_ops[0].chart
    order = geom.order
    out = None
    for (beta, fib), coeff in fib_coeffs.items():
        term = DiffOp.mult(Jet.constant(sub, coeff, order))
        for i in range(n):
            if beta[i] or fib[i]:
                term = diffop_compose(
                    term, _mccoy(sub, order, i, beta[i], fib[i],
                                 base_ops[i]))
        out = term if out is None else out + term
    return out if out is not None else DiffOp.zero(sub)


def flat_reps(n, n_hbar, samples, geom_real, geom_fock):
    """Position and Fock representations as star homomorphisms.

    ``samples`` is a list of monomial pairs given as (beta, fib)
    multi-indices; both representations are checked against the direct
    exponential product on their respective flat charts.
    """
    rep = CompatReport()
    order = geom_real.order

    def run(tag, geom, base_ops):
        sub = base_ops[0].chart
        for (mono1, mono2) in samples:
            f = _monomial_jet(geom, mono1)
            g = _monomial_jet(geom, mono2)
            of = weyl_quantize(geom, {mono1: CRat(1)}, base_ops)
            og = weyl_quantize(geom, {mono2: CRat(1)}, base_ops)
            lhs = diffop_compose(of, og)
            s = moyal_reference(f, g, geom, n_hbar)
            rhs = None
            for k in range(n_hbar + 1):
                ck = s.coefficient(k)
                if ck.is_zero():
                    continue
                t = weyl_quantize(geom, _as_monomials(ck, geom), base_ops)
                t = t.shift_hbar(k)
                rhs = t if rhs is None else rhs + t
            if rhs is None:
                rhs = DiffOp.zero(sub)
            ok = lhs.truncate_hbar(n_hbar).agrees_with(
                rhs.truncate_hbar(n_hbar))
            rep.add(f"{tag} homomorphism on monomials", range(n_hbar + 1),
                    ok, f"{mono1} x {mono2}")

    # position representation: q multiplies, p differentiates
    sub_r = config_chart(geom_real)
    base_r = [DiffOp.deriv(sub_r, i,
                           Jet.constant(sub_r, -I, order), 1)
              for i in range(n)]
    run("position", geom_real, base_r)

    # Fock representation: z multiplies, zbar = hbar d_z
    sub_f = Chart(geom_fock.chart.names[:n], geom_fock.chart.base[:n])
    base_f = [DiffOp.deriv(sub_f, i,
                           Jet.constant(sub_f, 1, order), 1)
              for i in range(n)]
    run("Fock", geom_fock, base_f)
    return rep


def _monomial_jet(geom, mono):
    beta, fib = mono
    order = geom.order
    out = Jet.constant(geom.chart, 1, order)
    for i, e in enumerate(beta):
        for _ in range(e):
            out = out.mul_variable(i)
    return _attach_fiber(out, geom, fib)


def _as_monomials(jet, geom):
    """Exact monomial expansion {(beta, fib): coefficient} of a jet."""
    n = geom.n
    base = geom.chart.base
    if any(b for b in base):
        raise QuantizationError("monomial expansion needs a centered chart")
    out = {}
    for alpha, c in jet.coeffs.items():
        out[(tuple(alpha[:n]), tuple(alpha[n:]))] = c
    return out
