"""Charts with symplectic structure and compatible connections.

Builders produce validated :class:`ChartGeometry` values for four chart
kinds: flat, Darboux (constant symplectic form, user connection), cotangent
lifts of a base metric, and complex charts built from a real potential.
The same downstream machinery consumes all of them; only the jets differ.

Index conventions, fixed once and verified by the validation suite:
  * coordinates are ordered (q^1..q^n, p_1..p_n); index a < n is a position,
    n + a the conjugate momentum (for complex charts: z then zbar),
  * omega_{n+i,i} = 1 = -omega_{i,n+i}, so {q, p} = omega^{ab} d_a q d_b p = 1,
  * omega_{ab} omega^{bc} = delta_a^c,
  * R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
                + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .jets import Chart, ChartMismatch, Jet, JetError
from .rational import CRat, I
from .weyl import WeylForm, _insert_left

KINDS = ("flat", "darboux", "cotangent", "kaehler")


class GeometryError(JetError):
    pass


class ValidationFailure(GeometryError):
    def __init__(self, report):
        super().__init__("geometry validation failed:\n" + str(report))
        self.report = report


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    fatal: bool = True


class ValidationReport:
    def __init__(self, checks):
        self.checks = list(checks)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.fatal)

    def __str__(self):
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else ("FAIL" if c.fatal else "mismatch")
            line = f"  [{status}] {c.name}"
            if c.detail and not c.passed:
                line += f": {c.detail}"
            lines.append(line)
        return "\n".join(lines)


class ChartGeometry:
    """A chart with symplectic form, inverse, and connection, all as jets.

    Treat instances as immutable after construction.
    """

    def __init__(self, kind, n, chart, order, omega, omega_inv, gamma,
                 source=None):
        if kind not in KINDS:
            raise GeometryError(f"unknown geometry kind {kind!r}")
        self.kind = kind
        self.n = n
        self.chart = chart
        self.order = order
        self.omega = tuple(tuple(row) for row in omega)
        self.omega_inv = tuple(tuple(row) for row in omega_inv)
        self.gamma = {k: v for k, v in gamma.items() if not v.is_zero()}
        self.source = dict(source or {})
        self.gamma_low = self._lower_gamma()
        self._cache = {}

    @property
    def dim(self):
        return 2 * self.n

    def _lower_gamma(self):
        low = {}
        for (u, a, b), G in self.gamma.items():
            for i in range(self.dim):
                om = self.omega[i][u]
                if om.is_zero():
                    continue
                key = (i, a, b)
                contrib = om * G
                low[key] = low[key] + contrib if key in low else contrib
        return {k: v for k, v in low.items() if not v.is_zero()}

    def gamma_at(self, u, a, b):
        return self.gamma.get((u, a, b), self.zero_jet())

    def zero_jet(self):
        return Jet.zero(self.chart, self.order)

    def const_jet(self, value):
        return Jet.constant(self.chart, value, self.order)

    def var_jet(self, i):
        return Jet.variable(self.chart, i, self.order)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ChartGeometry):
            return NotImplemented
        return (self.kind == other.kind and self.n == other.n
                and self.chart == other.chart and self.order == other.order
                and self.omega == other.omega and self.gamma == other.gamma)

    def __repr__(self):
        return f"ChartGeometry({self.kind}, n={self.n}, order={self.order})"

    # -- derived data (memoized) -----------------------------------------

    def curvature(self):
        if "curvature" not in self._cache:
            self._cache["curvature"] = curvature(self)
        return self._cache["curvature"]

    def rhat(self, degree_cap):
        key = ("rhat", degree_cap)
        if key not in self._cache:
            self._cache[key] = build_rhat(self, degree_cap)
        return self._cache[key]


@dataclass
class CurvatureData:
    r_up: dict      # (i, j, k, l) -> Jet, index i raised
    r_low: dict     # (i, j, k, l) -> Jet, all indices down

    def up(self, i, j, k, l, zero):
        return self.r_up.get((i, j, k, l), zero)

    def low(self, i, j, k, l, zero):
        return self.r_low.get((i, j, k, l), zero)


# -- helpers ---------------------------------------------------------------

def invert_jet_matrix(m):
    """Inverse of a square matrix of jets by Gaussian elimination."""
    n = len(m)
    a = [list(row) for row in m]
    chart = a[0][0].chart
    order = min(e.valid_order for row in a for e in row)
    eye = [[Jet.constant(chart, 1 if i == j else 0, order)
            for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n)
                    if a[r][col].constant_term), None)
        if piv is None:
            raise GeometryError("matrix of jets is singular at the base point")
        a[col], a[piv] = a[piv], a[col]
        eye[col], eye[piv] = eye[piv], eye[col]
        inv = a[col][col].invert()
        a[col] = [e * inv for e in a[col]]
        eye[col] = [e * inv for e in eye[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            eye[r] = [x - f * y for x, y in zip(eye[r], eye[col])]
    return [tuple(row) for row in eye]


def _darboux_omega(chart, n, order):
    zero = Jet.zero(chart, order)
    one = Jet.constant(chart, 1, order)
    omega = [[zero] * (2 * n) for _ in range(2 * n)]
    omega_inv = [[zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        omega[n + i][i] = one
        omega[i][n + i] = -one
        omega_inv[i][n + i] = one
        omega_inv[n + i][i] = -one
    return omega, omega_inv


def phase_chart(n, base_q=None, prefixes=("q", "p")):
    base_q = tuple(base_q or (0,) * n)
    names = tuple(f"{prefixes[0]}{i+1}" for i in range(n)) + \
        tuple(f"{prefixes[1]}{i+1}" for i in range(n))
    base = base_q + (0,) * n
    return Chart(names, base)


# -- builders --------------------------------------------------------------

def build_flat(n, order, validate=True):
    """Standard symplectic vector space: constant omega, zero connection."""
    chart = phase_chart(n)
    omega, omega_inv = _darboux_omega(chart, n, order)
    geom = ChartGeometry("flat", n, chart, order, omega, omega_inv, {})
    if validate:
        _require_valid(geom)
    return geom


def build_darboux(n, gamma_low, order, base_q=None, validate=True):
    """Constant Darboux omega with a user-supplied lowered connection.

    ``gamma_low`` maps (i, j, k) to jets for the fully lowered Christoffel
    data; total symmetry is validated.  The raised coefficients follow by
    contraction with omega^{-1}.
    """
    chart = phase_chart(n, base_q)
    omega, omega_inv = _darboux_omega(chart, n, order)
    dim = 2 * n
    gl = {}
    for (i, j, k), jet in gamma_low.items():
        if not jet.is_zero():
            gl[(i, j, k)] = jet
    gamma = {}
    for (i, j, k), jet in gl.items():
        for u in range(dim):
            om = omega_inv[u][i]
            if om.is_zero():
                continue
            key = (u, j, k)
            contrib = om * jet
            gamma[key] = gamma[key] + contrib if key in gamma else contrib
    geom = ChartGeometry("darboux", n, chart, order, omega, omega_inv, gamma)
    if validate:
        _require_valid(geom)
    return geom


def christoffels(metric, metric_inv, chart_indices=None):
    """Levi-Civita symbols of a metric given as a jet matrix."""
    n = len(metric)
    idx = chart_indices or range(n)
    out = {}
    half = Fraction(1, 2)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = None
                for l in range(n):
                    term = (metric[l][i].partial(idx[j])
                            + metric[l][j].partial(idx[i])
                            - metric[i][j].partial(idx[l])) * metric_inv[k][l]
                    acc = term if acc is None else acc + term
                acc = acc * half
                if not acc.is_zero():
                    out[(k, i, j)] = acc
                    if i != j:
                        out[(k, j, i)] = acc
    return out


def _curvature_of(gamma, dim, partial_idx):
    """R^i_{jkl} from raised Christoffel data."""
    out = {}
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(k + 1, dim):
                    acc = None

                    def addto(acc, term):
                        return term if acc is None else acc + term

                    g = gamma.get((i, l, j))
                    if g is not None:
                        acc = addto(acc, g.partial(partial_idx[k]))
                    g = gamma.get((i, k, j))
                    if g is not None:
                        acc = addto(acc, -g.partial(partial_idx[l]))
                    for m in range(dim):
                        g1 = gamma.get((i, k, m))
                        g2 = gamma.get((m, l, j))
                        if g1 is not None and g2 is not None:
                            acc = addto(acc, g1 * g2)
                        g1 = gamma.get((i, l, m))
                        g2 = gamma.get((m, k, j))
                        if g1 is not None and g2 is not None:
                            acc = addto(acc, -(g1 * g2))
                    if acc is not None and not acc.is_zero():
                        out[(i, j, k, l)] = acc
                        out[(i, j, l, k)] = -acc
    return out


def lift_cotangent(metric, order, validate=True):
    """Lift the Levi-Civita connection of a base metric to phase space.

    ``metric`` is an n x n matrix of jets on a base chart in the position
    variables only.  The result is a 2n-chart with Darboux omega whose
    connection is torsion-free, symplectic, and reproduces the base
    connection on position indices; its momentum-valued block is exactly
    linear in p.
    """
    n = len(metric)
    base_chart = metric[0][0].chart
    if base_chart.dim != n:
        raise GeometryError("metric must live on an n-variable base chart")
    chart = Chart(base_chart.names + tuple(f"p{i+1}" for i in range(n)),
                  base_chart.base + (CRat(0),) * n)
    emb = tuple(range(n))

    ginv_base = invert_jet_matrix(metric)
    gt_base = christoffels(metric, ginv_base)
    rt_base = _curvature_of(gt_base, n, list(range(n)))

    def up(jet):
        return jet.embed(chart, emb)

    g_full = [[up(e) for e in row] for row in metric]
    ginv_full = [[up(e) for e in row] for row in ginv_base]
    gt = {k: up(v) for k, v in gt_base.items()}
    rt = {k: up(v) for k, v in rt_base.items()}

    omega, omega_inv = _darboux_omega(chart, n, order)
    zero = Jet.zero(chart, order)
    gamma = {}

    def gt_at(k, i, j):
        return gt.get((k, i, j), zero)

    for (k, i, j), jet in gt.items():
        gamma[(k, i, j)] = jet
    # Gamma with a momentum-valued upper index and one momentum lower index
    for a in range(n):
        for b in range(n):
            for c in range(n):
                val = gt.get((c, a, b))
                if val is None:
                    continue
                gamma[(n + a, b, n + c)] = -val
                gamma[(n + a, n + c, b)] = -val
    # p-linear block, cyclically symmetrized over (i, j, k)
    third = Fraction(1, 3)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = None
                for a in range(n):
                    pa = Jet.variable(chart, n + a, order)
                    inner = None
                    for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
                        t = None
                        for l in range(n):
                            prod = gt_at(a, y, l) * gt_at(l, z, x)
                            t = prod if t is None else t + prod
                        t = (t * 2) if t is not None else zero
                        d = gt.get((a, z, x))
                        if d is not None:
                            t = t - d.partial(y)
                        inner = t if inner is None else inner + t
                    if inner is not None and not inner.is_zero():
                        contrib = pa * inner
                        acc = contrib if acc is None else acc + contrib
                if acc is not None:
                    acc = acc * third
                    if not acc.is_zero():
                        gamma[(n + k, i, j)] = acc
                        if i != j:
                            gamma[(n + k, j, i)] = acc
    source = {"metric": tuple(tuple(r) for r in g_full),
              "metric_inv": tuple(tuple(r) for r in ginv_full),
              "gamma_base": gt,
              "curvature_base": rt}
    geom = ChartGeometry("cotangent", n, chart, order, omega, omega_inv,
                         gamma, source)
    if validate:
        _require_valid(geom)
    return geom


def build_kaehler(potential, order, validate=True):
    """Geometry of a complex chart from a real potential jet.

    The chart must carry a conjugation pairing (z-block first, zbar-block
    second); the potential must be real under it and have an invertible
    mixed Hessian at the base point.
    """
    chart = potential.chart
    if chart.conj is None:
        raise GeometryError("potential must live on a chart with conjugation")
    dim = chart.dim
    n = dim // 2
    for i in range(n):
        if chart.conj[i] != n + i:
            raise GeometryError("chart conjugation must pair i <-> n+i")
    if not potential.conjugate().agrees_with(potential):
        raise GeometryError("potential is not real under conjugation")

    a_mat = [[potential.partial(j).partial(n + k) for k in range(n)]
             for j in range(n)]
    a_inv = invert_jet_matrix(a_mat)   # a_inv[k][l] = A^{kbar l}

    zero = Jet.zero(chart, order)
    omega = [[zero] * dim for _ in range(dim)]
    omega_inv = [[zero] * dim for _ in range(dim)]
    for j in range(n):
        for k in range(n):
            omega[j][n + k] = a_mat[j][k] * I
            omega[n + k][j] = -(a_mat[j][k] * I)
            omega_inv[j][n + k] = a_inv[k][j] * I
            omega_inv[n + k][j] = -(a_inv[k][j] * I)

    gamma = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = None
                for l in range(n):
                    term = a_inv[l][k] * a_mat[i][l].partial(j)
                    acc = term if acc is None else acc + term
                if acc is not None and not acc.is_zero():
                    gamma[(k, i, j)] = acc
                    if i != j:
                        gamma[(k, j, i)] = acc
                conj = acc.conjugate() if acc is not None else None
                if conj is not None and not conj.is_zero():
                    gamma[(n + k, n + i, n + j)] = conj
                    if i != j:
                        gamma[(n + k, n + j, n + i)] = conj
    source = {"potential": potential,
              "A": tuple(tuple(r) for r in a_mat),
              "A_inv": tuple(tuple(r) for r in a_inv)}
    geom = ChartGeometry("kaehler", n, chart, order, omega, omega_inv,
                         gamma, source)
    if validate:
        _require_valid(geom)
    return geom


def complex_chart(n, base_z=None):
    """Chart (z^1..z^n, zbar^1..zbar^n) with conjugation pairing."""
    base_z = tuple(CRat(b) if not isinstance(b, CRat) else b
                   for b in (base_z or (0,) * n))
    names = tuple(f"z{i+1}" for i in range(n)) + \
        tuple(f"zb{i+1}" for i in range(n))
    base = base_z + tuple(b.conjugate() for b in base_z)
    conj = tuple(range(n, 2 * n)) + tuple(range(n))
    return Chart(names, base, conj)


# -- curvature -------------------------------------------------------------

def curvature(geom):
    dim = geom.dim
    r_up = _curvature_of(geom.gamma, dim, list(range(dim)))
    r_low = {}
    for (m, j, k, l), jet in r_up.items():
        for i in range(dim):
            om = geom.omega[i][m]
            if om.is_zero():
                continue
            key = (i, j, k, l)
            contrib = om * jet
            r_low[key] = r_low[key] + contrib if key in r_low else contrib
    r_low = {k: v for k, v in r_low.items() if not v.is_zero()}
    return CurvatureData(r_up, r_low)


def build_rhat(geom, degree_cap):
    """-1/4 R_{ijkl} y^i y^j dx^k wedge dx^l as a WeylForm."""
    curv = geom.curvature()
    dim = geom.dim
    quarter = Fraction(-1, 4)
    terms = {}
    for (i, j, k, l), jet in curv.r_low.items():
        if k >= l:
            continue  # antisymmetric pair counted once, doubled below
        alpha = [0] * dim
        alpha[i] += 1
        alpha[j] += 1
        key = (0, tuple(alpha), (k, l))
        contrib = jet * (quarter * 2)
        terms[key] = terms[key] + contrib if key in terms else contrib
    return WeylForm(geom, degree_cap, terms)


# -- scalar calculus -------------------------------------------------------

def hamiltonian_vf(f, geom):
    """Components X^a = omega^{ab} d_b f."""
    if f.chart != geom.chart:
        raise ChartMismatch("observable lives on a different chart")
    dim = geom.dim
    out = []
    for a in range(dim):
        acc = None
        for b in range(dim):
            om = geom.omega_inv[a][b]
            if om.is_zero():
                continue
            term = om * f.partial(b)
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else geom.zero_jet())
    return tuple(out)


def omega_pair(x_vec, y_vec, geom):
    """omega(X, Y) for component tuples of jets."""
    acc = None
    dim = geom.dim
    for a in range(dim):
        if x_vec[a].is_zero():
            continue
        for b in range(dim):
            om = geom.omega[a][b]
            if om.is_zero() or y_vec[b].is_zero():
                continue
            term = om * x_vec[a] * y_vec[b]
            acc = term if acc is None else acc + term
    return acc if acc is not None else geom.zero_jet()


def poisson(f, g, geom):
    """omega^{ab} d_a f d_b g."""
    if f.chart != geom.chart or g.chart != geom.chart:
        raise ChartMismatch("operands live on a different chart")
    acc = None
    dim = geom.dim
    for a in range(dim):
        fa = f.partial(a)
        if fa.is_zero():
            continue
        for b in range(dim):
            om = geom.omega_inv[a][b]
            if om.is_zero():
                continue
            term = om * fa * g.partial(b)
            acc = term if acc is None else acc + term
    if acc is None:
        v = min(f.valid_order, g.valid_order) - 1
        return Jet.zero(geom.chart, max(v, 0))
    return acc


def covariant_dv(vec, geom):
    """(nabla_b X)^a for a component tuple of jets; returns dict (a,b)->Jet."""
    dim = geom.dim
    out = {}
    for a in range(dim):
        for b in range(dim):
            acc = vec[a].partial(b)
            for m in range(dim):
                g = geom.gamma.get((a, b, m))
                if g is not None and not vec[m].is_zero():
                    acc = acc + g * vec[m]
            if not acc.is_zero():
                out[(a, b)] = acc
    return out


# -- the connection on fiber-polynomial forms ------------------------------

def nabla(a, geom):
    """Exterior covariant derivative on a WeylForm.

    Acts as d on coefficients, by the connection on fiber generators, and
    inserts the new form index on the left.  Costs one order of jet
    validity through the d-part.
    """
    if a.geometry != geom:
        raise ChartMismatch("form does not live on this geometry")
    dim = geom.dim
    out = {}

    def add(key, jet):
        prev = out.get(key)
        out[key] = jet if prev is None else prev + jet

    for (k, alpha, beta), jet in a.terms.items():
        for b in range(dim):
            dj = jet.partial(b)
            if dj.is_zero():
                continue
            ins = _insert_left(b, beta)
            if ins is None:
                continue
            sign, beta2 = ins
            add((k, alpha, beta2), dj if sign > 0 else -dj)
        for i, e in enumerate(alpha):
            if not e:
                continue
            for (u, x, b), g in geom.gamma.items():
                if u != i:
                    continue
                ins = _insert_left(b, beta)
                if ins is None:
                    continue
                sign, beta2 = ins
                alpha2 = list(alpha)
                alpha2[i] -= 1
                alpha2[x] += 1
                contrib = (g * jet) * (-e * sign)
                add((k, tuple(alpha2), beta2), contrib)
    return WeylForm(geom, a.degree_cap, out)


# -- validation ------------------------------------------------------------

def _require_valid(geom):
    report = validate_connection(geom)
    if not report.passed:
        raise ValidationFailure(report)
    geom._cache["validation"] = report


def validate_connection(geom):
    """Run every structural identity; failures become report entries."""
    checks = []
    dim = geom.dim
    omega, omega_inv = geom.omega, geom.omega_inv
    zero = geom.zero_jet()

    ok, where = True, ""
    for a in range(dim):
        for b in range(dim):
            if not omega[a][b].agrees_with(-omega[b][a]):
                ok, where = False, f"(a,b)=({a},{b})"
                break
        if not ok:
            break
    checks.append(Check("omega antisymmetric", ok, where))

    ok, where = True, ""
    for a in range(dim):
        for c in range(dim):
            acc = None
            for b in range(dim):
                t = omega[a][b] * omega_inv[b][c]
                acc = t if acc is None else acc + t
            want = Jet.constant(geom.chart, 1 if a == c else 0,
                                acc.valid_order)
            if not acc.agrees_with(want):
                ok, where = False, f"(a,c)=({a},{c})"
    checks.append(Check("omega * omega_inv = identity", ok, where))

    ok, where = True, ""
    for (u, a, b), g in geom.gamma.items():
        if not g.agrees_with(geom.gamma_at(u, b, a)):
            ok, where = False, f"Gamma^{u}_({a},{b})"
            break
    checks.append(Check("connection torsion-free", ok, where))

    ok, where = True, ""
    for c in range(dim):
        for a in range(dim):
            for b in range(a + 1, dim):
                acc = omega[a][b].partial(c)
                for d in range(dim):
                    g = geom.gamma.get((d, c, a))
                    if g is not None:
                        acc = acc - g * omega[d][b]
                    g = geom.gamma.get((d, c, b))
                    if g is not None:
                        acc = acc - omega[a][d] * g
                if not acc.is_zero():
                    ok, where = False, f"(c,a,b)=({c},{a},{b})"
    checks.append(Check("connection symplectic (nabla omega = 0)", ok, where))

    constant_omega = all(
        all(sum(a_idx) == 0 for a_idx in omega[a][b].coeffs)
        for a in range(dim) for b in range(dim))
    if constant_omega:
        ok, where = True, ""
        low = geom.gamma_low
        keys = set(low)
        for (i, j, k) in keys:
            ref = low[(i, j, k)]
            for perm in permutations((i, j, k)):
                other = low.get(perm)
                other = other if other is not None else zero
                if not ref.agrees_with(other):
                    ok, where = False, f"indices {(i, j, k)} vs {perm}"
                    break
            if not ok:
                break
        checks.append(Check("lowered Gamma totally symmetric", ok, where))

    curv = geom.curvature()
    ok, where = True, ""
    for (i, j, k, l), jet in curv.r_low.items():
        other = curv.r_low.get((j, i, k, l), zero)
        if not jet.agrees_with(other):
            ok, where = False, f"indices {(i, j, k, l)}"
            break
    checks.append(Check("lowered curvature symmetric in first pair",
                        ok, where))

    if geom.kind == "kaehler":
        checks.extend(_kaehler_checks(geom, curv))
    if geom.kind == "cotangent":
        checks.extend(_cotangent_checks(geom, curv))
    return ValidationReport(checks)


def _kaehler_checks(geom, curv):
    n = geom.n
    zero = geom.zero_jet()
    checks = []

    ok, where = True, ""
    for (i, j, k, l) in curv.r_low:
        mixed_first = (i < n) != (j < n)
        mixed_last = (k < n) != (l < n)
        if not (mixed_first and mixed_last):
            ok, where = False, f"non-mixed component {(i, j, k, l)}"
            break
    checks.append(Check("curvature components mixed-index only", ok, where))

    a_mat = geom.source["A"]
    a_inv = geom.source["A_inv"]
    ok, where = True, ""
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    # i d_i d_lbar A_{k jbar} - i A^{nbar m} d_i A_{k nbar}
                    #   d_lbar A_{m jbar}
                    want = a_mat[k][j].partial(i).partial(n + l) * I
                    for m in range(n):
                        for nn in range(n):
                            want = want - (a_inv[nn][m]
                                           * a_mat[k][nn].partial(i)
                                           * a_mat[m][j].partial(n + l)) * I
                    got = curv.low(k, n + l, i, n + j, zero)
                    if not got.agrees_with(want):
                        ok = False
                        where = f"(k,l,i,j)=({k},{l},{i},{j})"
    checks.append(Check("curvature matches potential Hessian formula",
                        ok, where))

    ok, where = True, ""
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    a = curv.low(k, n + l, i, n + j, zero)
                    b = curv.low(k, n + j, i, n + l, zero)
                    if not a.agrees_with(b):
                        ok, where = False, f"(k,l,i,j)=({k},{l},{i},{j})"
                    c = curv.low(n + k, l, n + i, j, zero)
                    d = curv.low(n + k, j, n + i, l, zero)
                    if not c.agrees_with(d):
                        ok, where = False, f"barred (k,l,i,j)"
    checks.append(Check("curvature exchange symmetries", ok, where))
    return checks


def _cotangent_checks(geom, curv):
    n = geom.n
    zero = geom.zero_jet()
    rt = geom.source["curvature_base"]
    gt = geom.source["gamma_base"]
    checks = []
    third = Fraction(1, 3)

    ok, where = True, ""
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    got = curv.up(l, k, i, j, zero)
                    want = rt.get((l, k, i, j), zero)
                    if not got.agrees_with(want):
                        ok, where = False, f"(l,k,i,j)=({l},{k},{i},{j})"
    checks.append(Check("lifted curvature restricts to the base", ok, where))

    ok, where = True, ""
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    got = curv.up(n + l, k, i, n + j, zero)
                    want = (rt.get((j, l, k, i), zero)
                            + rt.get((j, k, l, i), zero)) * third
                    if not got.agrees_with(want):
                        ok, where = False, f"(l,k,i,j)=({l},{k},{i},{j})"
    checks.append(Check("mixed lifted curvature identity", ok, where))

    # the p-linear curvature block of the published display is recorded as a
    # cross-check only; a mismatch is reported, not fatal
    def cov_rt(i, a, j, l, k):
        acc = rt.get((a, j, l, k), zero).partial(i)
        g = gt
        for m in range(n):
            if (a, i, m) in g:
                acc = acc + g[(a, i, m)] * rt.get((m, j, l, k), zero)
            if (m, i, j) in g:
                acc = acc - g[(m, i, j)] * rt.get((a, m, l, k), zero)
            if (m, i, l) in g:
                acc = acc - g[(m, i, l)] * rt.get((a, j, m, k), zero)
            if (m, i, k) in g:
                acc = acc - g[(m, i, k)] * rt.get((a, j, l, m), zero)
        return acc

    ok, where = True, ""
    for ii in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = None
                    for a in range(n):
                        pa = Jet.variable(geom.chart, n + a, geom.order)
                        inner = None
                        for (x, y) in ((ii, j), (j, ii)):
                            t = cov_rt(x, a, y, l, k)
                            for m in range(n):
                                if (a, x, m) in gt:
                                    t = t - gt[(a, x, m)] \
                                        * rt.get((m, y, l, k), zero) * 3
                                if (a, l, m) in gt:
                                    t = t - gt[(a, l, m)] \
                                        * rt.get((m, x, y, k), zero)
                                if (a, k, m) in gt:
                                    t = t + gt[(a, k, m)] \
                                        * rt.get((m, x, y, l), zero)
                            inner = t if inner is None else inner + t
                        contrib = pa * inner * third
                        acc = contrib if acc is None else acc + contrib
                    got = curv.up(n + ii, j, k, l, zero)
                    if not got.agrees_with(acc):
                        ok, where = False, f"(i,j,k,l)=({ii},{j},{k},{l})"
    checks.append(Check("p-linear curvature display cross-check", ok, where,
                        fatal=False))
    return checks
