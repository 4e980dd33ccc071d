"""Operators in the holomorphic polarization.

On the flat complex plane with potential K = z zbar, the conjugate
variable acts as hbar d/dz on holomorphic jets (the lowering operator of
the Fock representation); for a curved potential, observables affine in
dK quantize to first-order operators with an exact half-density term.
"""

from fractions import Fraction

from fedquant import build_kaehler, gq_kaehler
from fedquant.geometry import complex_chart
from fedquant.jets import Jet

ORDER = 8
cc = complex_chart(1)
z = Jet.variable(cc, 0, ORDER)
zb = Jet.variable(cc, 1, ORDER)

def show(op):
    for idx in sorted(op.terms):
        for k in sorted(op.terms[idx].coeffs):
            jet = op.terms[idx].coeffs[k]
            body = " + ".join(f"{c} * x^{a}" for a, c in
                              sorted(jet.coeffs.items()))
            print(f"    hbar^{k} d^{idx} [{body or '0'}]")


flat = build_kaehler(z * zb, ORDER)
print("flat potential:")
print("  rho(zbar) =")
show(gq_kaehler(zb, flat))

curved = build_kaehler(z * zb + (z * zb) ** 2 * Fraction(1, 3), ORDER)
K = z * zb + (z * zb) ** 2 * Fraction(1, 3)
f = z * K.partial(0) + z * z      # u(z) d_z K + v(z) with u = z, v = z^2
print("curved potential, f = z dK/dz + z^2:")
print("  rho(f) =")
show(gq_kaehler(f, curved))
