"""Star products on a flat chart, against the exponential formula.

Builds the standard symplectic plane, multiplies two polynomial
observables with the recursion-based product, and checks the result
against the direct bidifferential expansion, order by order in hbar.
"""

from fedquant import build_flat, moyal_reference, solve_r, star
from fedquant.jets import Jet

ORDER = 11

flat = build_flat(1, ORDER)
q = Jet.variable(flat.chart, 0, ORDER)
p = Jet.variable(flat.chart, 1, ORDER)

state = solve_r(flat, 4)
print("connection solved:", state)

f = q * q * p - p * 2
g = q * p * p + q * 3

series = star(f, g, state)
reference = moyal_reference(f, g, flat, 4)

for k in range(5):
    jet = series.coefficient(k)
    match = "matches" if jet.agrees_with(reference.coefficient(k)) \
        else "DIFFERS FROM"
    nterms = len(jet.coeffs)
    print(f"hbar^{k}: {nterms:3d} coefficients, {match} the direct product")

# the commutator reproduces the Poisson bracket at first order
from fedquant import poisson
from fedquant.rational import I

comm1 = star(f, g, state).coefficient(1) - star(g, f, state).coefficient(1)
print("first-order commutator = i {f, g}:",
      comm1.agrees_with(poisson(f, g, flat) * I))
