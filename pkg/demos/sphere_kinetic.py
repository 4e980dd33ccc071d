"""The kinetic-energy operator on the round sphere.

Lifts the Levi-Civita connection of the stereographic sphere metric to
phase space, quantizes g^{ab} p_a p_b through the momentum-factorization
rule, and isolates the scalar-curvature correction: the operator equals
-hbar^2 (Laplace-Beltrami - R/4).
"""

from fractions import Fraction

from fedquant import lift_cotangent, solve_r, kinetic_alpha, scalar_curvature
from fedquant.sampling import sphere_metric

ORDER = 9

geom = lift_cotangent(sphere_metric(ORDER), ORDER)
print("lifted geometry:", geom)

rt = scalar_curvature(geom)
print("scalar curvature at the base point:", rt.constant_term)

state = solve_r(geom, 2)
alpha = kinetic_alpha(geom, state)
print("curvature coefficient alpha:", alpha)
assert alpha == Fraction(1, 4)
print("the quantized kinetic energy is -hbar^2 (Delta - R/4)")
