"""The square D, the two sectors, and the quadrature rules built on them."""
import numpy as np

from heatreach.domains import (SECTOR_DELTA, SQUARE_D, Z0, Z1, boundary_distance, contains,
                               far_field_constant, make_area_rule)

print("vertices of D: 0, z1 =", Z1, ", pi, z0 =", Z0)

# D is the intersection of Delta and its reflection pi - Delta
z = np.array([np.pi / 2, 0.3 + 0.2j, 2.0 + 1.5j, -0.1])
print("in D:     ", contains(SQUARE_D, z))
print("in Delta: ", contains(SECTOR_DELTA, z))
print("d(z, dD): ", np.round(boundary_distance(SQUARE_D, z), 6))

# area of D is pi^2 / 2; the rule integrates polynomials exactly
rule = make_area_rule(SQUARE_D, 8)
print("area of D:", rule.weights.sum(), "vs", np.pi ** 2 / 2)
print("int |z|^2 over D:", np.sum(rule.weights * np.abs(rule.nodes) ** 2), "vs pi^4/6 =", np.pi ** 4 / 6)

# truncated sector: Gaussian mass, truncation accounted for in tail_bound
sec = make_area_rule(SECTOR_DELTA, 10, 16.0)
g = np.exp(-np.abs(sec.nodes) ** 2)
print("int e^-|z|^2 over Delta, |z| < 16:", np.sum(sec.weights * g), "(exact pi/4 =", np.pi / 4, ")")

# (|z| + 1) <= C_a d(z, dD) away from the dilated square
for a in (0.25, 0.5, 1.0):
    print(f"far-field constant C_{a}:", round(far_field_constant(a), 4))
