"""Bergman, weighted Bergman and Smirnov norms on D, and the vertex weight."""
import numpy as np

from heatreach.domains import SQUARE_D, Z0, Z1, make_area_rule
from heatreach.spaces import VERTEX, bergman_norm, omega0, smirnov_norm, vertex_weighted_norm
from heatreach.verify import log_trace

rule = make_area_rule(SQUARE_D, 10)

# ||1||_{A2(D)} is the square root of the area
print("||1||_A2(D) =", bergman_norm(lambda z: np.ones_like(z), SQUARE_D, rule=rule).value,
      " sqrt(area) =", np.pi / np.sqrt(2))

# the heat weight e^{x^2/(2 tau)}/tau grows fast along the diagonal
w = omega0(1.0)
print("omega0(x) at x = 0, 1, 2:", w(np.array([0.0, 1.0, 2.0])))

# |(z-z0)(z-z1)|^-2 weight: the product itself has norm^2 = area
phi = lambda z: (z - Z0) * (z - Z1)
r = bergman_norm(phi, SQUARE_D, VERTEX, rule)
print("weighted norm^2 of (z-z0)(z-z1):", r.value ** 2, " pi^2/2 =", np.pi ** 2 / 2)

# constants are not in the weighted space: the norm diverges at both vertices
rep = vertex_weighted_norm(lambda z: np.ones_like(z))
print("weighted norm of 1:", rep.value, "diverges at", rep.extra["diverges_at"])
rep = vertex_weighted_norm(lambda z: z - Z1)
print("weighted norm of z - z1:", rep.value, "diverges at", rep.extra["diverges_at"])

# Smirnov E^2 norm: sup over shrunk contours, reached at the boundary
s = smirnov_norm(lambda z: np.exp(z), 2)
print("E^2 norm of e^z:", s.value, " contour integrals increase:", s.monotone)

# L1 and L log+ L of the trace log(pi/z), unbounded at the vertex 0
tr = log_trace()
print("||log(pi/z)||_L1(dD) =", tr.l1, " L log+ L =", tr.llogl)
