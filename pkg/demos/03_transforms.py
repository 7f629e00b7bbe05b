"""The transforms linking L2(0, tau), L2(R+, dt/t), the half plane and the sector.

T maps the control interval onto a half line, the Laplace transform is
unitary from L2(R+, dt/t), and G lifts the half plane to Delta by s = z^2.
"""
import numpy as np

from heatreach.domains import SECTOR_DELTA, make_area_rule
from heatreach.spaces import bergman_norm
from heatreach.transforms import (LAPLACE_DICTIONARY, DictionaryTerm, TimeSignal, apply_G, apply_T, cauchy_transform,
                                  hardy_littlewood_exact, hardy_littlewood_ratio, indicator, laplace,
                                  laplace_unitarity, poisson, strip_integral_check)

one = TimeSignal.on_interval(lambda s: np.ones(np.shape(s), dtype=complex), 1.0)
g = apply_T(one)
print("T 1 at t = 0.1, 0.25, 1, 4:", g(np.array([0.1, 0.25, 1.0, 4.0])).real)
print("||T 1||^2 in dt/t:", g.norm_sq(), "(unit up to the e^12 cut)")

# Laplace of t e^-t against its closed form
f = DictionaryTerm(1.0, 1.0).signal()
s = np.array([0.5, 1 + 2j])
print("L[t e^-t](s):", laplace(f, s), " closed form:", 1 / (np.sqrt(np.pi) * (s + 1) ** 2))

print("unitarity over the dictionary t^a e^-bt:")
for d in LAPLACE_DICTIONARY:
    r = laplace_unitarity(d.signal(), 16, 1e5, time_norm_sq=d.norm_sq)
    print(f"  a={d.a:<4g} b={d.b:<4g} ratio {r.ratio:.8f}")

# G preserves the Bergman norm: 1/(s+1)^2 has A2(half plane) norm sqrt(pi)/2
rule = make_area_rule(SECTOR_DELTA, 14, 300.0)
G = apply_G(lambda s: 1 / (s + 1) ** 2)
print("||G F||_A2(Delta) =", bergman_norm(G, SECTOR_DELTA, rule=rule).value, "vs", np.sqrt(np.pi) / 2)

# line Cauchy transform of an indicator, and its Poisson part near the line
z = 0.5 + 1j
print("C 1[0,1](0.5+i):", cauchy_transform(indicator(0, 1), z))
print("P 1[-1,1](i y) for y = 1e-2, 1e-4:", np.round(poisson(indicator(-1, 1), 1j * np.array([1e-2, 1e-4])).real, 8))

st = strip_integral_check(indicator(-0.5, 0.5), 2.0, [1, 0.1, 0.01, 0.001])
print("strip integrals of |C g| as y -> 0:", np.round(st.integrals, 5))

for a in (0.3, 0.6):
    print(f"Hardy-Littlewood ratio a={a}: quadrature {hardy_littlewood_ratio(a)['ratio']:.10f} "
          f"exact {hardy_littlewood_exact(a)['ratio']:.10f}")
