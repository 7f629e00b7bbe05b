"""Splitting a function on D into four side pieces by the Cauchy integral.

Each piece is holomorphic off one side, so pairing the pieces of the sides
through 0 and through pi gives functions on Delta and on pi - Delta.
"""
import numpy as np

from heatreach import cauchy as cz
from heatreach.verify import log_trace, square_grid

f = lambda z: np.exp(z) * (z - 1)
pieces = cz.decompose(cz.BoundaryTrace(f))
z = square_grid(20)
print("max |(1/2) sum f_k - f| on a 20x20 grid:", np.max(np.abs(cz.reconstruct(pieces, z) - f(z))))

ones = cz.decompose(cz.BoundaryTrace(lambda z: np.ones_like(z)))
print("centre values of the pieces of 1:", [round(p(np.pi / 2).real, 12) for p in ones])

# decay (|z| + 1)|f_k(z)| against the far-field bound
for p in ones:
    fr = cz.far_field_bound(p, 0.5)
    print(f"{p.label}: C_emp = {fr.C_empirical:.3f}, bound = {fr.bound:.2f}")

# P(z) = z + 2 i pi passes through the sum of the pieces
pf = cz.decompose(cz.BoundaryTrace(lambda u: cz.P(u) * f(u)))
gap = cz.reconstruct(pf, z) - cz.P(z) * cz.reconstruct(pieces, z)
print("multiplier transparency on the sum:", np.max(np.abs(gap)))

# an unbounded trace with finite L log+ L still lands in the sector spaces
tr = log_trace()
lp = cz.decompose(tr)
print(f"log(pi/z): L1 = {tr.l1:.4f}, L log+ L = {tr.llogl:.4f}")
for k in (1, 2):
    rep = cz.sector_membership(lp, k, 6)
    print(f"  sector norm k={k}: {rep.norm:.5f}, drift under refinement {rep.drift:.1e}")

try:
    cz.decompose(cz.BoundaryTrace(lambda u: 1 / u, singular_vertices=(0,)))
except ValueError as e:
    print("1/z rejected:", e)
