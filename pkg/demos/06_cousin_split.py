"""Writing phi on D as f1 + f2 with f1 holomorphic on Delta and f2 on pi - Delta.

A smooth partition chi1 + chi2 = 1 cut across the band E gives phi0 = chi1 phi
on the left; correcting by a solution u of dbar u = -phi0 dbar chi1 (in the
normalised form with the multiplier P4) restores holomorphy.
"""
import time

import numpy as np

from heatreach import cousin as cs
from heatreach.domains import Z0, Z1
from heatreach.verify import square_grid

pu = cs.build_partition()
z = np.array([0.3, np.pi / 2, np.pi - 0.3, np.pi / 2 + 0.5 + 1.0j])
print("chi1 at", np.round(z, 3), "->", np.round(pu.chi1(z), 6))
print("sup |dbar chi1||z-z0||z-z1| (64 / 128 grid):", pu.bound_sup(64), pu.bound_sup(128))
print("annulus probe near z0:", np.round(pu.annulus_probe(6), 4))

t0 = time.time()
phi = lambda z: (z - Z0) * (z - Z1) * np.exp(z)
f1, f2, rep = cs.cousin_split(phi, radii=(8.0, 16.0), hormander=False)
print(f"split of (z-z0)(z-z1)e^z in {time.time() - t0:.1f} s")
zz = square_grid(10)
print("  max |f1 + f2 - phi|:", np.max(np.abs(f1(zz) + f2(zz) - phi(zz))))
print("  dbar residuals:", {k: f"{v:.1e}" for k, v in rep.dbar_residuals.items()})
print("  Pompeiu solver vs boundary form:", f"{rep.solver_check:.1e}")
for k, v in rep.norms.items():
    print(f"  {k} truncated sector norms:", {r: round(n, 4) for r, n in v.items()})

try:
    cs.cousin_split(lambda z: np.ones_like(z))
except ValueError as e:
    print("phi = 1 rejected:", e)
