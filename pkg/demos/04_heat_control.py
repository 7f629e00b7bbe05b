"""Boundary control of the heat equation on (0, pi): simulation, the
principal part Phi~, and control synthesis.
"""
import numpy as np

from heatreach import heat as ht

# free decay of sin x and sin 2x
f = ht.SineState.from_function(lambda x: np.sin(x) + 0.5 * np.sin(2 * x), N=20)
for st in ht.simulate(f, ht.ControlSignal.zero(1.0), [0.0, 0.5, 1.0]):
    print(f"t={st.t:.1f}  a1={st.coeffs[0].real:.6f}  a2={st.coeffs[1].real:.6f}")

# a constant left control from rest: b1 = (2/pi)(1 - e^-1)
u = ht.ControlSignal.from_functions(lambda s: np.ones_like(s), None, 1.0)
y = ht.control_to_state(u, N=200)
print("b1 =", y.coeffs[0].real, " closed form:", 2 / np.pi * (1 - np.exp(-1)))

# Phi~ of the unit control is erfc(z/2); the isometry onto A2(Delta)
one = ht.TimeSignal.on_interval(lambda s: np.ones(np.shape(s), dtype=complex), 1.0)
print("Phi~ 1 at z = 1:", ht.phi_tilde(one, np.array([1.0 + 0j]), 1.0)[0].real)
for name in ("s", "sin(pi s)"):
    r = ht.isometry_ratio(ht.ISOMETRY_FAMILY[name], 1.0, resolution=10, angular_levels=10)
    print(f"isometry ratio for u = {name}: {r.ratio:.6f}")

# the remainders shrink as the horizon shortens
print("image-sum kernel K0~(1, pi/2):", ht.kernel_K0_tilde(1.0, np.pi / 2).value)
for tau in (1.0, 0.5, 0.25):
    print(f"remainder proxy tau={tau}: {ht.remainder_norm_proxy(tau):.3e}")

# drive sin x to rest in time 1 with 24 Legendre modes per boundary
sinx = ht.SineState.mode(1, 20)
ctrl, rep = ht.synthesize_lsq(ht.SineState.zero(20), 1.0, K=24, f=sinx)
print(f"null control: final relative norm {rep.final_state_norm / sinx.norm():.2e}, lambda {rep.lam:.0e}")
print("u0 at s = 0, .5, .9:", np.round(ctrl.u0(np.array([0.0, 0.5, 0.9])).real, 3))

# synthesis through T, L and G for a target in the range of Phi~
u2, chain = ht.synthesize_chain(ht.ChainTarget("box", 1.0, (0.2, 0.6)))
print("chain synthesis for the box target, max error on Delta:", chain.max_error)
try:
    ht.synthesize_chain(ht.ChainTarget("x0_box", 1.0, (0.05, 0.2)))
except ht.NotInRangeError as e:
    print("x0 element rejected:", e)
