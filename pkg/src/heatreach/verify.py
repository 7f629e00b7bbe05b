"""Named property suites; each returns checks {name, value, bound, pass}.

Suites: isometry, laplace, cauchy, kernels, cousin, growth.  Every suite
accepts a config dict; unknown keys raise :class:`ConfigError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from . import cauchy as cz
from . import cousin as cs
from . import heat as ht
from .domains import (SECTOR_DELTA, SQUARE_D, Z0, Z1, make_area_rule)
from .spaces import bergman_norm, pointwise_growth_check, vertex_weighted_norm
from .transforms import (LAPLACE_DICTIONARY, DictionaryTerm, TimeSignal, hardy_littlewood_exact,
                         hardy_littlewood_ratio, indicator, laplace_unitarity, strip_integral_check)


class ConfigError(ValueError):
    pass


@dataclass
class Check:
    name: str
    value: float
    bound: object
    passed: bool

    def to_dict(self):
        return {"name": self.name, "value": self.value, "bound": self.bound, "pass": bool(self.passed)}


def _cfg(config, defaults):
    config = dict(config or {})
    bad = sorted(set(config) - set(defaults))
    if bad:
        raise ConfigError(f"unknown config keys: {bad}")
    return {**defaults, **config}


def _le(name, value, bound):
    value = float(value)
    return Check(name, value, bound, bool(np.isfinite(value) and value <= bound))


def _within(name, value, lo, hi):
    value = float(value)
    return Check(name, value, [lo, hi], bool(lo <= value <= hi))


def square_grid(n: int = 20):
    """n x n cell-centre grid of D (in the coordinates z = p Z1 + q Z0)."""
    p = (np.arange(n) + 0.5) / n
    P, Q = np.meshgrid(p, p, indexing="ij")
    return (P * Z1 + Q * Z0).ravel()


TEST_POLYNOMIALS = {
    "1": lambda z: np.ones_like(np.asarray(z, dtype=complex)),
    "z": lambda z: np.asarray(z, dtype=complex),
    "z^2 - iz": lambda z: np.asarray(z, dtype=complex) ** 2 - 1j * np.asarray(z, dtype=complex),
    "z^3 + 2": lambda z: np.asarray(z, dtype=complex) ** 3 + 2,
    "(z - pi/2)^4": lambda z: (np.asarray(z, dtype=complex) - np.pi / 2) ** 4,
}


def log_trace():
    """Unbounded trace in L log+ L: log(pi / z), singular at the vertex 0."""
    return cz.BoundaryTrace(lambda u: np.log(np.pi / np.asarray(u, dtype=complex)), singular_vertices=(0,))


# --------------------------------------------------------------------------

def suite_isometry(config=None):
    c = _cfg(config, {"tau": 1.0, "R": 16.0, "resolution": 10, "angular_levels": 10,
                      "lo": 0.998, "hi": 1.0, "controls": None, "seed": None})
    rule = make_area_rule(SECTOR_DELTA, c["resolution"], c["R"], angular_levels=c["angular_levels"])
    family = {n: ht.ISOMETRY_FAMILY[n] for n in (c["controls"] or ht.ISOMETRY_FAMILY)}
    if c["seed"] is not None:
        # three extra random cubics vanishing at 0
        rng = np.random.default_rng(c["seed"])
        for i, cc in enumerate(rng.standard_normal((3, 3))):
            family[f"random{i}"] = lambda s, _c=cc: s * (_c[0] + _c[1] * s + _c[2] * s * s)
    out = []
    for name, fn in family.items():
        rep = ht.isometry_ratio(lambda s, _f=fn, _t=c["tau"]: _f(s / _t), c["tau"], rule=rule)
        out.append(_within(f"ratio[{name}]", rep.ratio, c["lo"], c["hi"] + 1e-12))
    return out


def suite_laplace(config=None):
    c = _cfg(config, {"resolution": 16, "R": 1e5, "tol": 1e-3, "erfc_points": 50})
    out = []
    for d in LAPLACE_DICTIONARY:
        rep = laplace_unitarity(d.signal(), c["resolution"], c["R"], time_norm_sq=d.norm_sq)
        out.append(_le(f"|ratio - 1|[t^{d.a:g} e^-{d.b:g}t]", abs(rep.ratio - 1), c["tol"]))
    d = DictionaryTerm(1.0, 1.0)
    rep = laplace_unitarity(d.signal(), c["resolution"], c["R"])
    out.append(_le("|time norm^2 - 1/4| (t e^-t)", abs(rep.time_norm_sq - 0.25), 1e-4))
    out.append(_le("|transform norm^2 - 1/4| (t e^-t)", abs(rep.transform_norm_sq - 0.25), 1e-4))
    s = np.linspace(0, 3, c["erfc_points"] + 2)[1:-1]
    one = TimeSignal.on_interval(lambda t: np.ones(np.shape(t), dtype=complex), 1.0)
    err = np.max(np.abs(ht.phi_tilde(one, s + 0j, 1.0) - erfc(s / 2)))
    out.append(_le("max |Phi~ 1 - erfc(s/2)|", err, 1e-8))
    return out


def suite_cauchy(config=None):
    c = _cfg(config, {"grid": 20, "tol": 1e-8, "far_a": 0.5, "membership": True, "resolution": 6})
    out = []
    z = square_grid(c["grid"])
    for name, f in TEST_POLYNOMIALS.items():
        pieces = cz.decompose(cz.BoundaryTrace(f))
        err = np.max(np.abs(cz.reconstruct(pieces, z) - f(z)))
        out.append(_le(f"reconstruction[{name}]", err, c["tol"]))
    ones = cz.decompose(cz.BoundaryTrace(TEST_POLYNOMIALS["1"]))
    for p in ones:
        out.append(_le(f"centre value[{p.label}] - 1/2", abs(p(np.pi / 2) - 0.5), c["tol"]))
    for p in ones:
        fr = cz.far_field_bound(p, c["far_a"])
        out.append(_le(f"far field C_emp / bound [{p.label}]", fr.C_empirical / fr.bound, 3.0))
    # per-side multiplier identity: C_k(P f) - P C_k f = (1/i pi) int_side f du
    f = TEST_POLYNOMIALS["z^2 - iz"]
    pf = cz.decompose(cz.BoundaryTrace(lambda u: cz.P(u) * f(u)))
    pl = cz.decompose(cz.BoundaryTrace(f))
    zt = z[::37]
    for a, b in zip(pf, pl):
        gap = a(zt) - cz.P(zt) * b(zt) - cz.side_constant(b)
        out.append(_le(f"multiplier identity[{a.label}]", np.max(np.abs(gap)), c["tol"]))
    if c["membership"]:
        lp = cz.decompose(log_trace())
        for k in (1, 2):
            rep = cz.sector_membership(lp, k, c["resolution"])
            out.append(_le(f"log trace sector norm drift[k={k}]", rep.drift, 0.05))
    return out


def suite_kernels(config=None):
    c = _cfg(config, {"taus": [1.0, 0.5, 0.25, 0.1], "basis": 16, "M": 10})
    out = []
    k = ht.kernel_K0_tilde(1.0, np.pi / 2, c["M"])
    out.append(_le("|K0~(1, pi/2) - frozen|", abs(k.value - (-0.0021898)), 1e-6))
    out.append(_le("K0~ tail bound", k.tail_bound, 1e-20))
    sym = abs(ht.kernel_K0_tilde(0.7, 0.3 + 0.2j).value - ht.kernel_K0_tilde(0.7, -0.3 - 0.2j).value)
    out.append(_le("K0~ symmetry z -> -z", sym, 1e-14))
    out.append(_le("K0~(1e-3, pi/2)", abs(ht.kernel_K0_tilde(1e-3, np.pi / 2).value), 1e-300))
    tau = 1.0
    u = TimeSignal.on_interval(lambda s: s * (tau - s) + 0j, tau)
    zt = np.array([0.4 + 0.1j, 1.2 - 0.3j, np.pi / 2, 2.0 + 0.5j])
    diff = np.max(np.abs(ht.remainder_R0(u, zt) - ht.remainder_R0_images(u, zt)))
    out.append(_le("R0 time quadrature vs image sum", diff, 1e-10))
    one = TimeSignal.on_interval(lambda s: np.ones(np.shape(s), dtype=complex), tau)
    r = abs(ht.remainder_R0(one, np.array([np.pi / 2]))[0]) / abs(ht.phi_tilde(one, np.pi / 2 + 0j, tau))
    out.append(_le("|R0 1(pi/2)| / |Phi~ 1(pi/2)|", r, 0.05))
    prox = [ht.remainder_norm_proxy(t, K=c["basis"], M=c["M"]) for t in c["taus"]]
    for i in range(1, len(prox)):
        out.append(Check(f"remainder proxy decreases tau={c['taus'][i]:g}", prox[i], prox[i - 1],
                         bool(prox[i] < prox[i - 1])))
    return out


def suite_cousin(config=None):
    c = _cfg(config, {"radii": [8.0, 16.0, 32.0], "grid": 64, "annuli": 12})
    out = []
    phis = {"(z-z0)(z-z1)": lambda z: (z - Z0) * (z - Z1),
            "(z-z0)(z-z1)e^z": lambda z: (z - Z0) * (z - Z1) * np.exp(z)}
    for name, phi in phis.items():
        _, _, rep = cs.cousin_split(phi, radii=tuple(c["radii"]))
        if name == "(z-z0)(z-z1)":
            out.append(_le("|weighted norm^2 - pi^2/2|", abs(rep.weighted_norm - np.pi ** 2 / 2), 1e-6))
        out.append(_le(f"identity error[{name}]", rep.identity_error, 1e-6))
        for k, v in rep.dbar_residuals.items():
            out.append(_le(f"dbar residual {k}[{name}]", v, 1e-4))
        for k, v in rep.norms.items():
            out.append(Check(f"sector norms {k} stable in R[{name}]", max(v.values()), "finite, <5% drift",
                             cs.norms_stable(v)))
        out.append(_le(f"Pompeiu vs boundary form[{name}]", rep.solver_check, 1e-8))
    pu = cs.build_partition()
    a, b = pu.bound_sup(c["grid"]), pu.bound_sup(2 * c["grid"])
    out.append(_le("partition bound drift under doubling", abs(b - a) / b, 0.05))
    probe = pu.annulus_probe(c["annuli"])
    out.append(Check("annulus probe min", min(probe), "> 0.1", bool(min(probe) > 0.1)))
    return out


def suite_growth(config=None):
    c = _cfg(config, {"n": 8, "tau": 1.0})
    out = []
    lp = cz.decompose(log_trace())
    g = cz.growth_ceiling(lp, c["n"])
    out.append(Check("growth ceiling bounded (log trace)", max(g), "finite, last <= first",
                     bool(np.all(np.isfinite(g)) and g[-1] <= g[0])))
    rule = make_area_rule(SQUARE_D, 8)
    f = lambda z: np.exp(z) / (z + 1)
    nrm = bergman_norm(f, SQUARE_D, rule=rule).value
    gr = pointwise_growth_check(f, SQUARE_D, nrm, rule)
    out.append(_le("pointwise A2 growth ratio", gr.worst_ratio, 1.0))
    pw = ht.paley_wiener_probe(c["tau"])
    out.append(Check("PW growth ratio finite", pw["growth_ratio"], "finite", bool(pw["finite"])))
    for a in (0.3, 0.6):
        got, ex = hardy_littlewood_ratio(a), hardy_littlewood_exact(a)
        out.append(_le(f"Hardy-Littlewood ratio error a={a}", abs(got["ratio"] - ex["ratio"]), 1e-6))
    st = strip_integral_check(indicator(0.0, 1.0), 4.0, [0.5, 0.1, 0.02, 0.004])
    out.append(Check("strip integrals finite and monotone", st.max_value, "finite",
                     bool(np.isfinite(st.max_value) and st.monotone)))
    wn = vertex_weighted_norm(lambda z: np.ones_like(z))
    out.append(Check("vertex-weighted norm of 1 diverges", float(wn.value), "inf", bool(not np.isfinite(wn.value))))
    return out


SUITES: dict[str, Callable] = {
    "isometry": suite_isometry,
    "laplace": suite_laplace,
    "cauchy": suite_cauchy,
    "kernels": suite_kernels,
    "cousin": suite_cousin,
    "growth": suite_growth,
}


def run_suite(name: str, config=None) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    checks = SUITES[name](config)
    return {"suite": name, "checks": [ch.to_dict() for ch in checks],
            "pass": bool(all(ch.passed for ch in checks))}
