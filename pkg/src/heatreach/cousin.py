"""Constructive split of a weighted Bergman function on D across the sector cover.

Given phi on D with finite A^2(D, |(z - z0)(z - z1)|^-2) norm we build

    phi0 = phi * P,   h1 = chi2 phi0 (on Delta),   h2 = -chi1 phi0 (on pi - Delta),
    v = dbar h1 = dbar h2 = -phi0 dbar chi1   (supported in the band E),
    u = (1/pi) int_E v(zeta) / (z - zeta) dA(zeta),
    f1 = (h1 - u) / P,   f2 = -(h2 - u) / P,

so f1 + f2 = phi on D while f1, f2 are holomorphic on Delta and pi - Delta.
Wirtinger convention: dbar = (d_x + i d_y) / 2; the Cauchy-Pompeiu kernel is
1 / (pi (z - zeta)).

The band E = {|x - pi/2| < alpha(y)} with alpha(y) = (pi^2/4 - y^2)/pi is the
intersection of two parabolic regions, hence convex; it touches dD only at
the vertices z0 = Z0 and z1 = Z1.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

from .domains import (SECTOR_DELTA, SECTOR_PI_MINUS_DELTA, SQUARE_D, TRANSITION_BAND_E, Z0, Z1,
                      band_halfwidth, contains, gauss_legendre, graded_breaks, make_area_rule,
                      panel_rule)
from .spaces import MEMBERSHIP_DRIFT, ComplexField, vertex_weighted_norm

# zeros of the default multiplier, outside the closure of both sectors
W_PLUS = np.pi / 2 + 1j * (np.pi / 2 + 1)
W_MINUS = np.conj(W_PLUS)


def P4(z):
    """(z - w+)(z - w-) with w+- = pi/2 +- i(pi/2 + 1): no zeros on the closed sectors."""
    z = np.asarray(z, dtype=complex)
    return (z - W_PLUS) * (z - W_MINUS)


def one_plus_z2(z):
    """1 + z^2; its zeros +-i lie in pi - Delta (kept for comparison)."""
    z = np.asarray(z, dtype=complex)
    return 1 + z * z


# --------------------------------------------------------------------------
# cutoff profiles and the partition of unity

class CutoffKind(enum.Enum):
    EXP = "exp"            # sigma(t) / (sigma(t) + sigma(1 - t)), sigma(t) = e^{-1/t}
    QUINTIC = "quintic"    # 6t^5 - 15t^4 + 10t^3, C^2 only


def psi(t, kind: CutoffKind = CutoffKind.EXP):
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, 1.0)
    if kind is CutoffKind.QUINTIC:
        return tc ** 3 * (10 - 15 * tc + 6 * tc * tc)
    inside = (t > 0) & (t < 1)
    ts = np.where(inside, t, 0.5)
    with np.errstate(over="ignore"):
        g = 1 / ts - 1 / (1 - ts)
    return np.where(inside, expit(-g), (t >= 1).astype(float))


def dpsi(t, kind: CutoffKind = CutoffKind.EXP):
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    ts = np.where(inside, t, 0.5)
    if kind is CutoffKind.QUINTIC:
        return np.where(inside, 30 * ts ** 2 * (1 - ts) ** 2, 0.0)
    p = psi(ts, kind)
    # p (1 - p) <= e^-|g| underflows long before 1/t^2 overflows
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g = 1 / ts - 1 / (1 - ts)
        val = p * (1 - p) * (1 / ts ** 2 + 1 / (1 - ts) ** 2)
    return np.where(inside & (np.abs(g) < 700), val, 0.0)


def alpha(y):
    return band_halfwidth(y)


def dalpha(y):
    return -2 * np.asarray(y, dtype=float) / np.pi


@dataclass
class PartitionOfUnity:
    """chi1 + chi2 = 1 on Omega = Delta u (pi - Delta).

    On D, chi1 = psi(s) with s = (x + alpha(y) - pi/2) / (2 alpha(y)): 0 left
    of the band E, 1 right of it.  Off D, chi1 = 1 on Delta \\ D (the region to
    the right of D) and 0 on (pi - Delta) \\ D.
    """

    kind: CutoffKind = CutoffKind.EXP

    def band_coordinate(self, z):
        z = np.asarray(z, dtype=complex)
        al = alpha(z.imag)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (z.real + al - np.pi / 2) / (2 * al)

    def chi1(self, z):
        z = np.asarray(z, dtype=complex)
        inD = contains(SQUARE_D, z)
        s = np.where(inD, self.band_coordinate(np.where(inD, z, np.pi / 2)), 0.0)
        return np.where(inD, psi(s, self.kind), (z.real > np.pi / 2).astype(float))

    def chi2(self, z):
        return 1.0 - self.chi1(z)

    def dbar_chi1(self, z):
        """Analytic dbar chi1 = psi'(s) (1 - i alpha'(y)(2s - 1)) / (4 alpha(y)) in E, 0 elsewhere."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.isclose(z, Z0, atol=0, rtol=0) | np.isclose(z, Z1, atol=0, rtol=0)):
            raise ValueError("dbar chi1 requested at a vertex of D")
        inE = contains(TRANSITION_BAND_E, z)
        zz = np.where(inE, z, np.pi / 2)
        y = zz.imag
        s = self.band_coordinate(zz)
        val = dpsi(s, self.kind) * (1 - 1j * dalpha(y) * (2 * s - 1)) / (4 * alpha(y))
        return np.where(inE, val, 0.0)

    def dbar_chi1_fd(self, z, h: float = 1e-5):
        z = np.asarray(z, dtype=complex)
        fx = (self.chi1(z + h) - self.chi1(z - h)) / (2 * h)
        fy = (self.chi1(z + 1j * h) - self.chi1(z - 1j * h)) / (2 * h)
        return 0.5 * (fx + 1j * fy)

    def bound_sup(self, n: int = 64) -> float:
        """Max of |dbar chi1| |z - z0| |z - z1| on the n x n cell-centre grid of D."""
        p = (np.arange(n) + 0.5) / n
        P_, Q_ = np.meshgrid(p, p, indexing="ij")
        z = (P_ * Z1 + Q_ * Z0).ravel()
        return float(np.max(np.abs(self.dbar_chi1(z)) * np.abs(z - Z0) * np.abs(z - Z1)))

    def annulus_probe(self, levels: int = 12, n: int = 64) -> list:
        """Max of |dbar chi1| |z - z0| over 2^-(k+1) <= |z - z0| <= 2^-k, k = 1..levels,
        on a local polar grid inside the corner of D at z0."""
        out = []
        phi = np.linspace(-3 * np.pi / 4, -np.pi / 4, n + 2)[1:-1]
        for k in range(1, levels + 1):
            r = np.geomspace(2.0 ** -(k + 1), 2.0 ** -k, n)
            z = (Z0 + r[:, None] * np.exp(1j * phi[None, :])).ravel()
            out.append(float(np.max(np.abs(self.dbar_chi1(z)) * np.abs(z - Z0))))
        return out


def build_partition(kind: CutoffKind | str = CutoffKind.EXP) -> PartitionOfUnity:
    return PartitionOfUnity(CutoffKind(kind) if isinstance(kind, str) else kind)


def dbar_of_chi(pu: PartitionOfUnity, z):
    res = pu.dbar_chi1(z)
    return complex(res) if np.ndim(res) == 0 else res


# --------------------------------------------------------------------------
# supports: convex sets cut out by quadratics concave along every ray

@dataclass
class BandSupport:
    """The band E.  Along z + rho e^{i theta} both boundary conditions
    alpha(y) -+ (x - pi/2) > 0 are concave quadratics in rho."""

    center: complex = np.pi / 2
    radius: float = np.pi / 2

    def contains(self, z):
        return contains(TRANSITION_BAND_E, z)

    def ray_quadratics(self, z, c, s):
        x0, y0 = z.real, z.imag
        a = -(s * s) / np.pi
        out = []
        for sg in (1.0, -1.0):
            b = -2 * y0 * s / np.pi - sg * c
            c0 = np.pi / 4 - y0 * y0 / np.pi - sg * (x0 - np.pi / 2)
            out.append((a, b, c0))
        return out

    def critical_angles(self, z):
        return [np.angle(Z0 - z), np.angle(Z1 - z)]

    def distance(self, z):
        y = np.linspace(-np.pi / 2, np.pi / 2, 801)
        b = np.concatenate([np.pi / 2 + alpha(y) + 1j * y, np.pi / 2 - alpha(y) + 1j * y])
        z = np.asarray(z, dtype=complex)
        d = np.array([np.min(np.abs(b - zz)) for zz in z.ravel()]).reshape(z.shape)
        return np.where(self.contains(z), 0.0, d)

    def ambient(self, order: int = 16):
        # x = pi/2 + alpha(y) eta: the density v dA is smooth for v = -phi0 dbar chi1
        # psi' ~ e^{-1/t} at the band edges: Gauss needs several panels across
        eta_br = np.linspace(-1.0, 1.0, 9)
        y_br = np.linspace(-np.pi / 2, np.pi / 2, 9)
        eta, we = panel_rule(eta_br, order)
        y, wy = panel_rule(y_br, order)
        E_, Y_ = np.meshgrid(eta, y, indexing="ij")
        al = alpha(Y_)
        return (np.pi / 2 + al * E_ + 1j * Y_).ravel(), (np.outer(we, wy) * al).ravel()


@dataclass
class DiscSupport:
    center: complex
    radius: float

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def ray_quadratics(self, z, c, s):
        d = z - self.center
        b = -2 * (d.real * c + d.imag * s)
        return [(-np.ones_like(c), b, self.radius ** 2 - abs(d) ** 2 + 0 * c)]

    def critical_angles(self, z):
        # tangency directions from outside targets (arbitrary angles inside)
        d = self.center - np.asarray(z, dtype=complex)
        h = np.arcsin(np.clip(self.radius / np.maximum(np.abs(d), 1e-300), 0, 1))
        return [np.angle(d) - h, np.angle(d) + h]

    def distance(self, z):
        return np.maximum(np.abs(np.asarray(z) - self.center) - self.radius, 0.0)

    def ambient(self, order: int = 16):
        r, wr = panel_rule(np.linspace(0, self.radius, 3), order)
        th, wt = panel_rule(np.linspace(0, 2 * np.pi, 9), order)
        R_, T_ = np.meshgrid(r, th, indexing="ij")
        return (self.center + R_ * np.exp(1j * T_)).ravel(), (np.outer(wr, wt) * R_).ravel()


def _positive_interval(a, b, c0):
    """Interval where a rho^2 + b rho + c0 > 0 for a <= 0 (elementwise)."""
    a = np.minimum(a, -1e-300)
    disc = b * b - 4 * a * c0
    ok = disc > 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    q = -0.5 * (b + np.where(b >= 0, sq, -sq))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a
        r2 = np.where(q != 0, c0 / q, 0.0)
    lo = np.where(ok, np.minimum(r1, r2), np.inf)
    hi = np.where(ok, np.maximum(r1, r2), -np.inf)
    return lo, hi


@dataclass
class DbarDatum:
    """Right-hand side v of dbar u = v, with its support geometry.

    ``fn`` evaluates v on the support.  ``phi0`` is the holomorphic source
    when v = -phi0 dbar chi1 (None for synthetic data).
    """

    fn: Callable
    support: object
    phi0: Optional[Callable] = None
    partition: Optional[PartitionOfUnity] = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        m = self.support.contains(z)
        return np.where(m, np.asarray(self.fn(np.where(m, z, self.support.center)), dtype=complex), 0.0)

    def field(self, rule) -> ComplexField:
        return ComplexField(rule, self(rule.nodes), self)

    def l2_norm_sq(self, order: int = 24) -> float:
        z, w = self.support.ambient(order)
        return float(np.sum(w * np.abs(self(z)) ** 2))


def dbar_datum(phi0: Callable, pu: PartitionOfUnity) -> DbarDatum:
    """v = -phi0 dbar chi1, supported in E."""
    return DbarDatum(lambda z: -np.asarray(phi0(z), dtype=complex) * pu.dbar_chi1(z),
                     BandSupport(), phi0, pu)


def disc_datum(center: complex, radius: float, value: complex = 1.0) -> DbarDatum:
    return DbarDatum(lambda z: value + 0 * np.asarray(z, dtype=complex), DiscSupport(center, radius))


# --------------------------------------------------------------------------
# Cauchy-Pompeiu solver

NEAR_DISTANCE_E = 0.3


def _angle_breaks(crit, levels: int):
    # rows of equal length: 16 uniform panels plus ratio-2 grading toward
    # each critical angle (coincident breaks give zero-length panels)
    nt = crit.shape[0]
    base = np.broadcast_to(np.linspace(0.0, 2 * np.pi, 17), (nt, 17))
    off = np.pi / 8 * 2.0 ** -np.arange(1, levels + 1)
    off = np.concatenate([-off, [0.0], off])
    pts = (crit[:, :, None] + off[None, None, :]).reshape(nt, -1) % (2 * np.pi)
    return np.sort(np.concatenate([base, pts], axis=1), axis=1)


def _rows_rule(br, order):
    x, w = gauss_legendre(order)
    a, b = br[:, :-1, None], br[:, 1:, None]
    t = 0.5 * (a + b) + 0.5 * (b - a) * x
    return t.reshape(len(br), -1), (0.5 * (b - a) * w).reshape(len(br), -1)


def _pompeiu_polar(v: DbarDatum, z, order: int, levels: int, rho_panels: int, rho_grade: int):
    # zeta = z + rho e^{i theta}: v(zeta) / (z - zeta) dA = -v e^{-i theta} d rho d theta
    z = np.asarray(z, dtype=complex)
    crit = np.atleast_2d(np.asarray(v.support.critical_angles(z), dtype=float).T)
    th, wt = _rows_rule(_angle_breaks(crit, levels), order)
    c, s = np.cos(th), np.sin(th)
    lo = np.zeros_like(th)
    hi = np.full_like(th, np.inf)
    for a, b, c0 in v.support.ray_quadratics(z[:, None], c, s):
        l, h = _positive_interval(a, b, c0)
        lo = np.maximum(lo, l)
        hi = np.minimum(hi, h)
    ln = np.where(hi > lo, hi - lo, 0.0)
    x, wx = panel_rule(graded_breaks(0.0, 1.0, panels=rho_panels, grade_left=rho_grade,
                                     grade_right=rho_grade), order)
    e = np.exp(1j * th)
    zeta = z[:, None, None] + (lo + ln * 0.0)[:, :, None] * e[:, :, None]
    zeta = zeta + (ln[:, :, None] * x[None, None, :]) * e[:, :, None]
    live = ln[:, :, None] > 0
    vals = np.where(live, v(np.where(live, zeta, v.support.center)), 0.0)
    inner = (vals * wx).sum(axis=2) * ln
    return -np.sum(wt * np.conj(e) * inner, axis=1) / np.pi


def solve_dbar(v: DbarDatum, z, *, order: int = 12, levels: int = 12, rho_panels: int = 4,
               rho_grade: int = 4, ambient_order: int = 16, chunk: int = 8) -> np.ndarray:
    """u(z) = (1/pi) int v(zeta) / (z - zeta) dA(zeta).

    Targets in or within NEAR_DISTANCE_E of the (convex) support integrate
    in local polar coordinates about z over the whole support, which absorbs
    the 1/(z - zeta) singularity; the other targets use the fixed ambient
    rule of the support.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    out = np.zeros(z.shape, dtype=complex)
    far = v.support.distance(z) > NEAR_DISTANCE_E
    if np.any(far):
        zs, ws = v.support.ambient(ambient_order)
        q = ws * v(zs)
        if not np.all(np.isfinite(q)):
            raise ValueError("non-finite dbar datum")
        idx = np.flatnonzero(far)
        for i in range(0, len(idx), 256):
            sel = idx[i:i + 256]
            out[sel] = (q[None, :] / (z[sel, None] - zs[None, :])).sum(axis=1) / np.pi
    idx = np.flatnonzero(~far)
    for i in range(0, len(idx), chunk):
        sel = idx[i:i + chunk]
        out[sel] = _pompeiu_polar(v, z[sel], order, levels, rho_panels, rho_grade)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite dbar datum")
    return out.reshape(shape)


def pompeiu_boundary_form(phi0: Callable, pu: PartitionOfUnity, z) -> np.ndarray:
    """Independent evaluation of the Pompeiu solution for v = -phi0 dbar chi1.

    By Cauchy-Pompeiu applied to h1 = chi2 phi0 on D (h1 = phi0 on the left
    sides, 0 on the right sides):

        u = h1 1_D - (1 / 2 pi i) int_{left sides} phi0(zeta) / (zeta - z) dzeta.
    """
    from .cauchy import BoundaryTrace, decompose

    z = np.asarray(z, dtype=complex)
    pieces = [p for p in decompose(BoundaryTrace(phi0)) if p.k == 1]
    inD = contains(SQUARE_D, z)
    h1 = np.where(inD, pu.chi2(z) * np.asarray(phi0(z), dtype=complex), 0.0)
    return h1 - 0.5 * sum(p(z) for p in pieces)


# --------------------------------------------------------------------------
# rules on the sectors: a shared inner part and cheap far annuli

INNER_RADIUS = 4.0
FAST_SOLVER = dict(order=8, levels=6, rho_panels=2, rho_grade=2, chunk=32)


@dataclass
class SectorRules:
    """Quadrature on Delta (k = 1) or pi - Delta (k = 2) truncated at |z| < R
    (|pi - z| < R for k = 2), split at INNER_RADIUS so that the expensive
    inner nodes are shared by every R."""

    k: int
    resolution: int = 3

    def __post_init__(self):
        dom = SECTOR_DELTA if self.k == 1 else SECTOR_PI_MINUS_DELTA
        rule = make_area_rule(dom, self.resolution, INNER_RADIUS, levels=4, panels=2,
                              special_radii=(np.pi / np.sqrt(2),), angular_levels=6)
        self.inner = (rule.nodes, rule.weights)

    def outer(self, R: float):
        if R <= INNER_RADIUS:
            return np.zeros(0, dtype=complex), np.zeros(0)
        n = max(int(np.ceil(np.log2(R / INNER_RADIUS))), 1) * 2
        r, wr = panel_rule(np.geomspace(INNER_RADIUS, R, n + 1), 8)
        th, wt = panel_rule(np.linspace(-np.pi / 4, np.pi / 4, 9), 8)
        Rr, Tt = np.meshgrid(r, th, indexing="ij")
        z = (Rr * np.exp(1j * Tt)).ravel()
        w = (np.outer(wr, wt) * Rr).ravel()
        return (z if self.k == 1 else np.pi - z), w


def square_rule(resolution: int = 4):
    rule = make_area_rule(SQUARE_D, resolution, levels=4, panels=2)
    return rule.nodes, rule.weights


def hormander_ratio(v: DbarDatum, u_fn: Callable, R: float = 16.0, resolution: int = 3,
                    cache: Optional[dict] = None) -> dict:
    """2 int_Omega |u|^2 (1 + |z|^2)^-2 dA / int |v|^2 dA (a = 2); reported, not asserted.

    Omega = Delta u (pi - Delta) is integrated as Delta + (pi - Delta) - D.
    ``cache`` maps rule names to (nodes, weights, u values) to reuse solves.
    """
    cache = {} if cache is None else cache

    def part(name, z, w):
        if name not in cache:
            cache[name] = (z, w, u_fn(z))
        z, w, u = cache[name]
        return float(np.sum(w * np.abs(u) ** 2 / (1 + np.abs(z) ** 2) ** 2))

    lhs = -part("D", *square_rule())
    for k in (1, 2):
        sr = SectorRules(k, resolution)
        lhs += part(f"inner{k}", *sr.inner) + part(f"outer{k}:{R:g}", *sr.outer(R))
    rhs = v.l2_norm_sq()
    return {"weighted_u": lhs, "v_l2_sq": rhs, "ratio": 2 * lhs / rhs if rhs > 0 else 0.0,
            "holds": bool(2 * lhs <= rhs)}


# --------------------------------------------------------------------------
# the split

@dataclass
class SplitReport:
    identity_error: float
    dbar_residuals: dict
    norms: dict
    hormander_ratio: Optional[float]
    weighted_norm: float
    solver_check: Optional[float] = None
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["schema"] = 1
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=float)


@dataclass
class CousinSplit:
    phi: Callable
    multiplier: Callable
    partition: PartitionOfUnity
    datum: DbarDatum
    solver_kw: dict = field(default_factory=dict)

    def phi0(self, z):
        return np.asarray(self.phi(z), dtype=complex) * self.multiplier(z)

    def u(self, z):
        return solve_dbar(self.datum, z, **self.solver_kw)

    def h1(self, z):
        z = np.asarray(z, dtype=complex)
        inD = contains(SQUARE_D, z)
        return np.where(inD, self.partition.chi2(z) * self.phi0(np.where(inD, z, np.pi / 2)), 0.0)

    def h2(self, z):
        z = np.asarray(z, dtype=complex)
        inD = contains(SQUARE_D, z)
        return np.where(inD, -self.partition.chi1(z) * self.phi0(np.where(inD, z, np.pi / 2)), 0.0)

    def f1(self, z, u=None):
        """(h1 - u) / P, holomorphic on Delta."""
        z = np.asarray(z, dtype=complex)
        u = self.u(z) if u is None else u
        return (self.h1(z) - u) / self.multiplier(z)

    def f2(self, z, u=None):
        """-(h2 - u) / P, holomorphic on pi - Delta."""
        z = np.asarray(z, dtype=complex)
        u = self.u(z) if u is None else u
        return -(self.h2(z) - u) / self.multiplier(z)


def _fd_dbar(fn, z, h):
    # fourth-order central differences
    def d(e):
        return (-fn(z + 2 * e) + 8 * fn(z + e) - 8 * fn(z - e) + fn(z - 2 * e)) / (12 * h)
    return np.abs(0.5 * (d(h) + 1j * d(1j * h)))


def identity_nodes(n: int = 24, margin: float = 0.05):
    """Cell-centre grid of D kept at distance >= margin from dD."""
    p = (np.arange(n) + 0.5) / n
    P_, Q_ = np.meshgrid(p, p, indexing="ij")
    z = (P_ * Z1 + Q_ * Z0).ravel()
    x, y = z.real, z.imag
    return z[np.pi / 2 - np.abs(x - np.pi / 2) - np.abs(y) >= margin * np.sqrt(2)]


def holomorphy_nodes(k: int, n: int = 6, margin: float = 0.1):
    """Probe points in the sector Omega_k: a polar lattice at distance >= margin from its edges."""
    r = np.array([0.4, 0.9, 1.4, 2.0, 2.6, 3.5, 5.0])
    th = np.linspace(-np.pi / 4, np.pi / 4, n + 2)[1:-1]
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    z = z[np.abs(z.real) - np.abs(z.imag) >= margin * np.sqrt(2)]
    return z if k == 1 else np.pi - z


def sector_norm(fn, k: int, R: float, resolution: int = 3) -> float:
    """||fn||_{A^2} on the sector Omega_k truncated at radius R."""
    sr = SectorRules(k, resolution)
    tot = 0.0
    for z, w in (sr.inner, sr.outer(R)):
        tot += float(np.sum(w * np.abs(fn(z)) ** 2))
    return float(np.sqrt(tot))


def cousin_split(phi: Callable, *, multiplier: Callable = P4, cutoff: CutoffKind = CutoffKind.EXP,
                 radii: Sequence[float] = (8.0, 16.0, 32.0), resolution: int = 3, h: float = 5e-3,
                 check_solver: bool = True, hormander: bool = True,
                 solver_kw: Optional[dict] = None) -> tuple:
    """Split phi = f1 + f2 on D with f1 holomorphic on Delta, f2 on pi - Delta.

    Returns (f1, f2, report).  f1 and f2 are callables; the report carries the
    identity error on D, finite-difference dbar residuals of f1 and f2 at
    interior probe points (step ``h``), truncated sector norms for each
    radius in ``radii``, and the measured a = 2 Hormander ratio.  Norms use
    the lighter FAST_SOLVER settings; residuals use the full solver.
    """
    t0 = time.time()
    wn = vertex_weighted_norm(phi)
    if not np.isfinite(wn.value):
        raise ValueError("phi has infinite vertex-weighted norm")
    pu = build_partition(cutoff)
    phi0 = lambda z: np.asarray(phi(z), dtype=complex) * multiplier(z)
    datum = dbar_datum(phi0, pu)
    sp = CousinSplit(phi, multiplier, pu, datum, dict(solver_kw or {}))
    fast = lambda z: solve_dbar(datum, z, **FAST_SOLVER)

    zi = identity_nodes()
    ident = float(np.max(np.abs(np.asarray(phi(zi)) - sp.f1(zi, 0) - sp.f2(zi, 0))))

    res = {}
    for k, fn in ((1, sp.f1), (2, sp.f2)):
        res[f"f{k}"] = float(np.max(_fd_dbar(fn, holomorphy_nodes(k), h)))

    cache = {}
    norms = {}
    for k, fn in ((1, sp.f1), (2, sp.f2)):
        sr = SectorRules(k, resolution)
        zin, win = sr.inner
        uin = fast(zin)
        cache[f"inner{k}"] = (zin, win, uin)
        inner = float(np.sum(win * np.abs(fn(zin, uin)) ** 2))
        norms[f"f{k}"] = {}
        for R in radii:
            zo, wo = sr.outer(R)
            uo = fast(zo)
            cache[f"outer{k}:{R:g}"] = (zo, wo, uo)
            norms[f"f{k}"][f"{R:g}"] = float(np.sqrt(inner + np.sum(wo * np.abs(fn(zo, uo)) ** 2)))

    hr = hormander_ratio(datum, fast, 16.0, resolution, cache) if hormander else None
    chk = None
    if check_solver:
        zc = np.concatenate([zi[::7], holomorphy_nodes(1)[::3], holomorphy_nodes(2)[::3]])
        chk = float(np.max(np.abs(sp.u(zc) - pompeiu_boundary_form(phi0, pu, zc))))
    rep = SplitReport(ident, res, norms, None if hr is None else hr["ratio"], wn.value ** 2, chk,
                      time.time() - t0, {"hormander": hr})
    return sp.f1, sp.f2, rep


def norms_stable(norms: dict, tol: float = MEMBERSHIP_DRIFT) -> bool:
    vals = [norms[k] for k in sorted(norms, key=float)]
    return bool(all(np.isfinite(vals)) and abs(vals[-1] - vals[-2]) <= tol * vals[-1])
