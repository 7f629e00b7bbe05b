"""Boundary-controlled heat equation on (0, pi) in the sine basis.

    y_t = y_xx,  y(t, 0) = u0(t),  y(t, pi) = upi(t),  y(0) = f

The state at time t is T_t f + Phi_t u.  Near x = 0 the control part splits
into the half-line operator

    [Phi~ u0](z) = int_0^tau z e^{-z^2/(4(tau - s))} / (2 sqrt(pi) (tau - s)^{3/2}) u0(s) ds,

its mirror image for upi, and remainders built from the image sum K0~.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import legendre
from scipy.special import erfc, gamma

from .domains import (GridQuadrature, SECTOR_DELTA, SQUARE_D, Measure, contains,
                      gauss_legendre, make_area_rule, panel_rule)
from .spaces import ComplexField, bergman_norm
from .transforms import SupportError, TimeSignal, apply_G, apply_T, apply_T_inverse, laplace

log = logging.getLogger(__name__)

DEFAULT_MODES = 200
DEFAULT_IMAGES = 10
COND_LIMIT = 1e12
LAMBDA_SWEEP = tuple(10.0 ** -k for k in range(14, 1, -1))


# --------------------------------------------------------------------------
# states and controls

@dataclass
class SineState:
    """x -> sum_n a_n sin(n x) on (0, pi), n = 1..N, at time ``t``."""

    coeffs: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        if self.t < 0:
            raise ValueError("time stamp must be nonnegative")

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, N: int = DEFAULT_MODES, t: float = 0.0) -> "SineState":
        return cls(np.zeros(N), t)

    @classmethod
    def mode(cls, n: int, N: int = DEFAULT_MODES) -> "SineState":
        a = np.zeros(N)
        a[n - 1] = 1.0
        return cls(a)

    @classmethod
    def from_function(cls, g: Callable, N: int = DEFAULT_MODES, order: int = 512) -> "SineState":
        """Sine coefficients (2/pi) int_0^pi g(x) sin(nx) dx by Gauss-Legendre."""
        x, w = gauss_legendre(order)
        x = np.pi / 2 * (x + 1)
        w = np.pi / 2 * w
        n = np.arange(1, N + 1)
        return cls(2 / np.pi * (np.sin(np.outer(n, x)) @ (w * g(x))))

    def norm(self) -> float:
        """sqrt(sum |a_n|^2), proportional to the L2(0, pi) norm."""
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, x):
        x = np.asarray(x)
        n = np.arange(1, self.N + 1)
        return np.sin(np.multiply.outer(x, n)) @ self.coeffs

    def __add__(self, other: "SineState") -> "SineState":
        n = max(self.N, other.N)
        return SineState(_pad(self.coeffs, n) + _pad(other.coeffs, n), max(self.t, other.t))

    def __sub__(self, other: "SineState") -> "SineState":
        return self + SineState(-other.coeffs, other.t)

    def truncated(self, N: int) -> "SineState":
        return SineState(_pad(self.coeffs, N), self.t)


def _pad(a, n):
    out = np.zeros(n, dtype=complex)
    m = min(n, len(a))
    out[:m] = a[:m]
    return out


@dataclass
class ControlSignal:
    """Boundary controls u0 at x = 0 and upi at x = pi on (0, tau)."""

    u0: TimeSignal
    upi: TimeSignal
    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("horizon must be positive")

    @classmethod
    def from_functions(cls, f0: Optional[Callable], fpi: Optional[Callable], tau: float,
                       analytic: bool = True) -> "ControlSignal":
        z = lambda s: np.zeros(np.shape(s), dtype=complex)
        return cls(TimeSignal.on_interval(f0 or z, tau, analytic=analytic),
                   TimeSignal.on_interval(fpi or z, tau, analytic=analytic), tau)

    @classmethod
    def zero(cls, tau: float) -> "ControlSignal":
        return cls.from_functions(None, None, tau)

    def norms(self) -> tuple:
        return self.u0.norm(), self.upi.norm()


# --------------------------------------------------------------------------
# semigroup, control-to-state map, simulation

def semigroup(f: SineState, t: float) -> SineState:
    """a_n -> e^{-n^2 t} a_n."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = np.arange(1, f.N + 1)
    return SineState(np.exp(-n ** 2 * t) * f.coeffs, f.t + t)


def time_rule(t: float, points: Sequence[float] = (), order: int = 16,
              levels: int = 34) -> tuple:
    """Nodes and weights on (0, t), graded geometrically toward sigma = t and
    split at ``points`` (jumps of piecewise controls)."""
    br = [0.0, t] + list(t - t * 2.0 ** -np.arange(1, levels + 1)) + [p for p in points if 0 < p < t]
    for p in points:
        if 0 < p < t:
            br += [p + s * min(p, t - p) * 2.0 ** -k for k in range(1, 12) for s in (-1, 1)]
    br = np.unique(np.clip(br, 0, t))
    return panel_rule(br, order)


def _moments(sig: TimeSignal, t: float, n: np.ndarray) -> np.ndarray:
    # int_0^t e^{-n^2 (t - s)} u(s) ds for each n
    s, w = time_rule(t, sig.break_points())
    vals = sig(s)
    return np.exp(-np.outer(n ** 2, t - s)) @ (w * vals)


def control_to_state(u: ControlSignal, N: int = DEFAULT_MODES, t: Optional[float] = None) -> SineState:
    """Phi_t u: b_n = (2/pi) n [int e^{n^2(s-t)} u0 ds + (-1)^{n+1} int e^{n^2(s-t)} upi ds]."""
    t = u.tau if t is None else t
    if not 0 <= t <= u.tau * (1 + 1e-14):
        raise ValueError("time outside [0, tau]")
    n = np.arange(1, N + 1)
    if t == 0:
        return SineState(np.zeros(N), 0.0)
    b = _moments(u.u0, t, n) + (-1.0) ** (n + 1) * _moments(u.upi, t, n)
    return SineState(2 / np.pi * n * b, t)


def simulate(f: SineState, u: ControlSignal, t_grid: Sequence[float]) -> list:
    """States y(t) = T_t f + Phi_t (u restricted to [0, t]) on ``t_grid``."""
    out = []
    for t in t_grid:
        if t < 0 or t > u.tau * (1 + 1e-14):
            raise ValueError(f"time {t} outside [0, tau]")
        y = semigroup(f, t) + control_to_state(u, f.N, min(t, u.tau))
        y.t = t
        out.append(y)
    return out


# --------------------------------------------------------------------------
# the principal operator Phi~

def _tail_in_v(fn: Callable, v1: np.ndarray, z: np.ndarray, tau: float, panels: int = 20,
               order: int = 8) -> np.ndarray:
    """(2/sqrt pi) int_{v1}^{inf} e^{-v^2} fn(tau - z^2/(4 v^2)) dv on v = v1 + s, s >= 0.

    The horizontal path is a deformation of the ray through v1 and is valid
    for analytic fn because Re v1 > 0 keeps e^{-v^2} decaying in between.
    Panels are geometric near s = 0 (fn varies on the scale |v1|) and
    uniform further out, where the Gaussian factor dominates.
    """
    x, w = gauss_legendre(order)
    re = v1.real
    smax = -re + np.sqrt(re ** 2 + 40.0)
    s1 = np.minimum(0.5, smax / 2)
    h0 = 1e-4 * np.minimum(np.abs(v1), 1.0) * np.minimum(1.0, 1.0 / np.maximum(np.abs(v1), 1e-300))
    h0 = np.minimum(np.maximum(h0, 1e-14), s1 / 4)
    k = np.arange(panels + 1) / panels
    u = np.arange(1, 13) / 12
    br = np.concatenate([np.zeros((len(v1), 1)),
                         h0[:, None] * (s1 / h0)[:, None] ** k[None, :],
                         s1[:, None] + (smax - s1)[:, None] * u[None, :]], axis=1)
    a, b = br[:, :-1], br[:, 1:]
    mid, half = (a + b) / 2, (b - a) / 2
    s = (mid[:, :, None] + half[:, :, None] * x).reshape(len(v1), -1)
    ws = (half[:, :, None] * w).reshape(len(v1), -1)
    v = v1[:, None] + s
    sig = tau - (z[:, None] / (2 * v)) ** 2
    vals = np.exp(-v * v) * fn(sig)
    return 2 / np.sqrt(np.pi) * np.sum(ws * vals, axis=1)


def phi_tilde(u0: TimeSignal, z, tau: Optional[float] = None, chunk: int = 1024, **kw):
    """[Phi~_tau u0](z) for z with |arg z| < pi/4 (and z = 0 as a limit).

    Analytic or piecewise-analytic controls are integrated in the variable
    v = z / (2 sqrt(tau - sigma)): the piece on [a, b] contributes
    H(v(a)) - H(v(b)) with H the horizontal-path tail :func:`_tail_in_v`.
    For u0 = 1 this is erfc(z / (2 sqrt tau)).  Sampled controls fall back to
    a graded time quadrature of the kernel.
    """
    tau = u0.tau if tau is None else tau
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    bad = (np.abs(np.angle(zf)) >= np.pi / 4) & (zf != 0)
    if np.any(bad):
        raise ValueError("phi_tilde requires |arg z| < pi/4")
    out = np.zeros(zf.shape, dtype=complex)
    pieces = u0.analytic_pieces()
    for i in range(0, len(zf), chunk):
        zc = zf[i:i + chunk]
        res = np.zeros(zc.shape, dtype=complex)
        nz = zc != 0
        if pieces is None:
            res[nz] = _phi_tilde_time(u0, zc[nz], tau)
        else:
            for a, b, fn in pieces:
                va = zc[nz] / (2 * np.sqrt(tau - a))
                res[nz] += _tail_in_v(fn, va, zc[nz], tau, **kw)
                if b < tau:
                    vb = zc[nz] / (2 * np.sqrt(tau - b))
                    res[nz] -= _tail_in_v(fn, vb, zc[nz], tau, **kw)
        # z -> 0: the kernel tends to the point mass at sigma = tau
        if np.any(~nz):
            res[~nz] = u0(np.array([tau]))[0]
        out[i:i + chunk] = res
    return out.reshape(shape) if shape else complex(out[0])


def _phi_tilde_time(u0: TimeSignal, z: np.ndarray, tau: float) -> np.ndarray:
    s, w = time_rule(tau, u0.break_points(), order=16, levels=40)
    r = tau - s
    k = z[:, None] * np.exp(-z[:, None] ** 2 / (4 * r)) / (2 * np.sqrt(np.pi) * r ** 1.5)
    return k @ (w * u0(s))


def phi_tilde_chain(u0: TimeSignal, z) -> np.ndarray:
    """The same operator evaluated as G(L(T u0)) (an independent route)."""
    Tu = apply_T(u0)
    g = apply_G(lambda s: laplace(Tu, s))
    return g(np.asarray(z, dtype=complex))


def phi_tilde_mirror(upi: TimeSignal, z, tau: Optional[float] = None):
    """[Phi~~ upi](z) = [Phi~ upi](pi - z)."""
    return phi_tilde(upi, np.pi - np.asarray(z, dtype=complex), tau)


# --------------------------------------------------------------------------
# kernels and remainders

# smooth controls on (0, 1) vanishing at sigma = 0, where the truncated-sector
# norm of Phi~ u otherwise loses about 2 |u(0)|^2 / (pi R^2)
ISOMETRY_FAMILY = {
    "s": lambda s: s + 0j,
    "s^2": lambda s: s * s + 0j,
    "s(1-s)": lambda s: s * (1 - s) + 0j,
    "sin(pi s)": lambda s: np.sin(np.pi * s) + 0j,
    "sin(2 pi s)": lambda s: np.sin(2 * np.pi * s) + 0j,
    "1-cos(pi s)": lambda s: 1 - np.cos(np.pi * s) + 0j,
    "s e^-s": lambda s: s * np.exp(-s) + 0j,
    "s cos(3s)": lambda s: s * np.cos(3 * s) + 0j,
    "sin(s) e^s": lambda s: np.sin(s) * np.exp(s) + 0j,
    "s(1-s) e^2s": lambda s: s * (1 - s) * np.exp(2 * s) + 0j,
}


@dataclass
class IsometryReport:
    ratio: float
    norm: float
    control_norm: float
    tail_bound: float
    nodes: int


def isometry_ratio(u0: Callable | TimeSignal, tau: float = 1.0, R: float = 16.0,
                   resolution: int = 16, angular_levels: int = 14, rule=None) -> IsometryReport:
    """||Phi~_tau u0||_{A2(Delta, |z| < R)} / ||u0||_{L2(0, tau)}."""
    sig = u0 if isinstance(u0, TimeSignal) else TimeSignal.on_interval(u0, tau)
    if rule is None:
        rule = make_area_rule(SECTOR_DELTA, resolution, R, angular_levels=angular_levels)
    rep = bergman_norm(phi_tilde(sig, rule.nodes, tau), SECTOR_DELTA, rule=rule)
    return IsometryReport(rep.value / sig.norm(), rep.value, sig.norm(), rep.tail_bound, len(rule.nodes))


class KernelKind(enum.Enum):
    K0_SERIES = "K0Series"
    K0_TILDE_GAUSSIAN = "K0TildeGaussian"


@dataclass
class KernelSum:
    kind: KernelKind
    sigma: float
    z: complex
    cutoff: int
    value: complex
    tail_bound: float


def kernel_K0_series(sigma: float, x, N: int = DEFAULT_MODES) -> KernelSum:
    """K0(sigma, x) = -(2/pi)(sum_{n<=N} e^{-n^2 sigma} cos(n x) + 1).

    Only the x-derivative enters the state, so the additive constant is
    immaterial.  The tail bound sums e^{-n^2 sigma} over n > N.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = np.arange(1, N + 1)
    val = -(2 / np.pi) * (np.sum(np.exp(-n ** 2 * sigma) * np.cos(n * x)) + 1)
    q = np.exp(-(2 * N + 3) * sigma)
    tail = (2 / np.pi) * np.exp(-(N + 1) ** 2 * sigma) / (1 - q) if q < 1 else np.inf
    return KernelSum(KernelKind.K0_SERIES, sigma, complex(x), N, complex(val), float(tail))


def _image_terms(sigma, z, m):
    return np.exp(-(z + 2 * m * np.pi) ** 2 / (4 * sigma))


def _image_tail(sigma, z, M):
    # first omitted terms on each side times the ratio bound of a Gaussian tail
    tail = 0.0
    for side in (1, -1):
        m1, m2 = side * (M + 1), side * (M + 2)
        t1 = abs(_image_terms(sigma, z, m1))
        t2 = abs(_image_terms(sigma, z, m2))
        q = t2 / t1 if t1 > 0 else 0.0
        tail += t1 / (1 - q) if q < 1 else np.inf
    return tail


def kernel_K0_tilde(sigma: float, z: complex, M: int = DEFAULT_IMAGES) -> KernelSum:
    """K0~(sigma, z) = -(pi sigma)^{-1/2} sum_{1 <= |m| <= M} e^{-(z + 2 m pi)^2/(4 sigma)}."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    m = np.concatenate([np.arange(-M, 0), np.arange(1, M + 1)])
    pref = 1.0 / np.sqrt(np.pi * sigma)
    val = -pref * np.sum(_image_terms(sigma, z, m))
    return KernelSum(KernelKind.K0_TILDE_GAUSSIAN, sigma, complex(z), M, complex(val),
                     float(pref * _image_tail(sigma, z, M)))


def dK0_tilde_ds(r, z, M: int = DEFAULT_IMAGES):
    """d/ds K0~(r, s) = sum_{m != 0} (s + 2 m pi) e^{-(s+2m pi)^2/(4r)} / (2 sqrt(pi) r^{3/2})."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(np.broadcast(r, z).shape, dtype=complex)
    for m in list(range(-M, 0)) + list(range(1, M + 1)):
        w = z + 2 * m * np.pi
        out += w * np.exp(-w * w / (4 * r))
    return out / (2 * np.sqrt(np.pi) * r ** 1.5)


def _check_remainder_domain(z, M):
    for m in list(range(-M, 0)) + list(range(1, M + 1)):
        if np.any(((z + 2 * m * np.pi) ** 2).real <= 0):
            raise ValueError("remainder undefined: an image point leaves the double sector")


def remainder_R0(u0: TimeSignal, z, M: int = DEFAULT_IMAGES, tau: Optional[float] = None,
                 order: int = 16):
    """[R_{0,tau} u0](z) = int_0^tau dK0~/ds(tau - sigma, z) u0(sigma) d sigma.

    Requires every image point z + 2 m pi to satisfy Re (z + 2 m pi)^2 > 0,
    which holds on D.
    """
    tau = u0.tau if tau is None else tau
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    _check_remainder_domain(zf, M)
    s, w = time_rule(tau, u0.break_points(), order=order, levels=20)
    vals = w * u0(s)
    out = np.empty(zf.shape, dtype=complex)
    for i in range(0, len(zf), 512):
        K = dK0_tilde_ds((tau - s)[None, :], zf[i:i + 512, None], M)
        out[i:i + 512] = K @ vals
    return out.reshape(shape) if shape else complex(out[0])


def remainder_R0_images(u0: TimeSignal, z, M: int = DEFAULT_IMAGES, tau: Optional[float] = None):
    """The same remainder as sum_{m=1}^{M} [Phi~ u0](z + 2 m pi) - [Phi~ u0](2 m pi - z),
    using that the kernel of Phi~ is odd in z."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for m in range(1, M + 1):
        out += phi_tilde(u0, z + 2 * m * np.pi, tau) - phi_tilde(u0, 2 * m * np.pi - z, tau)
    return out


def remainder_Rpi(upi: TimeSignal, z, M: int = DEFAULT_IMAGES, tau: Optional[float] = None):
    """[R_{pi,tau} upi](z) = [R_{0,tau} upi](pi - z)."""
    return remainder_R0(upi, np.pi - np.asarray(z, dtype=complex), M, tau)


def state_from_operators(u: ControlSignal, x, M: int = DEFAULT_IMAGES):
    """Phi~ u0 + Phi~~ upi + R0 u0 + Rpi upi evaluated at points x."""
    x = np.asarray(x, dtype=complex)
    return (phi_tilde(u.u0, x, u.tau) + phi_tilde_mirror(u.upi, x, u.tau)
            + remainder_R0(u.u0, x, M, u.tau) + remainder_Rpi(u.upi, x, M, u.tau))


def legendre_basis(tau: float, K: int) -> list:
    """Orthonormal Legendre polynomials on [0, tau] as analytic callables."""
    out = []
    for k in range(K):
        c = np.zeros(k + 1)
        c[k] = np.sqrt((2 * k + 1) / tau)
        out.append(lambda s, _c=c: legendre.legval(2 * np.asarray(s) / tau - 1, _c))
    return out


def remainder_norm_proxy(tau: float, K: int = 6, M: int = DEFAULT_IMAGES,
                         resolution: int = 12) -> float:
    """max over an orthonormal Legendre basis of ||R_{0,tau} p_k||_{A2(D)}."""
    rule = make_area_rule(SQUARE_D, resolution, levels=0, panels=2)
    best = 0.0
    for p in legendre_basis(tau, K):
        sig = TimeSignal.on_interval(p, tau)
        vals = remainder_R0(sig, rule.nodes, M, tau)
        best = max(best, float(np.sqrt(rule.integrate(np.abs(vals) ** 2))))
    return best


# --------------------------------------------------------------------------
# synthesis by regularized least squares

@dataclass
class SynthesisReport:
    residual: float
    lam: float
    condition_estimate: float
    K: int
    N: int
    ill_conditioned: bool
    lcurve: list = field(default_factory=list)
    final_state_norm: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"residual": self.residual, "lambda": self.lam,
             "condition_estimate": self.condition_estimate, "K": self.K, "N": self.N,
             "ill_conditioned": self.ill_conditioned, "lcurve": self.lcurve}
        if self.final_state_norm is not None:
            d["final_state_norm"] = self.final_state_norm
        return d


def moment_matrix(tau: float, K: int, N: int) -> np.ndarray:
    """Columns: sine coefficients (N) of Phi_tau applied to each Legendre basis
    element on the left boundary (first K columns) and on the right (last K)."""
    n = np.arange(1, N + 1)
    s, w = time_rule(tau)
    E = np.exp(-np.outer(n ** 2, tau - s)) * w
    P = np.stack([p(s) for p in legendre_basis(tau, K)], axis=1)
    A = 2 / np.pi * n[:, None] * (E @ P)
    sign = (-1.0) ** (n + 1)
    return np.hstack([A, sign[:, None] * A])


def _lcurve_corner(res, sol):
    x, y = np.log(np.maximum(res, 1e-300)), np.log(np.maximum(sol, 1e-300))
    if len(x) < 3:
        return 0
    dx, dy = np.gradient(x), np.gradient(y)
    ddx, ddy = np.gradient(dx), np.gradient(dy)
    kappa = (dx * ddy - dy * ddx) / np.maximum((dx ** 2 + dy ** 2) ** 1.5, 1e-300)
    return int(np.argmax(kappa))


def _pick_lambda(sweep, sv):
    # sweep holds (lambda, residual, solution norm) in increasing lambda.  A
    # solution norm that stays within a factor 10 over the sweep means the
    # curve has no vertical leg (nothing is amplified): take the smallest
    # lambda with an acceptable condition estimate.  Otherwise take the
    # maximum-curvature corner.
    norms = np.array([s[2] for s in sweep])
    if norms.min() > 0 and norms.max() / norms.min() < 10:
        for la, _, _ in sweep:
            if np.sqrt((sv[0] ** 2 + la) / (sv[-1] ** 2 + la)) <= COND_LIMIT:
                return la
        return sweep[-1][0]
    i = _lcurve_corner(np.array([s[1] for s in sweep]), norms)
    return sweep[i][0]


def synthesize_lsq(target: SineState, tau: float, K: int = 24, lam: Optional[float] = None,
                   f: Optional[SineState] = None) -> tuple:
    """Control (u0, upi) in the span of K Legendre polynomials per boundary with
    T_tau f + Phi_tau u close to ``target``.

    Minimizes ||M c - b||^2 + lam ||c||^2 with b = target - T_tau f through
    the SVD of M.  When ``lam`` is None it is picked at the corner of the
    L-curve over 1e-14 .. 1e-2.  The reported residual is ||Phi_tau u - b|| / ||b||
    (absolute when b = 0).
    """
    N = target.N
    b = target.coeffs.copy()
    if f is not None:
        b = b - semigroup(f.truncated(N), tau).coeffs
    Mx = moment_matrix(tau, K, N)
    U, sv, Vt = np.linalg.svd(Mx, full_matrices=False)
    beta = U.conj().T @ b
    bnorm = np.linalg.norm(b)
    scale = bnorm if bnorm > 0 else 1.0

    def solve(la):
        fac = sv / (sv ** 2 + la)
        c = Vt.T @ (fac * beta)
        r = np.linalg.norm(Mx @ c - b) / scale
        return c, r

    sweep = []
    for la in LAMBDA_SWEEP:
        c, r = solve(la)
        sweep.append((la, r, float(np.linalg.norm(c))))
    if lam is None:
        lam = _pick_lambda(sweep, sv)
    c, r = solve(lam)
    cond = float(np.sqrt((sv[0] ** 2 + lam) / (sv[-1] ** 2 + lam)))
    ill = cond > COND_LIMIT
    if ill:
        warnings.warn(f"regularized moment system has condition estimate {cond:.2e}", RuntimeWarning)
    basis = legendre_basis(tau, K)
    c0, cpi = c[:K].copy(), c[K:].copy()
    u0 = lambda s, _c=c0: sum(ck * p(s) for ck, p in zip(_c, basis))
    upi = lambda s, _c=cpi: sum(ck * p(s) for ck, p in zip(_c, basis))
    u = ControlSignal.from_functions(u0, upi, tau)
    rep = SynthesisReport(float(r), float(lam), cond, K, N, ill,
                          [{"lambda": la, "residual": rr, "solution_norm": sn} for la, rr, sn in sweep])
    if f is not None:
        final = semigroup(f.truncated(N), tau) + SineState(Mx @ c)
        rep.final_state_norm = float(np.linalg.norm(final.coeffs - target.coeffs))
    return u, rep


# --------------------------------------------------------------------------
# synthesis through the unitary chain

class NotInRangeError(SupportError):
    """The target lies in X0 (support below 1/(4 tau)), not in Ran Phi~_tau."""

    def __init__(self, fraction: float, cutoff: float):
        ValueError.__init__(self, f"target is not in Ran Phi~_tau: {fraction:.3e} of the preimage "
                                  f"norm lies in (0, {cutoff:g}), the X0 part")
        self.fraction = fraction
        self.cutoff = cutoff


@dataclass(frozen=True)
class ChainTarget:
    """A target G L h on Delta with h known in closed form.

    kind:
      "erfc"        h = T 1, target erfc(z / (2 sqrt tau))
      "box"         h = T 1[a, b] (0 <= a < b <= tau)
      "x0_box"      h = 1[a, b] with b <= 1/(4 tau)   (not reachable through Phi~)
      "dictionary"  h(t) = (t - c)^p e^{-q (t - c)} for t > c, params (p, q, c)
      "zero"
    """

    kind: str
    tau: float
    params: tuple = ()

    def preimage(self) -> TimeSignal:
        tau = self.tau
        cut = 1 / (4 * tau)
        if self.kind == "zero":
            return TimeSignal.on_half_line(lambda t: np.zeros(np.shape(t), dtype=complex), start=cut)
        if self.kind == "erfc":
            return apply_T(TimeSignal.on_interval(lambda s: np.ones(np.shape(s), dtype=complex), tau))
        if self.kind == "box":
            a, b = self.params
            return apply_T(TimeSignal.piecewise([(a, b, lambda s: np.ones(np.shape(s), dtype=complex))], tau))
        if self.kind == "x0_box":
            a, b = self.params
            one = lambda t: np.ones(np.shape(t), dtype=complex)
            sig = TimeSignal.on_half_line(lambda t: ((np.real(t) >= a) & (np.real(t) <= b)) * 1.0 + 0j,
                                          analytic=False)
            sig.pieces = [(a, b, one)]
            return sig
        if self.kind == "dictionary":
            p, q, c = self.params
            fn = lambda t: (t - c) ** p * np.exp(-q * (t - c))
            return TimeSignal.on_half_line(fn, start=c, rate=q)
        raise ValueError(f"unknown target kind {self.kind!r}")

    def __call__(self, z):
        """Closed-form target value at z in Delta."""
        z = np.asarray(z, dtype=complex)
        tau = self.tau
        if self.kind == "zero":
            return np.zeros(z.shape, dtype=complex)
        if self.kind == "erfc":
            return erfc(z / (2 * np.sqrt(tau)))
        if self.kind == "box":
            a, b = self.params
            hi = erfc(z / (2 * np.sqrt(tau - b))) if b < tau else 0.0
            return erfc(z / (2 * np.sqrt(tau - a))) - hi
        s = z * z
        if self.kind == "x0_box":
            a, b = self.params
            Lh = (np.exp(-s * a) - np.exp(-s * b)) / (np.sqrt(np.pi) * s)
        else:
            p, q, c = self.params
            Lh = np.exp(-s * c) * gamma(p + 1) / (np.sqrt(np.pi) * (s + q) ** (p + 1))
        return 2 * z * Lh


@dataclass
class ChainReport:
    max_error: float
    nodes: int
    u0_norm: float


def synthesize_chain(target: ChainTarget, check_nodes=None) -> tuple:
    """u0 = T^{-1} h for a target G L h; checked by evaluating Phi~ u0."""
    tau = target.tau
    h = target.preimage()
    try:
        if target.kind == "x0_box" or (h.pieces and min(a for a, _, _ in h.pieces) < 1 / (4 * tau)):
            raise SupportError(1.0, 1 / (4 * tau))
        u0 = apply_T_inverse(h, tau)
    except SupportError as e:
        raise NotInRangeError(e.fraction, e.cutoff) from None
    if check_nodes is None:
        r = np.linspace(0.2, 4.0, 10)
        th = np.linspace(-0.6, 0.6, 5)
        check_nodes = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    # preimages of shifted dictionary terms carry e^{-q/(4(tau - sigma))}, which
    # oscillates along the v-path for small |z|; use a finer rule
    got = phi_tilde(u0, check_nodes, tau, panels=60, order=12)
    want = target(check_nodes)
    err = float(np.max(np.abs(got - want)))
    u = ControlSignal(u0, TimeSignal.on_interval(lambda s: np.zeros(np.shape(s), dtype=complex), tau), tau)
    return u, ChainReport(err, len(check_nodes), u0.norm())


def x0_element(a: float, b: float, order: int = 64) -> Callable:
    """z -> 2 z L(1[a, b])(z^2), evaluated by Gauss-Legendre in t (entire in z)."""
    x, w = gauss_legendre(order)
    t = a + (b - a) * (x + 1) / 2
    w = w * (b - a) / 2

    def F(z):
        z = np.asarray(z, dtype=complex)
        s = z * z
        return 2 * z * (np.exp(-np.multiply.outer(s, t)) @ w) / np.sqrt(np.pi)

    return F


def paley_wiener_probe(tau: float, a: Optional[float] = None, b: Optional[float] = None,
                       radius: float = 5.0, n: int = 60) -> dict:
    """Evaluate an X0 element on a disc of ``radius`` and measure its growth.

    With h = 1[a, b] inside (0, 1/(4 tau)), F = L h obeys |F(s)| <= C e^{c |s|},
    c = 1/(4 tau).  Reports whether all values are finite and the largest
    ratio |F(s)| e^{-c |s|} over s = z^2.
    """
    c = 1 / (4 * tau)
    a = 0.25 * c if a is None else a
    b = 0.75 * c if b is None else b
    g = x0_element(a, b)
    r = np.linspace(0, radius, n)
    th = np.linspace(0, 2 * np.pi, 2 * n, endpoint=False)
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    vals = g(z)
    s = z * z
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(s != 0, vals / (2 * np.where(z != 0, z, 1)), (b - a) / np.sqrt(np.pi))
    ratio = np.abs(F) * np.exp(-c * np.abs(s))
    return {"finite": bool(np.all(np.isfinite(vals))), "max_abs": float(np.max(np.abs(vals))),
            "growth_ratio": float(np.max(ratio)), "growth_rate": c, "radius": radius}
