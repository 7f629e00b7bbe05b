"""The unitary chain L2(0, tau) -> L2(R+, dt/t) -> A2(C+) -> A2(Delta) and
the Cauchy / Poisson transforms of compactly supported line data.

T  : f(sigma) -> f(tau - 1/(4t)) / (2 sqrt t)           (change of variables)
L  : f(t) -> pi^-1/2 int_0^inf e^{-st} f(t) dt           (normalized Laplace)
G  : F(s) -> 2 z F(z^2)                                  (conformal, C+ -> Delta)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma

from .domains import (GridQuadrature, Measure, gauss_legendre, graded_breaks,
                      make_interval_rule, make_log_rule, panel_rule, target_breaks)
from .spaces import ComplexField


class SupportError(ValueError):
    """Raised when a half-line signal has mass below the cutoff 1/(4 tau)."""

    def __init__(self, fraction: float, cutoff: float):
        super().__init__(f"{fraction:.3e} of the squared norm lies below t = {cutoff:g}")
        self.fraction = fraction
        self.cutoff = cutoff


# --------------------------------------------------------------------------
# signals

@dataclass
class TimeSignal:
    """Samples of a function of time on a 1-D rule.

    ``evaluator`` is an optional closed form; when ``analytic`` is set it
    accepts complex arguments and is used to deform Laplace integrals.
    ``start`` is the left end of the support (the signal vanishes before it)
    and ``rate`` an exponential decay rate hint (f ~ e^{-rate t}).
    ``pieces`` optionally lists (a, b, fn) with fn analytic on [a, b]; the
    signal is then the sum of fn * 1[a, b].
    """

    grid: GridQuadrature
    values: np.ndarray
    evaluator: Optional[Callable] = None
    analytic: bool = False
    start: float = 0.0
    tau: Optional[float] = None
    rate: float = 0.0
    pieces: Optional[list] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.nodes.shape:
            raise ValueError("values length must equal nodes length")

    @property
    def half_line(self) -> bool:
        return self.grid.measure is Measure.LOG_HALF_LINE

    @classmethod
    def on_interval(cls, fn: Callable, tau: float, order: int = 32, panels: int = 8,
                    analytic: bool = True, grid: Optional[GridQuadrature] = None) -> "TimeSignal":
        if tau <= 0:
            raise ValueError("tau must be positive")
        grid = grid or make_interval_rule(0.0, tau, order, panels=panels)
        return cls(grid, fn(grid.nodes), fn, analytic, 0.0, tau)

    @classmethod
    def piecewise(cls, pieces: Sequence[tuple], tau: float, order: int = 32,
                  panels: int = 8) -> "TimeSignal":
        """Sum of fn * 1[a, b] over ``pieces`` = [(a, b, fn), ...] on (0, tau)."""
        pieces = [(float(a), float(b), fn) for a, b, fn in pieces]
        for a, b, _ in pieces:
            if not 0 <= a < b <= tau:
                raise ValueError("pieces must lie inside [0, tau]")

        def ev(sig, _p=pieces):
            sig = np.asarray(sig)
            out = np.zeros(sig.shape, dtype=complex)
            x = sig.real
            for a, b, fn in _p:
                m = (x >= a) & (x < b) if b < tau else (x >= a) & (x <= b)
                if np.any(m):
                    out[m] += fn(sig[m])
            return out

        pts = sorted({a for a, _, _ in pieces} | {b for _, b, _ in pieces})
        grid = make_interval_rule(0.0, tau, order, panels=panels, points=[p for p in pts if 0 < p < tau])
        return cls(grid, ev(grid.nodes), ev, False, 0.0, tau, pieces=pieces)

    def analytic_pieces(self) -> Optional[list]:
        """Pieces (a, b, fn) with fn analytic, or None for sampled signals."""
        if self.pieces is not None:
            return self.pieces
        if self.analytic and self.evaluator is not None and self.tau is not None:
            return [(0.0, self.tau, self.evaluator)]
        return None

    def break_points(self) -> list:
        if self.pieces is None:
            return []
        return sorted({a for a, _, _ in self.pieces} | {b for _, b, _ in self.pieces})

    @classmethod
    def on_half_line(cls, fn: Callable, analytic: bool = True, start: float = 0.0,
                     grid: Optional[GridQuadrature] = None, rate: float = 0.0,
                     **rule_kw) -> "TimeSignal":
        grid = grid or make_log_rule(cut=start if start > 0 else None, **rule_kw)
        t = grid.nodes
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.where(t > start, fn(t), 0.0) if start > 0 else fn(t)
        return cls(grid, vals, fn, analytic, start, rate=rate)

    def __call__(self, t):
        if self.evaluator is None:
            x = np.log(self.grid.nodes) if self.half_line else self.grid.nodes
            tt = np.log(t) if self.half_line else t
            return np.interp(tt, x, self.values.real) + 1j * np.interp(tt, x, self.values.imag)
        if self.half_line and self.start > 0:
            t = np.asarray(t)
            out = np.zeros(t.shape, dtype=complex)
            m = np.real(t) > self.start
            if np.any(m):
                out[m] = self.evaluator(t[m])
            return out
        return self.evaluator(t)

    def norm_sq(self) -> float:
        return float(self.grid.integrate(np.abs(self.values) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "weight", "re", "im"])
            for t, wt, v in zip(self.grid.nodes, self.grid.weights, self.values):
                w.writerow([repr(float(t)), repr(float(wt)), repr(v.real), repr(v.imag)])


def read_time_signal_csv(path, measure: Measure = Measure.LEBESGUE_1D) -> TimeSignal:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = GridQuadrature(rows[:, 0], rows[:, 1], measure)
    return TimeSignal(grid, rows[:, 2] + 1j * rows[:, 3])


@dataclass
class LineSignal:
    """A real-line function with compact support [lo, hi].

    ``singular`` lists points where the function is unbounded or kinked;
    quadratures are graded toward them.
    """

    fn: Callable
    support: tuple
    singular: Sequence[float] = ()
    name: str = ""

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise ValueError("empty support")

    @property
    def L(self) -> float:
        """Smallest L with support inside [-L/2, L/2]."""
        return 2.0 * max(abs(self.support[0]), abs(self.support[1]))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t >= lo) & (t <= hi)
        out = np.zeros(t.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self.fn(t[inside])
        return out

    def reflected(self) -> "LineSignal":
        lo, hi = self.support
        return LineSignal(lambda t, f=self.fn: f(-t), (-hi, -lo), [-p for p in self.singular],
                          self.name + " reflected")

    def is_zero(self) -> bool:
        # cheap structural check used to short-circuit quadratures
        return getattr(self.fn, "is_zero", False)


def zero_fn(t):
    return np.zeros(np.shape(t), dtype=complex)


zero_fn.is_zero = True


def indicator(lo: float, hi: float) -> LineSignal:
    return LineSignal(lambda t: np.ones(np.shape(t), dtype=complex), (lo, hi), (), f"1[{lo:g},{hi:g}]")


# --------------------------------------------------------------------------
# T and its inverse

def apply_T(f: TimeSignal, grid: Optional[GridQuadrature] = None) -> TimeSignal:
    """(Tf)(t) = f(tau - 1/(4t)) / (2 sqrt t) for t > 1/(4 tau), 0 below."""
    if f.tau is None or f.tau <= 0:
        raise ValueError("signal on (0, tau) with tau > 0 required")
    tau = f.tau
    cut = 1.0 / (4 * tau)
    grid = grid or make_log_rule(cut=cut)

    def tf(t, _f=f):
        t = np.asarray(t)
        return _f(tau - 1.0 / (4 * t)) / (2 * np.sqrt(t))

    t = grid.nodes
    vals = np.zeros(t.shape, dtype=complex)
    above = t > cut
    vals[above] = tf(t[above])
    pieces = None
    if f.pieces is not None:
        pieces = []
        for a, b, fn in f.pieces:
            ta = 1.0 / (4 * (tau - a))
            tb = np.inf if b >= tau else 1.0 / (4 * (tau - b))
            pieces.append((ta, tb, lambda t, _fn=fn: _fn(tau - 1.0 / (4 * t)) / (2 * np.sqrt(t))))
    return TimeSignal(grid, vals, tf if f.evaluator is not None else None,
                      f.analytic and f.evaluator is not None, cut, tau, pieces=pieces)


def support_violation(g: TimeSignal, tau: float) -> float:
    """Fraction of the squared dt/t norm of ``g`` lying at t < 1/(4 tau)."""
    dens = np.abs(g.values) ** 2 * g.grid.weights
    total = dens.sum()
    if total == 0:
        return 0.0
    return float(dens[g.grid.nodes < 1.0 / (4 * tau) * (1 - 1e-12)].sum() / total)


def apply_T_inverse(g: TimeSignal, tau: float, grid: Optional[GridQuadrature] = None,
                    tol: float = 1e-14) -> TimeSignal:
    """f(sigma) = 2 sqrt(t) g(t) with t = 1/(4 (tau - sigma))."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    frac = support_violation(g, tau)
    if frac > tol:
        raise SupportError(frac, 1.0 / (4 * tau))
    if g.evaluator is not None and g.start < 1.0 / (4 * tau) * (1 - 1e-12):
        # a closed form can carry support below the cutoff between nodes; spot check it
        probe = np.geomspace(1e-6, 1.0 / (4 * tau), 200)[:-1]
        if np.any(probe > g.start) and np.max(np.abs(g(probe[probe > g.start]))) > 0:
            raise SupportError(max(frac, np.finfo(float).tiny), 1.0 / (4 * tau))
    def back(fn):
        def fi(s, _fn=fn):
            t = 1.0 / (4 * (tau - np.asarray(s)))
            return 2 * np.sqrt(t) * _fn(t)
        return fi

    sigma_of = lambda t: tau - 1.0 / (4 * t) if np.isfinite(t) else tau
    pieces = None
    if g.pieces is not None:
        pieces = [(max(sigma_of(a), 0.0), sigma_of(b), back(fn)) for a, b, fn in g.pieces]
    elif g.evaluator is not None and g.start > 1.0 / (4 * tau) * (1 + 1e-12):
        pieces = [(sigma_of(g.start), tau, back(g.evaluator))]
    if pieces is not None:
        out = TimeSignal.piecewise(pieces, tau)
        if grid is not None:
            out = TimeSignal(grid, out.evaluator(grid.nodes), out.evaluator, False, 0.0, tau, pieces=out.pieces)
        return out
    grid = grid or make_interval_rule(0.0, tau, 32, panels=8)
    fi = back(g)
    return TimeSignal(grid, fi(grid.nodes), fi, g.analytic, 0.0, tau)


# --------------------------------------------------------------------------
# normalized Laplace transform

_RAY_X = None


def _ray_rule(order: int = 10):
    global _RAY_X
    if _RAY_X is None or _RAY_X[2] != order:
        br = np.concatenate([[0.0], np.geomspace(2.0 ** -40, 64.0, 47), [90.0]])
        x, w = panel_rule(br, order)
        _RAY_X = (x, w, order)
    return _RAY_X[0], _RAY_X[1]


def _laplace_ray(fn, start, rate, s, chunk=2048):
    # int_c^inf e^{-st} f(t) dt along t = c + x e^{-i arg(s + rate)} / |s + rate|;
    # for f ~ e^{-rate t} the integrand then decays like e^{-x} without oscillating
    x, w = _ray_rule()
    out = np.empty(s.shape, dtype=complex)
    for i in range(0, len(s), chunk):
        sc = s[i:i + chunk, None]
        q = sc + rate
        rot = np.conj(q) / np.abs(q) ** 2
        xr = x[None, :] * rot
        vals = np.exp(-sc * xr) * fn(start + xr)
        out[i:i + chunk] = np.exp(-sc[:, 0] * start) * rot[:, 0] * (w[None, :] * vals).sum(axis=1)
    return out


def laplace(f: TimeSignal, s, method: str = "auto"):
    """Normalized Laplace transform pi^-1/2 int_0^inf e^{-st} f(t) dt.

    ``s`` is an array of points with Re s > 0 or a rule on the right half
    plane (a :class:`ComplexField` is returned).  Analytic signals are
    integrated on the ray t = c + r e^{-i arg s}, where the integrand decays
    without oscillating; other signals use their own dt/t rule.
    """
    if isinstance(s, GridQuadrature):
        vals = laplace(f, s.nodes, method)
        return ComplexField(s, vals,
                            lambda p, _f=f, _m=method: laplace(_f, p, _m))
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= 0):
        raise ValueError("Laplace transform requested at Re s <= 0")
    if np.all(f.values == 0) and (f.evaluator is None or getattr(f.evaluator, "is_zero", False)):
        return np.zeros(s.shape, dtype=complex)
    shape = s.shape
    s = s.ravel()
    if method == "auto":
        if f.half_line and f.pieces is not None:
            method = "pieces"
        else:
            method = "ray" if (f.analytic and f.evaluator is not None) else "samples"
    if method == "pieces":
        # int_a^b = int_a^inf - int_b^inf, each along its own ray
        out = np.zeros(s.shape, dtype=complex)
        for a, b, fn in f.pieces:
            out += _laplace_ray(fn, a, f.rate, s)
            if np.isfinite(b):
                out -= _laplace_ray(fn, b, f.rate, s)
    elif method == "ray":
        out = _laplace_ray(f.evaluator, f.start, f.rate, s)
    else:
        if not f.half_line:
            raise ValueError("sample Laplace requires a half-line signal")
        t, w = f.grid.nodes, f.grid.weights * f.grid.nodes
        out = np.empty(s.shape, dtype=complex)
        for i in range(0, len(s), 512):
            out[i:i + 512] = np.exp(-np.outer(s[i:i + 512], t)) @ (w * f.values)
    return (out / np.sqrt(np.pi)).reshape(shape)


@dataclass(frozen=True)
class DictionaryTerm:
    """f(t) = t^a e^{-bt}, with closed-form transform and norms."""

    a: float
    b: float

    def time_fn(self, t):
        t = np.asarray(t, dtype=complex)
        return t ** self.a * np.exp(-self.b * t)

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        return gamma(self.a + 1) / (np.sqrt(np.pi) * (s + self.b) ** (self.a + 1))

    @property
    def norm_sq(self) -> float:
        """Squared L2(R+, dt/t) norm, equal to the squared A2(C+) norm of the transform."""
        return float(gamma(2 * self.a) / (2 * self.b) ** (2 * self.a))

    def signal(self, **rule_kw) -> TimeSignal:
        return TimeSignal.on_half_line(self.time_fn, rate=self.b, **rule_kw)


LAPLACE_DICTIONARY = tuple(DictionaryTerm(a, b) for a in (0.5, 1.0, 2.0) for b in (0.5, 1.0, 2.0))


@dataclass
class UnitarityReport:
    time_norm_sq: float
    transform_norm_sq: float
    ratio: float
    tail_bound: float
    nodes: int


def laplace_unitarity(f: TimeSignal, resolution: int = 16, R: float = 1e5,
                      time_norm_sq: Optional[float] = None) -> UnitarityReport:
    """Compare ||f||^2 in L2(R+, dt/t) with ||L f||^2 in A2(C+) (truncated at |s| < R).

    ``time_norm_sq`` overrides the quadrature value of the time-side norm
    (use the closed form when known).
    """
    from .domains import RIGHT_HALF_PLANE, make_area_rule
    from .spaces import bergman_norm

    rule = make_area_rule(RIGHT_HALF_PLANE, resolution, R)
    F = laplace(f, rule)
    rep = bergman_norm(F, RIGHT_HALF_PLANE, rule=rule)
    tn = f.norm_sq() if time_norm_sq is None else time_norm_sq
    return UnitarityReport(float(tn), rep.value ** 2, rep.value ** 2 / tn, rep.tail_bound, len(rule.nodes))


def inverse_laplace_dictionary(coeffs: Sequence[tuple]) -> Callable:
    """Time function of a finite combination sum c_k L(t^{a_k} e^{-b_k t}).

    ``coeffs`` holds (c, a, b) triples.  General inversion is not offered.
    """
    terms = [(c, DictionaryTerm(a, b)) for c, a, b in coeffs]
    return lambda t: sum(c * d.time_fn(t) for c, d in terms)


# --------------------------------------------------------------------------
# G and its inverse

def _evaluator(F):
    if isinstance(F, ComplexField):
        if F.evaluator is None:
            raise ValueError("field needs an off-grid evaluator")
        return F.evaluator
    return F


def apply_G(F, rule: Optional[GridQuadrature] = None):
    """(GF)(z) = 2 z F(z^2); a field on ``rule`` or a callable."""
    fn = _evaluator(F)

    def g(z, _fn=fn):
        z = np.asarray(z, dtype=complex)
        return 2 * z * _fn(z * z)

    return ComplexField.from_function(g, rule) if rule is not None else g


def apply_G_inverse(g, rule: Optional[GridQuadrature] = None):
    """(G^-1 g)(s) = g(sqrt s) / (2 sqrt s) with the principal root."""
    fn = _evaluator(g)

    def F(s, _fn=fn):
        r = np.sqrt(np.asarray(s, dtype=complex))
        return _fn(r) / (2 * r)

    return ComplexField.from_function(F, rule) if rule is not None else F


# --------------------------------------------------------------------------
# Cauchy and Poisson transforms on the line

def _base_breaks(g: LineSignal, grade: int = 24):
    lo, hi = g.support
    pts = [p for p in g.singular if lo < p < hi]
    return graded_breaks(lo, hi, panels=4, grade_left=grade if lo in g.singular else 0,
                         grade_right=grade if hi in g.singular else 0,
                         points=pts, grade_points=grade if pts else 0)


def _line_kernel_integral(g: LineSignal, z, kernel: Callable, order: int = 16, chunk: int = 256):
    """int g(t) kernel(t, z) dt over the support, per target z (Im z > 0)."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    out = np.zeros(z.shape, dtype=complex)
    if g.is_zero():
        return out.reshape(shape)
    lo, hi = g.support
    base = _base_breaks(g)
    c = np.clip(z.real, lo, hi)
    d = np.abs(z - c)
    idx = np.argsort(d)
    for i in range(0, len(z), chunk):
        sel = idx[i:i + chunk]
        br = target_breaks(base, c[sel], d[sel], lo, hi)
        t, w = panel_rule(br, order)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(w > 0, g.fn(t) * kernel(t, z[sel, None]), 0.0)
        out[sel] = (w * vals).sum(axis=1)
    return out.reshape(shape)


def _check_upper(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("Cauchy transform requires Im z > 0")
    return z


def cauchy_transform(g: LineSignal, z, order: int = 16):
    """(Cg)(z) = (1/(i pi)) int g(t) / (t - z) dt for Im z > 0."""
    z = _check_upper(z)
    val = _line_kernel_integral(g, z, lambda t, zz: 1.0 / (t - zz), order)
    res = val / (1j * np.pi)
    return complex(res) if res.ndim == 0 else res


def poisson(g: LineSignal, z, order: int = 16):
    """(P_y * g)(x) with P_y(x) = y / (pi (x^2 + y^2)), z = x + iy."""
    z = _check_upper(z)
    res = _line_kernel_integral(
        g, z, lambda t, zz: zz.imag / (np.pi * ((zz.real - t) ** 2 + zz.imag ** 2)), order)
    return res.real if np.isrealobj(res) else res


def conjugate_poisson(g: LineSignal, z, order: int = 16):
    """(Q_y * g)(x) with Q_y(x) = x / (pi (x^2 + y^2))."""
    z = _check_upper(z)
    return _line_kernel_integral(
        g, z, lambda t, zz: (zz.real - t) / (np.pi * ((zz.real - t) ** 2 + zz.imag ** 2)), order)


@dataclass
class StripReport:
    L: float
    y: list
    integrals: list
    max_value: float
    monotone: bool
    extra: dict = field(default_factory=dict)


def strip_integral_check(g: LineSignal, L: float, y_list: Sequence[float],
                         order: int = 16) -> StripReport:
    """int_{-L}^{L} |Cg(x + iy)| dx for each y, with the maximum over y.

    ``monotone`` reports whether the integrals grow as y decreases.
    """
    if L <= 0 or any(y <= 0 for y in y_list):
        raise ValueError("L and all heights must be positive")
    lo, hi = g.support
    if lo < -L / 2 or hi > L / 2:
        raise ValueError("support must lie inside (-L/2, L/2)")
    vals = []
    for y in y_list:
        levels = int(np.ceil(np.log2(L / y))) + 6
        pts = sorted({lo, hi, *[p for p in g.singular if -L < p < L]})
        br = graded_breaks(-L, L, panels=8, points=pts, grade_points=levels)
        x, w = panel_rule(br, order)
        cg = cauchy_transform(g, x + 1j * y)
        vals.append(float(np.sum(w * np.abs(cg))))
    order_y = np.argsort(y_list)[::-1]
    seq = np.array(vals)[order_y]
    mono = bool(np.all(np.diff(seq) >= -1e-9 * max(1.0, np.max(seq))))
    return StripReport(L, list(map(float, y_list)), vals, float(max(vals)), mono)


# --------------------------------------------------------------------------
# Hardy space versus Bergman space on the disc

def hardy_littlewood_ratio(a: float, order: int = 32) -> dict:
    """A2 and H1 norms of h(w) = (1 - w)^-a on the unit disc by quadrature.

    The area integral uses polar coordinates about w = 1, where the disc is
    { 1 - rho e^{i phi} : |phi| < pi/2, rho < 2 cos phi }; the H1 norm is the
    normalized boundary mean (1/2pi) int |h(e^{i theta})| d theta.  Power
    substitutions rho ~ v^(1/(2-2a)) and theta ~ v^(1/(1-a)) absorb the
    endpoint singularities.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    # h is evaluated through zeta = 1 - w to keep relative accuracy near w = 1
    h = lambda zeta: zeta ** -a
    br = graded_breaks(0.0, 1.0, panels=4)
    v, wv = panel_rule(br, order)
    p = 1.0 / (2 - 2 * a)
    u, wu = v ** p, wv * p * v ** (p - 1)
    phi, wp = panel_rule(graded_breaks(-np.pi / 2, np.pi / 2, panels=4, grade_left=8, grade_right=8), order)
    P, U = np.meshgrid(phi, u, indexing="ij")
    rmax = 2 * np.cos(P)
    rho = rmax * U
    dens = np.abs(h(rho * np.exp(1j * P))) ** 2 * rho * rmax
    a2 = float(np.sqrt(np.sum(np.outer(wp, wu) * dens)))
    q = 1.0 / (1 - a)
    th, wt = np.pi * v ** q, np.pi * wv * q * v ** (q - 1)
    # |h| is symmetric under theta -> 2 pi - theta
    h1 = float(2 * np.sum(wt * np.abs(h(2 * np.sin(th / 2) * np.exp(1j * (th - np.pi) / 2)))) / (2 * np.pi))
    return {"a": a, "a2": a2, "h1": h1, "ratio": a2 / h1}


def hardy_littlewood_exact(a: float) -> dict:
    """Closed forms for the norms computed by :func:`hardy_littlewood_ratio`."""
    n = 2 - 2 * a
    a2 = np.sqrt(2 ** n / n * np.sqrt(np.pi) * gamma((n + 1) / 2) / gamma(n / 2 + 1))
    h1 = gamma(1 - a) / gamma(1 - a / 2) ** 2
    return {"a2": float(a2), "h1": float(h1), "ratio": float(a2 / h1)}
