"""Side-by-side Cauchy decomposition of a function on the square D.

For f holomorphic in D with boundary trace on dD,

    f(z) = (1 / 2 pi i) int_dD f(u) / (u - z) du = (1/2) sum_k f_k(z),
    f_k(z) = (1 / i pi) int_{side k} f(u) / (u - z) du.

Each side A -> B is handled through its affine coordinate w = (z - A)/(B - A),
which sends the side onto [0, 1] and D into the upper half plane:

    g1+ : w = 1 - z / Z0              (Z0 -> 0; this is 1 + (sqrt2/pi) e^{3 i pi/4} z)
    g1- : w = z / Z1                  (0 -> Z1)
    g2- : w = (z - Z1) / (pi - Z1)    (Z1 -> pi)
    g2+ : w = (z - pi) / (Z0 - pi)    (pi -> Z0)

so that f_k(z) = (C g_k)(w) with g_k(t) = f(A + t (B - A)) and C the line
Cauchy transform (1 / i pi) int g(t) / (t - w) dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .domains import (SECTOR_DELTA, SECTOR_PI_MINUS_DELTA, SQUARE_D, Z0, Z1, Contour, Domain,
                      GridQuadrature, Measure, Segment, boundary_distance, contains,
                      dilated_square, far_field_constant, graded_breaks, make_area_rule,
                      make_boundary_rule, panel_rule, target_breaks)
from .spaces import MEMBERSHIP_DRIFT, NormReport, bergman_norm, l1_boundary_norm, llogl_functional
from .transforms import LineSignal, cauchy_transform

NEAR_DISTANCE = 0.05
VERTEX_GRADE = 16


def P(z):
    """The multiplier z + 2 i pi; its only zero -2 i pi lies outside both sectors."""
    return np.asarray(z, dtype=complex) + 2j * np.pi


# --------------------------------------------------------------------------
# boundary traces

@dataclass
class BoundaryTrace:
    """Trace of f on dD (eps = 0 contour), sampled per side.

    ``fn`` evaluates f at points of the closed square (complex arrays).
    ``singular_vertices`` lists vertices of D at which the trace is unbounded;
    quadratures grade toward them.
    """

    fn: Callable
    singular_vertices: tuple = ()
    nodes_per_side: int = 64
    samples: dict = field(default_factory=dict)
    l1: float = float("nan")
    llogl: float = float("nan")
    l1_finite: bool = False
    llogl_finite: bool = False

    def __post_init__(self):
        self.singular_vertices = tuple(complex(v) for v in self.singular_vertices)
        rule = make_boundary_rule(Contour.square(0.0), self.nodes_per_side, panels=4, grade=VERTEX_GRADE)
        vals = np.asarray(self.fn(rule.nodes), dtype=complex)
        for lab in set(rule.labels):
            m = rule.labels == lab
            self.samples[lab] = (rule.nodes[m], vals[m])
        finite = bool(np.all(np.isfinite(vals)))
        if finite:
            self.l1 = l1_boundary_norm(vals, rule)
            self.llogl = llogl_functional(vals, rule)
            fine = make_boundary_rule(Contour.square(0.0), 2 * self.nodes_per_side, panels=8,
                                      grade=VERTEX_GRADE + 10)
            fv = np.asarray(self.fn(fine.nodes), dtype=complex)
            l1f = l1_boundary_norm(fv, fine)
            llf = llogl_functional(fv, fine)
            self.l1_finite = bool(np.isfinite(l1f) and abs(l1f - self.l1) <= MEMBERSHIP_DRIFT * l1f)
            self.llogl_finite = bool(np.isfinite(llf) and abs(llf - self.llogl) <= MEMBERSHIP_DRIFT * max(llf, 1e-300))
            self.l1, self.llogl = l1f, llf

    def __call__(self, u):
        return self.fn(u)

    def multiplied(self, h: Callable) -> "BoundaryTrace":
        return BoundaryTrace(lambda u, _f=self.fn: h(u) * _f(u), self.singular_vertices, self.nodes_per_side)


# --------------------------------------------------------------------------
# pieces

def _segment_integral(g: Callable, z, A: complex, B: complex, grade_left: int, grade_right: int,
                      order: int = 16, chunk: int = 256, near: float = NEAR_DISTANCE,
                      subtract: bool = True):
    """(1 / i pi) int_0^1 g(t) / (t - w) dt with w = (z - A)/(B - A).

    Targets within ``near`` of the segment (distance measured in z) whose
    projection falls inside it use singularity subtraction: g(c) is removed
    and restored through int dt/(t - w) = log(1 - w) - log(-w).
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    L = abs(B - A)
    w = (z - A) / (B - A)
    c = np.clip(w.real, 0.0, 1.0)
    d = np.abs(w - c)
    if np.any(d == 0):
        raise ValueError("target lies on the integration segment")
    base = graded_breaks(0.0, 1.0, panels=4, grade_left=grade_left, grade_right=grade_right)
    out = np.empty(z.shape, dtype=complex)
    idx = np.argsort(d)
    for i in range(0, len(z), chunk):
        sel = idx[i:i + chunk]
        br = target_breaks(base, c[sel], d[sel], 0.0, 1.0)
        t, wt = panel_rule(br, order)
        ws = w[sel, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            G = np.where(wt > 0, np.asarray(g(t), dtype=complex), 0.0)
        sub = subtract & (d[sel] * L < near) & (w[sel].real > 0) & (w[sel].real < 1)
        gc = np.zeros(len(sel), dtype=complex)
        if np.any(sub):
            gc[sub] = np.asarray(g(c[sel][sub]), dtype=complex)
        val = np.sum(np.where(wt > 0, wt * (G - gc[:, None]) / (t - ws), 0.0), axis=1)
        val += gc * (np.log(1 - w[sel]) - np.log(-w[sel]))
        out[sel] = val
    return (out / (1j * np.pi)).reshape(shape)


@dataclass
class CauchyPiece:
    """f_k(z) = (1 / i pi) int_{side} f(u) / (u - z) du for one oriented side."""

    label: str
    segment: Segment
    trace: BoundaryTrace
    eps: float = 0.0

    @property
    def k(self) -> int:
        return 1 if self.label.startswith("g1") else 2

    @property
    def sector(self) -> Domain:
        return SECTOR_DELTA if self.k == 1 else SECTOR_PI_MINUS_DELTA

    def _grades(self):
        near = lambda p: any(abs(p - v) < 1e-9 + 2 * self.eps for v in self.trace.singular_vertices)
        return (VERTEX_GRADE if near(self.segment.start) else 4,
                VERTEX_GRADE if near(self.segment.end) else 4)

    def line_data(self) -> LineSignal:
        """The pulled-back trace g(t) = f(A + t (B - A)) on [0, 1]."""
        A, D = self.segment.start, self.segment.derivative
        gl, gr = self._grades()
        sing = tuple(p for p, gg in ((0.0, gl), (1.0, gr)) if gg == VERTEX_GRADE)
        return LineSignal(lambda t, _f=self.trace.fn: _f(A + np.asarray(t) * D), (0.0, 1.0), sing, self.label)

    def to_w(self, z):
        return (np.asarray(z, dtype=complex) - self.segment.start) / self.segment.derivative

    def from_w(self, w):
        return self.segment.start + np.asarray(w, dtype=complex) * self.segment.derivative

    def __call__(self, z, order: int = 16):
        A, B = self.segment.start, self.segment.end
        gl, gr = self._grades()
        g = lambda t, _f=self.trace.fn, _A=A, _D=B - A: _f(_A + t * _D)
        res = _segment_integral(g, z, A, B, gl, gr, order)
        return complex(res) if np.ndim(res) == 0 else res

    def dbar_residual(self, z, h: float = 1e-4):
        """Central-difference |d/dzbar| of the piece at points z."""
        z = np.asarray(z, dtype=complex)
        fx = (self(z + h) - self(z - h)) / (2 * h)
        fy = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        return np.abs(0.5 * (fx + 1j * fy))


def decompose(trace: BoundaryTrace, eps: float = 0.0) -> list:
    """The four pieces on the contour shrunk by ``eps`` (order g1+, g1-, g2-, g2+)."""
    if not trace.samples or any(not np.all(np.isfinite(v)) for _, v in trace.samples.values()):
        raise ValueError("trace has non-finite samples")
    if not trace.l1_finite:
        raise ValueError("trace has no finite L1 norm on dD")
    return [CauchyPiece(s.label, s, trace, eps) for s in Contour.square(eps).sides]


def reconstruct(pieces: Sequence[CauchyPiece], z):
    """(1/2) sum_k f_k(z)."""
    return 0.5 * sum(p(z) for p in pieces)


def divide_by_P(piece: Callable) -> Callable:
    return lambda z, _p=piece: _p(z) / P(z)


def side_constant(piece: CauchyPiece, order: int = 64) -> complex:
    """(1 / i pi) int_side f(u) du: the per-side gap between the pieces of
    P f and P times the pieces of f (P is affine)."""
    br = graded_breaks(0.0, 1.0, panels=4, grade_left=piece._grades()[0], grade_right=piece._grades()[1])
    t, w = panel_rule(br, order // 4)
    D = piece.segment.derivative
    return complex(np.sum(w * piece.trace.fn(piece.segment.start + t * D)) * D / (1j * np.pi))


# --------------------------------------------------------------------------
# far field

def _mirror(piece):
    return (lambda z: z) if piece.k == 1 else (lambda z: np.pi - np.asarray(z))


def default_far_probes(piece: CauchyPiece, a: float = 0.5, radii=(3.0, 5.0, 10.0),
                       angles: int = 9) -> np.ndarray:
    """Points on the circles |z| = r inside the sector, minus those in D_a."""
    th = np.linspace(-np.pi / 4, np.pi / 4, angles + 2)[1:-1]
    z = (np.asarray(radii)[:, None] * np.exp(1j * th[None, :])).ravel()
    z = z[~contains(dilated_square(a), z)]
    return _mirror(piece)(z)


@dataclass
class FarFieldReport:
    label: str
    a: float
    C_empirical: float
    C_a: float
    bound: float
    holds: bool
    by_radius: dict = field(default_factory=dict)


def far_field_bound(piece: CauchyPiece, a: float = 0.5, probes=None) -> FarFieldReport:
    """Check |f_k(z)| (|z| + 1) <= ||f||_{L1(dD)} C_a / pi at probes in the
    piece's sector outside D_a (mirrored about pi/2 for k = 2)."""
    probes = default_far_probes(piece, a) if probes is None else np.asarray(probes, dtype=complex)
    zz = _mirror(piece)(probes)
    if np.any(contains(dilated_square(a), zz)):
        raise ValueError("far-field probe inside the dilated square D_a")
    vals = np.abs(piece(probes)) * (np.abs(zz) + 1)
    Ca = far_field_constant(a)
    bound = piece.trace.l1 * Ca / np.pi
    by_r = {}
    for r in np.unique(np.round(np.abs(zz), 12)):
        m = np.isclose(np.abs(zz), r)
        by_r[float(r)] = float(vals[m].max())
    emp = float(vals.max()) if len(vals) else 0.0
    return FarFieldReport(piece.label, a, emp, Ca, float(bound), bool(emp <= bound), by_r)


# --------------------------------------------------------------------------
# near field: two quadratures of ||f_k / P||_{A2(D_a)}

def _dilated_rule_z(s: float, q0: float, order: int, levels: int):
    # z = s (p Z1 + q Z0); the side g1+ runs along p = 0, g1- along q = 0,
    # with the vertices Z0 / Z1 of D at q = 1/s / p = 1/s
    br = graded_breaks(0.0, 1.0, panels=4, grade_left=levels, grade_right=levels,
                       points=[q0], grade_points=levels)
    p, wp = panel_rule(br, order)
    Pp, Qq = np.meshgrid(p, p, indexing="ij")
    W = np.outer(wp, wp) * s ** 2 * np.pi ** 2 / 2
    return s * (Pp * Z1 + Qq * Z0), W


@dataclass
class NearFieldReport:
    label: str
    a: float
    direct: float
    transformed: float
    agree: bool
    refinement_delta: float


def near_field_membership(piece: CauchyPiece, a: float = 0.5, order: int = 6,
                          levels: int = 10, tol: float = 1e-4) -> NearFieldReport:
    """||f_k / P||_{A2(D_a)} computed two ways.

    (i) On D_a (mirrored about pi/2 for k = 2) with the piece evaluator, on a
    tensor rule graded toward the corners and the vertex Z0 of D.
    (ii) On the image square in the side coordinate w, where the piece is
    the line Cauchy transform of the pulled-back trace and
    dA(z) = |B - A|^2 dA(w); this rule has uniform panels along the side and
    ratio-3 grading toward Im w = 0 and toward w = 0, 1.
    """
    s = dilated_square(a).scale
    mir = _mirror(piece)
    fP = divide_by_P(piece)

    def direct(q):
        z, W = _dilated_rule_z(s, 1.0 / s, q, levels)
        z = mir(z).ravel()
        return float(np.sqrt(np.sum(W.ravel() * np.abs(fP(z)) ** 2)))

    d1 = direct(order)
    d2 = direct(order + 2)
    corners = mir(np.array([0.0, s * Z1, s * np.pi, s * Z0]))
    wc = piece.to_w(corners)
    # the edge of the image square lying on Im w = 0
    i0 = int(np.argmin(np.abs(wc.imag) + np.abs(np.roll(wc, -1).imag)))
    W0, W1, W3 = wc[i0], wc[(i0 + 1) % 4], wc[(i0 - 1) % 4]
    pts = [float(np.real((x - W0) / (W1 - W0))) for x in (0.0, 1.0)]
    brp = list(np.linspace(0, 1, 13))
    for p0 in pts:
        brp += [p0 + sg * 3.0 ** -k for k in range(1, levels + 2) for sg in (-1, 1)]
    brp = np.unique(np.clip(brp, 0, 1))
    brq = np.unique(np.concatenate([[0.0], 3.0 ** -np.arange(levels + 2, 0, -1), np.linspace(0, 1, 5)]))
    p, wp = panel_rule(brp, order + 2)
    q, wq = panel_rule(brq, order + 2)
    Pp, Qq = np.meshgrid(p, q, indexing="ij")
    w = W0 + Pp * (W1 - W0) + Qq * (W3 - W0)
    jac = abs(((W1 - W0) * np.conj(W3 - W0)).imag) * abs(piece.segment.derivative) ** 2
    cg = cauchy_transform(piece.line_data(), w.ravel())
    zz = piece.from_w(w.ravel())
    t2 = float(np.sqrt(np.sum(np.outer(wp, wq).ravel() * jac * np.abs(cg / P(zz)) ** 2)))
    return NearFieldReport(piece.label, a, d2, t2, bool(abs(d2 - t2) <= tol * max(t2, 1.0)),
                           abs(d2 - d1) / max(d2, 1e-300))


# --------------------------------------------------------------------------
# sector membership of the paired pieces

@dataclass
class MembershipReport:
    k: int
    domain: str
    norm: float
    norm_refined: float
    drift: float
    finite: bool
    tail_bound: float


def sector_membership(pieces: Sequence[CauchyPiece], k: int, resolution: int = 8,
                      truncation_R: float = 16.0) -> MembershipReport:
    """||(f_{k,+} + f_{k,-}) / P|| on the truncated sector of side pair k,
    at ``resolution`` and twice that; finite means drift below 5%."""
    pair = [p for p in pieces if p.k == k]
    dom = SECTOR_DELTA if k == 1 else SECTOR_PI_MINUS_DELTA
    fn = lambda z: sum(p(z) for p in pair) / P(z)

    def norm(q):
        rule = make_area_rule(dom, q, truncation_R, special_radii=(np.pi / np.sqrt(2),),
                              angular_levels=10)
        return bergman_norm(fn, dom, rule=rule)

    a = norm(resolution)
    b = norm(2 * resolution)
    drift = abs(b.value - a.value) / max(b.value, 1e-300)
    return MembershipReport(k, dom.name, a.value, b.value, drift,
                            bool(np.isfinite(b.value) and drift < MEMBERSHIP_DRIFT), b.tail_bound)


def growth_ceiling(pieces: Sequence[CauchyPiece], n: int = 8) -> list:
    """|f(z)| d log(1/d) along z = mid(g1+) + d * inward normal, d = 10^-1 .. 10^-n."""
    mid = Z0 / 2
    normal = np.exp(-1j * np.pi / 4)  # g1+ runs toward 0 along -e^{i pi/4}; D lies to its left
    out = []
    for j in range(1, n + 1):
        d = 10.0 ** -j
        z = mid + d * normal
        out.append(float(abs(reconstruct(pieces, z)) * d * np.log(1 / d)))
    return out
