"""Geometric domains, contours and quadrature rules.

Every integral in the package is discretized through the rules built here:
composite Gauss-Legendre on graded panels for intervals, tensor rules mapped
onto squares and (truncated) sectors, and side-by-side rules on the boundary
of the square ``D``.

Conventions
-----------
``D`` is the open square ``|x - pi/2| + |y| < pi/2`` with vertices
``0, Z1, pi, Z0``.  ``Z0 = pi/2 + i pi/2`` is the upper vertex, ``Z1`` the
lower one.  Two half-planes appear: ``RIGHT_HALF_PLANE`` (``Re z > 0``, the
codomain of the Laplace transform) and ``UPPER_HALF_PLANE`` (``Im z > 0``,
where Cauchy transforms live).
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

Z0 = complex(np.pi / 2, np.pi / 2)
Z1 = complex(np.pi / 2, -np.pi / 2)
SIDE_D = np.pi / np.sqrt(2)
PERIMETER_D = 2 * np.sqrt(2) * np.pi
AREA_D = np.pi ** 2 / 2

DEFAULT_TRUNCATION_R = 16.0
DEFAULT_LOG_SPAN = 12.0


class Kind(enum.Enum):
    SQUARE_D = "SquareD"
    DILATED_SQUARE = "DilatedSquare"
    SECTOR_DELTA = "SectorDelta"
    SECTOR_PI_MINUS_DELTA = "SectorPiMinusDelta"
    RIGHT_HALF_PLANE = "RightHalfPlane"
    UPPER_HALF_PLANE = "UpperHalfPlane"
    TRUNCATED_SECTOR = "TruncatedSector"
    TRANSITION_BAND_E = "TransitionBandE"


class Measure(enum.Enum):
    LEBESGUE_1D = "Lebesgue1D"
    LOG_HALF_LINE = "LogHalfLine"
    AREA_2D = "Area2D"
    ARC_LENGTH = "ArcLength"


@dataclass(frozen=True)
class Domain:
    """One of the fixed planar domains.

    ``a`` is the side increment of a dilated square, ``R`` the radius of a
    truncated sector.
    """

    kind: Kind
    a: Optional[float] = None
    R: Optional[float] = None

    def __post_init__(self):
        if self.kind is Kind.DILATED_SQUARE and not (self.a and self.a > 0):
            raise ValueError("DilatedSquare needs a > 0")
        if self.kind is Kind.TRUNCATED_SECTOR and not (self.R and self.R > 0):
            raise ValueError("TruncatedSector needs R > 0")

    @property
    def bounded(self) -> bool:
        return self.kind in (Kind.SQUARE_D, Kind.DILATED_SQUARE,
                             Kind.TRUNCATED_SECTOR, Kind.TRANSITION_BAND_E)

    @property
    def scale(self) -> float:
        """Homothety factor of a dilated square about the vertex 0."""
        if self.kind is Kind.DILATED_SQUARE:
            return 1.0 + self.a / SIDE_D
        return 1.0

    @property
    def name(self) -> str:
        if self.kind is Kind.DILATED_SQUARE:
            return f"DilatedSquare(a={self.a:g})"
        if self.kind is Kind.TRUNCATED_SECTOR:
            return f"TruncatedSector(R={self.R:g})"
        return self.kind.value


SQUARE_D = Domain(Kind.SQUARE_D)
SECTOR_DELTA = Domain(Kind.SECTOR_DELTA)
SECTOR_PI_MINUS_DELTA = Domain(Kind.SECTOR_PI_MINUS_DELTA)
RIGHT_HALF_PLANE = Domain(Kind.RIGHT_HALF_PLANE)
UPPER_HALF_PLANE = Domain(Kind.UPPER_HALF_PLANE)
TRANSITION_BAND_E = Domain(Kind.TRANSITION_BAND_E)


def dilated_square(a: float) -> Domain:
    return Domain(Kind.DILATED_SQUARE, a=a)


def truncated_sector(R: float) -> Domain:
    return Domain(Kind.TRUNCATED_SECTOR, R=R)


def band_halfwidth(y):
    """Half-width of the transition band at height ``y``: (pi^2/4 - y^2)/pi."""
    y = np.asarray(y, dtype=float)
    return (np.pi ** 2 / 4 - y ** 2) / np.pi


def contains(domain: Domain, z) -> np.ndarray | bool:
    """Membership in the open domain (vectorized over ``z``)."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    k = domain.kind
    if k is Kind.SQUARE_D:
        out = np.abs(x - np.pi / 2) + np.abs(y) < np.pi / 2
    elif k is Kind.DILATED_SQUARE:
        h = domain.scale * np.pi / 2
        out = np.abs(x - h) + np.abs(y) < h
    elif k is Kind.SECTOR_DELTA:
        out = x > np.abs(y)
    elif k is Kind.SECTOR_PI_MINUS_DELTA:
        out = np.pi - x > np.abs(y)
    elif k is Kind.RIGHT_HALF_PLANE:
        out = x > 0
    elif k is Kind.UPPER_HALF_PLANE:
        out = y > 0
    elif k is Kind.TRUNCATED_SECTOR:
        out = (x > np.abs(y)) & (np.abs(z) < domain.R)
    elif k is Kind.TRANSITION_BAND_E:
        inside_strip = np.abs(y) < np.pi / 2
        out = inside_strip & (np.abs(x - np.pi / 2) < band_halfwidth(np.where(inside_strip, y, 0.0)))
    else:  # pragma: no cover
        raise ValueError(k)
    return bool(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# distances

def _segment_distance(z, a, b):
    d = b - a
    t = np.clip(((z - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def _polygon_distance(z, vertices):
    vs = list(vertices)
    return np.min([_segment_distance(z, vs[i], vs[(i + 1) % len(vs)])
                   for i in range(len(vs))], axis=0)


def _ray_distance(z, direction):
    """Distance to the ray {t * direction, t >= 0}."""
    t = np.maximum((z * np.conj(direction)).real, 0.0)
    return np.abs(z - t * direction)


def square_vertices(scale: float = 1.0):
    return [0j, scale * Z1, scale * np.pi + 0j, scale * Z0]


def boundary_distance(domain: Domain, z):
    """Euclidean distance from ``z`` to the boundary of ``domain``.

    The square uses segment distances, so points near the corners get the
    vertex distance rather than the distance to an extended side line.
    """
    z = np.asarray(z, dtype=complex)
    k = domain.kind
    e_up, e_dn = np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)
    if k is Kind.SQUARE_D:
        out = _polygon_distance(z, square_vertices())
    elif k is Kind.DILATED_SQUARE:
        out = _polygon_distance(z, square_vertices(domain.scale))
    elif k is Kind.SECTOR_DELTA:
        out = np.minimum(_ray_distance(z, e_up), _ray_distance(z, e_dn))
    elif k is Kind.SECTOR_PI_MINUS_DELTA:
        return boundary_distance(SECTOR_DELTA, np.pi - z)
    elif k is Kind.RIGHT_HALF_PLANE:
        out = np.abs(z.real)
    elif k is Kind.UPPER_HALF_PLANE:
        out = np.abs(z.imag)
    elif k is Kind.TRUNCATED_SECTOR:
        R = domain.R
        edges = np.minimum(_segment_distance(z, 0j, R * e_up), _segment_distance(z, 0j, R * e_dn))
        ang = np.angle(z)
        on_arc = np.abs(ang) <= np.pi / 4
        arc = np.where(on_arc, np.abs(np.abs(z) - R),
                       np.minimum(np.abs(z - R * e_up), np.abs(z - R * e_dn)))
        out = np.minimum(edges, arc)
    elif k is Kind.TRANSITION_BAND_E:
        y = np.linspace(-np.pi / 2, np.pi / 2, 4001)
        arcs = np.concatenate([np.pi / 2 + band_halfwidth(y) + 1j * y,
                               np.pi / 2 - band_halfwidth(y) + 1j * y])
        zz = np.atleast_1d(z)
        out = np.array([np.min(np.abs(arcs - w)) for w in zz.ravel()]).reshape(zz.shape)
        out = out.reshape(z.shape)
    else:
        raise ValueError(f"{domain.name} has no finite boundary description")
    return float(out) if np.ndim(out) == 0 else out


def far_field_constant(a: float, n: int = 400, radius: float = 40.0) -> float:
    """Grid-search the smallest C with |z| + 1 <= C d(z, dD) on Delta minus D_a.

    The search covers the far sides of D_a, the sector edges beyond D_a and
    an interior polar grid up to ``radius``.
    """
    s = dilated_square(a).scale
    t = np.linspace(0.0, 1.0, n)
    pts = [s * Z0 + t * (s * np.pi - s * Z0), s * np.pi + t * (s * Z1 - s * np.pi)]
    radial = s * SIDE_D + np.geomspace(1e-9, radius, n)
    pts += [radial * np.exp(1j * np.pi / 4), radial * np.exp(-1j * np.pi / 4)]
    th = np.linspace(-np.pi / 4, np.pi / 4, n // 2 + 2)[1:-1]
    r, th = np.meshgrid(np.linspace(0.1, radius, n), th)
    grid = (r * np.exp(1j * th)).ravel()
    pts.append(grid[~contains(dilated_square(a), grid)])
    z = np.concatenate(pts)
    d = boundary_distance(SQUARE_D, z)
    return float(np.max((np.abs(z) + 1.0) / d))


# --------------------------------------------------------------------------
# one-dimensional rules

@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    """Gauss-Legendre nodes/weights on [-1, 1] (cached, read-only)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_rule(breaks, order: int):
    """Composite Gauss-Legendre rule on consecutive break points.

    ``breaks`` may carry leading batch dimensions; panels of zero length are
    allowed and simply receive zero weight.  Returns arrays of shape
    ``batch + (npanels * order,)``.
    """
    breaks = np.asarray(breaks)
    x, w = gauss_legendre(order)
    lo, hi = breaks[..., :-1, None], breaks[..., 1:, None]
    half = (hi - lo) / 2
    nodes = (lo + hi) / 2 + half * x
    weights = half * w
    shape = breaks.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)


def graded_breaks(a: float, b: float, *, panels: int = 1, grade_left: int = 0,
                  grade_right: int = 0, ratio: float = 2.0, points: Sequence[float] = (),
                  grade_points: int = 0) -> np.ndarray:
    """Break points on [a, b]: ``panels`` uniform panels plus geometric
    refinement (``ratio``) toward either end and toward interior ``points``."""
    L = b - a
    br = list(np.linspace(a, b, panels + 1))
    h = L / panels
    br += [a + h * ratio ** -k for k in range(1, grade_left + 1)]
    br += [b - h * ratio ** -k for k in range(1, grade_right + 1)]
    for p in points:
        br.append(p)
        br += [p + s * h * ratio ** -k for k in range(1, grade_points + 1) for s in (-1, 1)]
    br = np.unique(np.clip(br, a, b))
    return br


# --------------------------------------------------------------------------
# rules

@dataclass(frozen=True)
class GridQuadrature:
    """Nodes and positive weights for one measure.

    For arc-length rules ``dz`` holds the oriented complex line elements so
    that ``sum(f * dz)`` approximates a contour integral.  ``tolerance`` is
    the rule's own error estimate; ``tail_bound`` bounds the mass discarded
    by truncation (0 for bounded domains).
    """

    nodes: np.ndarray
    weights: np.ndarray
    measure: Measure
    tolerance: float = 0.0
    tail_bound: float = 0.0
    dz: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    domain: Optional[Domain] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.shape != np.shape(self.nodes):
            raise ValueError("nodes and weights differ in length")
        if not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise ValueError("weights must be strictly positive and finite")

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> complex | float:
        return np.sum(np.asarray(values) * self.weights)

    def contour_integrate(self, values) -> complex:
        if self.dz is None:
            raise ValueError("rule carries no line elements")
        return np.sum(np.asarray(values) * self.dz)

    def to_csv(self, path) -> None:
        write_grid_csv(self, path)


def _drop_zero(nodes, weights, *extra):
    keep = weights > 0
    return (nodes[keep], weights[keep]) + tuple(e[keep] for e in extra)


def make_interval_rule(a: float, b: float, order: int = 32, *, panels: int = 1,
                       grade_left: int = 0, grade_right: int = 0,
                       points: Sequence[float] = ()) -> GridQuadrature:
    br = graded_breaks(a, b, panels=panels, grade_left=grade_left,
                       grade_right=grade_right, points=points, grade_points=8 if len(points) else 0)
    x, w = panel_rule(br, order)
    x, w = _drop_zero(x, w)
    return GridQuadrature(x, w, Measure.LEBESGUE_1D, tolerance=1e-13 * (b - a))


def make_time_rule(tau: float, order: int = 16, levels: int = 34) -> GridQuadrature:
    """Rule on (0, tau) graded geometrically toward the final time.

    Heat kernels concentrate near sigma = tau at scale 1/n^2, so panels halve
    in size down to ``tau * 2**-levels``.
    """
    r_br = np.concatenate([[0.0], tau * 2.0 ** -np.arange(levels, -1, -1)])
    r, w = panel_rule(r_br, order)
    sigma = tau - r[::-1]
    return GridQuadrature(sigma, w[::-1].copy(), Measure.LEBESGUE_1D, tolerance=1e-13 * tau)


def make_log_rule(span: float = DEFAULT_LOG_SPAN, order: int = 32, panel_width: float = 0.5,
                  cut: Optional[float] = None) -> GridQuadrature:
    """Rule for dt/t on (0, inf) through t = e^s, s in [-span, span].

    ``cut`` (a time t > 0) is inserted as a break point so that signals with a
    jump there (supports starting at 1/(4 tau)) are integrated panel-wise.
    """
    n = max(1, int(round(2 * span / panel_width)))
    br = list(np.linspace(-span, span, n + 1))
    if cut is not None:
        br.append(np.log(cut))
    br = np.unique(np.clip(br, -span, span))
    s, w = panel_rule(br, order)
    return GridQuadrature(np.exp(s), w, Measure.LOG_HALF_LINE,
                          tolerance=1e-12, meta={"span": span, "cut": cut})


# --------------------------------------------------------------------------
# area rules

def _tensor(u_br, v_br, order):
    u, wu = panel_rule(u_br, order)
    v, wv = panel_rule(v_br, order)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    return U.ravel(), V.ravel(), W.ravel()


def _square_rule(order, scale, levels, panels):
    br = graded_breaks(0.0, 1.0, panels=panels, grade_left=levels, grade_right=levels)
    s, t, w = _tensor(br, br, order)
    # z = s * Z1 + t * Z0 maps the unit square onto D (up to scale)
    z = scale * (s * Z1 + t * Z0)
    jac = scale ** 2 * AREA_D
    return z, w * jac


def _sector_rule(order, R, levels, radial_panels, special_radii=(), angular_levels=None):
    ang_levels = levels if angular_levels is None else angular_levels
    # radial: fine toward 0 and toward special radii, geometric growth outward
    r_br = [0.0] + list(np.geomspace(2.0 ** -levels, min(1.0, R), levels + 1))
    if R > 1.0:
        r_br += list(np.geomspace(1.0, R, radial_panels + 1))
    for rs in special_radii:
        if 0 < rs < R:
            r_br += [rs] + [rs + s * 0.5 * 2.0 ** -k for k in range(levels + 1) for s in (-1, 1)]
    r_br = np.unique(np.clip(r_br, 0.0, R))
    # angular: symmetric about 0, graded toward the edges
    half = np.pi / 4
    a_br = [0.0] + [half - half * 2.0 ** -k for k in range(0, ang_levels + 1)] + [half]
    a_br = np.unique(np.clip(a_br, 0, half))
    a_br = np.unique(np.concatenate([-a_br[::-1], a_br]))
    r, th, w = _tensor(r_br, a_br, order)
    z = r * np.exp(1j * th)
    return z, w * r


def _half_plane_rule(order, R, levels, radial_panels):
    r_br = [0.0] + list(np.geomspace(2.0 ** -levels, min(1.0, R), levels + 1))
    if R > 1.0:
        r_br += list(np.geomspace(1.0, R, radial_panels + 1))
    r_br = np.unique(r_br)
    a_br = np.linspace(-np.pi / 2, np.pi / 2, 9)
    r, th, w = _tensor(r_br, a_br, order)
    return r * np.exp(1j * th), w * r


def _band_rule(order, levels, panels):
    # x = pi/2 + alpha(y) * eta, dA = alpha(y) d eta dy
    eta_br = graded_breaks(-1.0, 1.0, panels=2 * panels)
    y_br = graded_breaks(-np.pi / 2, np.pi / 2, panels=2 * panels, grade_left=levels, grade_right=levels)
    eta, y, w = _tensor(eta_br, y_br, order)
    al = band_halfwidth(y)
    return np.pi / 2 + al * eta + 1j * y, w * al


def make_area_rule(domain: Domain, resolution: int, truncation_R: Optional[float] = None, *,
                   levels: int = 6, panels: int = 4, special_radii: Sequence[float] = (),
                   angular_levels: Optional[int] = None) -> GridQuadrature:
    """Tensor/mapped Gauss-Legendre rule over the (truncated) interior.

    ``resolution`` is the number of Gauss points per panel and direction;
    ``levels`` the number of geometric refinement levels toward corners,
    vertices and sector edges.  Unbounded domains need ``truncation_R``; the
    returned rule then covers ``|z| < R`` (sector rules are reflected for
    ``pi - Delta``).  ``special_radii`` adds radial grading at given |z|.
    """
    k = domain.kind
    R = truncation_R
    if not domain.bounded and R is None:
        raise ValueError(f"{domain.name} is unbounded: truncation_R is required")
    if k is Kind.TRUNCATED_SECTOR:
        R = domain.R if R is None else min(R, domain.R)
    if k in (Kind.SQUARE_D, Kind.DILATED_SQUARE):
        z, w = _square_rule(resolution, domain.scale, levels, panels)
    elif k in (Kind.SECTOR_DELTA, Kind.TRUNCATED_SECTOR):
        z, w = _sector_rule(resolution, R, levels, max(panels, 2), special_radii, angular_levels)
    elif k is Kind.SECTOR_PI_MINUS_DELTA:
        z, w = _sector_rule(resolution, R, levels, max(panels, 2), special_radii, angular_levels)
        z = np.pi - z
    elif k is Kind.RIGHT_HALF_PLANE:
        z, w = _half_plane_rule(resolution, R, levels, max(panels, 2) * 4)
    elif k is Kind.UPPER_HALF_PLANE:
        z, w = _half_plane_rule(resolution, R, levels, max(panels, 2) * 4)
        z = 1j * z
    elif k is Kind.TRANSITION_BAND_E:
        z, w = _band_rule(resolution, levels, panels)
    else:  # pragma: no cover
        raise ValueError(k)
    z, w = _drop_zero(z, w)
    total = float(np.sum(w))
    return GridQuadrature(z, w, Measure.AREA_2D, tolerance=_area_tolerance(domain, resolution, R, levels,
                                                                           panels, special_radii,
                                                                           angular_levels, z, w),
                          domain=domain, meta={"R": R, "area": total, "resolution": resolution})


def _area_tolerance(domain, resolution, R, levels, panels, special_radii, angular_levels, z, w):
    """Embedded-rule estimate: discrepancy against a lower-order rule on the
    same panels for the smooth probe exp(-|z - c|^2 / 4), plus rounding."""
    if resolution < 4:
        return float(1e-3 * np.sum(w))
    lo = max(2, resolution // 2 + 1)
    c = {Kind.SECTOR_PI_MINUS_DELTA: np.pi - 1.0}.get(domain.kind, 1.0 + 0.0j)
    if domain.kind in (Kind.SQUARE_D, Kind.DILATED_SQUARE, Kind.TRANSITION_BAND_E):
        c = np.pi / 2
    probe = lambda zz: np.exp(-np.abs(zz - c) ** 2 / 4)
    k = domain.kind
    if k in (Kind.SQUARE_D, Kind.DILATED_SQUARE):
        z2, w2 = _square_rule(lo, domain.scale, levels, panels)
    elif k in (Kind.SECTOR_DELTA, Kind.TRUNCATED_SECTOR, Kind.SECTOR_PI_MINUS_DELTA):
        z2, w2 = _sector_rule(lo, R, levels, max(panels, 2), special_radii, angular_levels)
        if k is Kind.SECTOR_PI_MINUS_DELTA:
            z2 = np.pi - z2
    elif k in (Kind.RIGHT_HALF_PLANE, Kind.UPPER_HALF_PLANE):
        z2, w2 = _half_plane_rule(lo, R, levels, max(panels, 2) * 4)
        if k is Kind.UPPER_HALF_PLANE:
            z2 = 1j * z2
    else:
        z2, w2 = _band_rule(lo, levels, panels)
    diff = abs(np.sum(probe(z) * w) - np.sum(probe(z2) * w2))
    return float(diff + 1e-13 * np.sum(w))


# --------------------------------------------------------------------------
# contours

SIDE_LABELS = ("g1+", "g1-", "g2+", "g2-")


@dataclass(frozen=True)
class Segment:
    label: str
    start: complex
    end: complex

    def __call__(self, t):
        return self.start + np.asarray(t) * (self.end - self.start)

    @property
    def derivative(self) -> complex:
        return self.end - self.start

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Contour:
    """Counterclockwise polygonal contour made of oriented segments.

    ``Contour.square(eps)`` is the boundary of D shrunk toward pi/2 by the
    homothety factor 1 - 2 eps / pi, so eps = 0 gives dD with the four sides

        g1+ : t -> (1 - t)(pi/2)(1 + i)      (Z0 -> 0)
        g1- : t -> (1 - i)(pi/2) t           (0 -> Z1)
        g2- : t -> (1 - i)(pi/2)(1 - t) + t pi   (Z1 -> pi)
        g2+ : t -> pi (1 - t) + t (1 + i) pi/2   (pi -> Z0)

    traversed in the order g1+, g1-, g2-, g2+.
    """

    sides: tuple
    eps: float = 0.0

    @classmethod
    def square(cls, eps: float = 0.0) -> "Contour":
        if eps < 0 or eps >= np.pi / 2:
            raise ValueError("eps must lie in [0, pi/2)")
        c = np.pi / 2
        f = 1.0 - 2.0 * eps / np.pi
        m = lambda p: c + f * (p - c)
        return cls((Segment("g1+", m(Z0), m(0j)), Segment("g1-", m(0j), m(Z1)),
                    Segment("g2-", m(Z1), m(np.pi + 0j)), Segment("g2+", m(np.pi + 0j), m(Z0))), eps)

    @classmethod
    def half_plane_square(cls, L: float, eps: float = 0.0) -> "Contour":
        """Boundary of the square in the upper half-plane resting on
        [-L + eps, L - eps] + i eps (bottom side first)."""
        if not 0 <= eps < L:
            raise ValueError("need 0 <= eps < L")
        a = -L + eps + 1j * eps
        b = L - eps + 1j * eps
        h = 2 * (L - eps)
        return cls((Segment("w0", a, b), Segment("w1r", b, b + 1j * h),
                    Segment("w1t", b + 1j * h, a + 1j * h), Segment("w1l", a + 1j * h, a)), eps)

    def side(self, label: str) -> Segment:
        for s in self.sides:
            if s.label == label:
                return s
        raise KeyError(label)

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.sides))


def make_boundary_rule(contour: Contour, nodes_per_side: int, *, panels: int = 1,
                       grade: int = 0) -> GridQuadrature:
    """Arc-length rule along the oriented contour.

    Each side gets ``panels`` uniform Gauss-Legendre panels with
    ``nodes_per_side // panels`` points, optionally graded toward both
    corners (``grade`` levels).  ``dz`` carries the complex line element.
    """
    order = max(1, nodes_per_side // panels)
    br = graded_breaks(0.0, 1.0, panels=panels, grade_left=grade, grade_right=grade)
    t, w = panel_rule(br, order)
    nodes, weights, dz, labels = [], [], [], []
    for s in contour.sides:
        nodes.append(s(t))
        weights.append(w * s.length)
        dz.append(w * s.derivative)
        labels.append(np.full(t.shape, s.label))
    return GridQuadrature(np.concatenate(nodes), np.concatenate(weights), Measure.ARC_LENGTH,
                          tolerance=1e-13 * contour.length, dz=np.concatenate(dz),
                          labels=np.concatenate(labels), meta={"eps": contour.eps})


def winding_number(rule: GridQuadrature, z0: complex) -> float:
    return (rule.contour_integrate(1.0 / (rule.nodes - z0)) / (2j * np.pi)).real


# --------------------------------------------------------------------------
# serialization

def write_grid_csv(rule: GridQuadrature, path) -> None:
    nodes = np.asarray(rule.nodes, dtype=complex)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["re", "im", "weight", "tag"])
        for z, w in zip(nodes, rule.weights):
            wr.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(w)), rule.measure.value])


def read_grid_csv(path) -> GridQuadrature:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError("empty grid file")
    tags = {r["tag"] for r in rows}
    if len(tags) != 1:
        raise ValueError(f"mixed measure tags {sorted(tags)}")
    nodes = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    weights = np.array([float(r["weight"]) for r in rows])
    measure = Measure(tags.pop())
    if measure in (Measure.LEBESGUE_1D, Measure.LOG_HALF_LINE) and not np.any(nodes.imag):
        nodes = nodes.real
    return GridQuadrature(nodes, weights, measure)


def target_breaks(base: np.ndarray, center: np.ndarray, dist: np.ndarray,
                  lo: float, hi: float, ratio: float = 2.0) -> np.ndarray:
    """Per-target break points for integrals with a near singularity.

    Each row combines the shared ``base`` breaks with a geometric cluster
    center +- dist * ratio^k (k >= -1) around the projection ``center`` of a
    target lying ``dist`` away from the integration interval [lo, hi].
    Rows have equal length; clipped duplicates become zero-length panels.
    """
    center = np.asarray(center, dtype=float)
    dist = np.maximum(np.asarray(dist, dtype=float), 1e-300)
    span = hi - lo
    kmax = int(np.ceil(np.log(span / max(dist.min(), 1e-15 * span)) / np.log(ratio))) + 1
    kmax = max(min(kmax, 60), 0)
    steps = ratio ** np.arange(-1, kmax + 1)
    off = dist[:, None] * steps[None, :]
    pts = np.concatenate([np.broadcast_to(base, (len(center), len(base))),
                          center[:, None] - off, center[:, None], center[:, None] + off], axis=1)
    pts = np.clip(pts, lo, hi)
    # snap near-endpoint breaks so no node rounds onto a singular endpoint
    tol = 1e-13 * span
    pts = np.where(pts - lo < tol, lo, np.where(hi - pts < tol, hi, pts))
    return np.sort(pts, axis=1)
