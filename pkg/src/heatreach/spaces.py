"""Norms and functionals of the Bergman, Smirnov and Zygmund spaces.

Membership in a space is decided numerically: a norm is computed on a rule,
and the value is called finite when it is a finite number that moves by less
than 5% when the rule is refined (see :func:`refinement_delta`).
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .domains import (AREA_D, SQUARE_D, Z0, Z1, Contour, Domain, GridQuadrature, Kind,
                      boundary_distance, make_area_rule, make_boundary_rule)

MEMBERSHIP_DRIFT = 0.05
DEFAULT_SHRINK = tuple(0.2 * 2.0 ** -k for k in range(9))


@dataclass
class ComplexField:
    """Complex samples on a rule, optionally backed by a closed form."""

    grid: GridQuadrature
    values: np.ndarray
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != np.shape(self.grid.nodes):
            raise ValueError("values length must equal nodes length")

    @classmethod
    def from_function(cls, fn: Callable, grid: GridQuadrature) -> "ComplexField":
        return cls(grid, fn(grid.nodes), fn)

    def __call__(self, z):
        if self.evaluator is None:
            raise ValueError("field has no off-grid evaluator")
        return self.evaluator(z)

    def scaled(self, c: complex) -> "ComplexField":
        ev = None if self.evaluator is None else (lambda z, f=self.evaluator: c * f(z))
        return ComplexField(self.grid, c * self.values, ev)


class WeightKind(enum.Enum):
    UNIT = "Unit"
    OMEGA0 = "Omega0"
    OMEGA_PI = "OmegaPi"
    VERTEX_SINGULAR = "VertexSingular"


@dataclass(frozen=True)
class Weight:
    kind: WeightKind = WeightKind.UNIT
    tau: Optional[float] = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is WeightKind.UNIT:
            return np.ones(z.shape)
        if self.kind is WeightKind.OMEGA0:
            return np.exp((z * z).real / (2 * self.tau)) / self.tau
        if self.kind is WeightKind.OMEGA_PI:
            return Weight(WeightKind.OMEGA0, self.tau)(np.pi - z)
        prod = np.abs((z - Z0) * (z - Z1))
        if np.any(prod == 0):
            raise ValueError("vertex weight evaluated at a vertex of D")
        return prod ** -2.0

    @property
    def name(self) -> str:
        return self.kind.value if self.tau is None else f"{self.kind.value}(tau={self.tau:g})"


UNIT = Weight()
VERTEX = Weight(WeightKind.VERTEX_SINGULAR)


def omega0(tau: float) -> Weight:
    return Weight(WeightKind.OMEGA0, tau)


def omega_pi(tau: float) -> Weight:
    return Weight(WeightKind.OMEGA_PI, tau)


@dataclass
class NormReport:
    space: str
    domain: str
    weight: str
    value: float
    tail_bound: float = 0.0
    refinement_delta: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def to_json(self) -> str:
        d = asdict(self)
        extra = d.pop("extra")
        d.update(extra)
        return json.dumps(d, sort_keys=True)


def _values(f, rule):
    if isinstance(f, ComplexField):
        return f.values
    if callable(f):
        return np.asarray(f(rule.nodes), dtype=complex)
    return np.asarray(f, dtype=complex)


def radial_tail_estimate(rule: GridQuadrature, density) -> float:
    """Estimate the mass beyond the truncation radius of ``rule``.

    Fits a power law to the contributions of the two outermost radial shells
    (|z| in [R/4, R/2] and [R/2, R]) and sums the geometric continuation.
    Returns ``inf`` when the shells do not decay.
    """
    R = rule.meta.get("R")
    if R is None:
        return 0.0
    mirrored = rule.domain is not None and rule.domain.kind is Kind.SECTOR_PI_MINUS_DELTA
    r = np.abs(rule.nodes - (np.pi if mirrored else 0.0))
    mass = density * rule.weights
    outer = np.sum(mass[(r >= R / 2)])
    inner = np.sum(mass[(r >= R / 4) & (r < R / 2)])
    if outer <= 0:
        return 0.0
    q = outer / inner if inner > 0 else np.inf
    if q >= 1:
        return float("inf")
    return float(outer * q / (1 - q))


def bergman_norm(f, domain: Domain, weight: Weight = UNIT, rule: Optional[GridQuadrature] = None,
                 *, resolution: int = 16, truncation_R: Optional[float] = None) -> NormReport:
    """Square root of the weighted area integral of |f|^2 over ``domain``.

    ``f`` is a :class:`ComplexField`, a callable, or samples aligned with
    ``rule``.  For truncated (unbounded) domains the report's ``tail_bound``
    estimates the discarded part of the squared norm.
    """
    if rule is None:
        rule = make_area_rule(domain, resolution, truncation_R)
    vals = _values(f, rule)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample value")
    dens = np.abs(vals) ** 2 * weight(rule.nodes)
    sq = float(np.sum(dens * rule.weights))
    tail = radial_tail_estimate(rule, dens) if not domain.bounded else 0.0
    extra = {}
    if weight.kind is WeightKind.VERTEX_SINGULAR:
        extra["near_vertex"] = vertex_annulus_profile(dens, rule)
    return NormReport("A2", domain.name, weight.name, float(np.sqrt(sq)), tail, extra=extra)


def vertex_annulus_profile(density, rule: GridQuadrature, levels: int = 6) -> list:
    """Contributions of the dyadic annuli 2^-(k+1) <= |z - vertex| < 2^-k.

    A convergent vertex-weighted integral has shrinking contributions; a
    log-divergent one (e.g. f = 1) keeps them roughly constant.
    """
    d = np.minimum(np.abs(rule.nodes - Z0), np.abs(rule.nodes - Z1))
    mass = density * rule.weights
    return [float(np.sum(mass[(d >= 2.0 ** -(k + 1)) & (d < 2.0 ** -k)])) for k in range(levels)]


def vertex_weight_diverges(profile: Sequence[float], ratio: float = 0.6) -> bool:
    """True when the inner annulus contributions fail to decay geometrically."""
    tail = [p for p in profile[-3:]]
    if tail[0] == 0:
        return False
    return all(tail[i + 1] > ratio * tail[i] for i in range(len(tail) - 1))


def vertex_weighted_norm(phi: Callable, resolution: int = 12, levels: int = 14) -> NormReport:
    """A^2(D, |(z - Z0)(z - Z1)|^-2) norm with grading toward the vertices,
    flagging divergence from the annulus profile."""
    rule = make_area_rule(SQUARE_D, resolution, levels=levels)
    rep = bergman_norm(phi, SQUARE_D, VERTEX, rule)
    prof = vertex_annulus_profile(np.abs(phi(rule.nodes)) ** 2 * VERTEX(rule.nodes), rule, levels=10)
    rep.extra["near_vertex"] = prof
    rep.extra["diverges"] = vertex_weight_diverges(prof)
    dens = np.abs(phi(rule.nodes)) ** 2 * VERTEX(rule.nodes)
    nearer0 = np.abs(rule.nodes - Z0) <= np.abs(rule.nodes - Z1)
    rep.extra["diverges_at"] = [name for name, m in (("z0", nearer0), ("z1", ~nearer0))
                                if vertex_weight_diverges(vertex_annulus_profile(dens * m, rule, levels=10))]
    if rep.extra["diverges"]:
        rep.value = float("inf")
    return rep


def refinement_delta(compute: Callable[[int], float], resolution: int) -> float:
    """Relative change of ``compute`` when the resolution is doubled."""
    a = compute(resolution)
    b = compute(2 * resolution)
    return abs(b - a) / max(abs(b), 1e-300)


# --------------------------------------------------------------------------
# boundary functionals

def _boundary_values(f, rule):
    vals = np.asarray(f(rule.nodes), dtype=complex) if callable(f) else _values(f, rule)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample value")
    return vals


@dataclass
class SmirnovReport:
    value: float
    p: int
    eps: list
    integrals: list
    monotone: bool

    def __float__(self):
        return float(self.value)


def smirnov_norm(f: Callable, p: int, shrink_sequence: Optional[Sequence[float]] = None,
                 nodes_per_side: int = 64, *, panels: int = 4, grade: int = 12,
                 include_limit: bool = True) -> SmirnovReport:
    """E^p(D) norm as the supremum of contour L^p integrals over shrunk squares.

    The default shrink sequence is eps_k = 0.2 * 2^-k (k = 0..8) followed by
    the limit contour eps = 0 (``include_limit``).  ``monotone`` reports
    whether the integrals increase as the contours approach dD.
    """
    if p not in (1, 2):
        raise ValueError("only p in {1, 2} is supported")
    eps = list(DEFAULT_SHRINK if shrink_sequence is None else shrink_sequence)
    if include_limit and 0.0 not in eps:
        eps.append(0.0)
    ints = []
    for e in eps:
        rule = make_boundary_rule(Contour.square(e), nodes_per_side, panels=panels, grade=grade)
        vals = _boundary_values(f, rule)
        ints.append(float(rule.integrate(np.abs(vals) ** p)))
    order = np.argsort(eps)[::-1]
    seq = np.array(ints)[order]
    monotone = bool(np.all(np.diff(seq) >= -1e-12 * max(1.0, seq.max())))
    return SmirnovReport(float(max(ints) ** (1.0 / p)), p, eps, ints, monotone)


def llogl_functional(f, rule: Optional[GridQuadrature] = None, nodes_per_side: int = 64,
                     *, panels: int = 4, grade: int = 12) -> float:
    """Integral of |f| log+ |f| |du| along dD (log+ t = max(log t, 0))."""
    if rule is None:
        rule = make_boundary_rule(Contour.square(0.0), nodes_per_side, panels=panels, grade=grade)
    a = np.abs(_boundary_values(f, rule))
    with np.errstate(divide="ignore"):
        lp = np.where(a > 1.0, np.log(np.where(a > 0, a, 1.0)), 0.0)
    return float(rule.integrate(a * lp))


def l1_boundary_norm(f, rule: Optional[GridQuadrature] = None, nodes_per_side: int = 64,
                     *, panels: int = 4, grade: int = 12) -> float:
    if rule is None:
        rule = make_boundary_rule(Contour.square(0.0), nodes_per_side, panels=panels, grade=grade)
    return float(rule.integrate(np.abs(_boundary_values(f, rule))))


@dataclass
class GrowthReport:
    worst_ratio: float
    worst_node: complex
    holds: bool


def pointwise_growth_check(f, domain: Domain, norm: float, rule: GridQuadrature) -> GrowthReport:
    """Check |f(z)| sqrt(pi) d(z, boundary) <= ||f||_A2 at every node.

    This is the mean-value bound over the largest disc around z contained in
    the domain.
    """
    vals = _values(f, rule)
    d = boundary_distance(domain, rule.nodes)
    ratio = np.abs(vals) * np.sqrt(np.pi) * d / norm if norm > 0 else np.zeros(len(vals))
    i = int(np.argmax(ratio))
    return GrowthReport(float(ratio[i]), complex(rule.nodes[i]), bool(ratio[i] <= 1.0 + 1e-12))
