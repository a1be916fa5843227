"""Local geometry of a hyperbolic cone of angle theta and slant height h.

Arcs between two boundary points are sorted by how many times they wind
across the cone's slant line (the intersection number k). Unrolled, the
endpoints sit at angular separation k*theta in a wedge about the apex; the
shortest arc avoids the apex exactly when that wedge is convex, i.e. when
k*theta < pi, and otherwise runs through the apex with length d1 + d2.

The floor form ``k < floor(pi/theta)`` disagrees with the wedge criterion
when floor(pi/theta) <= k < pi/theta; :func:`apex_criteria_compare` reports
both so the difference is visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .hyp2 import disk_dist

# Relative slack used when comparing k*theta with pi.
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ConeSpec:
    theta: float
    h: float

    def __post_init__(self):
        if not 0 < self.theta < 2 * math.pi:
            raise ValueError("cone angle must lie in (0, 2pi)")
        if not self.h > 0:
            raise ValueError("slant height must be positive")

    @property
    def admissible(self) -> bool:
        return self.theta < math.pi


@dataclass(frozen=True)
class ArcQuery:
    d1: float
    d2: float
    k: int

    def check(self, spec: ConeSpec) -> None:
        if not (0 < self.d1 <= spec.h and 0 < self.d2 <= spec.h):
            raise ValueError("endpoint distances must lie in (0, h]")
        if self.k < 0:
            raise ValueError("intersection number must be >= 0")


@dataclass(frozen=True)
class ArcAnswer:
    length: float
    through_apex: bool
    developed_angle: float


def chord_length(d1: float, d2: float, phi: float) -> float:
    """Side opposite the angle phi in a triangle with sides d1, d2 (law of cosines)."""
    if not 0 <= phi <= math.pi:
        raise ValueError("angle must lie in [0, pi]")
    if phi == 0:
        return abs(d1 - d2)
    # cosh c = cosh(d1 - d2) + sinh d1 sinh d2 (1 - cos phi), written to keep
    # precision for small c and at phi = pi.
    x = math.cosh(d1 - d2) + math.sinh(d1) * math.sinh(d2) * 2 * math.sin(phi / 2) ** 2
    return math.acosh(x)


def apex_geometric(theta: float, k: int) -> bool:
    """Wedge criterion: the shortest arc passes through the apex iff k*theta >= pi."""
    return k * theta >= math.pi * (1 - ANGLE_TOL)


def apex_floor(theta: float, k: int) -> bool:
    """Floor criterion: through the apex iff k >= floor(pi/theta)."""
    return k >= math.floor(math.pi / theta * (1 + ANGLE_TOL))


def infimal_arc(spec: ConeSpec, q: ArcQuery) -> ArcAnswer:
    q.check(spec)
    phi = q.k * spec.theta
    if apex_geometric(spec.theta, q.k):
        return ArcAnswer(q.d1 + q.d2, True, phi)
    return ArcAnswer(chord_length(q.d1, q.d2, phi), False, phi)


@dataclass(frozen=True)
class CriteriaRow:
    k: int
    geometric_through_apex: bool
    floor_through_apex: bool

    @property
    def discrepancy(self) -> bool:
        return self.geometric_through_apex != self.floor_through_apex


def apex_criteria_compare(theta: float, k_max: int) -> list[CriteriaRow]:
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return [CriteriaRow(k, apex_geometric(theta, k), apex_floor(theta, k)) for k in range(1, k_max + 1)]


def _polar(d: float, angle: float) -> complex:
    """Disk-model point at hyperbolic distance d from 0 in direction angle."""
    r = math.tanh(d / 2)
    return complex(r * math.cos(angle), r * math.sin(angle))


def _geodesic_point(z: complex, w: complex, t: float) -> complex:
    """Point at parameter t in [0, 1] along the disk geodesic from z to w."""
    # move z to 0, walk along the diameter, move back
    def to0(u):
        return (u - z) / (1 - z.conjugate() * u)

    def back(u):
        return (u + z) / (1 + z.conjugate() * u)

    w0 = to0(w)
    L = disk_dist(0, w0)
    r = math.tanh(t * L / 2)
    return back(r * w0 / abs(w0)) if abs(w0) > 0 else z


def safe_radius(d: float, theta: float) -> float:
    """Distance from the apex to the geodesic joining (d, 0) and (d, theta).

    Found by minimising the distance to the apex along the segment; for the
    isosceles wedge the foot of the perpendicular is the midpoint.
    """
    if not d > 0:
        raise ValueError("d must be positive")
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    z, w = _polar(d, 0.0), _polar(d, theta)
    res = minimize_scalar(lambda t: abs(_geodesic_point(z, w, t)), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-12})
    return disk_dist(0, _geodesic_point(z, w, res.x))


def segment_apex_distance(d1: float, a1: float, d2: float, a2: float, samples: int = 0) -> float:
    """Distance from the apex to the geodesic segment between two polar points.

    Used to check that truncating the cone at :func:`safe_radius` leaves
    chords untouched; requires |a1 - a2| < pi.
    """
    z, w = _polar(d1, a1), _polar(d2, a2)
    res = minimize_scalar(lambda t: abs(_geodesic_point(z, w, t)), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-12})
    best = min(abs(z), abs(w), abs(_geodesic_point(z, w, res.x)))
    return 2 * math.atanh(best)
