"""Holonomy representations of hyperbolic cone surfaces built from polygons.

* :func:`double_polygon_sphere` doubles a triangle (or a regular polygon);
  the loop around vertex j has holonomy the rotation by twice its angle.
* :func:`genus_g_one_cone` glues a regular 4g-gon with vertex angle
  theta/(4g) by the usual a1 b1 a1^-1 b1^-1 ... pattern; all vertices
  become one cone point of angle theta.
* :func:`from_traces_torus` realises a trace triple for the one-holed torus.

Polygons are laid out in the Poincare disk, vertices counterclockwise, and
converted to the upper half-plane for the isometry arithmetic. Rotations
are counterclockwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from scipy.optimize import brentq

from .hyp2 import (
    Isometry,
    IsometryClass,
    PointH2,
    classify,
    dist,
    pairing_isometry,
    rotation_about,
    rotation_angle,
)
from .words import (
    Representation,
    SurfaceSig,
    commutator,
    evaluate,
    relation_residual,
    trace_lift,
    Word,
)

RELATION_TOL = 1e-9


class NoRealRealization(ValueError):
    pass


# --- polygons -------------------------------------------------------------------

def _angle_from_sides(a: float, b: float, c: float) -> float:
    """Angle opposite side a in a triangle with sides a, b, c (law of cosines)."""
    cos_a = (math.cosh(b) * math.cosh(c) - math.cosh(a)) / (math.sinh(b) * math.sinh(c))
    return math.acos(max(-1.0, min(1.0, cos_a)))


@dataclass(frozen=True)
class PolygonRealization:
    disk_vertices: tuple[complex, ...]
    angles: tuple[float, ...]
    side_lengths: tuple[float, ...]
    area: float

    @property
    def vertices(self) -> tuple[PointH2, ...]:
        return tuple(PointH2.from_disk(w) for w in self.disk_vertices)

    @property
    def m(self) -> int:
        return len(self.disk_vertices)

    @property
    def gauss_bonnet_residual(self) -> float:
        return abs(self.area - ((self.m - 2) * math.pi - sum(self.angles)))

    @property
    def convex(self) -> bool:
        return all(a < math.pi for a in self.angles)


def polygon_from_disk(vertices) -> PolygonRealization:
    """Measure a convex polygon given by counterclockwise disk-model vertices.

    Angles come from the law of cosines at each vertex; the area is the sum
    of the angle defects of a triangle fan, so the Gauss-Bonnet residual is
    a real consistency check.
    """
    pts = [PointH2.from_disk(w) for w in vertices]
    m = len(pts)
    sides = tuple(dist(pts[k], pts[(k + 1) % m]) for k in range(m))
    angles = []
    for k in range(m):
        p, v, q = pts[k - 1], pts[k], pts[(k + 1) % m]
        angles.append(_angle_from_sides(dist(p, q), dist(v, p), dist(v, q)))
    area = 0.0
    for k in range(1, m - 1):
        a, b, c = pts[0], pts[k], pts[k + 1]
        ab, bc, ca = dist(a, b), dist(b, c), dist(c, a)
        area += math.pi - (_angle_from_sides(bc, ab, ca) + _angle_from_sides(ca, ab, bc)
                           + _angle_from_sides(ab, bc, ca))
    return PolygonRealization(tuple(vertices), tuple(angles), sides, area)


def triangle_from_angles(alpha: float, beta: float, gamma: float) -> PolygonRealization:
    """Triangle with angles alpha, beta, gamma at vertices A, B, C (counterclockwise).

    A sits at the disk origin and AB runs along the positive real axis.
    """
    if min(alpha, beta, gamma) <= 0 or alpha + beta + gamma >= math.pi:
        raise ValueError("need positive angles with alpha + beta + gamma < pi")

    def side(x, y, z):
        # dual law of cosines: side opposite angle x
        return math.acosh((math.cos(x) + math.cos(y) * math.cos(z)) / (math.sin(y) * math.sin(z)))

    b = side(beta, gamma, alpha)   # |CA|
    c = side(gamma, alpha, beta)   # |AB|
    A = 0j
    B = complex(math.tanh(c / 2), 0.0)
    C = math.tanh(b / 2) * cmath.exp(1j * alpha)
    return polygon_from_disk((A, B, C))


def _regular_vertices(m: int, R: float) -> tuple[complex, ...]:
    r = math.tanh(R / 2)
    return tuple(r * cmath.exp(2j * math.pi * k / m) for k in range(m))


def _regular_angle(m: int, R: float) -> float:
    v = [PointH2.from_disk(w) for w in _regular_vertices(m, R)]
    return _angle_from_sides(dist(v[-1], v[1]), dist(v[0], v[-1]), dist(v[0], v[1]))


def regular_polygon(m: int, alpha: float) -> PolygonRealization:
    """Regular m-gon centred at the origin with every vertex angle alpha.

    The circumradius is found by bracketing root search; the vertex angle
    decreases monotonically from the Euclidean value (m-2)pi/m to 0.
    """
    if m < 3:
        raise ValueError("need m >= 3")
    if not 0 < alpha < (m - 2) * math.pi / m:
        raise ValueError(f"vertex angle must lie in (0, {(m - 2)}pi/{m})")
    hi = 1.0
    while _regular_angle(m, hi) > alpha:
        hi *= 2
        if hi > 60:
            raise ValueError("vertex angle too small to realise numerically")
    lo = 1e-8
    R = brentq(lambda R: _regular_angle(m, R) - alpha, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return polygon_from_disk(_regular_vertices(m, R))


# --- irrationality heuristic ----------------------------------------------------

def is_irrational_multiple_of_pi(theta: float, max_denominator: int = 10**6, tol: float = 1e-14) -> bool:
    """Heuristic: no fraction with denominator <= max_denominator matches theta/pi."""
    x = theta / math.pi
    approx = Fraction(x).limit_denominator(max_denominator)
    return abs(x - float(approx)) > tol * max(1.0, abs(x))


def _cone_metadata(cone_angles, builder, **params):
    return {
        "builder": builder,
        "params": params,
        "admissible": all(a < math.pi for a in cone_angles),
        "indiscrete_flag": any(is_irrational_multiple_of_pi(a) for a in cone_angles),
    }


# --- builders -------------------------------------------------------------------

def double_polygon_sphere(*angles: float) -> Representation:
    """Holonomy of the cone sphere obtained by doubling a polygon.

    ``angles`` are the polygon's vertex angles; the cone angles are twice
    them. Either three arbitrary angles or m equal angles (regular m-gon).
    """
    if len(angles) == 1 and not isinstance(angles[0], (int, float)):
        angles = tuple(angles[0])
    m = len(angles)
    if m < 3:
        raise ValueError("need at least three angles")
    if min(angles) <= 0 or sum(angles) >= (m - 2) * math.pi:
        raise ValueError(f"need positive angles with sum < {m - 2 if m > 3 else ''}pi")
    if m == 3:
        poly = triangle_from_angles(*angles)
    elif len(set(angles)) == 1:
        poly = regular_polygon(m, angles[0])
    else:
        raise ValueError("unequal angles are only supported for triangles")
    rots = tuple(rotation_about(v, 2 * a) for v, a in zip(poly.vertices, angles))
    cone = tuple(2 * a for a in angles)
    meta = _cone_metadata(cone, "double_polygon_sphere", angles=list(angles))
    # doubled polygons are admissible with cone angles up to pi
    meta["admissible"] = all(c <= math.pi for c in cone)
    return Representation(SurfaceSig(0, m), rots[:-1], meta, cone, rots)


def genus_g_one_cone(g: int, theta: float) -> Representation:
    """Genus g surface with one cone point of angle theta from a regular 4g-gon.

    Side j of the polygon runs from vertex j to j+1; handle i uses sides
    4i..4i+3 labelled a_i, b_i, a_i^-1, b_i^-1. X_i maps side 4i+2 onto
    side 4i and Y_i maps side 4i+3 onto 4i+1. Following the vertex cycle,
    the basis images a_k -> Y_s^-1, b_k -> X_s with s running through
    handles 1, g, g-1, ..., 2 make prod [a_k, b_k] the rotation by theta
    about vertex 4 (mod 4g).
    """
    if g < 1:
        raise ValueError("need genus >= 1")
    if not 0 < theta < 2 * math.pi - 1e-6:
        raise ValueError("cone angle must lie in (0, 2pi - 1e-6)")
    m = 4 * g
    poly = regular_polygon(m, theta / m)
    v = poly.vertices

    def V(k):
        return v[k % m]

    X = [pairing_isometry(V(4 * i + 3), V(4 * i + 2), V(4 * i), V(4 * i + 1)) for i in range(g)]
    Y = [pairing_isometry(V(4 * i + 4), V(4 * i + 3), V(4 * i + 1), V(4 * i + 2)) for i in range(g)]
    order = [0] + list(range(g - 1, 0, -1))
    images = []
    for s in order:
        images += [Y[s].inverse(), X[s]]
    peripheral = rotation_about(V(4), -theta)
    meta = _cone_metadata([theta], "genus_g_one_cone", g=g, theta=theta)
    return Representation(SurfaceSig(g, 1), tuple(images), meta, (theta,), (peripheral,))


def cone_torus(theta: float) -> Representation:
    rho = genus_g_one_cone(1, theta)
    rho.provenance["builder"] = "cone_torus"
    rho.provenance["params"] = {"theta": theta}
    return rho


def _realize_hyperbolic_first(x: float, y: float, z: float):
    # A diagonal with trace x (|x| > 2)
    lam = (x + math.copysign(math.sqrt(x * x - 4), x)) / 2
    p = (z - y / lam) / (lam - 1 / lam)
    q = 1.0
    r = p * (y - p) - 1.0
    return (lam, 0.0, 0.0, 1 / lam), (p, q, r, y - p)


def _realize_elliptic_first(x: float, y: float, z: float):
    # A = [[x/2, s], [-s, x/2]] with s = sqrt(1 - x^2/4); B = [[y/2, q], [q + delta, y/2]]
    s = math.sqrt(1 - x * x / 4)
    delta = (z - x * y / 2) / s
    obstruction = x * x + y * y + z * z - x * y * z - 4
    if obstruction < -1e-12:
        raise NoRealRealization(
            f"no real realization: x^2+y^2+z^2-xyz-4 = {obstruction!r} < 0 (compact type)")
    disc = max(delta * delta + y * y - 4, 0.0)
    q = (-delta + math.sqrt(disc)) / 2
    # q (q + delta) = y^2/4 - 1 fixes det B = 1
    return (x / 2, s, -s, x / 2), (y / 2, -q, -(q + delta), y / 2)


def from_traces_torus(x: float, y: float, z: float, tol: float = 1e-9) -> Representation:
    """SL(2,R) matrices A, B with tr A = x, tr B = y, tr AB = z.

    Raises :class:`NoRealRealization` when the triple only comes from SU(2),
    i.e. |x|, |y| <= 2 and x^2 + y^2 + z^2 - xyz < 4.
    """
    if abs(x) > 2:
        A, B = _realize_hyperbolic_first(x, y, z)
    elif abs(y) > 2:
        B, A = _realize_hyperbolic_first(y, x, z)
    elif abs(x) < 2:
        A, B = _realize_elliptic_first(x, y, z)
    elif abs(y) < 2:
        B, A = _realize_elliptic_first(y, x, z)
    else:
        raise NoRealRealization("both x and y are +-2; parabolic pairs are not handled")
    # sign flips to reach canonical form happen per matrix; keep the lift
    # by choosing the sign of B so that tr(AB) matches for the canonical A
    rho = Representation.from_matrices(
        SurfaceSig(1, 1), [[A[:2], A[2:]], [B[:2], B[2:]]],
        provenance={"builder": "from_traces_torus", "params": {"xyz": [x, y, z]}},
    )
    got = (trace_lift(rho, (1,)), trace_lift(rho, (2,)), trace_lift(rho, (1, 2)))
    want = (x, y, z)
    if not all(abs(abs(g) - abs(w)) < tol * max(1.0, abs(w)) for g, w in zip(got, want)):
        raise NoRealRealization(f"realization check failed: traces {got} vs {want}")
    return rho


# --- verification ---------------------------------------------------------------

@dataclass
class PunctureCheck:
    index: int
    kind: str
    abs_trace: float
    rotation_angle: float | None
    prescribed: float | None
    matches: bool | None


@dataclass
class VerificationReport:
    relation_residual: float
    peripheral_consistency: float
    punctures: list[PunctureCheck]
    admissible: bool | None
    indiscrete_flag: bool | None
    passed: bool
    tol: float = RELATION_TOL
    notes: list[str] = field(default_factory=list)


def verify_holonomy(rho: Representation, cone_angles=None, tol: float = RELATION_TOL,
                    angle_tol: float = 1e-6) -> VerificationReport:
    """Check the surface relation and the peripheral rotation angles.

    A peripheral matches a prescribed angle theta when it is elliptic with
    rotation angle theta or 2pi - theta (orientation is convention), and
    |tr| = 2|cos(theta/2)|.
    """
    cone_angles = tuple(cone_angles) if cone_angles is not None else rho.cone_angles
    residual = relation_residual(rho)
    notes = []
    consistency = 0.0
    if rho.constructed_peripherals is not None:
        consistency = max(c.distance_to(d) for c, d in zip(rho.constructed_peripherals, rho.peripheral_images))
    else:
        notes.append("no constructed peripherals; relation residual measures rounding only")
    checks = []
    ok = residual < tol and consistency < tol
    for j, P in enumerate(rho.peripheral_images, start=1):
        kind = classify(P)
        angle = rotation_angle(P) if kind is IsometryClass.ELLIPTIC else None
        want = cone_angles[j - 1] if cone_angles is not None else None
        match = None
        if want is not None:
            trace_ok = abs(P.abs_trace - 2 * abs(math.cos(want / 2))) < angle_tol
            angle_ok = angle is not None and min(abs(angle - want), abs(angle - (2 * math.pi - want))) < angle_tol
            match = trace_ok and angle_ok
            ok = ok and match
        checks.append(PunctureCheck(j, kind.value, P.abs_trace, angle, want, match))
    admissible = None
    indiscrete = None
    if cone_angles is not None and all(a is not None for a in cone_angles):
        admissible = all(a < math.pi for a in cone_angles)
        indiscrete = any(is_irrational_multiple_of_pi(a) for a in cone_angles)
    return VerificationReport(residual, consistency, checks, admissible, indiscrete, ok, tol, notes)
