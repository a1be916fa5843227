"""Upper half-plane geometry and PSL(2,R) isometries.

An :class:`Isometry` is a unit-determinant real 2x2 matrix taken up to sign.
Entries are kept in a canonical sign (first nonzero entry positive), so two
isometries compare equal when their canonical matrices agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

# Entries above this magnitude are treated as a numerical failure: long
# words multiply out to huge matrices and the Moebius action loses all
# precision well before float overflow.
OVERFLOW_GUARD = 1e150

# Half-width of the parabolic band on |tr| - 2, and the identity tolerance.
TAU_CLS = 1e-9


class NumericalOverflow(ArithmeticError):
    """Raised when matrix entries exceed :data:`OVERFLOW_GUARD`."""


class NotElliptic(ValueError):
    pass


def _guard(*xs: float) -> None:
    for x in xs:
        if not math.isfinite(x) or abs(x) > OVERFLOW_GUARD:
            raise NumericalOverflow(f"matrix entry {x!r} exceeds overflow guard")


def _canonical(a: float, b: float, c: float, d: float):
    for x in (a, b, c, d):
        if x != 0.0:
            if x < 0.0:
                return -a, -b, -c, -d
            break
    return a, b, c, d


@dataclass(frozen=True)
class PointH2:
    """A point x + iy of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.x) or not math.isfinite(self.y):
            raise ValueError(f"not a point of the upper half-plane: ({self.x}, {self.y})")

    @classmethod
    def from_complex(cls, z: complex) -> "PointH2":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def to_disk(self) -> complex:
        """Cayley map to the Poincare disk, sending i to 0."""
        return cayley(self.z)

    @classmethod
    def from_disk(cls, w: complex) -> "PointH2":
        return cls.from_complex(inverse_cayley(w))


I = PointH2(0.0, 1.0)


def cayley(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def inverse_cayley(w: complex) -> complex:
    return 1j * (1 + w) / (1 - w)


class IsometryClass(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True, eq=False)
class Isometry:
    """Orientation-preserving isometry of H^2 as a canonical SL(2,R) lift.

    The constructor rescales by sqrt(det) and flips to canonical sign, so any
    real matrix with positive determinant is accepted.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        _guard(a, b, c, d)
        det = a * d - b * c
        if not det > 0.0:
            raise ValueError(f"determinant must be positive, got {det!r}")
        if det != 1.0:
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        a, b, c, d = _canonical(a, b, c, d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_sl2(cls, a: float, b: float, c: float, d: float) -> "Isometry":
        """Wrap a product of SL(2,R) matrices without recomputing the determinant.

        For long products ad - bc cancels catastrophically, so it is taken to be 1.
        """
        _guard(a, b, c, d)
        g = object.__new__(cls)
        for k, v in zip("abcd", _canonical(float(a), float(b), float(c), float(d))):
            object.__setattr__(g, k, v)
        return g

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    @property
    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def matrix(self) -> list[list[float]]:
        return [[self.a, self.b], [self.c, self.d]]

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        """Trace of the canonical lift (sign is lift dependent)."""
        return self.a + self.d

    @property
    def abs_trace(self) -> float:
        return abs(self.a + self.d)

    @property
    def trace_sq(self) -> float:
        t = self.a + self.d
        return t * t

    def inverse(self) -> "Isometry":
        return Isometry.from_sl2(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def __call__(self, p: PointH2) -> PointH2:
        return apply(self, p)

    def distance_to(self, other: "Isometry") -> float:
        """Max-norm distance between the two sign classes."""
        plus = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        minus = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(plus, minus)

    def isclose(self, other: "Isometry", tol: float = 1e-9) -> bool:
        return self.distance_to(other) < tol

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        return self.isclose(other, 1e-12)

    __hash__ = None

    def __repr__(self):
        return "Isometry(%r, %r, %r, %r)" % self.entries

    def serialize(self) -> list[str]:
        return [format(x, ".17g") for x in self.entries]


def compose(g: Isometry, h: Isometry) -> Isometry:
    """The isometry g o h (matrix product g h)."""
    # both factors are SL(2,R); recomputing ad - bc would only add cancellation
    return Isometry.from_sl2(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def apply(g: Isometry, p: PointH2) -> PointH2:
    z = p.z
    num = g.a * z + g.b
    den = g.c * z + g.d
    if den == 0:
        raise NumericalOverflow("Moebius image at infinity")
    w = num / den
    # Im(gz) = Im(z) / |cz + d|^2 is exact for det 1; avoids cancellation in w.imag.
    y = p.y / abs(den) ** 2
    if not (y > 0.0) or not math.isfinite(w.real):
        raise NumericalOverflow("Moebius image left the upper half-plane numerically")
    return PointH2(w.real, y)


def dist(p: PointH2, q: PointH2) -> float:
    """Hyperbolic distance; 2 asinh form is stable for nearby points."""
    chord = abs(p.z - q.z)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.y * q.y)))


def disk_dist(z: complex, w: complex) -> float:
    """Distance in the Poincare disk."""
    return 2.0 * math.atanh(abs(z - w) / abs(1 - z.conjugate() * w))


def classify(g: Isometry, tol: float = TAU_CLS) -> IsometryClass:
    if g.distance_to(Isometry.identity()) < tol:
        return IsometryClass.IDENTITY
    t = g.abs_trace
    if t < 2.0 - tol:
        return IsometryClass.ELLIPTIC
    if t > 2.0 + tol:
        return IsometryClass.HYPERBOLIC
    return IsometryClass.PARABOLIC


def translation_length(g: Isometry, tol: float = TAU_CLS) -> float:
    if classify(g, tol) is not IsometryClass.HYPERBOLIC:
        return 0.0
    return 2.0 * math.acosh(g.abs_trace / 2.0)


def _to_i(p: PointH2) -> Isometry:
    """Isometry taking i to p (affine, no rotation)."""
    s = math.sqrt(p.y)
    return Isometry(s, p.x / s, 0.0, 1.0 / s)


def displacement_at(g: Isometry, p: PointH2 = None) -> float:
    """d(p, g p) computed from matrix entries, without forming g p.

    At p = i, 2 sinh(d/2) = |(a - d, b + c)| for det 1, which stays accurate
    both for tiny displacements and for entries far beyond sqrt(max float).
    """
    if p is not None and p != I:
        t = _to_i(p)
        g = Isometry.from_sl2(*_mat_mul(_mat_mul(t.inverse().entries, g.entries), t.entries))
    a, b, c, d = g.entries
    return 2.0 * math.asinh(math.hypot(a - d, b + c) / 2.0)


def _mat_mul(m, h):
    a, b, c, d = m
    e, f, g, k = h
    return (a * e + b * g, a * f + b * k, c * e + d * g, c * f + d * k)


def rotation_about(p: PointH2, phi: float) -> Isometry:
    """Counterclockwise rotation by phi about p (derivative e^{i phi} at p)."""
    if not -2 * math.pi < phi < 2 * math.pi:
        raise ValueError("rotation angle must lie in (-2pi, 2pi)")
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    r = Isometry(c, s, -s, c)
    t = _to_i(p)
    return compose(compose(t, r), t.inverse())


def fixed_points(g: Isometry, tol: float = TAU_CLS) -> list:
    """Fixed points in H^2 (as PointH2) or on the boundary (float, or math.inf).

    Returns an empty list for the identity.
    """
    kind = classify(g, tol)
    if kind is IsometryClass.IDENTITY:
        return []
    a, b, c, d = g.entries
    if kind is IsometryClass.ELLIPTIC:
        disc = 4.0 - (a + d) ** 2
        z = ((a - d) + 1j * math.sqrt(disc)) / (2 * c)
        if z.imag < 0:
            z = z.conjugate()
        return [PointH2.from_complex(z)]
    if abs(c) < 1e-14:
        # upper triangular: fixes infinity and possibly b/(d-a)
        if abs(d - a) < 1e-14:
            return [math.inf]
        return sorted([b / (d - a)]) + [math.inf]
    disc = max((a + d) ** 2 - 4.0, 0.0)
    if kind is IsometryClass.PARABOLIC:
        return [(a - d) / (2 * c)]
    r = math.sqrt(disc)
    return sorted([((a - d) - r) / (2 * c), ((a - d) + r) / (2 * c)])


def rotation_angle(g: Isometry, fixed_point_hint: PointH2 | None = None) -> float:
    """Angle in (0, 2pi) of an elliptic g: its derivative at the fixed point is e^{i angle}."""
    if classify(g) is not IsometryClass.ELLIPTIC:
        raise NotElliptic("not elliptic")
    (p,) = fixed_points(g)
    if fixed_point_hint is not None and dist(p, fixed_point_hint) > 1e-6:
        raise ValueError("fixed point does not match hint")
    deriv = 1.0 / (g.c * p.z + g.d) ** 2
    return cmath.phase(deriv) % (2 * math.pi)


def _frame(p: PointH2, q: PointH2) -> Isometry:
    """Isometry taking p to i and q onto the imaginary axis above i."""
    t = _to_i(p).inverse()
    w = cayley(apply(t, q).z)
    return compose(rotation_about(I, -cmath.phase(w)) if w != 0 else Isometry.identity(), t)


def pairing_isometry(p1: PointH2, q1: PointH2, p2: PointH2, q2: PointH2,
                     tol: float = 1e-9) -> Isometry:
    """The orientation-preserving isometry with p1 -> p2 and q1 -> q2."""
    l1, l2 = dist(p1, q1), dist(p2, q2)
    if abs(l1 - l2) > tol:
        raise ValueError(f"segment lengths differ: {l1!r} vs {l2!r}")
    return compose(_frame(p2, q2).inverse(), _frame(p1, q1))


def mobius_scaling(k: float) -> Isometry:
    """z -> k z."""
    s = math.sqrt(k)
    return Isometry(s, 0.0, 0.0, 1.0 / s)
