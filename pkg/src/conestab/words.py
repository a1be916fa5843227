"""Words in the free fundamental group of a punctured surface.

The free basis of pi_1(S_{g,n}) is a_1, b_1, ..., a_g, b_g, c_1, ..., c_{n-1}.
A letter is a nonzero int: generator k (1-based, in basis order) is ``k``
and its inverse is ``-k``. The relation is

    [a_1, b_1] ... [a_g, b_g] c_1 ... c_n = 1,   [a, b] = a b a^-1 b^-1,

so the last peripheral c_n is always derived, never stored.

Lexicographic order on letters: a_1 < A_1 < b_1 < B_1 < ... < c_1 < C_1 < ...
(uppercase is the inverse). Canonical cyclic words are minimal in this order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .hyp2 import (
    Isometry,
    IsometryClass,
    NumericalOverflow,
    _guard,
    classify,
    fixed_points,
    PointH2,
    dist,
)


@dataclass(frozen=True)
class SurfaceSig:
    """Genus g and number of punctures n of S_{g,n}."""

    g: int
    n: int

    def __post_init__(self):
        if self.g < 0 or self.n < 1:
            raise ValueError(f"unsupported signature ({self.g}, {self.n}): need g >= 0, n >= 1")
        if self.rank < 2:
            raise ValueError(f"signature ({self.g}, {self.n}) has elementary fundamental group")

    @property
    def rank(self) -> int:
        return 2 * self.g + self.n - 1

    @cached_property
    def names(self) -> tuple[str, ...]:
        out = []
        for i in range(1, self.g + 1):
            out += [f"a{i}", f"b{i}"]
        out += [f"c{j}" for j in range(1, self.n)]
        return tuple(out)

    def a(self, i: int) -> int:
        return 2 * i - 1

    def b(self, i: int) -> int:
        return 2 * i

    def c(self, j: int) -> int:
        if not 1 <= j < self.n:
            raise IndexError(f"c{j} is not a basis generator of S_{{{self.g},{self.n}}}")
        return 2 * self.g + j

    def letter_name(self, x: int) -> str:
        name = self.names[abs(x) - 1]
        return name if x > 0 else name.upper()

    def format(self, w: "Word | Sequence[int]") -> str:
        letters = w.letters if isinstance(w, Word) else w
        return " ".join(self.letter_name(x) for x in letters)

    def parse(self, text: str) -> "Word":
        """Parse e.g. ``"a1 b1 A1 B1"``; uppercase is the inverse.

        For genus one, ``a``/``b`` without index are accepted.
        """
        lookup = {name: k + 1 for k, name in enumerate(self.names)}
        if self.g == 1:
            lookup.update(a=1, b=2)
        letters = []
        for tok in re.findall(r"[A-Za-z]\d*", text.replace("^-1", "").strip()):
            low = tok.lower()
            if low not in lookup:
                raise ValueError(f"unknown generator {tok!r} for signature ({self.g}, {self.n})")
            letters.append(lookup[low] if tok[0].islower() else -lookup[low])
        if re.sub(r"[A-Za-z]\d*|\s", "", text):
            raise ValueError(f"cannot parse word {text!r}")
        return Word(letters)

    def check(self, w: "Word") -> None:
        for x in w.letters:
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"letter {x} is not a generator of S_{{{self.g},{self.n}}}")


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word; reduction happens on construction."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def cyclic_reduction(self) -> "Word":
        w = self.letters
        i, j = 0, len(w)
        while j - i >= 2 and w[i] == -w[j - 1]:
            i += 1
            j -= 1
        return Word(w[i:j])


EMPTY = Word()


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def reduce(letters: Sequence[int] | Word, sig: SurfaceSig | None = None) -> Word:
    w = Word(tuple(letters))
    if sig is not None:
        sig.check(w)
    return w


def _letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def _least_rotation(keys: tuple[int, ...]) -> tuple[int, ...]:
    # Booth's algorithm would be linear; words here are short, so min over rotations.
    return min(keys[i:] + keys[:i] for i in range(len(keys)))


@dataclass(frozen=True, order=True)
class CyclicClass:
    """Conjugacy class up to inversion, stored as its canonical cyclic word.

    Ordering is by norm, then lexicographic in the letter order.
    """

    sort_key: tuple = field(repr=False)
    word: Word = field(compare=False)

    @property
    def norm(self) -> int:
        return len(self.word)

    def __len__(self):
        return len(self.word)


def cyclic_canonical(w: Word | Sequence[int]) -> CyclicClass:
    if not isinstance(w, Word):
        w = Word(tuple(w))
    core = w.cyclic_reduction()
    if not core.letters:
        raise ValueError("trivial class")
    keys = tuple(_letter_key(x) for x in core.letters)
    inv_keys = tuple(_letter_key(x) for x in core.inverse().letters)
    best = min(_least_rotation(keys), _least_rotation(inv_keys))
    letters = tuple((k // 2 + 1) * (-1 if k % 2 else 1) for k in best)
    return CyclicClass((len(best),) + best, Word(letters))


def norm(w: Word) -> int:
    """Length of a cyclically reduced representative."""
    return len(w.cyclic_reduction())


def relator(sig: SurfaceSig) -> Word:
    """The word prod [a_i, b_i] c_1 ... c_{n-1} (equal to c_n^-1)."""
    w = EMPTY
    for i in range(1, sig.g + 1):
        w = w * commutator(Word((sig.a(i),)), Word((sig.b(i),)))
    for j in range(1, sig.n):
        w = w * Word((sig.c(j),))
    return w


def peripheral_word(sig: SurfaceSig, j: int) -> Word:
    """Word for the loop around puncture j; c_n is solved from the relation."""
    if not 1 <= j <= sig.n:
        raise IndexError(f"puncture index {j} out of range 1..{sig.n}")
    if j < sig.n:
        return Word((sig.c(j),))
    return relator(sig).inverse()


def peripheral_words(sig: SurfaceSig) -> list[Word]:
    return [peripheral_word(sig, j) for j in range(1, sig.n + 1)]


def subword_stream(cls: CyclicClass | Word, max_power: int) -> list[Word]:
    """Prefixes of w^m of lengths 1 .. m * norm(w)."""
    if max_power < 1:
        raise ValueError("max_power must be >= 1")
    w = cls.word if isinstance(cls, CyclicClass) else cls.cyclic_reduction()
    letters = w.letters * max_power
    return [Word(letters[:L]) for L in range(1, len(letters) + 1)]


# --- representations -------------------------------------------------------

def _mul(m, h):
    a, b, c, d = m
    e, f, g, k = h
    return (a * e + b * g, a * f + b * k, c * e + d * g, c * f + d * k)


@dataclass(frozen=True)
class Representation:
    """Homomorphism pi_1(S_{g,n}) -> PSL(2,R) given on the free basis.

    ``constructed_peripherals`` optionally holds isometries for the loops
    around every puncture as produced by a geometric construction; they are
    independent of the basis images and give a nontrivial relation check.
    """

    sig: SurfaceSig
    images: tuple[Isometry, ...]
    provenance: dict = field(default_factory=dict, compare=False)
    cone_angles: tuple[float | None, ...] | None = None
    constructed_peripherals: tuple[Isometry, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.sig.rank:
            raise ValueError(f"expected {self.sig.rank} basis images, got {len(self.images)}")
        if self.cone_angles is not None:
            object.__setattr__(self, "cone_angles", tuple(self.cone_angles))
            if len(self.cone_angles) != self.sig.n:
                raise ValueError("need one cone angle entry per puncture")
        if self.constructed_peripherals is not None:
            object.__setattr__(self, "constructed_peripherals", tuple(self.constructed_peripherals))
            if len(self.constructed_peripherals) != self.sig.n:
                raise ValueError("need one constructed peripheral per puncture")

    @classmethod
    def from_matrices(cls, sig: SurfaceSig, mats, **kw) -> "Representation":
        return cls(sig, tuple(Isometry.from_matrix(m) for m in mats), **kw)

    def image(self, x: int) -> Isometry:
        g = self.images[abs(x) - 1]
        return g if x > 0 else g.inverse()

    @cached_property
    def peripheral_images(self) -> tuple[Isometry, ...]:
        return tuple(evaluate(self, w) for w in peripheral_words(self.sig))

    def conjugate(self, g: Isometry) -> "Representation":
        """The representation g rho g^-1."""
        gi = g.inverse()
        cp = None
        if self.constructed_peripherals is not None:
            cp = tuple(g @ c @ gi for c in self.constructed_peripherals)
        return Representation(self.sig, tuple(g @ h @ gi for h in self.images),
                              dict(self.provenance), self.cone_angles, cp)


def evaluate_lift(rho: Representation, w: Word | Sequence[int]) -> tuple[float, float, float, float]:
    """SL(2,R) product of the canonical lifts of the basis images along w.

    Signed traces are meaningful only for this fixed lift.
    """
    m = (1.0, 0.0, 0.0, 1.0)
    lifts = [g.entries for g in rho.images]
    for x in w:
        a, b, c, d = lifts[abs(x) - 1]
        m = _mul(m, (a, b, c, d) if x > 0 else (d, -b, -c, a))
        _guard(*m)
    return m


def evaluate(rho: Representation, w: Word | Sequence[int]) -> Isometry:
    return Isometry.from_sl2(*evaluate_lift(rho, w))


def prefix_images(rho: Representation, w: Word | Sequence[int]) -> list[Isometry]:
    """rho of every prefix of w, lengths 1..len(w), by incremental products."""
    out = []
    m = (1.0, 0.0, 0.0, 1.0)
    lifts = [g.entries for g in rho.images]
    for x in w:
        a, b, c, d = lifts[abs(x) - 1]
        m = _mul(m, (a, b, c, d) if x > 0 else (d, -b, -c, a))
        _guard(*m)
        out.append(Isometry.from_sl2(*m))
    return out


def trace_lift(rho: Representation, w: Word | Sequence[int]) -> float:
    m = evaluate_lift(rho, w)
    return m[0] + m[3]


def trace_sq(rho: Representation, w: Word | Sequence[int]) -> float:
    return trace_lift(rho, w) ** 2


def relation_residual(rho: Representation) -> float:
    """Sup-norm distance of prod [A_i,B_i] C_1 ... C_n from +-I.

    Uses the constructed peripherals when present; otherwise c_n is derived
    from the basis and the residual only measures rounding.
    """
    sig = rho.sig
    m = Isometry.identity()
    for i in range(1, sig.g + 1):
        A, B = rho.image(sig.a(i)), rho.image(sig.b(i))
        m = m @ A @ B @ A.inverse() @ B.inverse()
    if rho.constructed_peripherals is not None:
        for C in rho.constructed_peripherals:
            m = m @ C
    else:
        for C in rho.peripheral_images:
            m = m @ C
    return m.distance_to(Isometry.identity())


def _fixed_set(g: Isometry):
    pts = fixed_points(g)
    return [("h", p) if isinstance(p, PointH2) else ("b", p) for p in pts]


def _share_fixed_point(f1, f2, tol=1e-8) -> bool:
    for k1, p1 in f1:
        for k2, p2 in f2:
            if k1 != k2:
                continue
            if k1 == "h" and dist(p1, p2) < tol:
                return True
            if k1 == "b" and (p1 == p2 or abs(p1 - p2) < tol * max(1.0, abs(p1))):
                return True
    return False


def is_nonelementary(rho: Representation) -> bool:
    """Heuristic: some pair of non-identity basis images has no common fixed point.

    This is a sufficient-condition test on the generators only; it can
    misjudge groups that preserve a geodesic or are finite.
    """
    sets = [_fixed_set(g) for g in rho.images if classify(g) is not IsometryClass.IDENTITY]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not _share_fixed_point(sets[i], sets[j]):
                return True
    return False


def modular_torus() -> Representation:
    """The (1,1) representation A = [[1,1],[1,2]], B = [[1,-1],[-1,2]]; traces (3,3,3)."""
    return Representation.from_matrices(
        SurfaceSig(1, 1), [[[1, 1], [1, 2]], [[1, -1], [-1, 2]]],
        provenance={"builder": "modular_torus"},
    )
