"""Mapping classes as automorphisms of the free fundamental group.

A :class:`MappingClass` stores the image and the inverse image of every
basis generator. Validation checks that the two are mutually inverse and
that every peripheral class (including the derived c_n) is preserved up to
conjugacy. For punctured surfaces these two checks characterise pure,
orientation-preserving mapping classes, so a validated user table is
geometric by construction.

Built-in tables cover (1,1), (1,2), (2,1), (0,4) and (0,5), plus the empty
table of (0,3).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .hyp2 import I, NumericalOverflow, PointH2, displacement_at
from .words import (
    Representation,
    SurfaceSig,
    Word,
    evaluate,
    peripheral_words,
    trace_lift,
)


class InvalidTable(ValueError):
    pass


def _substitute(images: Sequence[Word], w: Word) -> Word:
    out: list[int] = []
    for x in w:
        img = images[abs(x) - 1]
        out.extend(img.letters if x > 0 else img.inverse().letters)
    return Word(tuple(out))


@dataclass(frozen=True)
class MappingClass:
    name: str
    sig: SurfaceSig
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]

    def __call__(self, w: Word) -> Word:
        return act_word(self, w)

    @property
    def inverse(self) -> "MappingClass":
        name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return MappingClass(name, self.sig, self.inverse_images, self.images)

    def validate(self) -> None:
        sig = self.sig
        if len(self.images) != sig.rank or len(self.inverse_images) != sig.rank:
            raise InvalidTable(f"{self.name}: expected {sig.rank} images and inverse images")
        for w in self.images + self.inverse_images:
            sig.check(w)
        for k in range(1, sig.rank + 1):
            gen = Word((k,))
            there = _substitute(self.inverse_images, _substitute(self.images, gen))
            back = _substitute(self.images, _substitute(self.inverse_images, gen))
            if there != gen or back != gen:
                raise InvalidTable(
                    f"{self.name}: round trip fails on {sig.letter_name(k)}: "
                    f"got {sig.format(there)!r} / {sig.format(back)!r}")
        for j, p in enumerate(peripheral_words(sig), start=1):
            img = act_word(self, p)
            if not _is_conjugate(img, p):
                raise InvalidTable(
                    f"{self.name}: peripheral c{j} = {sig.format(p)!r} maps to "
                    f"{sig.format(img)!r}, which is not conjugate to it")


def _is_conjugate(u: Word, v: Word) -> bool:
    """Exact conjugacy in the free group (no inversion)."""
    cu, cv = u.cyclic_reduction().letters, v.cyclic_reduction().letters
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    return any(doubled[i:i + len(cv)] == cv for i in range(len(cu)))


def identity_class(sig: SurfaceSig) -> MappingClass:
    gens = tuple(Word((k,)) for k in range(1, sig.rank + 1))
    return MappingClass("id", sig, gens, gens)


def act_word(mc: MappingClass, w: Word) -> Word:
    return _substitute(mc.images, w)


def compose(mc2: MappingClass, mc1: MappingClass) -> MappingClass:
    """The automorphism mc2 o mc1 (apply mc1 first)."""
    if mc1.sig != mc2.sig:
        raise ValueError("signatures differ")
    images = tuple(act_word(mc2, w) for w in mc1.images)
    inv = tuple(_substitute(mc1.inverse_images, w) for w in mc2.inverse_images)
    return MappingClass(f"{mc2.name}*{mc1.name}", mc1.sig, images, inv)


def act_rep(mc: MappingClass, rho: Representation) -> Representation:
    """phi . rho = rho o phi^-1."""
    if mc.sig != rho.sig:
        raise ValueError("signatures differ")
    images = tuple(evaluate(rho, w) for w in mc.inverse_images)
    prov = dict(rho.provenance)
    prov["mcg"] = prov.get("mcg", []) + [mc.name]
    return Representation(rho.sig, images, prov, rho.cone_angles)


# --- generator tables ---------------------------------------------------------

@dataclass(frozen=True)
class GeneratorTable:
    sig: SurfaceSig
    generators: tuple[MappingClass, ...]

    def __post_init__(self):
        for mc in self.generators:
            if mc.sig != self.sig:
                raise InvalidTable(f"{mc.name}: signature mismatch")
            mc.validate()

    def with_inverses(self) -> list[MappingClass]:
        out = []
        for mc in self.generators:
            out += [mc, mc.inverse]
        return out

    def __getitem__(self, name: str) -> MappingClass:
        for mc in self.with_inverses():
            if mc.name == name:
                return mc
        raise KeyError(name)

    def names(self) -> list[str]:
        return [mc.name for mc in self.generators]


def _mc(sig: SurfaceSig, name: str, images: Mapping[str, str], inverse: Mapping[str, str]) -> MappingClass:
    def full(spec):
        return tuple(sig.parse(spec.get(nm, nm)) for nm in sig.names)
    return MappingClass(name, sig, full(images), full(inverse))


def _torus_twists(sig: SurfaceSig, i: int) -> list[MappingClass]:
    a, b = f"a{i}", f"b{i}"
    A, B = a.upper(), b.upper()
    return [
        _mc(sig, f"T_{a}", {b: f"{b} {a}"}, {b: f"{b} {A}"}),
        _mc(sig, f"T_{b}", {a: f"{a} {B}"}, {a: f"{a} {b}"}),
    ]


def _sphere_twist(sig: SurfaceSig, i: int, j: int) -> MappingClass:
    """Twist about the curve around punctures i..j: conjugates c_i..c_j by c_i...c_j."""
    delta = " ".join(f"c{k}" for k in range(i, j + 1))
    delta_inv = " ".join(f"C{k}" for k in range(j, i - 1, -1))
    images = {f"c{k}": f"{delta} c{k} {delta_inv}" for k in range(i, j + 1)}
    inverse = {f"c{k}": f"{delta_inv} c{k} {delta}" for k in range(i, j + 1)}
    return _mc(sig, "T_c" + "".join(str(k) for k in range(i, j + 1)), images, inverse)


def _builtin(sig: SurfaceSig) -> list[MappingClass]:
    g, n = sig.g, sig.n
    if (g, n) == (1, 1):
        return _torus_twists(sig, 1)
    if (g, n) == (1, 2):
        # Twist moving puncture 1 across the a1 handle; found by a bounded
        # search over automorphisms passing the validator.
        return _torus_twists(sig, 1) + [
            _mc(sig, "T_d", {"b1": "c1 a1 b1"}, {"b1": "A1 C1 b1"}),
        ]
    if (g, n) == (2, 1):
        # Handle-linking twist; fixes a1, a2.
        return _torus_twists(sig, 1) + _torus_twists(sig, 2) + [
            _mc(sig, "T_e", {"b1": "a2 a1 b1", "b2": "a1 a2 b2"},
                {"b1": "A1 A2 b1", "b2": "A2 A1 b2"}),
        ]
    if g == 0 and n in (4, 5):
        out = []
        for size in range(2, n - 1):
            for i in range(1, n - size + 1):
                out.append(_sphere_twist(sig, i, i + size - 1))
        return out
    if (g, n) == (0, 3):
        return []  # the pure mapping class group of the pair of pants is trivial
    raise InvalidTable(f"no built-in generator table for signature ({g}, {n})")


def generator_table(sig: SurfaceSig, user_table: "GeneratorTable | None" = None) -> GeneratorTable:
    if user_table is not None:
        if user_table.sig != sig:
            raise InvalidTable("user table signature mismatch")
        return user_table
    return GeneratorTable(sig, tuple(_builtin(sig)))


# --- table files ----------------------------------------------------------------

TABLE_VERSION = 1


def save_table(table: GeneratorTable, path) -> None:
    sig = table.sig
    doc = {
        "version": TABLE_VERSION,
        "signature": [sig.g, sig.n],
        "generators": [
            {
                "name": mc.name,
                "images": {nm: sig.format(w) for nm, w in zip(sig.names, mc.images)},
                "inverse_images": {nm: sig.format(w) for nm, w in zip(sig.names, mc.inverse_images)},
            }
            for mc in table.generators
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_table(path) -> GeneratorTable:
    """Read and validate a generator table file; every basis letter must be listed."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidTable(f"table parse failure: {e}") from None
    if not isinstance(doc, dict) or set(doc) != {"version", "signature", "generators"}:
        raise InvalidTable("table must have exactly the keys version, signature, generators")
    if doc["version"] != TABLE_VERSION:
        raise InvalidTable(f"unsupported version {doc['version']!r}")
    sig = SurfaceSig(*doc["signature"])
    gens = []
    for entry in doc["generators"]:
        if set(entry) != {"name", "images", "inverse_images"}:
            raise InvalidTable("generator entries need exactly name, images, inverse_images")
        for key in ("images", "inverse_images"):
            if set(entry[key]) != set(sig.names):
                raise InvalidTable(f"{entry['name']}: {key} must list each of {', '.join(sig.names)}")
        gens.append(MappingClass(
            entry["name"], sig,
            tuple(sig.parse(entry["images"][nm]) for nm in sig.names),
            tuple(sig.parse(entry["inverse_images"][nm]) for nm in sig.names)))
    return GeneratorTable(sig, tuple(gens))


# --- trace coordinates of the one-holed torus --------------------------------------

def _twist_a(x, y, z):
    return x, z, x * z - y


def _twist_a_inv(x, y, z):
    return x, x * y - z, y


def _twist_b(x, y, z):
    return x * y - z, y, x


def _twist_b_inv(x, y, z):
    return z, y, y * z - x


# (tr a, tr b, tr ab) -> traces of (phi(a), phi(b), phi(ab)) for the built-in twists
TORUS_MOVES = {
    "T_a1": _twist_a,
    "T_a1^-1": _twist_a_inv,
    "T_b1": _twist_b,
    "T_b1^-1": _twist_b_inv,
    "flip_x": lambda x, y, z: (x, y, x * y - z),
    "flip_y": lambda x, y, z: (x, x * z - y, z),
    "flip_z": lambda x, y, z: (y * z - x, y, z),
    "swap_xy": lambda x, y, z: (y, x, z),
    "swap_yz": lambda x, y, z: (x, z, y),
    "swap_xz": lambda x, y, z: (z, y, x),
}


def trace_moves_torus(x: float, y: float, z: float, move: str) -> tuple[float, float, float]:
    try:
        f = TORUS_MOVES[move]
    except KeyError:
        raise ValueError(f"unknown move {move!r}; expected one of {', '.join(TORUS_MOVES)}") from None
    return f(x, y, z)


def kappa(x: float, y: float, z: float) -> float:
    return x * x + y * y + z * z - x * y * z


def boundary_character(x: float, y: float, z: float) -> float:
    """kappa - 2, which equals tr[A, B] for any SL(2) lifts A, B."""
    return kappa(x, y, z) - 2.0


def torus_traces(rho: Representation) -> tuple[float, float, float]:
    a, b = Word((1,)), Word((2,))
    return trace_lift(rho, a), trace_lift(rho, b), trace_lift(rho, a * b)


# --- orbit experiments ------------------------------------------------------------

@dataclass(frozen=True)
class WalkSpec:
    """Either an explicit list of generator names or a seeded random walk."""

    steps: tuple[str, ...] | None = None
    length: int = 0
    seed: int = 0
    max_word_length: int = 10_000

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("walk length must be >= 0")
        if self.max_word_length < 1:
            raise ValueError("max_word_length must be >= 1")

    def resolve(self, table: GeneratorTable) -> list[MappingClass]:
        if self.steps is not None:
            return [table[name] for name in self.steps]
        gens = table.with_inverses()
        if not gens:
            if self.length:
                raise ValueError("random walk on an empty generator table")
            return []
        rng = random.Random(self.seed)
        return [rng.choice(gens) for _ in range(self.length)]


@dataclass(frozen=True)
class OrbitRow:
    step: int
    mapping_class: str
    norms: tuple[int, ...]
    displacements: tuple[float, ...]
    traces: tuple[float, ...]
    trace_triple: tuple[float, float, float] | None
    peripheral_abs_traces: tuple[float, ...]


@dataclass
class OrbitReport:
    seeds: tuple[str, ...]
    basepoint: PointH2
    rows: list[OrbitRow]
    truncated: bool = False
    reason: str = ""


def orbit_experiment(rho: Representation, walk: WalkSpec, seed_curves: Sequence[Word],
                     table: GeneratorTable | None = None, basepoint: PointH2 = I) -> OrbitReport:
    """Walk phi_k = phi_{k-1} o g_k and measure rho(phi_k(w)) for every seed w.

    Stops early (truncated) once an image word exceeds the length budget or
    the matrices overflow.
    """
    sig = rho.sig
    table = table if table is not None else generator_table(sig)
    steps = walk.resolve(table)
    periph = peripheral_words(sig)
    phi = identity_class(sig)
    rows: list[OrbitRow] = []
    report = OrbitReport(tuple(sig.format(w) for w in seed_curves), basepoint, rows)
    for k in range(len(steps) + 1):
        if k:
            phi = compose(phi, steps[k - 1])
            phi = MappingClass(" ".join(s.name for s in steps[:k]), sig, phi.images, phi.inverse_images)
        imgs = [act_word(phi, w) for w in seed_curves]
        if any(len(w) > walk.max_word_length for w in imgs):
            report.truncated, report.reason = True, f"word length budget exceeded at step {k}"
            break
        try:
            disp = tuple(displacement_at(evaluate(rho, w), basepoint) for w in imgs)
            trs = tuple(trace_lift(rho, w) for w in imgs)
            triple = None
            if (sig.g, sig.n) == (1, 1):
                pa, pb = phi.images
                triple = (trace_lift(rho, pa), trace_lift(rho, pb), trace_lift(rho, pa * pb))
            ptr = tuple(abs(trace_lift(rho, act_word(phi, p))) for p in periph)
        except NumericalOverflow as e:
            report.truncated, report.reason = True, f"overflow at step {k}: {e}"
            break
        rows.append(OrbitRow(k, phi.name, tuple(len(w) for w in imgs), disp, trs, triple, ptr))
    return report
