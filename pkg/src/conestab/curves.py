"""Enumeration of simple closed curves as canonical cyclic words.

Curves are produced by pushing a few seed curves around with the mapping
class group generator table, so every output class is simple by
construction. Completeness is only certified for the once-punctured torus,
where :func:`farey_words` gives an independent list (Christoffel words).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .mcg import GeneratorTable, act_word, generator_table
from .words import (
    CyclicClass,
    SurfaceSig,
    Word,
    cyclic_canonical,
    peripheral_words,
)


@dataclass(frozen=True)
class CurveClass:
    cls: CyclicClass
    separating: bool = False
    peripheral: bool = False
    provenance: str = ""

    @property
    def word(self) -> Word:
        return self.cls.word

    @property
    def norm(self) -> int:
        return self.cls.norm


@dataclass(frozen=True)
class EnumConfig:
    max_norm: int
    include_separating: bool = False
    bfs_slack: int | None = None  # default 2 * max_norm
    max_frontier: int = 200_000
    include_peripheral: bool = False

    def __post_init__(self):
        if self.max_norm < 1:
            raise ValueError("max_norm must be >= 1")
        if self.bfs_slack is not None and self.bfs_slack < 0:
            raise ValueError("bfs_slack must be >= 0")

    @property
    def slack(self) -> int:
        return 2 * self.max_norm if self.bfs_slack is None else self.bfs_slack


@dataclass
class EnumResult:
    sig: SurfaceSig
    config: EnumConfig
    curves: list[CurveClass]
    truncated: bool = False
    layers: int = 0
    # Only the (1,1) enumeration is cross-checked against an independent list.
    certified: bool = False

    @property
    def qualifier(self) -> str:
        if self.truncated:
            return "truncated"
        return "complete" if self.certified else "complete up to search budget"

    def classes(self) -> set[CyclicClass]:
        return {c.cls for c in self.curves}

    def __iter__(self):
        return iter(self.curves)

    def __len__(self):
        return len(self.curves)


def is_peripheral(sig: SurfaceSig, cls: CyclicClass | Word) -> bool:
    if isinstance(cls, Word):
        cls = cyclic_canonical(cls)
    return any(cyclic_canonical(p) == cls for p in peripheral_words(sig))


# Separating, non-peripheral seeds for positive genus.
_SEPARATING = {
    (1, 2): ["a1 b1 A1 B1"],
    (2, 1): ["a1 b1 A1 B1"],
}


def seeds(sig: SurfaceSig, include_separating: bool = False) -> list[CurveClass]:
    out = []
    if sig.g >= 1:
        for i in range(1, sig.g + 1):
            for x in (sig.a(i), sig.b(i)):
                out.append(CurveClass(cyclic_canonical(Word((x,))), False, False, sig.letter_name(x)))
        if include_separating:
            for text in _SEPARATING.get((sig.g, sig.n), []):
                out.append(CurveClass(cyclic_canonical(sig.parse(text)), True, False, text))
    else:
        # increasing products c_i1 ... c_ik, 2 <= k <= n-2: one seed per way
        # of splitting the punctures into two sets of size >= 2
        for k in range(2, sig.n - 1):
            for idx in itertools.combinations(range(1, sig.n), k):
                w = Word(tuple(sig.c(j) for j in idx))
                out.append(CurveClass(cyclic_canonical(w), True, False, sig.format(w)))
    if sig.g >= 1 and sig.n >= 1 and (sig.g, sig.n) not in _SEPARATING and (sig.g, sig.n) != (1, 1):
        if include_separating:
            raise ValueError(f"no separating seeds listed for signature ({sig.g}, {sig.n})")
    return out


def _peripheral_curves(sig: SurfaceSig) -> list[CurveClass]:
    out = []
    for j, p in enumerate(peripheral_words(sig), start=1):
        out.append(CurveClass(cyclic_canonical(p), True, True, f"peripheral c{j}"))
    return out


def enumerate_scc(sig: SurfaceSig, config: EnumConfig, table: GeneratorTable | None = None,
                  shuffle_seed: int | None = None) -> EnumResult:
    """Breadth-first closure of the seeds under the generator table.

    Intermediate classes are kept up to norm ``max_norm + slack``; the output
    holds classes of norm <= max_norm ordered by norm, then lexicographically.
    ``shuffle_seed`` permutes the generator order (the result must not change).
    """
    N = config.max_norm
    cap = N + config.slack
    start = seeds(sig, config.include_separating)
    if start and table is None:
        table = generator_table(sig)
    gens = table.with_inverses() if table is not None else []
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(gens)

    seen: dict[CyclicClass, CurveClass] = {}
    frontier = []
    for s in start:
        if s.cls not in seen and s.norm <= cap:
            seen[s.cls] = s
            frontier.append(s)
    truncated = False
    layers = 0
    while frontier and not truncated:
        layers += 1
        nxt = []
        for cur in sorted(frontier, key=lambda c: c.cls):
            for mc in gens:
                cls = cyclic_canonical(act_word(mc, cur.word))
                if cls.norm > cap or cls in seen:
                    continue
                cc = CurveClass(cls, cur.separating, False, f"{mc.name} {cur.provenance}")
                seen[cls] = cc
                nxt.append(cc)
                if len(seen) > config.max_frontier:
                    truncated = True
                    break
            if truncated:
                break
        frontier = nxt

    curves = [c for c in seen.values() if c.norm <= N]
    if config.include_peripheral:
        curves += [c for c in _peripheral_curves(sig) if c.norm <= N and c.cls not in seen]
    curves = [CurveClass(c.cls, c.separating, c.peripheral or is_peripheral(sig, c.cls), c.provenance)
              for c in curves]
    curves.sort(key=lambda c: c.cls)
    certified = (sig.g, sig.n) == (1, 1) and not truncated
    return EnumResult(sig, config, curves, truncated, layers, certified)


def closure_defect(result: EnumResult, table: GeneratorTable | None = None) -> list[CyclicClass]:
    """Classes of norm <= N reachable in one more generator step but missing from the output."""
    sig = result.sig
    table = table or generator_table(sig)
    have = result.classes()
    missing = set()
    for c in result.curves:
        if c.peripheral:
            continue
        for mc in table.with_inverses():
            cls = cyclic_canonical(act_word(mc, c.word))
            if cls.norm <= result.config.max_norm and cls not in have:
                missing.add(cls)
    return sorted(missing)


# --- Farey oracle for the once-punctured torus --------------------------------

def christoffel_word(p: int, q: int) -> Word:
    """Cyclic word with |p| letters a^{+-1} and |q| letters b^{+-1} of slope p/q.

    Convention: a has slope 1/0 and b has slope 0/1; a negative slope uses b^-1.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("slope must be given by a coprime pair")
    P, Q = abs(p), abs(q)
    n = P + Q
    b = 2 if p * q >= 0 else -2
    letters = []
    for k in range(1, n + 1):
        letters.append(1 if (k * P) // n - ((k - 1) * P) // n else b)
    return Word(tuple(letters))


def farey_slopes(N: int) -> list[tuple[int, int]]:
    """Coprime (p, q) with |p| + |q| <= N, one per slope (q > 0, or (1, 0))."""
    out = [(1, 0)]
    for q in range(1, N + 1):
        for p in range(-(N - q), N - q + 1):
            if math.gcd(p, q) == 1:
                out.append((p, q))
    return out


def farey_words(N: int) -> list[tuple[str, CyclicClass]]:
    if N < 1:
        raise ValueError("N must be >= 1")
    out = [(f"{p}/{q}", cyclic_canonical(christoffel_word(p, q))) for p, q in farey_slopes(N)]
    out.sort(key=lambda t: t[1])
    return out
