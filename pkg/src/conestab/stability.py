"""Numerical evidence for quasi-geodesic stability of a representation.

For a family of cyclic words (simple closed curves, or primitives) and a
basepoint O, every subword u of the bi-infinite periodic word is sampled
and its displacement d(O, rho(u) O) recorded. Writing m(L) for the smallest
displacement seen at word length L, the scan fits the tightest line
L / C - eps lying under every m(L), and checks the trivial upper bound
m(L) <= K L with K the largest generator displacement.

A verdict of ``evidence-stable`` only means the samples up to the stated
cutoffs are consistent with stability.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .curves import CurveClass, EnumConfig, enumerate_scc, farey_words, is_peripheral
from .hyp2 import I, IsometryClass, PointH2, apply, classify, displacement_at, dist
from .words import (
    CyclicClass,
    Representation,
    SurfaceSig,
    Word,
    cyclic_canonical,
    evaluate,
    prefix_images,
)


class Mode(str, Enum):
    SIMPLE = "simple"
    STRONG_SIMPLE = "strong-simple"
    PRIMITIVE = "primitive"


class Verdict(str, Enum):
    STABLE = "evidence-stable"
    NOT_STABLE = "not-stable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class StabilityConfig:
    max_norm: int = 8
    powers: int = 3
    basepoint: str | PointH2 = "fixed"  # "fixed" (i), "optimized", or an explicit point
    mode: Mode = Mode.SIMPLE
    all_rotations: bool = True
    # slope below which a witness-free scan is reported inconclusive
    min_slope: float = 1e-3
    primitive_budget: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.max_norm < 2:
            raise ValueError("max_norm must be >= 2")
        if self.powers < 1:
            raise ValueError("powers must be >= 1")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True)
class Witness:
    word: str
    cls: CyclicClass
    kind: str
    trace_sq: float


@dataclass
class StabilityReport:
    basepoint: PointH2
    lengths: np.ndarray
    min_displacement: np.ndarray
    C: float
    eps: float
    K: float
    eps_max: float
    witnesses: list[Witness]
    verdict: Verdict
    n_classes: int
    config: StabilityConfig
    envelope_slope: float  # before clipping to C >= 1
    argmin_words: list[str] = field(default_factory=list)

    @property
    def slope(self) -> float:
        return 1.0 / self.C

    @property
    def lower_ok(self) -> bool:
        return bool(np.all(self.min_displacement >= self.lengths / self.C - self.eps - 1e-12))

    @property
    def upper_ok(self) -> bool:
        return bool(np.all(self.min_displacement <= self.K * self.lengths + 1e-9))

    @property
    def sandwich_ok(self) -> bool:
        return self.lower_ok and self.upper_ok

    def table(self) -> list[tuple[int, float]]:
        return [(int(L), float(m)) for L, m in zip(self.lengths, self.min_displacement)]


def displacement(rho: Representation, w: Word, O: PointH2 = I) -> float:
    return displacement_at(evaluate(rho, w), O)


def generator_displacements(rho: Representation, O: PointH2 = I) -> list[float]:
    return [dist(O, apply(g, O)) for g in rho.images]


def _max_gen_disp(rho: Representation, z: PointH2) -> float:
    return max(generator_displacements(rho, z))


def choose_basepoint(rho: Representation) -> PointH2:
    """Point minimising the largest generator displacement.

    Coarse grid in hyperbolic polar coordinates about i, then Nelder-Mead
    in (x, log y) from the best grid point. Deterministic.
    """
    def f(v):
        return _max_gen_disp(rho, PointH2(v[0], math.exp(v[1])))

    cands = [I]
    for r in (0.5, 1.0, 2.0, 3.0, 4.0):
        t = math.tanh(r / 2)
        for k in range(16):
            w = t * complex(math.cos(2 * math.pi * k / 16), math.sin(2 * math.pi * k / 16))
            cands.append(PointH2.from_disk(w))
    best = min(cands, key=lambda p: _max_gen_disp(rho, p))
    x0 = np.array([best.x, math.log(best.y)])
    f0 = f(x0)
    if f0 == 0.0:
        return best
    res = minimize(f, x0, method="Nelder-Mead",
                   options={"xatol": 1e-11, "fatol": 1e-13, "maxiter": 20000, "maxfev": 40000})
    # restart once from the optimum: Nelder-Mead stalls at kinks of the max
    res = minimize(f, res.x, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000})
    if res.fun > f0:
        return best
    return PointH2(float(res.x[0]), math.exp(float(res.x[1])))


def _resolve_basepoint(rho: Representation, policy) -> PointH2:
    if isinstance(policy, PointH2):
        return policy
    if policy == "fixed":
        return I
    if policy == "optimized":
        return choose_basepoint(rho)
    raise ValueError(f"unknown basepoint policy {policy!r}")


def primitive_classes(sig: SurfaceSig, max_norm: int, budget: int = 2000, seed: int = 0) -> list[CyclicClass]:
    """Cyclically reduced primitive classes up to max_norm.

    Rank 2: exact, from Christoffel words. Higher rank: images of basis
    elements under random products of elementary Nielsen moves (budgeted;
    a heuristic sample, not a complete list).
    """
    if sig.rank == 2:
        out = []
        for _, cls in farey_words(max_norm):
            out.append(cls)
        return sorted(set(out))
    rng = random.Random(seed)
    r = sig.rank
    found = {cyclic_canonical(Word((k,))) for k in range(1, r + 1)}
    for _ in range(budget):
        basis = [Word((k,)) for k in range(1, r + 1)]
        for _ in range(rng.randint(1, 2 * max_norm)):
            i, j = rng.sample(range(r), 2)
            e = rng.choice((1, -1))
            if rng.random() < 0.5:
                basis[i] = basis[i] * basis[j] ** e
            else:
                basis[i] = basis[j] ** e * basis[i]
            if len(basis[i]) > 4 * max_norm:
                break
        for w in basis:
            if w.letters:
                cls = cyclic_canonical(w)
                if cls.norm <= max_norm:
                    found.add(cls)
    return sorted(found)


def classes_for_mode(sig: SurfaceSig, config: StabilityConfig) -> list[CyclicClass]:
    if config.mode is Mode.PRIMITIVE:
        return primitive_classes(sig, config.max_norm, config.primitive_budget, config.seed)
    res = enumerate_scc(sig, EnumConfig(config.max_norm,
                                        include_separating=config.mode is Mode.STRONG_SIMPLE))
    return [c.cls for c in res if not c.peripheral]


def detect_instability(rho: Representation, classes: Iterable) -> list[Witness]:
    """Non-peripheral classes whose image is not hyperbolic."""
    out = []
    for c in classes:
        cls = c.cls if isinstance(c, CurveClass) else c
        if (isinstance(c, CurveClass) and c.peripheral) or is_peripheral(rho.sig, cls):
            continue
        g = evaluate(rho, cls.word)
        kind = classify(g)
        if kind is not IsometryClass.HYPERBOLIC:
            out.append(Witness(rho.sig.format(cls.word), cls, kind.value, g.trace_sq))
    return out


def _diameter(points: Sequence[PointH2]) -> float:
    return max((dist(p, q) for p in points for q in points), default=0.0)


def fit_envelope(lengths: np.ndarray, mins: np.ndarray, eps_max: float) -> tuple[float, float, float]:
    """Tightest lower line with intercept >= -eps_max; returns (C, eps, raw slope).

    For a fixed slope s the smallest admissible eps is max(s L - m(L)), so the
    constraint eps <= eps_max reads s <= min((m(L) + eps_max) / L). The raw
    slope is then clipped to 1 so that C >= 1.
    """
    raw = float(np.min((mins + eps_max) / lengths))
    s = min(raw, 1.0)
    if s <= 0:
        return math.inf, eps_max, raw
    C = 1.0 / s
    eps = max(0.0, float(np.max(lengths / C - mins)))
    return C, eps, raw


def stability_scan(rho: Representation, classes: Iterable | None, config: StabilityConfig) -> StabilityReport:
    """Sample subword displacements for every class and fit (C, eps)."""
    if classes is None:
        classes = classes_for_mode(rho.sig, config)
    cls_list = []
    for c in classes:
        if isinstance(c, CurveClass):
            if c.peripheral:
                continue
            c = c.cls
        elif isinstance(c, Word):
            c = cyclic_canonical(c)
        if is_peripheral(rho.sig, c):
            continue
        cls_list.append(c)
    if not cls_list:
        raise ValueError("empty class set")

    O = _resolve_basepoint(rho, config.basepoint)
    m = config.powers
    maxL = m * max(c.norm for c in cls_list)
    best = np.full(maxL, np.inf)
    best_word: list[tuple | None] = [None] * maxL
    for cls in cls_list:
        w = cls.word.letters
        n = len(w)
        for r in range(n if config.all_rotations else 1):
            rot = (w[r:] + w[:r]) * m
            for L, g in enumerate(prefix_images(rho, rot), start=1):
                d = displacement_at(g, O)
                if d < best[L - 1]:
                    best[L - 1] = d
                    best_word[L - 1] = rot[:L]
    lengths = np.arange(1, maxL + 1, dtype=float)
    seen = np.isfinite(best)
    lengths, mins = lengths[seen], best[seen]

    gen_points = [O] + [apply(g, O) for g in rho.images] + [apply(g.inverse(), O) for g in rho.images]
    K = max(dist(O, p) for p in gen_points[1:])
    eps_max = 2.0 * _diameter(gen_points)
    C, eps, raw = fit_envelope(lengths, mins, eps_max)

    witnesses = detect_instability(rho, cls_list)
    if witnesses:
        verdict = Verdict.NOT_STABLE
    elif 1.0 / C < config.min_slope:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.STABLE
    report = StabilityReport(O, lengths.astype(int), mins, C, eps, K, eps_max, witnesses, verdict,
                             len(cls_list), config, raw,
                             [rho.sig.format(bw) if bw else "" for bw, ok in zip(best_word, seen) if ok])
    if not report.sandwich_ok:
        report.verdict = Verdict.INCONCLUSIVE
    return report
