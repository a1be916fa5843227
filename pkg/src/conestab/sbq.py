"""Trace spectra over simple closed curves and the SBQ check.

SBQ is tested with |tr| only (sign-free over PSL(2,R)). All verdicts are
qualified by the norm cutoff N: a clean report says "no witnesses up to N".
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .curves import EnumConfig, EnumResult, enumerate_scc
from .hyp2 import TAU_CLS, IsometryClass
from .words import Representation, evaluate, trace_lift

# lengths closer than this are reported as one value with a multiplicity
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class TraceRecord:
    word: str
    tr2: float
    abs_tr: float
    kind: IsometryClass
    length: float  # translation length; 0 unless hyperbolic
    peripheral: bool
    separating: bool


@dataclass
class SpectrumReport:
    cutoff: int
    records: list[TraceRecord]
    truncated: bool
    qualifier: str

    @property
    def nonperipheral(self) -> list[TraceRecord]:
        return [r for r in self.records if not r.peripheral]

    @property
    def witnesses(self) -> list[TraceRecord]:
        return [r for r in self.nonperipheral if r.abs_tr <= 2.0 + TAU_CLS]

    @property
    def verdict(self) -> str:
        if self.witnesses:
            return f"SBQ fails: {len(self.witnesses)} witness(es) up to N = {self.cutoff}"
        return f"consistent with SBQ up to N = {self.cutoff}"


def _length(abs_tr: float) -> float:
    return 2.0 * math.acosh(abs_tr / 2.0) if abs_tr > 2.0 else 0.0


def trace_spectrum(rho: Representation, N: int, include_separating: bool = True,
                   enum: EnumResult | None = None) -> SpectrumReport:
    """One record per enumerated class of norm <= N, sorted by |tr| then word.

    Peripheral classes are kept but flagged; every other view drops them.
    """
    if enum is None:
        enum = enumerate_scc(rho.sig, EnumConfig(N, include_separating=include_separating,
                                                 include_peripheral=True))
    records = []
    for c in enum:
        if c.norm > N:
            continue
        t = trace_lift(rho, c.word)
        kind = _classify_trace(rho, c.word, t)
        a = abs(t)
        records.append(TraceRecord(rho.sig.format(c.word), t * t, a, kind,
                                   _length(a) if kind is IsometryClass.HYPERBOLIC else 0.0,
                                   c.peripheral, c.separating))
    records.sort(key=lambda r: (r.abs_tr, r.word))
    return SpectrumReport(N, records, enum.truncated, enum.qualifier)


def _classify_trace(rho, w, t) -> IsometryClass:
    a = abs(t)
    if a > 2.0 + TAU_CLS:
        return IsometryClass.HYPERBOLIC
    if a < 2.0 - TAU_CLS:
        return IsometryClass.ELLIPTIC
    g = evaluate(rho, w)
    if max(abs(g.b), abs(g.c), abs(g.a - g.d)) <= TAU_CLS:
        return IsometryClass.IDENTITY
    return IsometryClass.PARABOLIC


def sbq_check(rho: Representation, N: int, include_separating: bool = True) -> SpectrumReport:
    return trace_spectrum(rho, N, include_separating)


@dataclass
class LengthSpectrum:
    values: list[float]          # distinct lengths, ascending
    multiplicities: list[int]
    min_gap: float               # inf when fewer than two distinct values

    def count(self, L: float) -> int:
        """#{simple closed geodesics of length <= L}, with multiplicity."""
        k = bisect.bisect_right(self.values, L)
        return sum(self.multiplicities[:k])

    @property
    def min_length(self) -> float:
        return self.values[0] if self.values else math.inf


def simple_length_spectrum(rho: Representation, N: int, include_separating: bool = True,
                           report: SpectrumReport | None = None) -> LengthSpectrum:
    report = report or trace_spectrum(rho, N, include_separating)
    lengths = sorted(r.length for r in report.nonperipheral if r.kind is IsometryClass.HYPERBOLIC)
    values: list[float] = []
    mult: list[int] = []
    for x in lengths:
        if values and x - values[-1] <= MERGE_TOL:
            mult[-1] += 1
        else:
            values.append(x)
            mult.append(1)
    gaps = [b - a for a, b in zip(values, values[1:])]
    return LengthSpectrum(values, mult, min(gaps) if gaps else math.inf)
