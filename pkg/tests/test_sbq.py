import math
from collections import Counter

import numpy as np
import pytest

from conestab.curves import EnumConfig, enumerate_scc
from conestab.holonomy import cone_torus, double_polygon_sphere, from_traces_torus
from conestab.hyp2 import IsometryClass, PointH2, mobius_scaling, rotation_about
from conestab.mcg import act_rep, generator_table
from conestab.sbq import LengthSpectrum, sbq_check, simple_length_spectrum, trace_spectrum
from conestab.words import Representation, SurfaceSig, evaluate, modular_torus

from oracles import markoff_bfs, markoff_by_length

T = SurfaceSig(1, 1)


def conjugate(rho, g):
    return Representation(rho.sig, tuple(g @ x @ g.inverse() for x in rho.images))


class TestTraceSpectrum:
    def test_modular_short_curves(self):
        rep = trace_spectrum(modular_torus(), 2)
        traces = sorted(round(r.abs_tr, 9) for r in rep.nonperipheral)
        assert traces == [3, 3, 3, 6]
        assert sorted(r.word for r in rep.nonperipheral) == sorted(["a1", "b1", "a1 b1", "a1 B1"])

    def test_sorted(self):
        rep = trace_spectrum(cone_torus(2.0), 6)
        keys = [(r.abs_tr, r.word) for r in rep.records]
        assert keys == sorted(keys)

    def test_modular_markoff_set(self):
        rep = trace_spectrum(modular_torus(), 8)
        got = {round(r.abs_tr / 3) for r in rep.nonperipheral}
        for r in rep.nonperipheral:
            assert r.abs_tr == pytest.approx(3 * round(r.abs_tr / 3), abs=1e-6)
        assert got == markoff_by_length(8)

    def test_modular_markoff_subset_at_twelve(self):
        rep = trace_spectrum(modular_torus(), 12)
        vals = {round(r.abs_tr / 3) for r in rep.nonperipheral}
        assert vals <= markoff_bfs(max(vals))

    def test_peripheral_flagged(self):
        rep = trace_spectrum(modular_torus(), 4)
        per = [r for r in rep.records if r.peripheral]
        assert len(per) == 1
        assert per[0].tr2 == pytest.approx(4, abs=1e-9)
        assert per[0].kind is IsometryClass.PARABOLIC
        assert per[0] not in rep.nonperipheral

    def test_fricke(self):
        for rho in (cone_torus(2.0), from_traces_torus(3, 4, 5), modular_torus()):
            A, B = (np.array(g.matrix()) for g in rho.images)
            lhs = abs(np.trace(A @ np.linalg.inv(B)))
            assert lhs == pytest.approx(abs(np.trace(A) * np.trace(B) - np.trace(A @ B)), abs=1e-9)
            assert evaluate(rho, T.parse("a B")).abs_trace == pytest.approx(lhs, abs=1e-9)


class TestSBQ:
    def test_cone_torus(self):
        rep = sbq_check(cone_torus(2.0), 10)
        assert rep.witnesses == []
        assert rep.verdict == "consistent with SBQ up to N = 10"
        per = [r for r in rep.records if r.peripheral]
        assert len(per) == 1 and per[0].abs_tr == pytest.approx(2 * math.cos(1.0), abs=1e-9)

    def test_modular(self):
        rep = sbq_check(modular_torus(), 12)
        assert rep.witnesses == [] and "up to N = 12" in rep.verdict
        assert not rep.truncated

    def test_elliptic_simple_curve_listed(self):
        rep = sbq_check(from_traces_torus(1, 3, 3), 4)
        words = [r.word for r in rep.witnesses]
        # Fricke: tr(a B) = 1*3 - 3 = 0, so a B is elliptic as well
        assert "a1" in words and "a1 B1" in words
        assert all(r.abs_tr <= 2 for r in rep.witnesses)
        assert rep.verdict.startswith(f"SBQ fails: {len(words)} witness")

    def test_sphere(self):
        rep = sbq_check(double_polygon_sphere(*(math.pi / 4,) * 4), 8)
        assert rep.witnesses == []
        assert all(r.kind is IsometryClass.ELLIPTIC for r in rep.records if r.peripheral)


class TestLengthSpectrum:
    def test_modular_small(self):
        ls = simple_length_spectrum(modular_torus(), 2)
        assert ls.values == pytest.approx([2 * math.acosh(1.5), 2 * math.acosh(3)], abs=1e-12)
        assert ls.multiplicities == [3, 1]
        assert ls.count(2.0) == 3 and ls.count(10) == 4 and ls.count(1.0) == 0

    def test_merging(self):
        ls = simple_length_spectrum(modular_torus(), 3)
        assert ls.values == pytest.approx([2 * math.acosh(x / 2) for x in (3, 6, 15)], abs=1e-12)
        assert ls.multiplicities == [3, 3, 2]
        assert sum(ls.multiplicities) == len(trace_spectrum(modular_torus(), 3).nonperipheral)

    def test_cone_torus_pinned(self):
        ls = simple_length_spectrum(cone_torus(2.0), 10)
        assert ls.min_length == pytest.approx(1.6719331097808063, rel=1e-9)
        assert ls.min_gap == pytest.approx(0.021174178672890065, rel=1e-6)
        assert ls.min_gap > 0 and len(ls.values) == 17

    def test_empty(self):
        ls = LengthSpectrum([], [], math.inf)
        assert ls.min_length == math.inf and ls.count(5) == 0

    def test_conjugation_invariant(self):
        rho = cone_torus(2.0)
        g = rotation_about(PointH2(0.5, 0.6), 1.1) @ mobius_scaling(2.5)
        a = simple_length_spectrum(rho, 10)
        b = simple_length_spectrum(conjugate(rho, g), 10)
        assert a.multiplicities == b.multiplicities
        assert np.max(np.abs(np.array(a.values) - b.values)) < 1e-9

    @pytest.mark.parametrize("name", ["T_a1", "T_b1", "T_a1^-1", "T_b1^-1"])
    def test_mapping_class_invariant(self, name):
        rho = cone_torus(2.0)
        full = [r.length for r in trace_spectrum(rho, 12).nonperipheral]
        moved = act_rep(generator_table(T)[name], rho)
        probe = enumerate_scc(T, EnumConfig(6))
        moved_lengths = [2 * math.acosh(evaluate(moved, c.word).abs_trace / 2) for c in probe]
        for L in moved_lengths:
            assert min(abs(L - x) for x in full) < 1e-9
        # the twist permutes classes, so the moved probe lengths form a sub-multiset
        have = Counter(round(x, 8) for x in full)
        need = Counter(round(x, 8) for x in moved_lengths)
        assert all(have[k] >= v for k, v in need.items())
