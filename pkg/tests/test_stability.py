import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conestab.curves import EnumConfig, enumerate_scc, farey_words
from conestab.holonomy import cone_torus, double_polygon_sphere, from_traces_torus
from conestab.hyp2 import I, PointH2, apply, dist, mobius_scaling, rotation_about, translation_length
from conestab.stability import (
    Mode,
    StabilityConfig,
    Verdict,
    choose_basepoint,
    classes_for_mode,
    detect_instability,
    displacement,
    fit_envelope,
    generator_displacements,
    primitive_classes,
    stability_scan,
)
from conestab.words import EMPTY, Representation, SurfaceSig, Word, cyclic_canonical, evaluate, modular_torus

from oracles import hdist, word_matrix, mobius

T = SurfaceSig(1, 1)


def conjugate(rho, g):
    return Representation(rho.sig, tuple(g @ x @ g.inverse() for x in rho.images))


class TestDisplacement:
    def test_examples(self):
        rho = modular_torus()
        assert displacement(rho, EMPTY) == 0
        d = displacement(rho, T.parse("a"))
        assert d == pytest.approx(2 * math.acosh(1.5), abs=1e-12)
        assert d == pytest.approx(1.924847, abs=1e-6)

    def test_matches_matrix_oracle(self):
        rho = cone_torus(1.3)
        mats = [g.matrix() for g in rho.images]
        O = PointH2(0.2, 1.4)
        for w in [(1,), (1, 2), (1, -2, -2), (2, 1, 1, -2, 1)]:
            z = mobius(word_matrix(mats, w), O.z)
            assert displacement(rho, Word(w), O) == pytest.approx(hdist(O.z, z), rel=1e-9)

    @pytest.mark.parametrize("text", ["a", "a b", "a B", "a a b"])
    def test_powers_approach_translation_length(self, text):
        rho = cone_torus(2.0)
        w = T.parse(text)
        m = max(50, math.ceil(50 / len(w)))
        assert displacement(rho, w ** m) / m == pytest.approx(translation_length(evaluate(rho, w)), abs=0.05)


class TestBasepoint:
    def test_common_elliptic_fixed_point(self):
        rho = Representation(T, (rotation_about(I, 1.0), rotation_about(I, 2.0)))
        p = choose_basepoint(rho)
        assert dist(p, I) < 1e-12 and max(generator_displacements(rho, p)) == 0

    def test_not_worse_than_i(self):
        for rho in (modular_torus(), cone_torus(2.0), from_traces_torus(3, 4, 5)):
            p = choose_basepoint(rho)
            assert max(generator_displacements(rho, p)) <= max(generator_displacements(rho, I)) + 1e-9

    @pytest.mark.parametrize("rho", [cone_torus(2.0), modular_torus(), from_traces_torus(5, 5, 5)],
                             ids=["cone", "modular", "555"])
    def test_equivariant(self, rho):
        g = rotation_about(PointH2(0.7, 1.3), 0.9) @ mobius_scaling(1.8)
        p = choose_basepoint(rho)
        q = choose_basepoint(conjugate(rho, g))
        assert dist(q, apply(g, p)) < 1e-3

    def test_equivariant_value_when_minimiser_is_flat(self):
        # b has the larger translation length, so every point of its axis near
        # a's axis is optimal; only the optimal value is conjugation invariant
        rho = from_traces_torus(3, 4, 5)
        g = rotation_about(PointH2(0.7, 1.3), 0.9) @ mobius_scaling(1.8)
        r2 = conjugate(rho, g)
        a = max(generator_displacements(rho, choose_basepoint(rho)))
        b = max(generator_displacements(r2, choose_basepoint(r2)))
        assert a == pytest.approx(b, abs=1e-9)
        assert a == pytest.approx(translation_length(rho.images[1]), abs=1e-9)

    def test_deterministic(self):
        rho = cone_torus(2.0)
        assert choose_basepoint(rho) == choose_basepoint(rho)


class TestEnvelope:
    def test_fit_is_tight(self):
        L = np.arange(1, 6, dtype=float)
        m = np.array([0.5, 0.9, 1.6, 2.0, 2.4])
        C, eps, raw = fit_envelope(L, m, 1.0)
        assert raw == pytest.approx(min((m + 1.0) / L))
        assert eps <= 1.0 + 1e-12
        assert np.all(m >= L / C - eps - 1e-12)
        # the binding sample touches the line
        assert np.min(m - (L / C - eps)) == pytest.approx(0, abs=1e-12)

    def test_slope_clipped(self):
        C, eps, raw = fit_envelope(np.array([1.0, 2.0]), np.array([3.0, 6.0]), 1.0)
        assert raw == 3.5 and C == 1.0 and eps == 0.0

    def test_nonpositive_slope(self):
        C, eps, raw = fit_envelope(np.array([1.0, 2.0]), np.array([0.0, 0.0]), 0.0)
        assert C == math.inf and raw == 0


class TestScan:
    def test_modular_pinned(self):
        rep = stability_scan(modular_torus(), None, StabilityConfig(max_norm=8, powers=3))
        assert rep.verdict is Verdict.STABLE
        assert rep.slope > 0
        assert rep.slope == pytest.approx(1.0, rel=0.05)
        assert rep.envelope_slope == pytest.approx(1.4131814480263556, rel=0.05)
        assert rep.sandwich_ok and not rep.witnesses
        assert rep.n_classes == len(farey_words(8))
        assert rep.lengths.tolist() == list(range(1, 25))

    def test_elliptic_simple_curve(self):
        rep = stability_scan(from_traces_torus(1, 3, 3), None, StabilityConfig(max_norm=6))
        assert rep.verdict is Verdict.NOT_STABLE
        assert "a1" in [w.word for w in rep.witnesses]
        a = next(w for w in rep.witnesses if w.word == "a1")
        assert a.kind == "elliptic" and a.trace_sq == pytest.approx(1, abs=1e-9)

    @pytest.mark.parametrize("rho", [modular_torus(), cone_torus(2.0), from_traces_torus(1, 3, 3),
                                     from_traces_torus(3, 4, 5)], ids=["modular", "cone", "elliptic", "generic"])
    def test_sandwich(self, rho):
        rep = stability_scan(rho, None, StabilityConfig(max_norm=6, powers=3))
        assert rep.upper_ok and rep.lower_ok
        assert np.all(rep.min_displacement <= rep.K * rep.lengths + 1e-9)

    def test_conjugation_covariance(self):
        rho = cone_torus(2.0)
        g = rotation_about(PointH2(-0.4, 0.8), 2.2) @ mobius_scaling(1.5)
        O = PointH2(0.3, 1.1)
        a = stability_scan(rho, None, StabilityConfig(max_norm=6, basepoint=O))
        b = stability_scan(conjugate(rho, g), None, StabilityConfig(max_norm=6, basepoint=apply(g, O)))
        assert np.max(np.abs(a.min_displacement - b.min_displacement)) < 1e-6

    def test_reports_carry_basepoint(self):
        rho = cone_torus(2.0)
        rep = stability_scan(rho, None, StabilityConfig(max_norm=4, basepoint="optimized"))
        assert rep.basepoint == choose_basepoint(rho)
        with pytest.raises(ValueError):
            stability_scan(rho, None, StabilityConfig(max_norm=4, basepoint="nowhere"))

    def test_explicit_classes(self):
        rho = modular_torus()
        rep = stability_scan(rho, [T.parse("a b")], StabilityConfig(max_norm=2, powers=4))
        assert rep.n_classes == 1 and rep.lengths.tolist() == list(range(1, 9))

    def test_empty_class_set(self):
        with pytest.raises(ValueError, match="empty class set"):
            stability_scan(double_polygon_sphere(*(math.pi / 4,) * 3), None, StabilityConfig())
        with pytest.raises(ValueError, match="empty class set"):
            stability_scan(modular_torus(), [T.parse("a b A B")], StabilityConfig())

    def test_four_punctured_sphere(self):
        rho = double_polygon_sphere(*(math.pi / 4,) * 4)
        rep = stability_scan(rho, None, StabilityConfig(max_norm=6, mode=Mode.STRONG_SIMPLE))
        assert rep.verdict is Verdict.STABLE and rep.sandwich_ok

    def test_config_validation(self):
        with pytest.raises(ValueError):
            StabilityConfig(max_norm=1)
        with pytest.raises(ValueError):
            StabilityConfig(powers=0)
        with pytest.raises(ValueError):
            StabilityConfig(mode="sometimes")


class TestWitnesses:
    def test_modular_none(self):
        res = enumerate_scc(T, EnumConfig(10))
        assert detect_instability(modular_torus(), res) == []

    def test_peripherals_excluded(self):
        rho = double_polygon_sphere(*(math.pi / 4,) * 3)
        res = enumerate_scc(rho.sig, EnumConfig(8, include_peripheral=True))
        assert len(res) == 3
        assert detect_instability(rho, res) == []

    def test_hand_built_elliptic_product(self):
        rho = from_traces_torus(3, 3, 1)
        ws = detect_instability(rho, [cyclic_canonical(T.parse(x)) for x in ("a", "b", "a b", "a B")])
        assert [w.word for w in ws] == ["a1 b1"]
        assert ws[0].kind == "elliptic"

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-1.9, 1.9))
    def test_witness_forces_verdict(self, x):
        if abs(x) < 0.05:
            return
        rep = stability_scan(from_traces_torus(x, 3, 3), None, StabilityConfig(max_norm=4))
        assert rep.verdict is Verdict.NOT_STABLE


class TestPrimitive:
    def test_rank_two_is_farey(self):
        assert primitive_classes(T, 7) == sorted({c for _, c in farey_words(7)})
        cfg = StabilityConfig(max_norm=7, mode=Mode.PRIMITIVE)
        assert classes_for_mode(T, cfg) == primitive_classes(T, 7)

    def test_higher_rank_sample(self):
        sig = SurfaceSig(2, 1)
        found = primitive_classes(sig, 4, budget=300, seed=1)
        assert found == primitive_classes(sig, 4, budget=300, seed=1)
        assert all(c.norm <= 4 for c in found)
        assert {cyclic_canonical(Word((k,))) for k in range(1, 5)} <= set(found)
        # abelianisation of a primitive is a primitive vector: gcd of exponent sums is 1
        for c in found:
            sums = [sum(1 if x == k else -1 if x == -k else 0 for x in c.word.letters) for k in range(1, 5)]
            assert math.gcd(*sums) == 1

    def test_primitive_scan(self):
        rep = stability_scan(modular_torus(), None, StabilityConfig(max_norm=6, mode=Mode.PRIMITIVE))
        simple = stability_scan(modular_torus(), None, StabilityConfig(max_norm=6))
        assert np.allclose(rep.min_displacement, simple.min_displacement)
