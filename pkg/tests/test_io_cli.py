import csv
import json
import math
import subprocess
import sys

import pytest

from conestab import io as cio
from conestab.cli import main
from conestab.cone import apex_criteria_compare
from conestab.curves import EnumConfig, enumerate_scc
from conestab.holonomy import cone_torus, double_polygon_sphere, from_traces_torus, genus_g_one_cone
from conestab.hyp2 import I, mobius_scaling, rotation_about
from conestab.mcg import WalkSpec, orbit_experiment
from conestab.sbq import simple_length_spectrum, trace_spectrum
from conestab.stability import StabilityConfig, stability_scan
from conestab.words import Representation, SurfaceSig, modular_torus


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def assert_diagnostic(err, category):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"conestab: {category}: ")


class TestRepFiles:
    @pytest.mark.parametrize("build", [
        modular_torus, lambda: cone_torus(2.0), lambda: genus_g_one_cone(2, 1.0),
        lambda: double_polygon_sphere(*(math.pi / 7,) * 3), lambda: from_traces_torus(3, 4, 5),
    ], ids=["modular", "cone", "genus2", "sphere", "traces"])
    def test_round_trip_bit_exact(self, build, tmp_path):
        rho = build()
        cio.save_rep(rho, tmp_path / "r.rep")
        back = cio.load_rep(tmp_path / "r.rep")
        assert back.sig == rho.sig
        assert [g.entries for g in back.images] == [g.entries for g in rho.images]
        if rho.constructed_peripherals is not None:
            assert [g.entries for g in back.constructed_peripherals] == \
                   [g.entries for g in rho.constructed_peripherals]
        cio.save_rep(back, tmp_path / "s.rep")
        assert (tmp_path / "r.rep").read_bytes() == (tmp_path / "s.rep").read_bytes()

    def _doc(self, tmp_path):
        cio.save_rep(cone_torus(1.0), tmp_path / "r.rep")
        return json.loads((tmp_path / "r.rep").read_text())

    def _load(self, tmp_path, doc):
        (tmp_path / "bad.rep").write_text(json.dumps(doc))
        return cio.load_rep(tmp_path / "bad.rep")

    def test_corrupted_determinant(self, tmp_path):
        doc = self._doc(tmp_path)
        doc["images"][0][0] = cio.fmt(float(doc["images"][0][0]) * 1.01)
        with pytest.raises(cio.RepFileError, match="determinant invariant violated"):
            self._load(tmp_path, doc)

    def test_future_version(self, tmp_path):
        doc = self._doc(tmp_path)
        doc["version"] = cio.REP_VERSION + 1
        with pytest.raises(cio.RepFileError, match="unsupported version"):
            self._load(tmp_path, doc)

    def test_parse_failures(self, tmp_path):
        (tmp_path / "junk.rep").write_text("{not json")
        with pytest.raises(cio.RepFileError, match="parse failure"):
            cio.load_rep(tmp_path / "junk.rep")
        doc = self._doc(tmp_path)
        doc["images"][1] = ["1", "x", "0", "1"]
        with pytest.raises(cio.RepFileError, match="parse failure"):
            self._load(tmp_path, doc)

    def test_relation_failure(self, tmp_path):
        doc = self._doc(tmp_path)
        # a valid isometry that no longer matches the stored cone-point rotation
        doc["images"][1] = [cio.fmt(v) for v in mobius_scaling(3.0).entries]
        with pytest.raises(cio.RepFileError, match="relation check failed"):
            self._load(tmp_path, doc)

    def test_diagnostics_are_distinct(self, tmp_path):
        msgs = set()
        for mutate in (lambda d: d.__setitem__("version", 99),
                       lambda d: d["images"][0].__setitem__(0, "7"),
                       lambda d: d["images"].__setitem__(1, [cio.fmt(v) for v in mobius_scaling(3.0).entries]),
                       lambda d: d.__setitem__("format", "other")):
            doc = self._doc(tmp_path)
            mutate(doc)
            with pytest.raises(cio.RepFileError) as e:
                self._load(tmp_path, doc)
            msgs.add(" ".join(str(e.value).split()[:2]))
        assert len(msgs) == 4

    def test_parse_angle(self):
        assert cio.parse_angle("pi/7") == math.pi / 7
        assert cio.parse_angle("2pi/3") == 2 * math.pi / 3
        assert cio.parse_angle("3*pi/4") == 3 * math.pi / 4
        assert cio.parse_angle("pi") == math.pi
        assert cio.parse_angle("1.25") == 1.25
        with pytest.raises(ValueError):
            cio.parse_angle("tau")


def _reports():
    rho = cone_torus(2.0)
    T = SurfaceSig(1, 1)
    return {
        "stability": stability_scan(rho, None, StabilityConfig(max_norm=5)),
        "spectrum": trace_spectrum(rho, 6),
        "enum": enumerate_scc(T, EnumConfig(5)),
        "orbit": orbit_experiment(rho, WalkSpec(length=5, seed=3), [T.parse("a")]),
        "lengths": simple_length_spectrum(rho, 6),
        "criteria": apex_criteria_compare(0.4 * math.pi, 5),
    }


class TestReports:
    @pytest.mark.parametrize("name", list(_reports()))
    @pytest.mark.parametrize("form", ["structured", "csv"])
    def test_byte_identical(self, name, form, tmp_path):
        a, b = _reports()[name], _reports()[name]
        cio.emit_report(a, tmp_path / "a", form)
        cio.emit_report(b, tmp_path / "b", form)
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    @pytest.mark.parametrize("name,header", [
        ("spectrum", ["word", "tr2", "abs_tr", "class", "length"]),
        ("stability", ["L", "min_displacement"]),
        ("enum", ["word", "norm", "separating", "peripheral", "provenance"]),
        ("lengths", ["length", "multiplicity"]),
        ("criteria", ["k", "geometric_through_apex", "floor_through_apex", "discrepancy"]),
    ])
    def test_csv_headers(self, name, header):
        rows = list(csv.reader(cio.render(_reports()[name], "csv").splitlines()))
        assert rows[0] == header
        assert len(rows) > 1 and all(len(r) == len(header) for r in rows)

    def test_numbers_at_17_digits(self):
        doc = json.loads(cio.render(_reports()["stability"]))
        x = 2 * math.acosh(1.5)
        assert float(cio.fmt(x)) == x
        assert isinstance(doc, dict)

    def test_stability_csv_values(self):
        rep = _reports()["stability"]
        rows = list(csv.reader(cio.render(rep, "csv").splitlines()))[1:]
        assert [float(r[1]) for r in rows] == rep.min_displacement.tolist()


class TestCLI:
    def test_build_and_check(self, capsys, tmp_path):
        rep = tmp_path / "r.rep"
        code, out, err = run(capsys, "build", "cone-torus", "--theta", "1.5707963", "--out", rep)
        assert code == 0 and rep.exists()
        code, out, err = run(capsys, "check-sbq", "--rep", rep, "--max-len", 10)
        assert code == 0
        assert "consistent with SBQ up to N = 10" in out and "witnesses 0" in out

    def test_bad_sphere_angles(self, capsys, tmp_path):
        code, out, err = run(capsys, "build", "cone-sphere", "--angles", "1.6,1.6,1.6", "--out", tmp_path / "s.rep")
        assert code == 2
        assert_diagnostic(err, "invalid-input")
        assert not (tmp_path / "s.rep").exists()

    def test_unknown_command(self, capsys):
        code, out, err = run(capsys, "frobnicate")
        assert code == 2
        assert_diagnostic(err, "invalid-input")
        assert "usage:" in err

    def test_no_command(self, capsys):
        code, out, err = run(capsys)
        assert code == 2 and "usage:" in err
        assert_diagnostic(err, "invalid-input")

    def test_compact_traces(self, capsys, tmp_path):
        code, out, err = run(capsys, "build", "from-traces", "--xyz", "0.5,0.5,0.5", "--out", tmp_path / "x.rep")
        assert code == 2 and "no real realization" in err
        assert_diagnostic(err, "invalid-input")

    def test_missing_rep_file(self, capsys, tmp_path):
        code, out, err = run(capsys, "spectrum", "--rep", tmp_path / "nope.rep", "--max-len", 3)
        assert code == 2
        assert_diagnostic(err, "io-error")

    def test_corrupt_rep_file(self, capsys, tmp_path):
        (tmp_path / "bad.rep").write_text("[]")
        code, out, err = run(capsys, "spectrum", "--rep", tmp_path / "bad.rep", "--max-len", 3)
        assert code == 2 and "parse failure" in err
        assert_diagnostic(err, "invalid-input")

    def test_numerical_failure(self, capsys, tmp_path):
        a = mobius_scaling(1e10)
        b = rotation_about(I, 0.7) @ a @ rotation_about(I, -0.7)
        cio.save_rep(Representation(SurfaceSig(1, 1), (a, b)), tmp_path / "big.rep")
        code, out, err = run(capsys, "estimate-stability", "--rep", tmp_path / "big.rep",
                             "--max-len", 2, "--powers", 20)
        assert code == 3
        assert_diagnostic(err, "numerical-failure")

    def test_truncated_enumeration(self, capsys, tmp_path):
        code, out, err = run(capsys, "enum-scc", "--g", 2, "--n", 1, "--max-len", 6, "--max-frontier", 50,
                             "--out", tmp_path / "e.csv")
        assert code == 4 and (tmp_path / "e.csv").exists()

    def test_enum_matches_library(self, capsys, tmp_path):
        code, out, err = run(capsys, "enum-scc", "--g", 1, "--n", 1, "--max-len", 5)
        assert code == 0
        rows = list(csv.reader(out.splitlines()))[1:]
        assert len(rows) == len(enumerate_scc(SurfaceSig(1, 1), EnumConfig(5)))

    def test_stability_outputs(self, capsys, tmp_path):
        cio.save_rep(modular_torus(), tmp_path / "m.rep")
        code, out, err = run(capsys, "estimate-stability", "--rep", tmp_path / "m.rep", "--max-len", 8,
                             "--out", tmp_path / "s.json", "--csv", tmp_path / "s.csv")
        assert code == 0 and out.startswith("evidence-stable")
        first = (tmp_path / "s.json").read_bytes()
        run(capsys, "estimate-stability", "--rep", tmp_path / "m.rep", "--max-len", 8, "--out", tmp_path / "s.json")
        assert (tmp_path / "s.json").read_bytes() == first
        assert (tmp_path / "s.csv").read_text().splitlines()[0] == "L,min_displacement"

    def test_bad_basepoint(self, capsys, tmp_path):
        cio.save_rep(modular_torus(), tmp_path / "m.rep")
        code, out, err = run(capsys, "estimate-stability", "--rep", tmp_path / "m.rep", "--basepoint", "up")
        assert code == 2
        assert_diagnostic(err, "invalid-input")

    def test_orbit(self, capsys, tmp_path):
        cio.save_rep(modular_torus(), tmp_path / "m.rep")
        code, out, err = run(capsys, "mcg-orbit", "--rep", tmp_path / "m.rep", "--seeds", "b1",
                             "--steps", "T_a1,T_a1,T_a1", "--csv", tmp_path / "o.csv")
        assert code == 0 and out.startswith("4 rows")
        code, out, err = run(capsys, "mcg-orbit", "--rep", tmp_path / "m.rep", "--seeds", "b1", "--steps", "T_z9")
        assert code == 2 and "unknown generator" in err
        assert_diagnostic(err, "invalid-input")
        code, out, err = run(capsys, "mcg-orbit", "--rep", tmp_path / "m.rep", "--seeds", "b1",
                             "--steps", ",".join(["T_a1"] * 20), "--budget", 8)
        assert code == 4 and "truncated" in out

    def test_cone_arc(self, capsys, tmp_path):
        code, out, err = run(capsys, "cone-arc", "--theta", "pi/3", "--h", 1, "--d1", 1, "--d2", 1, "--k", 3,
                             "--k-max", 6, "--csv", tmp_path / "c.csv")
        assert code == 0 and "through_apex True" in out
        assert out.split()[1] == cio.fmt(2.0)
        rows = list(csv.reader((tmp_path / "c.csv").read_text().splitlines()))
        assert rows[0] == ["k", "geometric_through_apex", "floor_through_apex", "discrepancy"]
        assert len(rows) == 7
        code, out, err = run(capsys, "cone-arc", "--theta", "1", "--h", 1, "--d1", 2, "--d2", 1, "--k", 1)
        assert code == 2
        assert_diagnostic(err, "invalid-input")

    def test_console_script(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "conestab.cli", "build", "cone-sphere", "--angles",
                              "pi/7,pi/7,pi/7", "--out", str(tmp_path / "s.rep")],
                             capture_output=True, text=True)
        assert res.returncode == 0 and (tmp_path / "s.rep").exists()
