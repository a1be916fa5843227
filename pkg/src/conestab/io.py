"""Representation files and report emission.

Rep files are JSON; every real number is written as a 17-significant-digit
string so that loading reproduces each double bit for bit. Reports are
written either as structured JSON (same number convention) or as CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import re
from enum import Enum
from pathlib import Path

import numpy as np

from .cone import ArcAnswer, CriteriaRow
from .curves import EnumResult
from .holonomy import RELATION_TOL, VerificationReport
from .hyp2 import Isometry, PointH2
from .mcg import OrbitReport
from .sbq import LengthSpectrum, SpectrumReport
from .stability import StabilityReport
from .words import CyclicClass, Representation, SurfaceSig, Word, relation_residual

REP_FORMAT = "conestab-rep"
REP_VERSION = 1
DET_TOL = 1e-9


class RepFileError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_angle(text: str) -> float:
    """Radians, or a multiple of pi written like 'pi/7', '2pi/3', '3*pi/4', 'pi'."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"([0-9]*\.?[0-9]*(?:[eE][+-]?[0-9]+)?)\*?pi(?:/([0-9]*\.?[0-9]+))?", s)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise ValueError(f"bad angle {text!r}")
        return coef * math.pi / den
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"bad angle {text!r}") from None


# --- representation files -------------------------------------------------------

def rep_to_dict(rho: Representation) -> dict:
    def mats(gs):
        return None if gs is None else [[fmt(v) for v in g.entries] for g in gs]

    return {
        "format": REP_FORMAT,
        "version": REP_VERSION,
        "signature": [rho.sig.g, rho.sig.n],
        "images": mats(rho.images),
        "constructed_peripherals": mats(rho.constructed_peripherals),
        "cone_angles": None if rho.cone_angles is None else
        [None if a is None else fmt(a) for a in rho.cone_angles],
        "provenance": _jsonable(rho.provenance),
    }


def save_rep(rho: Representation, path) -> None:
    Path(path).write_text(json.dumps(rep_to_dict(rho), indent=2, sort_keys=False) + "\n")


def _load_isometry(entries) -> Isometry:
    if not (isinstance(entries, list) and len(entries) == 4):
        raise RepFileError("parse failure: a matrix needs four entries")
    try:
        a, b, c, d = (float(v) for v in entries)
    except (TypeError, ValueError):
        raise RepFileError("parse failure: non-numeric matrix entry") from None
    det = a * d - b * c
    if not (math.isfinite(det) and abs(det - 1.0) <= DET_TOL * max(1.0, a * a + b * b + c * c + d * d)):
        raise RepFileError(f"determinant invariant violated: det = {det!r}")
    # entries were saved in canonical form; wrap them without renormalising
    return Isometry.from_sl2(a, b, c, d)


def rep_from_dict(doc) -> Representation:
    if not isinstance(doc, dict) or doc.get("format") != REP_FORMAT:
        raise RepFileError("parse failure: not a representation file")
    if doc.get("version") != REP_VERSION:
        raise RepFileError(f"unsupported version {doc.get('version')!r}")
    try:
        sig = SurfaceSig(*doc["signature"])
        images = tuple(_load_isometry(e) for e in doc["images"])
        cp = doc.get("constructed_peripherals")
        cp = None if cp is None else tuple(_load_isometry(e) for e in cp)
        ca = doc.get("cone_angles")
        ca = None if ca is None else tuple(None if a is None else float(a) for a in ca)
        rho = Representation(sig, images, dict(doc.get("provenance") or {}), ca, cp)
    except RepFileError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise RepFileError(f"parse failure: {e}") from None
    if cp is None:
        # c_n is derived from the basis, so the residual would measure rounding only
        return rho
    res = relation_residual(rho)
    if not res < RELATION_TOL:
        raise RepFileError(f"relation check failed: residual {res:.3e}")
    return rho


def load_rep(path) -> Representation:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise RepFileError(f"parse failure: {e.msg} at line {e.lineno}") from None
    return rep_from_dict(doc)


# --- reports ---------------------------------------------------------------------

def _jsonable(x):
    """Plain JSON tree; floats become 17-digit strings, keys keep their order."""
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, (float, np.floating)):
        return fmt(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, PointH2):
        return {"x": fmt(x.x), "y": fmt(x.y)}
    if isinstance(x, CyclicClass):
        return list(x.word.letters)
    if isinstance(x, Word):
        return list(x.letters)
    if isinstance(x, Isometry):
        return [fmt(v) for v in x.entries]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if dataclasses.is_dataclass(x):
        return {f.name: _jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    raise TypeError(f"cannot serialise {type(x).__name__}")


def structured(report) -> dict:
    if isinstance(report, StabilityReport):
        return {
            "kind": "stability",
            "verdict": report.verdict.value,
            "cutoff_max_norm": report.config.max_norm,
            "powers": report.config.powers,
            "mode": report.config.mode.value,
            "basepoint": _jsonable(report.basepoint),
            "C": fmt(report.C),
            "slope": fmt(report.slope),
            "envelope_slope": fmt(report.envelope_slope),
            "eps": fmt(report.eps),
            "eps_max": fmt(report.eps_max),
            "K": fmt(report.K),
            "lower_bound_holds": report.lower_ok,
            "upper_bound_holds": report.upper_ok,
            "n_classes": report.n_classes,
            "witnesses": [{"word": w.word, "kind": w.kind, "tr2": fmt(w.trace_sq)} for w in report.witnesses],
            "table": [{"L": L, "min_displacement": fmt(m), "argmin": a}
                      for (L, m), a in zip(report.table(), report.argmin_words)],
        }
    if isinstance(report, SpectrumReport):
        return {
            "kind": "spectrum",
            "cutoff_max_norm": report.cutoff,
            "enumeration": report.qualifier,
            "verdict": report.verdict,
            "witnesses": [r.word for r in report.witnesses],
            "records": [_record(r) | {"peripheral": r.peripheral, "separating": r.separating}
                        for r in report.records],
        }
    if isinstance(report, EnumResult):
        return {
            "kind": "enumeration",
            "signature": [report.sig.g, report.sig.n],
            "max_norm": report.config.max_norm,
            "include_separating": report.config.include_separating,
            "status": report.qualifier,
            "layers": report.layers,
            "count": len(report.curves),
            "curves": [{"word": report.sig.format(c.word), "norm": c.norm, "separating": c.separating,
                        "peripheral": c.peripheral, "provenance": c.provenance} for c in report.curves],
        }
    if isinstance(report, (OrbitReport, VerificationReport, LengthSpectrum, ArcAnswer)):
        return {"kind": type(report).__name__} | _jsonable(report)
    if isinstance(report, dict):
        return _jsonable(report)
    if isinstance(report, list) and all(isinstance(r, CriteriaRow) for r in report):
        return {"kind": "apex_criteria",
                "rows": [_jsonable(r) | {"discrepancy": r.discrepancy} for r in report]}
    raise TypeError(f"no structured form for {type(report).__name__}")


def _record(r) -> dict:
    return {"word": r.word, "tr2": fmt(r.tr2), "abs_tr": fmt(r.abs_tr), "class": r.kind.value,
            "length": fmt(r.length)}


def csv_rows(report) -> tuple[list[str], list[list]]:
    if isinstance(report, StabilityReport):
        return ["L", "min_displacement"], [[L, fmt(m)] for L, m in report.table()]
    if isinstance(report, SpectrumReport):
        return (["word", "tr2", "abs_tr", "class", "length"],
                [list(_record(r).values()) for r in report.records])
    if isinstance(report, EnumResult):
        return (["word", "norm", "separating", "peripheral", "provenance"],
                [[report.sig.format(c.word), c.norm, int(c.separating), int(c.peripheral), c.provenance]
                 for c in report.curves])
    if isinstance(report, OrbitReport):
        n = len(report.seeds)
        head = ["step", "mapping_class"] + [f"norm_{i}" for i in range(n)] \
            + [f"displacement_{i}" for i in range(n)] + [f"trace_{i}" for i in range(n)]
        has_triple = any(r.trace_triple is not None for r in report.rows)
        if has_triple:
            head += ["x", "y", "z"]
        n_p = len(report.rows[0].peripheral_abs_traces) if report.rows else 0
        head += [f"peripheral_abs_tr_{j + 1}" for j in range(n_p)]
        rows = []
        for r in report.rows:
            row = [r.step, r.mapping_class, *r.norms, *map(fmt, r.displacements), *map(fmt, r.traces)]
            if has_triple:
                row += list(map(fmt, r.trace_triple))
            rows.append(row + list(map(fmt, r.peripheral_abs_traces)))
        return head, rows
    if isinstance(report, list) and all(isinstance(r, CriteriaRow) for r in report):
        return (["k", "geometric_through_apex", "floor_through_apex", "discrepancy"],
                [[r.k, int(r.geometric_through_apex), int(r.floor_through_apex), int(r.discrepancy)]
                 for r in report])
    if isinstance(report, LengthSpectrum):
        return ["length", "multiplicity"], [[fmt(v), m] for v, m in zip(report.values, report.multiplicities)]
    raise TypeError(f"no CSV form for {type(report).__name__}")


def render(report, form: str = "structured") -> str:
    if form == "structured":
        return json.dumps(structured(report), indent=2) + "\n"
    if form == "csv":
        head, rows = csv_rows(report)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown report format {form!r}")


def emit_report(report, path, form: str = "structured") -> None:
    Path(path).write_text(render(report, form))
