"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 result
written but truncated. Every failure prints one line on stderr of the form
``conestab: <category>: <message>``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import io as cio
from .cone import ArcQuery, ConeSpec, apex_criteria_compare, infimal_arc
from .curves import EnumConfig, enumerate_scc
from .holonomy import (
    NoRealRealization,
    cone_torus,
    double_polygon_sphere,
    from_traces_torus,
    genus_g_one_cone,
    verify_holonomy,
)
from .hyp2 import NumericalOverflow, PointH2
from .mcg import InvalidTable, WalkSpec, generator_table, load_table, orbit_experiment
from .sbq import sbq_check, simple_length_spectrum, trace_spectrum
from .stability import StabilityConfig, stability_scan
from .words import SurfaceSig

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_TRUNCATED = 0, 2, 3, 4


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message.replace("\n", " "))


def _fail(category: str, msg: str, code: int) -> int:
    print(f"conestab: {category}: {' '.join(str(msg).split())}", file=sys.stderr)
    return code


def _angles(text: str) -> list[float]:
    return [cio.parse_angle(t) for t in text.split(",") if t.strip()]


def _write(report, out, csv_out=None) -> None:
    if out:
        cio.emit_report(report, out, "structured")
    if csv_out:
        cio.emit_report(report, csv_out, "csv")


# --- commands ---------------------------------------------------------------------

def cmd_build(a) -> int:
    if a.kind == "cone-sphere":
        if not a.angles:
            raise InputError("--angles is required")
        rho = double_polygon_sphere(*_angles(a.angles))
    elif a.kind == "cone-torus":
        rho = cone_torus(cio.parse_angle(_need(a.theta, "--theta")))
    elif a.kind == "genus-one-cone":
        rho = genus_g_one_cone(_need(a.g, "--g"), cio.parse_angle(_need(a.theta, "--theta")))
    else:
        xyz = [float(t) for t in _need(a.xyz, "--xyz").split(",")]
        if len(xyz) != 3:
            raise InputError("--xyz needs three comma-separated traces")
        rho = from_traces_torus(*xyz)
    rep = verify_holonomy(rho)
    cio.save_rep(rho, a.out)
    if a.report:
        cio.emit_report(rep, a.report)
    print(f"wrote {a.out}: signature ({rho.sig.g},{rho.sig.n}) residual {rep.relation_residual:.3e} "
          f"verified {rep.passed}")
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def _need(v, flag):
    if v is None:
        raise InputError(f"{flag} is required")
    return v


def cmd_enum(a) -> int:
    sig = SurfaceSig(a.g, a.n)
    table = load_table(a.table) if a.table else None
    res = enumerate_scc(sig, EnumConfig(a.max_len, include_separating=a.separating,
                                        bfs_slack=a.slack, max_frontier=a.max_frontier,
                                        include_peripheral=a.peripheral),
                        table=generator_table(sig, table) if table else None)
    text = cio.render(res, "csv")
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    if a.report:
        cio.emit_report(res, a.report)
    print(f"{len(res)} classes up to norm {a.max_len} ({res.qualifier})", file=sys.stderr)
    return EXIT_TRUNCATED if res.truncated else EXIT_OK


def cmd_sbq(a) -> int:
    rho = cio.load_rep(a.rep)
    rep = sbq_check(rho, a.max_len)
    _write(rep, a.out, a.csv)
    excluded = ", ".join(f"{r.word} |tr|={r.abs_tr:.12g}" for r in rep.records if r.peripheral)
    print(f"{rep.verdict}; witnesses {len(rep.witnesses)}; peripheral excluded: {excluded or 'none'}")
    return EXIT_TRUNCATED if rep.truncated else EXIT_OK


def cmd_spectrum(a) -> int:
    rho = cio.load_rep(a.rep)
    rep = trace_spectrum(rho, a.max_len)
    _write(rep, a.out, a.csv)
    spec = simple_length_spectrum(rho, a.max_len, report=rep)
    print(f"{len(spec.values)} distinct lengths; min {spec.min_length:.12g}; min gap {spec.min_gap:.12g}")
    return EXIT_TRUNCATED if rep.truncated else EXIT_OK


def _basepoint(text: str):
    if text in ("fixed", "optimized"):
        return text
    try:
        x, y = (float(t) for t in text.split(","))
        return PointH2(x, y)
    except ValueError:
        raise InputError(f"--basepoint must be fixed, optimized or x,y (got {text!r})") from None


def cmd_stability(a) -> int:
    rho = cio.load_rep(a.rep)
    cfg = StabilityConfig(a.max_len, a.powers, _basepoint(a.basepoint), a.mode, seed=a.seed)
    rep = stability_scan(rho, None, cfg)
    _write(rep, a.out, a.csv)
    print(f"{rep.verdict.value}: slope {rep.slope:.12g} C {rep.C:.12g} eps {rep.eps:.12g} K {rep.K:.12g} "
          f"(N = {cfg.max_norm}, m = {cfg.powers}, {rep.n_classes} classes)")
    return EXIT_OK


def cmd_orbit(a) -> int:
    rho = cio.load_rep(a.rep)
    table = generator_table(rho.sig, load_table(a.table) if a.table else None)
    if a.steps is not None:
        walk = WalkSpec(tuple(s for s in a.steps.split(",") if s), max_word_length=a.budget)
    else:
        walk = WalkSpec(length=a.length, seed=a.seed, max_word_length=a.budget)
    try:
        seeds = [rho.sig.parse(s) for s in a.seeds.split(";")]
    except ValueError as e:
        raise InputError(str(e)) from None
    try:
        rep = orbit_experiment(rho, walk, seeds, table)
    except KeyError as e:
        raise InputError(f"unknown generator {e.args[0]!r}; table has {', '.join(table.names())}") from None
    _write(rep, a.out, a.csv)
    print(f"{len(rep.rows)} rows" + (f" (truncated: {rep.reason})" if rep.truncated else ""))
    return EXIT_TRUNCATED if rep.truncated else EXIT_OK


def cmd_cone_arc(a) -> int:
    spec = ConeSpec(cio.parse_angle(a.theta), a.h)
    ans = infimal_arc(spec, ArcQuery(a.d1, a.d2, a.k))
    table = apex_criteria_compare(spec.theta, a.k_max or max(a.k, 1)) if spec.theta < math.pi else []
    if a.out:
        cio.emit_report(ans, a.out)
    if a.csv and table:
        cio.emit_report(table, a.csv, "csv")
    print(f"length {ans.length:.17g} through_apex {ans.through_apex} developed_angle {ans.developed_angle:.17g}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conestab", description="Cone-surface holonomies, simple curves and stability evidence.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", help="construct a holonomy and write a rep file")
    b.add_argument("kind", choices=["cone-sphere", "cone-torus", "genus-one-cone", "from-traces"])
    b.add_argument("--angles", help="polygon angles, comma separated (radians or 'pi/7')")
    b.add_argument("--theta")
    b.add_argument("--g", type=int)
    b.add_argument("--xyz", help="tr a, tr b, tr ab")
    b.add_argument("--out", required=True)
    b.add_argument("--report", help="verification report (JSON)")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("enum-scc", help="enumerate simple closed curves")
    e.add_argument("--g", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--max-len", type=int, required=True)
    e.add_argument("--separating", action="store_true")
    e.add_argument("--peripheral", action="store_true")
    e.add_argument("--slack", type=int)
    e.add_argument("--max-frontier", type=int, default=200_000)
    e.add_argument("--table", help="generator table file")
    e.add_argument("--out", help="CSV listing (default stdout)")
    e.add_argument("--report", help="structured report (JSON)")
    e.set_defaults(func=cmd_enum)

    for name, func, helptext in (("check-sbq", cmd_sbq, "SBQ check up to a norm cutoff"),
                                 ("spectrum", cmd_spectrum, "trace and length spectrum")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--rep", required=True)
        s.add_argument("--max-len", type=int, required=True)
        s.add_argument("--out")
        s.add_argument("--csv")
        s.set_defaults(func=func)

    st = sub.add_parser("estimate-stability", help="fit quasi-geodesic constants")
    st.add_argument("--rep", required=True)
    st.add_argument("--mode", choices=["simple", "strong-simple", "primitive"], default="simple")
    st.add_argument("--max-len", type=int, default=8)
    st.add_argument("--powers", type=int, default=3)
    st.add_argument("--basepoint", default="fixed")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--out")
    st.add_argument("--csv")
    st.set_defaults(func=cmd_stability)

    o = sub.add_parser("mcg-orbit", help="mapping class orbit experiment")
    o.add_argument("--rep", required=True)
    o.add_argument("--seeds", required=True, help="seed curves separated by ';'")
    g = o.add_mutually_exclusive_group()
    g.add_argument("--steps", help="generator names separated by ','")
    g.add_argument("--length", type=int, default=0)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--budget", type=int, default=10_000, help="maximum image word length")
    o.add_argument("--table")
    o.add_argument("--out")
    o.add_argument("--csv")
    o.set_defaults(func=cmd_orbit)

    c = sub.add_parser("cone-arc", help="infimal arc across a cone")
    c.add_argument("--theta", required=True)
    c.add_argument("--h", type=float, required=True)
    c.add_argument("--d1", type=float, required=True)
    c.add_argument("--d2", type=float, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--k-max", type=int)
    c.add_argument("--out")
    c.add_argument("--csv", help="floor vs wedge criterion table")
    c.set_defaults(func=cmd_cone_arc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except InputError as e:
            return _fail("invalid-input", f"{e}; {parser.format_usage()}", EXIT_INPUT)
        if not getattr(args, "func", None):
            return _fail("invalid-input", f"no command given; {parser.format_usage()}", EXIT_INPUT)
        return args.func(args)
    except NoRealRealization as e:
        return _fail("invalid-input", e, EXIT_INPUT)
    except (NumericalOverflow, ArithmeticError) as e:
        return _fail("numerical-failure", e, EXIT_NUMERIC)
    except (InputError, InvalidTable, cio.RepFileError, ValueError, KeyError) as e:
        return _fail("invalid-input", e, EXIT_INPUT)
    except OSError as e:
        return _fail("io-error", f"{e.strerror}: {e.filename}", EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
