"""Simple closed curves on the modular torus and their Markoff traces.

Every simple closed curve on the once-punctured torus is a Christoffel word
in a, b. For the modular torus, |tr| of each one is three times a Markoff
number, so the trace spectrum can be read straight off the Markoff tree.
"""

from conestab import EnumConfig, SurfaceSig, enumerate_scc, modular_torus, trace_spectrum

T = SurfaceSig(1, 1)
rho = modular_torus()

curves = enumerate_scc(T, EnumConfig(6))
print(f"{len(curves)} simple closed curves up to word length 6 ({curves.qualifier})")

report = trace_spectrum(rho, 6)
print(f"{'word':<22}{'|tr|':>8}{'|tr|/3':>8}{'length':>12}")
for r in report.nonperipheral:
    print(f"{r.word:<22}{r.abs_tr:8.1f}{r.abs_tr / 3:8.1f}{r.length:12.6f}")

markoff = sorted({round(r.abs_tr / 3) for r in report.nonperipheral})
print("Markoff numbers reached:", markoff)
