"""Quasi-geodesic evidence for a cone torus with cone angle 2 radians.

The scan walks along every rotation of every simple closed curve (three
periods), records the smallest displacement of the basepoint at each word
length, and fits the lowest line L/C - eps that stays under all of them.
The largest generator displacement K gives the matching upper line.
"""

from conestab import StabilityConfig, cone_torus, sbq_check, stability_scan, verify_holonomy

rho = cone_torus(2.0)
check = verify_holonomy(rho)
print(f"relation residual {check.relation_residual:.2e}, cone point |tr| {check.punctures[0].abs_trace:.12f}")

rep = stability_scan(rho, None, StabilityConfig(max_norm=8, powers=3))
print(f"verdict: {rep.verdict.value} over {rep.n_classes} curves")
print(f"C = {rep.C:.6f}  eps = {rep.eps:.6f}  K = {rep.K:.6f}  raw envelope slope = {rep.envelope_slope:.6f}")
print(f"{'L':>3}  {'L/C - eps':>10}  {'m(L)':>10}  {'K L':>10}  shortest word")
for (L, m), w in zip(rep.table(), rep.argmin_words):
    print(f"{L:3d}  {L / rep.C - rep.eps:10.4f}  {m:10.4f}  {rep.K * L:10.4f}  {w}")

sbq = sbq_check(rho, 10)
print(sbq.verdict)
