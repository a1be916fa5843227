"""Following a curve around the modular torus under repeated Dehn twists.

Twisting b along a gives b a, b a a, ... Word length grows linearly while
the trace grows exponentially, tracking the trace-coordinate move
(x, y, z) -> (x, z, xz - y). The boundary trace never changes.
"""

from conestab import SurfaceSig, modular_torus
from conestab.mcg import WalkSpec, kappa, orbit_experiment, trace_moves_torus

T = SurfaceSig(1, 1)
rho = modular_torus()
rep = orbit_experiment(rho, WalkSpec(steps=("T_a1",) * 8), [T.parse("b")])

xyz = (3.0, 3.0, 3.0)
print(f"{'step':>4} {'norm':>5} {'|tr|':>10} {'move':>10} {'kappa':>7} {'boundary |tr|':>14}")
for r in rep.rows:
    print(f"{r.step:4d} {r.norms[0]:5d} {abs(r.traces[0]):10.1f} {xyz[1]:10.1f} "
          f"{kappa(*r.trace_triple):7.2f} {r.peripheral_abs_traces[0]:14.10f}")
    xyz = trace_moves_torus(*xyz, "T_a1")
