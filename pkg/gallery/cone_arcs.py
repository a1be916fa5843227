"""Shortest arcs across a cone point, and where two apex criteria disagree.

Unrolling a cone of angle theta, an arc that crosses the slant line k times
joins points at angle k*theta. Below pi the straight chord wins; from pi on
the path runs through the apex. The floor form k >= floor(pi/theta) flags the
apex earlier whenever floor(pi/theta) <= k < pi/theta.
"""

import math

from conestab.cone import ArcQuery, ConeSpec, apex_criteria_compare, infimal_arc, safe_radius

for theta in (math.pi / 2, 0.4 * math.pi, math.pi / 3):
    spec = ConeSpec(theta, 1.0)
    print(f"theta = {theta / math.pi:.2f} pi")
    for k in range(0, 5):
        ans = infimal_arc(spec, ArcQuery(1.0, 1.0, k))
        row = apex_criteria_compare(theta, max(k, 1))[-1]
        flag = "  <- criteria disagree" if k and row.discrepancy else ""
        print(f"  k={k}  length {ans.length:.6f}  through apex {ans.through_apex}{flag}")
    print(f"  safe radius at d=1: {safe_radius(1.0, theta):.6f}")
