"""
Hunting the apex of a 3pi cone
==============================

A flat cone with total angle 3pi is flat away from its apex, where the
curvature is concentrated and negative.  A triangle whose angle is too small
is split at the minimum of the excess function, localized, and walked down
towards the base point until the defect is pinned.
"""

import math

from curvcomp.comparison import badness, make_triangle
from curvcomp.globalize import excess_profile, globalization_audit, split_at_min
from curvcomp.metricspace import ConeSpace

PI = math.pi
cone = ConeSpace(3 * PI, h=0.01)

# p sits at phi = 0; the side r1 r2 crosses the ray phi = 1.5pi opposite p
p, r1, r2 = cone.point(1.0, 0.0), cone.point(1.5, 1.4 * PI), cone.point(1.5, 1.6 * PI)
cert = badness(cone, 0, make_triangle(cone, p, r1, r2), "q")
print(f"angle at r1: measured {cert.measured.value:.4f}, comparison {cert.comparison:.4f}")

ts, fs = excess_profile(cone, 0, p, cone.geodesic(r1, r2))
print("excess along r1 r2:", " ".join(f"{f:+.3f}" for f in fs[::4]))

split = split_at_min(cone, 0, cert, "p")
print(f"split at {cone.format_point(split.s0)} with excess {split.excess:.4f}; "
      f"bad sub-angles: {len(split.certificates)}")

res = globalization_audit(cone, 0, p, r1, r2)
print(f"\naudit: {res.verdict} ({res.termination})")
print(f"{'i':>3} {'o':>28} {'delta':>8} {'|po|':>8}")
for row in res.trace.rows:
    delta = "" if row.delta is None else f"{row.delta:.4f}"
    print(f"{row.i:3d} {cone.format_point(row.o):>28} {delta:>8} {row.dist_p_o:8.4f}")
print("invariants:", res.invariants)
print(f"terminal point is {res.terminal.key[0]:.2e} from the apex")
