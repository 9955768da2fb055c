"""
Comparison triangles in the three model surfaces
================================================

Side lengths determine a triangle in the plane, on the unit sphere and in
the hyperbolic plane.  Its angles grow with the curvature.
"""

import math

import numpy as np

from curvcomp.spaceform import (SideTriple, alexandrov_compare, build_comparison_triangle,
                                comparison_angle, side_from_angle)

sides = SideTriple.from_lengths(pq=0.7, pr=0.9, qr=1.1)
for k in (-1.0, 0.0, 1.0):
    tri = build_comparison_triangle(k, sides)
    print(f"k={k:+.0f}  angles {np.round(tri.angles, 4)}  sum - pi = {sum(tri.angles) - math.pi:+.4f}")

# the law of cosines both ways
gamma = comparison_angle(1, sides, "q")
print("side back from the angle at q:", side_from_angle(1, 0.7, 1.1, gamma), "(was 0.9)")

# two triangles glued along pq with angle sum below pi at q:
# the angles at r and s dominate those of the straightened triangle
pq, qr, qs = 1.0, 0.8, 0.9
ar = alexandrov_compare(0, pq=pq, qr=qr, qs=qs, pr=1.2, ps=1.3)
print(f"gluing: angle sum {ar.angle_sum:.4f}, verdict {ar.verdict.value}")
print(f"  at r {ar.at_r[0]:.4f} vs {ar.at_r[1]:.4f}, at s {ar.at_s[0]:.4f} vs {ar.at_s[1]:.4f}")
