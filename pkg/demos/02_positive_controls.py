"""
Spaces that do have curvature >= k
==================================

Random triangles in the analytic model spaces and on an icosphere graph.
No angle falls below its comparison angle by more than the tolerance.
"""

import math

import numpy as np

from curvcomp.comparison import local_check, make_triangle, worst_badness
from curvcomp.globalize import globalization_audit
from curvcomp.metricspace import HyperbolicSpace, PlaneSpace, SphereSpace, build_sphere_mesh

rng = np.random.default_rng(0)
for space, k in ((PlaneSpace(2.0), 0), (SphereSpace(), 1), (HyperbolicSpace(), -1)):
    bad = 0
    for _ in range(200):
        p, q, r = space.sample_points(3, rng)
        d = [space.distance(p, q), space.distance(p, r), space.distance(q, r)]
        if k > 0 and (sum(d) > 2 * math.pi - 0.2 or max(d) > 0.99 * math.pi):
            continue
        bad += worst_badness(space, k, make_triangle(space, p, q, r), 1e-6) is not None
    print(f"{type(space).__name__:16s} k={k:+d}: {bad} bad triangles")

mesh = build_sphere_mesh(1.0, level=4)
print(mesh)
o = mesh.sample_points(1, rng)[0]
rep = local_check(mesh, 1, o, 1.0, budget=100)
print(f"icosphere ball of radius 1: good={rep.good}, max deficit {rep.max_deficit:.4f} "
      f"against tol 5h = {5 * mesh.h:.4f}")

a, b, c = mesh.sample_points(3, rng)
print("audit:", globalization_audit(mesh, 1, a, b, c).verdict)
