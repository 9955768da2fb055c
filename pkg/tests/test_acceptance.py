"""Acceptance criteria 1-8, each timed against its stated runtime limit.

Every criterion appends one PASS/FAIL line shown in the pytest terminal summary.
Reference values come from ``tests/oracles.py`` (explicit coordinates, unrolled
cone sectors), never from the package under test.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.testing import assert_allclose

from curvcomp.comparison import (adjacent_angle_check, badness, first_variation_check,
                                 make_triangle, worst_badness)
from curvcomp.errors import GeometryError, InvalidTriple, OutOfRegime
from curvcomp.globalize import (excess_profile, globalization_audit, localize_certificate,
                                split_at_min)
from curvcomp.metricspace import (ConeSpace, HyperbolicSpace, PlaneSpace, SphereSpace,
                                  build_sphere_mesh, point_at)
from curvcomp.spaceform import (SideTriple, alexandrov_compare, comparison_angle,
                                side_from_angle)

from . import oracles as O
from .acceptance_log import criterion

PI = math.pi
KS = (-1.0, 0.0, 1.0)


def random_sides(rng, k, n, max_perimeter=None):
    """Admissible side triples (triangle inequality, spherical perimeter bound)."""
    out = []
    cap = 3.0 if k > 0 else 4.0
    while len(out) < n:
        s = rng.uniform(1e-3, cap, 3)
        lim = max_perimeter if max_perimeter is not None else (2 * PI if k > 0 else math.inf)
        if 2 * s.max() < s.sum() and s.sum() < lim:
            out.append(tuple(float(x) for x in s))
    return out


def analytic_backends():
    return ((PlaneSpace(2.0), 0.0), (SphereSpace(), 1.0), (HyperbolicSpace(), -1.0))


def admissible(space, k, pts, max_perimeter=2 * PI - 0.2, min_side=0.0):
    d = [space.distance(a, b) for a, b in ((pts[0], pts[1]), (pts[0], pts[2]), (pts[1], pts[2]))]
    if min(d) <= min_side:
        return False
    if k > 0 and (sum(d) >= max_perimeter or max(d) >= 0.99 * PI):
        return False
    return True


# 1 ----------------------------------------------------------------------------------

def test_criterion_1_round_trip():
    rng = np.random.default_rng(101)
    with criterion(1, "space-form round trip", 1.0) as notes:
        worst = 0.0
        for k in KS:
            for pq, pr, qr in random_sides(rng, k, 1000):
                gamma = comparison_angle(k, SideTriple.from_lengths(pq=pq, pr=pr, qr=qr), "q")
                back = side_from_angle(k, pq, qr, gamma)
                worst = max(worst, abs(back - pr))
        assert worst < 1e-9, worst
        notes.append(f"max side error {worst:.1e}")
        # exact cases
        tri = SideTriple.from_lengths
        for v in "pqr":
            assert abs(comparison_angle(1, tri(PI / 2, PI / 2, PI / 2), v) - PI / 2) <= 1e-10
        assert abs(comparison_angle(0, tri(pq=3, pr=4, qr=5), "p") - PI / 2) <= 1e-10
        assert abs(side_from_angle(0, 3, 4, PI / 2) - 5) <= 1e-10
        for k in KS:
            assert abs(comparison_angle(k, tri(pq=1, pr=0.5, qr=1.5), "p") - PI) <= 1e-10
            assert abs(comparison_angle(k, tri(pq=1, pr=0.5, qr=1.5), "q")) <= 1e-10
        for k, diam in ((1.0, PI), (4.0, PI / 2)):
            t = tri(pq=diam, pr=0.4 * diam, qr=0.6 * diam)
            assert comparison_angle(k, t, "p") == 0.0 and comparison_angle(k, t, "q") == 0.0


# 2 ----------------------------------------------------------------------------------

def test_criterion_2_monotone_in_k():
    rng = np.random.default_rng(102)
    with criterion(2, "monotonicity in k", 1.0):
        violations = 0
        for pq, pr, qr in random_sides(rng, 1.0, 1000, max_perimeter=2 * PI - 0.2):
            t = SideTriple.from_lengths(pq=pq, pr=pr, qr=qr)
            for v in "pqr":
                a = [comparison_angle(k, t, v) for k in KS]
                violations += not (a[0] <= a[1] + 1e-9 and a[1] <= a[2] + 1e-9)
        assert violations == 0


# 3 ----------------------------------------------------------------------------------

def _gluing_oracle(k, pq, qr, qs, alpha_r, alpha_s):
    """Angles of the glued configuration from explicit coordinates."""
    q = O.place(k, 0.0, 0.0)
    p = O.place(k, pq, 0.0)
    r = O.place(k, qr, alpha_r)
    s = O.place(k, qs, -alpha_s)
    pr, ps = O.model_dist(k, p, r), O.model_dist(k, p, s)
    at_r = O.vertex_angle(k, r, p, q)
    at_s = O.vertex_angle(k, s, p, q)
    _, at_b, at_c = O.triangle_angles(k, pr, ps, qr + qs)
    return pr, ps, alpha_r + alpha_s, (at_r, at_b), (at_s, at_c)


def test_criterion_3_alexandrov_biconditional():
    rng = np.random.default_rng(103)
    eps = 1e-9
    with criterion(3, "Alexandrov gluing biconditional", 5.0) as notes:
        for k in KS:
            done = below = 0
            while done < 500:
                pq, qr, qs = rng.uniform(0.1, 1.2, 3)
                alpha_r, alpha_s = rng.uniform(0.1, PI - 0.1, 2)
                pr, ps, total, at_r, at_s = _gluing_oracle(k, pq, qr, qs, alpha_r, alpha_s)
                try:
                    ar = alexandrov_compare(k, pq=pq, qr=qr, qs=qs, pr=pr, ps=ps, tol=eps)
                except InvalidTriple:
                    continue  # |ab| + |ac| < |bc|: no triangle abc
                done += 1
                below += total < PI
                assert_allclose(ar.angle_sum, total, atol=1e-9)
                assert_allclose(ar.at_r, at_r, atol=1e-7)
                assert_allclose(ar.at_s, at_s, atol=1e-7)
                assert ar.holds
                # the lemma on oracle values: sum <= pi  <=>  both angles dominate
                dominate = at_r[0] >= at_r[1] - 1e-7 and at_s[0] >= at_s[1] - 1e-7
                if total <= PI - 1e-7:
                    assert dominate
                if dominate and (at_r[0] > at_r[1] + 1e-7 or at_s[0] > at_s[1] + 1e-7):
                    assert total <= PI + 1e-7
            notes.append(f"k={k:g}: {below}/500 below pi")


# 4 ----------------------------------------------------------------------------------

def test_criterion_4_positive_controls():
    rng = np.random.default_rng(104)
    with criterion(4, "positive controls", 60.0) as notes:
        for sp, k in analytic_backends():
            done = 0
            while done < 500:
                pts = sp.sample_points(3, rng)
                if not admissible(sp, k, pts, min_side=1e-3):
                    continue
                assert worst_badness(sp, k, make_triangle(sp, *pts), 1e-6) is None
                done += 1
        mesh = build_sphere_mesh(1.0, level=4)
        n_vertices = mesh.descriptor.params["vertices"]
        assert n_vertices >= 2500
        tol = 5 * mesh.h
        done = 0
        while done < 200:
            pts = mesh.sample_points(3, rng)
            if not admissible(mesh, 1, pts, min_side=2 * mesh.h):
                continue
            cert = worst_badness(mesh, 1, make_triangle(mesh, *pts), tol)
            assert cert is None, cert.deficit
            done += 1
        notes.append(f"icosphere {n_vertices} vertices, h={mesh.h:.4f}")


# 5 ----------------------------------------------------------------------------------

def test_criterion_5_cone_negative_control():
    with criterion(5, "3pi cone negative control", 60.0) as notes:
        cone = ConeSpace(3 * PI, h=0.01)
        h = cone.h
        p, r1, r2 = cone.point(1.0, 0.0), cone.point(1.0, 0.8 * PI), cone.point(1.0, 2.2 * PI)
        cert = badness(cone, 0, make_triangle(cone, p, r1, r2), "q")
        assert cert is not None and cert.deficit >= 0.1
        assert_allclose(cert.measured.value,
                        O.cone_angle(3 * PI, r1.key, p.key, r2.key), atol=1e-6)
        loc = localize_certificate(cone, 0, cert, 10 * h)
        assert O.cone_distance(3 * PI, loc.s_bar.key, (0.0, 0.0)) <= 2 * h
        res = globalization_audit(cone, 0, p, r1, r2)
        assert res.verdict == "VIOLATED"
        terminal = res.trace.rows[-1].o
        assert O.cone_distance(3 * PI, terminal.key, (0.0, 0.0)) <= 2 * h
        assert all(res.invariants.values()), res.invariants
        notes.append(f"deficit {cert.deficit:.3f}, {len(res.trace.rows)} trace rows, "
                     f"terminal rho {terminal.key[0]:.2e}")


# 6 ----------------------------------------------------------------------------------

def test_criterion_6_adjacent_angles():
    rng = np.random.default_rng(106)
    with criterion(6, "adjacent angles sum to pi", 10.0) as notes:
        worst = 0.0
        for sp, k in analytic_backends():
            done = 0
            while done < 100:
                a, b, c = sp.sample_points(3, rng)
                if not admissible(sp, k, (a, b, c), min_side=0.05):
                    continue
                g = sp.geodesic(a, b)
                at = float(rng.uniform(0.2, 0.8)) * g.total
                if sp.distance(point_at(g, at), c) < 0.05:
                    continue
                res = adjacent_angle_check(sp, k, g, at, c)
                worst = max(worst, abs(res.total - PI))
                done += 1
        assert worst <= 1e-6, worst
        mesh = build_sphere_mesh(1.0, level=4)
        h = mesh.h
        worst_mesh, done = 0.0, 0
        while done < 100:
            a, b, c = mesh.sample_points(3, rng)
            g = mesh.geodesic(a, b)
            if g.total < 10 * h or not admissible(mesh, 1, (a, b, c), min_side=2 * h):
                continue
            r = point_at(g, g.total / 2)
            if mesh.distance(r, c) < 20 * h or r in (a, b):
                continue
            res = adjacent_angle_check(mesh, 1, g, g.total / 2, c)
            worst_mesh = max(worst_mesh, abs(res.total - PI))
            done += 1
        assert worst_mesh <= 10 * h, worst_mesh
        notes.append(f"analytic {worst:.1e}, icosphere {worst_mesh:.3f} <= 10h={10 * h:.3f}")


# 7 ----------------------------------------------------------------------------------

def test_criterion_7_first_variation():
    rng = np.random.default_rng(107)
    with criterion(7, "first variation residual", 10.0) as notes:
        worst = 0.0
        for sp, k in analytic_backends():
            done = 0
            while done < 100:
                p, q, r = sp.sample_points(3, rng)
                if not admissible(sp, k, (p, q, r), min_side=0.1):
                    continue
                a, b = first_variation_check(sp, k, p, q, r, [1e-2, 1e-3])
                assert abs(b.ratio) * 5 <= abs(a.ratio) + 1e-12
                if abs(b.ratio) > 0:
                    worst = max(worst, abs(b.ratio) / abs(a.ratio))
                done += 1
        sp = PlaneSpace(2.0)
        for x0, x2 in ((-1.0, 2.0), (-0.5, 0.75), (-1.5, 1.0)):
            res = first_variation_check(sp, 0, sp.point(x0, 0), sp.point(0, 0), sp.point(x2, 0),
                                        [0.125, 2.0 ** -7, 2.0 ** -10])
            assert all(r.residual == 0.0 for r in res)
        notes.append(f"worst shrink ratio {worst:.3f} (needs <= 0.2)")


# 8 ----------------------------------------------------------------------------------

def test_criterion_8_split_soundness():
    rng = np.random.default_rng(108)
    with criterion(8, "split soundness", 30.0) as notes:
        for sp, k in analytic_backends():
            done = 0
            while done < 200:
                p, r1, r2 = sp.sample_points(3, rng)
                if not admissible(sp, k, (p, r1, r2), min_side=1e-3):
                    continue
                try:
                    _, fs = excess_profile(sp, k, p, sp.geodesic(r1, r2))
                except OutOfRegime:
                    continue
                assert fs.min() >= -1e-6, fs.min()
                done += 1
        # every split returned on the cone is re-measured with the unrolling oracle
        theta = 3 * PI
        cone = ConeSpace(theta, h=0.01)
        splits = near_defect = 0
        while splits < 200:
            pts = [cone.point(float(rng.uniform(0.2, 1.5)), float(rng.uniform(0, theta)))
                   for _ in range(3)]
            tri = make_triangle(cone, *pts)
            cert = worst_badness(cone, 0, tri)
            if cert is None:
                continue
            apex = [v for v in "pqr" if v != cert.vertex][0]
            try:
                split = split_at_min(cone, 0, cert, apex)
            except GeometryError:
                continue
            splits += 1
            s0 = split.s0.key
            assert split.excess < -split.tol and split.certificates
            assert split.dist_p_s0 <= split.bound + split.slack
            for c, far in ((split.toward_r1, split.r1), (split.toward_r2, split.r2)):
                if c is not None and s0[0] > 0:
                    assert O.cone_angle(theta, s0, split.apex.key, far.key) < \
                        c.comparison - c.tol
            # (2.2) rests on the two sub-angles summing to pi at s0, which fails only
            # at the apex; a sampled s0 may sit within one sample spacing of it
            spacing = split.side.total / 33
            if O.cone_distance(theta, s0, (0.0, 0.0)) > spacing:
                assert split.mandatory_ok
            elif not split.mandatory_ok:
                near_defect += 1
        notes.append(f"{splits} cone splits re-measured; (2.2) unmet at {near_defect} "
                     "split points within one sample spacing of the apex")
