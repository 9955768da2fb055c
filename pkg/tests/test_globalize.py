from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from curvcomp.comparison import badness, make_triangle, measure_angle
from curvcomp.errors import (NoNegativeExcess, OutOfRegime, ResolutionFloor, WitnessNotFound)
from curvcomp.globalize import (DescentTrace, TraceRow, descent_step, estimate_delta,
                                excess_profile, globalization_audit, localize,
                                localize_certificate, split_at_min, split_side,
                                trace_invariants)
from curvcomp.metricspace import (HyperbolicSpace, PlaneSpace, SphereSpace,
                                  point_at)

from . import oracles as O

PI = math.pi
THETA = 3 * PI


def apex_certificate(cone, tri_pts):
    tri = make_triangle(cone, *tri_pts)
    cert = badness(cone, 0, tri, "q")
    assert cert is not None
    return cert


# split ---------------------------------------------------------------------------

def test_split_plane_has_no_negative_excess():
    sp = PlaneSpace()
    p, r1, r2 = sp.point(0, 0), sp.point(1, 0.2), sp.point(0.3, 1)
    with pytest.raises(NoNegativeExcess):
        split_side(sp, 0, p, sp.geodesic(r1, r2))


def test_split_sphere_has_no_negative_excess():
    sp = SphereSpace()
    p, r1, r2 = sp.point(0.2, 0), sp.point(1.1, 0.3), sp.point(0.9, 2.0)
    with pytest.raises(NoNegativeExcess):
        split_side(sp, 1, p, sp.geodesic(r1, r2))


def test_split_needs_enough_samples(cone3, apex_triangle):
    cert = apex_certificate(cone3, apex_triangle)
    with pytest.raises(ValueError):
        split_at_min(cone3, 0, cert, m=8)


def shadow_split(cone):
    # side r1 r2 crosses the shadow ray opposite p, away from the apex
    pts = cone.point(1.0, 0.0), cone.point(1.5, 1.4 * PI), cone.point(1.5, 1.6 * PI)
    cert = apex_certificate(cone, pts)
    return pts, split_at_min(cone, 0, cert, "p")


def test_split_cone_against_oracle(cone3):
    pts, split = shadow_split(cone3)
    p, r1, r2 = (x.key for x in (split.apex, split.r1, split.r2))
    assert split.r1 == pts[1]
    # recompute f(s0) with the unrolling oracle and the planar law of cosines
    s0 = split.s0.key
    assert s0[0] > 1.0
    d1, d2, L = (O.cone_distance(THETA, p, r1), O.cone_distance(THETA, p, r2),
                 O.cone_distance(THETA, r1, r2))
    ang_r1 = O.loc_angle(0, d1, L, d2)
    model = O.loc_side(0, d1, split.t0, ang_r1)
    assert_allclose(split.excess, O.cone_distance(THETA, p, s0) - model, atol=1e-9)
    assert split.excess < -split.tol
    # the refined minimum is not beaten on a fine oracle grid
    ts = np.linspace(0, L, 2001)[1:-1]
    side = split.side
    fine = [O.cone_distance(THETA, p, point_at(side, t).key) - O.loc_side(0, d1, t, ang_r1)
            for t in ts]
    assert split.excess <= min(fine) + 1e-9
    for c in split.certificates:
        assert c.deficit >= c.tol
    assert split.bound_ok and split.mandatory_ok


def test_split_sub_angles_remeasured(cone3):
    _, split = shadow_split(cone3)
    s0 = split.s0.key
    assert len(split.certificates) == 2
    for c, far in ((split.toward_r1, split.r1), (split.toward_r2, split.r2)):
        true = O.cone_angle(THETA, s0, split.apex.key, far.key)
        assert true < c.comparison - c.tol


def test_split_through_apex_falls_back_to_sample(cone3, apex_triangle):
    # the exact minimizer is the apex itself, where both sub-triangles are flat;
    # the split then certifies at the best sample next to it
    cert = apex_certificate(cone3, apex_triangle)
    split = split_at_min(cone3, 0, cert)
    L = split.side.total
    assert O.cone_distance(THETA, split.s0.key, (0.0, 0.0)) <= L / 33 + 1e-12
    assert split.certificates and split.excess < -split.tol
    for c, far in ((split.toward_r1, split.r1), (split.toward_r2, split.r2)):
        if c is not None:
            assert O.cone_angle(THETA, split.s0.key, split.apex.key, far.key) < \
                c.comparison - c.tol
    assert split_at_min(cone3, 0, cert).t0 == split.t0


def test_split_out_of_regime():
    sp = SphereSpace()
    p = sp.point(0, 0)
    with pytest.raises(OutOfRegime):
        split_side(sp, 1, p, sp.geodesic(sp.point(3.12, 0), sp.point(3.12, 1.0)))


@pytest.mark.parametrize("sp, k", [(PlaneSpace(2.0), 0), (SphereSpace(), 1),
                                   (HyperbolicSpace(), -1)])
def test_excess_nonnegative_on_model_spaces(sp, k):
    rng = np.random.default_rng(6)
    for _ in range(30):
        p, r1, r2 = sp.sample_points(3, rng)
        try:
            _, fs = excess_profile(sp, k, p, sp.geodesic(r1, r2))
        except OutOfRegime:
            continue
        assert fs.min() >= -1e-6


# localize -------------------------------------------------------------------------

def test_localize_cone_reaches_apex(cone3, apex_triangle):
    cert = apex_certificate(cone3, apex_triangle)
    res = localize_certificate(cone3, 0, cert, 10 * cone3.h)
    assert cone3.distance(res.s_bar, cone3.apex) <= 2 * cone3.h
    assert res.dist_p_sbar <= res.bound + 5 * cone3.h
    for a, b in zip(res.bounds, res.bounds[1:]):
        assert b <= a + 5 * cone3.h
    if res.pair is not None:
        assert all(cone3.distance(res.s_bar, s) <= res.delta for s in res.pair)


def test_localize_shadow_triangle(cone3):
    p, r1, r2 = cone3.point(1, 0), cone3.point(1.5, 1.4 * PI), cone3.point(1.5, 1.6 * PI)
    cert = apex_certificate(cone3, (p, r1, r2))
    res = localize_certificate(cone3, 0, cert, 10 * cone3.h, apex="p")
    assert res.pair_certificate is not None
    assert res.dist_p_sbar <= res.bound + res.slack
    assert all(b <= a + 5 * cone3.h for a, b in zip(res.bounds, res.bounds[1:]))


def test_localize_plane():
    sp = PlaneSpace()
    with pytest.raises(NoNegativeExcess):
        localize(sp, 0, sp.point(0, 0), sp.geodesic(sp.point(1, 0), sp.point(0, 1)), 0.1)


def test_localize_delta_floor(cone3, apex_triangle):
    cert = apex_certificate(cone3, apex_triangle)
    with pytest.raises(ValueError):
        localize_certificate(cone3, 0, cert, cone3.h)


# delta(o) --------------------------------------------------------------------------

def test_delta_plane_is_half_distance():
    sp = PlaneSpace()
    est = estimate_delta(sp, 0, sp.point(0, 0), sp.point(1, 0.5))
    assert_allclose(est.delta, 0.5 * math.hypot(1, 0.5))


@pytest.mark.parametrize("d", [0.1, 0.2, 0.4])
def test_delta_cone_tracks_apex_distance(cone3, d):
    p, o = cone3.point(1, 0), cone3.point(d, 1.5 * PI)
    est = estimate_delta(cone3, 0, p, o, budget=60)
    # no triangle avoiding the apex is bad, and apex-enclosing triangles are found
    assert d <= est.delta_o <= 1.5 * d
    assert est.delta == min(0.5 * est.dist_p_o, est.delta_o)


def test_delta_monotone_in_budget(cone3):
    p, o = cone3.point(1, 0), cone3.point(0.2, 1.5 * PI)
    small = estimate_delta(cone3, 0, p, o, budget=15).delta
    large = estimate_delta(cone3, 0, p, o, budget=60).delta
    assert large <= small


def test_delta_at_apex(cone3):
    p, o = cone3.point(1, 0), cone3.point(0.5 * cone3.h, 1.5 * PI)
    with pytest.raises(ResolutionFloor):
        estimate_delta(cone3, 0, p, o)


def test_delta_rejects_base_point():
    sp = PlaneSpace()
    with pytest.raises(ValueError):
        estimate_delta(sp, 0, sp.point(0, 0), sp.point(0, 0))


# descent -----------------------------------------------------------------------------

def test_descent_step_arithmetic(cone3):
    p, o = cone3.point(0.5, 0), cone3.point(0.5, 1.5 * PI)
    assert cone3.distance(p, o) == pytest.approx(1.0)
    step = descent_step(cone3, 0, p, o, 0.3)
    assert step.dist_p_next <= 0.9 + 1e-9
    assert step.dist_o_next < 0.3
    # the new point carries a fresh bad angle with apex p
    assert step.next_witness is not None and step.next_witness.deficit > step.next_witness.tol
    assert step.bar_certificate.deficit > step.bar_certificate.tol


def test_descent_plane_has_no_witness():
    sp = PlaneSpace()
    with pytest.raises(WitnessNotFound):
        descent_step(sp, 0, sp.point(0, 0), sp.point(1, 0), 0.3)


# audit ----------------------------------------------------------------------------------

@pytest.mark.parametrize("sp, k", [(PlaneSpace(2.0), 0), (SphereSpace(), 1),
                                   (HyperbolicSpace(), -1)])
def test_audit_holds_on_model_spaces(sp, k):
    rng = np.random.default_rng(8)
    for _ in range(5):
        res = globalization_audit(sp, k, *sp.sample_points(3, rng))
        assert res.verdict == "HOLDS" and res.trace is None


def test_audit_holds_on_icosphere(icosphere):
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = icosphere.sample_points(1, rng)[0]
        b, c = icosphere.sample_ball(a, 1.2, 2, rng)
        if a in (b, c) or b == c:
            continue
        assert globalization_audit(icosphere, 1, a, b, c).holds


def test_audit_cone(cone3, apex_triangle):
    res = globalization_audit(cone3, 0, *apex_triangle)
    assert res.verdict == "VIOLATED"
    assert cone3.distance(res.trace.rows[-1].o, cone3.apex) <= 2 * cone3.h
    assert all(res.invariants.values())
    assert res.worst_deficit > 5 * cone3.h


def test_audit_cone_multi_step_descent(cone3):
    pts = cone3.point(1, 0), cone3.point(1.5, 1.4 * PI), cone3.point(1.5, 1.6 * PI)
    res = globalization_audit(cone3, 0, *pts)
    assert res.verdict == "VIOLATED"
    assert len(res.steps) >= 3
    rows = res.trace.rows
    assert cone3.distance(rows[-1].o, cone3.apex) <= 2 * cone3.h
    assert res.invariants == {"step_decrease": True, "step_locality": True, "delta_sum": True}
    deltas = [r.delta for r in rows if r.delta is not None]
    assert sum(deltas) / 3 <= rows[0].dist_p_o + res.trace.dist_tol
    n = len(deltas)
    assert min(deltas) < 2 * (rows[0].dist_p_o * 3 / n)
    # distances to p decrease along the descent
    dists = [r.dist_p_o for r in rows]
    assert all(b < a for a, b in zip(dists, dists[1:]))


def test_audit_out_of_regime():
    sp = SphereSpace()
    a, b, c = sp.point(PI / 2, 0), sp.point(PI / 2, 2 * PI / 3), sp.point(PI / 2, 4 * PI / 3)
    with pytest.raises(OutOfRegime):
        globalization_audit(sp, 1, a, b, c)


def test_audit_deterministic(cone3, apex_triangle):
    a = globalization_audit(cone3, 0, *apex_triangle, seed=3)
    b = globalization_audit(cone3, 0, *apex_triangle, seed=3)
    assert [(r.o, r.delta, r.dist_p_o) for r in a.trace.rows] == \
        [(r.o, r.delta, r.dist_p_o) for r in b.trace.rows]


def test_trace_invariants_detect_violation():
    sp = PlaneSpace()
    p = sp.point(0, 0)

    def check(*rows):
        rows = tuple(TraceRow(i + 1, sp.point(x, 0), d, x, 0.1) for i, (x, d) in enumerate(rows))
        return trace_invariants(DescentTrace(p, rows, 1e-9), sp)

    ok = {"step_decrease": True, "step_locality": True, "delta_sum": True}
    assert check((1.0, 0.3), (0.9, None)) == ok
    assert check((1.0, 0.3), (0.95, None)) == dict(ok, step_decrease=False)
    assert check((1.0, 0.3), (0.5, None)) == dict(ok, step_locality=False)
    # decrease already bounds the sum except for the last step's delta
    assert check((1.0, 0.3), (0.9, 3.0)) == dict(ok, delta_sum=False)


def test_measured_angles_on_cone_match_oracle(cone3):
    rng = np.random.default_rng(10)
    for _ in range(50):
        q = (float(rng.uniform(0.3, 1.5)), float(rng.uniform(0, THETA)))
        p = (float(rng.uniform(0.3, 1.5)), float(rng.uniform(0, THETA)))
        r = (float(rng.uniform(0.3, 1.5)), float(rng.uniform(0, THETA)))
        Q, P, R = cone3.point(*q), cone3.point(*p), cone3.point(*r)
        est = measure_angle(cone3, 0, Q, cone3.geodesic(Q, P), cone3.geodesic(Q, R))
        assert abs(est.value - O.cone_angle(THETA, q, p, r)) < 1e-6
