"""Split, localize and descend: chasing a bad angle to a curvature defect.

Given a bad angle at r1 in a triangle p r1 r2, the excess function

    f(s) = |p s| - |p~ s~|,   s on [r1 r2],  s~ on the comparison side

has a negative minimum at an interior point s0 where one of the two angles
at s0 towards r1, r2 is again bad.  Repeating the split shrinks the active
side around a point s_bar near which bad angles with apex p persist.  The
descent step then moves such a point towards p by a third of the radius of
a good ball around it, until the resolution of the space is reached or no
bad angle can be found.  On a space of curvature >= k nothing is ever bad
and the audit reports HOLDS; otherwise the terminal ball must contain a
curvature defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .comparison import (BadAngleCertificate, Triangle, angle_deficit, badness, default_tol,
                         local_check, make_triangle, sample_triangles, worst_badness)
from .errors import (AdjacentAngleDefect, BudgetExceeded, DegenerateGeodesic,
                     InconclusiveSplit, InvalidTriple, IterationBudgetExceeded,
                     NoNegativeExcess, OutOfRegime, ResolutionFloor, WitnessNotFound,
                     GlobalizeError)
from .metricspace import GeodesicPolyline, GeodesicSpace, PointRef, point_at
from .spaceform import (AlexandrovComparison, SideTriple, alexandrov_compare, as_curvature,
                        build_comparison_triangle, distance_to_side_point)

#: k>0 triangles with a side above this fraction of pi/sqrt(k) are rejected
REGIME_FRACTION = 0.99
#: floors expressed in units of the resolution h
FLOOR_H = 4.0
MIN_SAMPLES = 16


# tolerances ------------------------------------------------------------------

def distance_slack(space: GeodesicSpace, k, bound: float) -> float:
    """Slack on the distance bound |p s0| < max |p r_i|.

    Discretization contributes 2 eta; for k>0 and a bound at least a quarter
    great circle a fixed allowance max(5h, 1% of the bound) stands in for the
    asymptotic correction that the k>0 case needs.
    """
    kp = as_curvature(k)
    base = 2.0 * space.eta + 1e-9 * max(1.0, bound)
    if kp.sign > 0 and bound >= 0.5 * kp.diameter:
        return max(base, 5.0 * space.h, 0.01 * bound)
    return base


def check_regime(k, *lengths: float) -> None:
    kp = as_curvature(k)
    if kp.sign > 0:
        if max(lengths) >= REGIME_FRACTION * kp.diameter:
            raise OutOfRegime(f"side {max(lengths):.6g} too close to pi/sqrt(k)")
        if len(lengths) == 3 and sum(lengths) >= kp.perimeter_bound - 1e-9 * sum(lengths):
            raise OutOfRegime("perimeter not below 2pi/sqrt(k)")


def _adjacent_tol(space: GeodesicSpace, tol: float) -> float:
    return max(tol, 1e-6) if space.analytic else max(tol, 10.0 * space.h)


# Lemma-2.1 split -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitCertificate:
    apex: PointRef
    r1: PointRef  # the vertex whose angle was bad
    r2: PointRef
    side: GeodesicPolyline = field(repr=False)  # from r1 to r2
    t0: float  # arclength of s0 from r1
    s0: PointRef
    excess: float  # f(s0) < -tol
    samples: tuple[tuple[float, float], ...] = field(repr=False)
    toward_r1: BadAngleCertificate | None  # angle p s0 r1
    toward_r2: BadAngleCertificate | None  # angle p s0 r2
    mandatory: tuple[bool, bool]  # |r_i s0| <= |r_i p|
    dist_p_s0: float
    bound: float  # max(|p r1|, |p r2|)
    slack: float
    adjacent_sum: float
    tol: float

    @property
    def certificates(self) -> list[BadAngleCertificate]:
        return [c for c in (self.toward_r1, self.toward_r2) if c is not None]

    @property
    def bound_ok(self) -> bool:
        return self.dist_p_s0 <= self.bound + self.slack

    @property
    def mandatory_ok(self) -> bool:
        return all(not need or cert is not None
                   for need, cert in zip(self.mandatory, (self.toward_r1, self.toward_r2)))


def _sample_positions(space, side: GeodesicPolyline, m: int) -> list[float]:
    L = side.total
    ts = [L * i / (m + 1) for i in range(1, m + 1)]
    if space.analytic:
        return ts
    # snap to polyline vertices, drop endpoints and duplicates
    out = []
    for t in ts:
        j = int(np.argmin(np.abs(side.cum - t)))
        if 0 < j < len(side.cum) - 1:
            tj = float(side.cum[j])
            if not out or tj != out[-1]:
                out.append(tj)
    if len(out) < min(m, len(side.cum) - 2):
        out = [float(c) for c in side.cum[1:-1]]
    return out


def _excess(space, kp, p, side, m):
    if m < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {m}")
    d1, d2 = space.distance(p, side.start), space.distance(p, side.end)
    check_regime(kp, d1, d2, side.total)
    model = build_comparison_triangle(kp, SideTriple.from_lengths(pq=d1, pr=d2, qr=side.total))

    def f(t):
        return space.distance(p, point_at(side, t)) - distance_to_side_point(model, "p", t)

    ts = _sample_positions(space, side, m)
    if not ts:
        raise ResolutionFloor("side has no interior sample points")
    return f, ts, [f(t) for t in ts]


def excess_profile(space: GeodesicSpace, k, p: PointRef, side: GeodesicPolyline,
                   m: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Samples (t_i, f(t_i)) of f(s) = |p s| - |p~ s~| at m interior points of ``side``."""
    _, ts, fs = _excess(space, as_curvature(k), p, side, m)
    return np.array(ts), np.array(fs)


def _refine(f, ts, fs, i, L):
    """One golden-section pass around sample i.

    The midpoints to both neighbours are evaluated first so that a minimum
    sitting between two equal samples (a kink, say) still gets a strict bracket.
    """
    a, c = (ts[i - 1] if i > 0 else 0.0), (ts[i + 1] if i + 1 < len(ts) else L)
    fa = fs[i - 1] if i > 0 else f(0.0)
    fc = fs[i + 1] if i + 1 < len(ts) else f(L)
    xs = [a, 0.5 * (a + ts[i]), ts[i], 0.5 * (ts[i] + c), c]
    ys = [fa, f(xs[1]), fs[i], f(xs[3]), fc]
    j = 1 + int(np.argmin(ys[1:4]))
    best = (xs[j], ys[j])
    if ys[j] < ys[j - 1] and ys[j] < ys[j + 1]:
        res = minimize_scalar(f, bracket=(xs[j - 1], xs[j], xs[j + 1]), method="golden",
                              options={"xtol": 1e-10})
        if xs[j - 1] < res.x < xs[j + 1] and res.fun < best[1]:
            best = (float(res.x), float(res.fun))
    return best if best[1] < fs[i] else (ts[i], fs[i])


def split_side(space: GeodesicSpace, k, p: PointRef, side: GeodesicPolyline,
               m: int = 32, tol: float | None = None, refine: bool = True) -> SplitCertificate:
    """Split the triangle p r1 r2 (side = [r1 r2]) at the minimum of the excess."""
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    d1, d2 = space.distance(p, side.start), space.distance(p, side.end)
    L = side.total
    f, ts, fs = _excess(space, kp, p, side, m)
    i = int(np.argmin(fs))
    samples = tuple(zip(ts, fs))
    candidates = [(ts[i], fs[i])]
    if refine and space.analytic:
        t_ref, f_ref = _refine(f, ts, fs, i, L)
        if t_ref != ts[i]:
            # exact minimizers can sit on a defect where neither sub-angle is bad;
            # the best raw sample is tried as a fallback before giving up
            candidates.insert(0, (t_ref, f_ref))
    if candidates[0][1] >= -tol:
        raise NoNegativeExcess(f"min excess {candidates[0][1]:.3g} not below -{tol:.3g}")
    first_exc = None
    for t0, f0 in candidates:
        if f0 >= -tol:
            continue
        try:
            return _certify(space, kp, p, side, t0, f0, samples, d1, d2, tol)
        except (AdjacentAngleDefect, InconclusiveSplit) as exc:
            first_exc = first_exc or exc
    raise first_exc


def _certify(space, kp, p, side, t0, f0, samples, d1, d2, tol) -> SplitCertificate:
    r1, r2 = side.start, side.end
    L = side.total
    s0 = point_at(side, t0)
    if s0 == r1 or s0 == r2:
        raise ResolutionFloor("split point collapsed onto an endpoint")
    g_ps0 = space.geodesic(p, s0)
    to_r1 = side.sub(t0, 0.0)
    to_r2 = side.sub(t0, L)
    tri1 = Triangle(p, s0, r1, g_ps0, space.geodesic(p, r1), to_r1)
    tri2 = Triangle(p, s0, r2, g_ps0, space.geodesic(p, r2), to_r2)
    certs, measured = [], []
    for tri in (tri1, tri2):
        try:
            comp, est = angle_deficit(space, kp, tri, "q")
        except DegenerateGeodesic:
            raise ResolutionFloor("split point too close to an endpoint") from None
        measured.append(est.value)
        deficit = comp - est.value
        certs.append(BadAngleCertificate(tri, "q", est, comp, deficit, tol)
                     if deficit > tol else None)
    adjacent_sum = measured[0] + measured[1]
    dps0 = space.distance(p, s0)
    if not any(certs):
        if abs(adjacent_sum - math.pi) > _adjacent_tol(space, tol):
            raise AdjacentAngleDefect(
                f"adjacent angles at the split point sum to {adjacent_sum:.6g}",
                point=s0, excess=f0, angle_sum=adjacent_sum, t=t0)
        raise InconclusiveSplit(f"excess {f0:.3g} but no sub-angle deficit above {tol:.3g}")
    half_circle = 0.5 * kp.diameter
    mandatory = tuple(
        to_r.total <= d and (kp.sign <= 0 or d < half_circle)
        for to_r, d in ((to_r1, d1), (to_r2, d2)))
    bound = max(d1, d2)
    return SplitCertificate(p, r1, r2, side, t0, s0, f0, samples, certs[0], certs[1],
                            mandatory, dps0, bound, distance_slack(space, kp, bound),
                            adjacent_sum, tol)


def split_at_min(space: GeodesicSpace, k, cert: BadAngleCertificate, apex: str | None = None,
                 m: int = 32, tol: float | None = None) -> SplitCertificate:
    """Split the certified triangle along the side opposite ``apex``.

    ``cert`` certifies the angle at r1; ``apex`` names p among the two other
    vertices (default: the first of them in p, q, r order).
    """
    others = [v for v in "pqr" if v != cert.vertex]
    apex = others[0] if apex is None else apex
    if apex not in others:
        raise ValueError("apex must differ from the bad vertex")
    r2 = [v for v in others if v != apex][0]
    tri = cert.triangle
    return split_side(space, k, tri.vertex(apex), tri.side(cert.vertex, r2), m, tol)


# Corollary-2.2 localization -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalizeResult:
    apex: PointRef
    s_bar: PointRef
    pair: tuple[PointRef, PointRef] | None  # s1, s2 with angle p s1 s2 bad
    pair_certificate: BadAngleCertificate | None
    dist_p_sbar: float
    bound: float  # max(|p r1|, |p r2|) of the input triangle
    slack: float
    bounds: tuple[float, ...]  # running max(|p a|, |p b|) over the active sides
    iterations: int
    splits: tuple[SplitCertificate, ...] = field(repr=False)
    defect: AdjacentAngleDefect | None = None
    delta: float = 0.0


def _pair_near(space, kp, p, side: GeodesicPolyline, t_center: float, delta: float, tol):
    """Points s1, s2 on ``side`` within delta of side(t_center) with a bad angle."""
    floor = 2.0 * space.h if not space.analytic else min(2.0 * space.h, delta / 8)
    off = delta / 2
    while off >= floor:
        a = point_at(side, max(0.0, t_center - off))
        b = point_at(side, min(side.total, t_center + off))
        if a != b:
            tri = make_triangle(space, p, a, b)
            best = None
            for v in ("q", "r"):
                try:
                    c = badness(space, kp, tri, v, tol)
                except (DegenerateGeodesic, InvalidTriple):
                    c = None
                if c is not None and (best is None or c.deficit > best.deficit):
                    best = c
            if best is not None:
                s1 = best.point
                return (s1, b if s1 == a else a), best
        off *= 0.5
    return None, None


def localize(space: GeodesicSpace, k, p: PointRef, side: GeodesicPolyline, delta: float,
             max_iter: int = 60, m: int = 32, tol: float | None = None,
             initial: BadAngleCertificate | None = None) -> LocalizeResult:
    """Iterate the split on the triangle p r1 r2, side = [r1 r2], bad at r1."""
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    if delta < FLOOR_H * space.h * (1 - 1e-12):
        raise ValueError(f"delta {delta} below {FLOOR_H}h")
    bound0 = max(space.distance(p, side.start), space.distance(p, side.end))
    slack = distance_slack(space, kp, bound0)
    bounds = [bound0]
    splits: list[SplitCertificate] = []
    pair_cert = initial
    defect = None
    active = side
    it = 0
    while True:
        if active.total < delta:
            break
        if it >= max_iter:
            raise IterationBudgetExceeded(f"side still {active.total:.3g} after {it} splits")
        it += 1
        try:
            cert = split_side(space, kp, p, active, m, tol)
        except AdjacentAngleDefect as exc:
            defect = exc
            break
        splits.append(cert)
        # (2.2) names the mandatory side; otherwise follow the larger deficit
        choices = [(need, c.deficit, i) for i, (need, c) in
                   enumerate(zip(cert.mandatory, (cert.toward_r1, cert.toward_r2)))
                   if c is not None]
        _, _, i = max(choices)
        pair_cert = cert.toward_r1 if i == 0 else cert.toward_r2
        active = active.sub(cert.t0, 0.0 if i == 0 else active.total)
        bounds.append(max(space.distance(p, active.start), space.distance(p, active.end)))
    if defect is not None:
        s_bar = defect.point
        pair, pair_cert = _pair_near(space, kp, p, active, defect.t, delta, tol)
    else:
        s_bar = active.start
        if pair_cert is None:
            tri = make_triangle(space, p, active.start, active.end)
            pair_cert = badness(space, kp, tri, "q", tol)
        pair = (active.start, active.end) if pair_cert is not None else None
    return LocalizeResult(p, s_bar, pair, pair_cert, space.distance(p, s_bar), bound0, slack,
                          tuple(bounds), it, tuple(splits), defect, delta)


def localize_certificate(space, k, cert: BadAngleCertificate, delta: float,
                         apex: str | None = None, **kw) -> LocalizeResult:
    """:func:`localize` starting from a bad-angle certificate."""
    others = [v for v in "pqr" if v != cert.vertex]
    apex = others[0] if apex is None else apex
    r2 = [v for v in others if v != apex][0]
    tri = cert.triangle
    return localize(space, k, tri.vertex(apex), tri.side(cert.vertex, r2), delta,
                    initial=cert, **kw)


# delta(o) -------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaEstimate:
    delta: float  # min(|po|/2, delta_o)
    delta_o: float  # radius of the largest ball found good
    dist_p_o: float
    triangles: int
    worst_deficit: float | None  # of the smallest bad triangle, if any


def estimate_delta(space: GeodesicSpace, k, p: PointRef, o: PointRef, tol: float | None = None,
                   budget: int = 60, seed: int = 0, r_max: float | None = None,
                   ratio: float = 1.5) -> DeltaEstimate:
    """Largest good-ball radius around ``o``, capped at |po|/2.

    Triangles are drawn in balls of geometrically growing radius from 4h to
    the cap (``budget`` per ball, seeded per ball).  A radius r counts as good
    when no sampled bad triangle has all its vertices in B(o, r); the search
    bisects on r against this monotone predicate.  Raising ``budget`` only adds
    triangles, so it can never increase the estimate.
    """
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    po = space.distance(p, o)
    if po <= 0:
        raise ValueError("o must differ from p")
    floor = FLOOR_H * space.h
    cap = 0.5 * po if r_max is None else min(r_max, 0.5 * po)
    radii = [floor]
    while radii[-1] < cap:
        radii.append(min(radii[-1] * ratio, cap))
    bad: list[tuple[float, float]] = []  # (enclosing radius, deficit)
    count = 0
    for j, rad in enumerate(radii):
        rng = np.random.default_rng([seed, j])
        for tri in sample_triangles(space, kp, o, rad, budget, rng):
            count += 1
            cert = _worst_or_none(space, kp, tri, tol)
            if cert is not None:
                enclosing = max(space.distance(o, tri.p), space.distance(o, tri.q),
                                space.distance(o, tri.r))
                bad.append((enclosing, cert.deficit))

    def good(r):
        return all(e > r for e, _ in bad)

    if not good(floor):
        raise ResolutionFloor(f"ball of radius {floor:.3g} around {o} already bad")
    if good(cap) or cap <= floor:
        delta_o = cap
    else:
        lo, hi = floor, cap
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if good(mid) else (lo, mid)
            if hi - lo <= 1e-9 * hi:
                break
        delta_o = lo
    worst = min(bad)[1] if bad else None
    return DeltaEstimate(min(0.5 * po, delta_o), delta_o, po, count, worst)


def _worst_or_none(space, kp, tri, tol):
    try:
        return worst_badness(space, kp, tri, tol)
    except (DegenerateGeodesic, InvalidTriple):
        return None


# descent ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DescentStep:
    o: PointRef
    o_next: PointRef
    delta: float
    dist_p_o: float
    dist_p_next: float
    dist_o_next: float
    witness: BadAngleCertificate  # angle p r1 r2 with r1, r2 near o
    r1_bar: PointRef
    r2_bar: PointRef
    bar_certificate: BadAngleCertificate  # angle p r1_bar r2
    gluing: AlexandrovComparison | None
    split: SplitCertificate
    localized: LocalizeResult
    next_witness: BadAngleCertificate | None


def find_witness(space: GeodesicSpace, k, p: PointRef, o: PointRef, radius: float,
                 budget: int = 60, tol: float | None = None, seed: int = 0):
    """The worst bad angle p r1 r2 with r1, r2 in B(o, radius), or None."""
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    rng = np.random.default_rng(seed)
    min_side = 2.0 * space.h if not space.analytic else min(2.0 * space.h, radius / 2)
    best = None
    for _ in range(budget):
        r1, r2 = space.sample_ball(o, radius, 2, rng)
        if space.distance(r1, r2) < min_side:
            continue
        try:
            check_regime(kp, space.distance(p, r1), space.distance(p, r2))
            tri = make_triangle(space, p, r1, r2)
            for v in ("q", "r"):
                c = badness(space, kp, tri, v, tol)
                if c is not None and (best is None or c.deficit > best.deficit):
                    best = c
        except (DegenerateGeodesic, InvalidTriple):
            continue
    return best


def descent_step(space: GeodesicSpace, k, p: PointRef, o: PointRef, delta: float,
                 tol: float | None = None, budget: int = 60, seed: int = 0, m: int = 32,
                 witness_fraction: float = 0.1) -> DescentStep:
    """Produce o' with |po'| <= |po| - delta/3 and |oo'| < delta carrying a bad angle."""
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    po = space.distance(p, o)
    target = po - delta / 3.0
    radius = witness_fraction * delta
    witness = find_witness(space, kp, p, o, radius, budget, tol, seed)
    if witness is None:
        raise WitnessNotFound(f"no bad angle with apex p near {o} (radius {radius:.3g})")
    tri = witness.triangle
    r1 = witness.point
    r2 = tri.r if witness.vertex == "q" else tri.q
    g_pr1 = space.geodesic(p, r1)
    if target <= 0 or target >= g_pr1.total:
        raise WitnessNotFound("descent target outside the witness geodesic")
    r1_bar = point_at(g_pr1, target)
    bar_tri = make_triangle(space, p, r1_bar, r2)
    bar_cert = badness(space, kp, bar_tri, "q", tol)
    if bar_cert is None:
        raise WitnessNotFound("badness did not carry over to the shortened triangle")
    try:
        gluing = alexandrov_compare(kp, pq=space.distance(r2, r1_bar),
                                    qr=space.distance(r1_bar, p), qs=space.distance(r1_bar, r1),
                                    pr=space.distance(r2, p), ps=space.distance(r2, r1))
    except InvalidTriple:
        gluing = None
    split = split_side(space, kp, p, bar_tri.side("q", "r"), m, tol)
    if split.toward_r1 is None:
        raise WitnessNotFound("split certified only the far sub-angle")
    s = split.s0
    ps = space.distance(p, s)
    if ps <= target:
        r2_bar, pair_cert = s, split.toward_r1
    else:
        r2_bar = point_at(space.geodesic(p, s), target)
        pair_cert = badness(space, kp, make_triangle(space, p, r2_bar, r1_bar), "q", tol)
        if pair_cert is None:
            raise WitnessNotFound("badness lost when pulling the split point towards p")
    loc_delta = max(FLOOR_H * space.h, radius)
    loc = localize(space, kp, p, pair_cert.triangle.side("q", "r"), loc_delta, m=m, tol=tol,
                   initial=pair_cert)
    o_next = loc.s_bar
    return DescentStep(o, o_next, delta, po, space.distance(p, o_next),
                       space.distance(o, o_next), witness, r1_bar, r2_bar, bar_cert, gluing,
                       split, loc, loc.pair_certificate)


# audit --------------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    i: int
    o: PointRef
    delta: float | None  # None for the terminal point
    dist_p_o: float
    witness_deficit: float | None


@dataclass(frozen=True, eq=False)
class DescentTrace:
    base: PointRef
    rows: tuple[TraceRow, ...]
    dist_tol: float

    def invariants(self) -> dict[str, bool]:
        return trace_invariants(self)


def trace_invariants(trace: DescentTrace, space: GeodesicSpace | None = None) -> dict[str, bool]:
    """The three arithmetic invariants of a descent trace.

    step_decrease: |p o_{i+1}| <= |p o_i| - delta_i/3
    step_locality: |o_i o_{i+1}| < delta_i (needs ``space`` or stored steps)
    delta_sum:     sum delta_i/3 <= |p o_1|
    """
    rows = trace.rows
    tol = trace.dist_tol
    # rows without delta are terminal (resolution floor, refined defect point)
    steps = [(a, b) for a, b in zip(rows[:-1], rows[1:]) if a.delta is not None]
    dec = all(b.dist_p_o <= a.dist_p_o - a.delta / 3.0 + tol for a, b in steps)
    loc = True
    if space is not None:
        loc = all(space.distance(a.o, b.o) < a.delta + tol for a, b in steps)
    deltas = [r.delta for r in rows if r.delta is not None]
    dsum = (sum(deltas) / 3.0 <= rows[0].dist_p_o + tol) if rows else True
    return {"step_decrease": dec, "step_locality": loc, "delta_sum": dsum}


@dataclass(frozen=True, eq=False)
class AuditResult:
    verdict: str  # "HOLDS" or "VIOLATED"
    k: float
    seed_certificate: BadAngleCertificate | None
    trace: DescentTrace | None
    steps: tuple[DescentStep, ...]
    termination: str
    terminal: PointRef | None
    terminal_radius: float | None
    worst_deficit: float | None
    terminal_defect: LocalizeResult | None
    invariants: dict

    @property
    def holds(self) -> bool:
        return self.verdict == "HOLDS"


def _try_localize(space, kp, cert, delta, tol, m):
    for apex in [v for v in "pqr" if v != cert.vertex]:
        try:
            return localize_certificate(space, kp, cert, delta, apex=apex, m=m, tol=tol)
        except GlobalizeError:
            continue
    return None


def _locate_defect(space, kp, center, radius, budget, tol, seed, m):
    """Worst bad triangle in B(center, radius), localized down to a defect point."""
    report = local_check(space, kp, center, radius, budget, tol, seed)
    if report.good:
        return report, None
    tris = sample_triangles(space, kp, center, radius, budget, np.random.default_rng(seed))
    certs = []
    for tri in tris:
        c = _worst_or_none(space, kp, tri, tol)
        if c is not None:
            certs.append(c)
    certs.sort(key=lambda c: -c.deficit)
    delta = max(FLOOR_H * space.h, 1e-3 * radius) if space.analytic else FLOOR_H * space.h
    fallback = None
    for cert in certs[:8]:
        loc = _try_localize(space, kp, cert, delta, tol, m)
        if loc is None:
            continue
        if loc.defect is not None:
            return report, loc
        fallback = fallback or loc
    return report, fallback


def globalization_audit(space: GeodesicSpace, k, p: PointRef, q: PointRef, r: PointRef,
                        tol: float | None = None, budget: int = 60, max_steps: int = 40,
                        seed: int = 0, m: int = 32) -> AuditResult:
    """Verify the comparison inequality on a seed triangle or chase its failure."""
    kp = as_curvature(k)
    tol = default_tol(space) if tol is None else tol
    tri = make_triangle(space, p, q, r)
    check_regime(kp, tri.pq.total, tri.pr.total, tri.qr.total)
    seed_cert = worst_badness(space, kp, tri, tol)
    no_trace = dict(step_decrease=True, step_locality=True, delta_sum=True)
    if seed_cert is None:
        return AuditResult("HOLDS", kp.k, None, None, (), "no bad angle", None, None, None,
                           None, no_trace)
    floor = FLOOR_H * space.h
    loc = None
    for cert in _seed_certificates(space, kp, tri, tol):
        loc = _try_localize(space, kp, cert, floor, tol, m)
        if loc is not None:
            seed_cert = cert
            break
    if loc is None:
        return AuditResult("VIOLATED", kp.k, seed_cert, None, (), "not localizable",
                           seed_cert.point, None, seed_cert.deficit, None, no_trace)
    base = loc.apex
    o = loc.s_bar
    wdef = loc.pair_certificate.deficit if loc.pair_certificate else None
    rows: list[TraceRow] = []
    steps: list[DescentStep] = []
    termination = ""
    if loc.defect is not None:
        termination = "defect localized"
    while not termination:
        try:
            est = estimate_delta(space, kp, base, o, tol, budget, seed + len(rows))
        except ResolutionFloor:
            termination = "resolution floor"
            break
        rows.append(TraceRow(len(rows) + 1, o, est.delta, est.dist_p_o, wdef))
        if len(steps) >= max_steps:
            raise BudgetExceeded(f"audit exceeded {max_steps} descent steps")
        try:
            step = descent_step(space, kp, base, o, est.delta, tol, budget, seed + len(rows), m)
        except AdjacentAngleDefect as exc:
            o, termination = exc.point, "defect localized"
            wdef = None
            # the defect point is not a descent step: keep it out of the trace
            break
        except (WitnessNotFound, ResolutionFloor, InconclusiveSplit, NoNegativeExcess,
                IterationBudgetExceeded):
            termination = "witness exhausted"
            break
        steps.append(step)
        o = step.o_next
        wdef = step.next_witness.deficit if step.next_witness else None
    if not rows or rows[-1].o != o:
        rows.append(TraceRow(len(rows) + 1, o, None, space.distance(base, o), wdef))
    # terminal ball: the floor ball, or the last good radius when the chase stalled
    last_delta = next((r_.delta for r_ in reversed(rows) if r_.delta is not None), floor)
    radius = floor if termination != "witness exhausted" else max(floor, last_delta)
    radius = max(radius, 2.0 * space.h * 1.01)
    report, defect = _locate_defect(space, kp, o, radius, 2 * budget, tol, seed, m)
    terminal = defect.s_bar if defect is not None else o
    if terminal != o:
        wd = defect.pair_certificate.deficit if defect.pair_certificate else None
        rows.append(TraceRow(len(rows) + 1, terminal, None, space.distance(base, terminal), wd))
    dist_tol = 2.0 * space.eta + 1e-9 * (1.0 + rows[0].dist_p_o)
    trace = DescentTrace(base, tuple(rows), dist_tol)
    worst = report.worst.deficit if report.worst is not None else None
    return AuditResult("VIOLATED", kp.k, seed_cert, trace, tuple(steps), termination, terminal,
                       radius, worst, defect, trace_invariants(trace, space))


def _seed_certificates(space, kp, tri, tol):
    certs = []
    for v in ("p", "q", "r"):
        try:
            c = badness(space, kp, tri, v, tol)
        except (DegenerateGeodesic, InvalidTriple):
            c = None
        if c is not None:
            certs.append(c)
    return sorted(certs, key=lambda c: -c.deficit)
