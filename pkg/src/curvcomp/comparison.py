"""Angles in a geodesic space, bad-angle certificates and local ball checks.

The angle between two geodesics leaving q is measured operationally as the
comparison angle of (x, q, y), where x and y sit at the same probe arclength
t on the two geodesics.  In a space of curvature >= k this quantity is
nonincreasing as t shrinks and converges to the true angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateGeodesic, EmptyBall, InvalidTriple, NotInterior,
                     RangeError)
from .metricspace import GeodesicPolyline, GeodesicSpace, PointRef, point_at
from .spaceform import SideTriple, as_curvature, comparison_angle

#: probe scale for discrete backends, in units of h
PROBE_DISCRETE = 10.0
#: probe scale for analytic backends, relative to the shorter geodesic
PROBE_ANALYTIC = 1e-4
#: default badness tolerance for discrete backends, in units of h
TOL_DISCRETE = 5.0
TOL_ANALYTIC = 1e-6
_MAX_DIAGNOSTICS = 40


def default_tol(space: GeodesicSpace) -> float:
    return TOL_ANALYTIC if space.analytic else TOL_DISCRETE * space.h


def default_probe(space: GeodesicSpace, *geodesics: GeodesicPolyline) -> float:
    shortest = min(g.total for g in geodesics)
    if shortest <= 0:
        raise DegenerateGeodesic("zero-length geodesic")
    if space.analytic:
        return PROBE_ANALYTIC * shortest
    return min(PROBE_DISCRETE * space.h, shortest)


@dataclass(frozen=True)
class AngleEstimate:
    value: float
    t: float
    vertex: PointRef
    # (t, value) pairs at t, t/2, t/4, ... down to the resolution h
    diagnostics: tuple[tuple[float, float], ...] = ()


def _probe_angle(space, kp, q, gp, gr, t):
    x = point_at(gp, t)
    y = point_at(gr, t)
    dqx = space.distance(q, x)
    dqy = space.distance(q, y)
    if dqx == 0.0 or dqy == 0.0:
        raise DegenerateGeodesic(f"probe at t={t} collapsed onto the vertex")
    dxy = space.distance(x, y)
    return comparison_angle(kp, SideTriple.from_lengths(pq=dqx, pr=dxy, qr=dqy), "q")


def measure_angle(space: GeodesicSpace, k, q: PointRef, gp: GeodesicPolyline,
                  gr: GeodesicPolyline, t: float | None = None,
                  diagnostics: bool = False) -> AngleEstimate:
    """Angle at ``q`` between geodesics ``gp`` and ``gr`` (both starting at q)."""
    kp = as_curvature(k)
    if gp.start != q or gr.start != q:
        raise ValueError("geodesics must emanate from the vertex")
    if gp.total <= 0 or gr.total <= 0:
        raise DegenerateGeodesic("zero-length side at the vertex")
    if t is None:
        t = default_probe(space, gp, gr)
    limit = min(gp.total, gr.total)
    if not (0 < t <= limit * (1 + 1e-12)):
        raise RangeError(f"probe scale {t} outside (0, {limit}]")
    value = _probe_angle(space, kp, q, gp, gr, min(t, limit))
    diag: list[tuple[float, float]] = []
    if diagnostics:
        s = t
        while s >= space.h and len(diag) < _MAX_DIAGNOSTICS:
            try:
                diag.append((s, _probe_angle(space, kp, q, gp, gr, s)))
            except DegenerateGeodesic:
                break
            s *= 0.5
    return AngleEstimate(value, t, q, tuple(diag))


@dataclass(frozen=True, eq=False)
class Triangle:
    """Three points and the chosen shortest paths joining them."""

    p: PointRef
    q: PointRef
    r: PointRef
    pq: GeodesicPolyline = field(repr=False)
    pr: GeodesicPolyline = field(repr=False)
    qr: GeodesicPolyline = field(repr=False)

    @property
    def sides(self) -> SideTriple:
        return SideTriple.from_lengths(pq=self.pq.total, pr=self.pr.total, qr=self.qr.total)

    @property
    def perimeter(self) -> float:
        return self.pq.total + self.pr.total + self.qr.total

    def vertex(self, name: str) -> PointRef:
        return {"p": self.p, "q": self.q, "r": self.r}[name]

    def side(self, u: str, v: str) -> GeodesicPolyline:
        """The chosen geodesic from vertex ``u`` to vertex ``v``."""
        g = getattr(self, "".join(sorted(u + v)))
        return g if u < v else g.reversed()

    def rays(self, name: str) -> tuple[GeodesicPolyline, GeodesicPolyline]:
        """The two sides leaving vertex ``name``, in p, q, r order of the far ends."""
        if name == "p":
            return self.pq, self.pr
        if name == "q":
            return self.pq.reversed(), self.qr
        if name == "r":
            return self.pr.reversed(), self.qr.reversed()
        raise ValueError(f"unknown vertex {name!r}")


def make_triangle(space: GeodesicSpace, p: PointRef, q: PointRef, r: PointRef) -> Triangle:
    return Triangle(p, q, r, space.geodesic(p, q), space.geodesic(p, r), space.geodesic(q, r))


@dataclass(frozen=True, eq=False)
class BadAngleCertificate:
    """Measured angle smaller than the comparison angle by more than ``tol``."""

    triangle: Triangle
    vertex: str
    measured: AngleEstimate
    comparison: float
    deficit: float
    tol: float

    @property
    def point(self) -> PointRef:
        return self.triangle.vertex(self.vertex)


def angle_deficit(space, k, tri: Triangle, vertex: str, t: float | None = None):
    """(comparison angle, measured estimate) at ``vertex`` of ``tri``."""
    kp = as_curvature(k)
    comp = comparison_angle(kp, tri.sides, vertex)
    g1, g2 = tri.rays(vertex)
    measured = measure_angle(space, kp, tri.vertex(vertex), g1, g2, t)
    return comp, measured


def badness(space: GeodesicSpace, k, tri: Triangle, vertex: str,
            tol: float | None = None, t: float | None = None) -> BadAngleCertificate | None:
    """Certificate if the angle at ``vertex`` is below its comparison angle by > tol."""
    tol = default_tol(space) if tol is None else tol
    comp, measured = angle_deficit(space, k, tri, vertex, t)
    deficit = comp - measured.value
    if deficit > tol:
        return BadAngleCertificate(tri, vertex, measured, comp, deficit, tol)
    return None


def worst_badness(space, k, tri: Triangle, tol=None, t=None) -> BadAngleCertificate | None:
    worst = None
    for v in ("p", "q", "r"):
        cert = badness(space, k, tri, v, tol, t)
        if cert is not None and (worst is None or cert.deficit > worst.deficit):
            worst = cert
    return worst


@dataclass(frozen=True, eq=False)
class LocalReport:
    center: PointRef
    radius: float
    good: bool
    worst: BadAngleCertificate | None
    triangles: int
    max_deficit: float  # largest comparison - measured seen, certified or not


def sample_triangles(space: GeodesicSpace, k, o: PointRef, radius: float, budget: int,
                     rng: np.random.Generator, min_side: float | None = None):
    """Up to ``budget`` triangles with vertices drawn uniformly from B(o, radius).

    Triples with a side shorter than ``min_side`` (default 2h) or outside the
    k>0 regime are rejected.
    """
    kp = as_curvature(k)
    min_side = 2.0 * space.h if min_side is None else min_side
    out = []
    attempts = 0
    while len(out) < budget and attempts < 20 * budget:
        attempts += 1
        a, b, c = space.sample_ball(o, radius, 3, rng)
        dab, dac, dbc = space.distance(a, b), space.distance(a, c), space.distance(b, c)
        if min(dab, dac, dbc) < min_side:
            continue
        if kp.sign > 0 and (dab + dac + dbc >= 0.99 * kp.perimeter_bound
                            or max(dab, dac, dbc) >= 0.99 * kp.diameter):
            continue
        out.append(make_triangle(space, a, b, c))
    return out


def local_check(space: GeodesicSpace, k, o: PointRef, radius: float, budget: int = 200,
                tol: float | None = None, seed: int = 0) -> LocalReport:
    """Sample triangles in B(o, radius) and report the worst bad angle, if any."""
    if not radius > 2.0 * space.h:
        raise RangeError(f"radius {radius} must exceed 2h = {2.0 * space.h}")
    tol = default_tol(space) if tol is None else tol
    rng = np.random.default_rng(seed)
    tris = sample_triangles(space, k, o, radius, budget, rng)
    if not tris:
        raise EmptyBall(f"no admissible triangle in B({o}, {radius})")
    worst, max_def = None, -math.inf
    for tri in tris:
        for v in ("p", "q", "r"):
            try:
                comp, measured = angle_deficit(space, k, tri, v)
            except (DegenerateGeodesic, InvalidTriple):
                continue
            d = comp - measured.value
            max_def = max(max_def, d)
            if d > tol and (worst is None or d > worst.deficit):
                worst = BadAngleCertificate(tri, v, measured, comp, d, tol)
    return LocalReport(o, radius, worst is None, worst, len(tris), max_def)


@dataclass(frozen=True)
class AdjacentAngles:
    angle_p: float  # between the ray back to the start of the geodesic and r'
    angle_q: float  # between the ray on to the end of the geodesic and r'
    total: float
    t: float


def adjacent_angle_check(space: GeodesicSpace, k, gpq: GeodesicPolyline, at: float,
                         r_prime: PointRef, t: float | None = None) -> AdjacentAngles:
    """Angles at the interior point r = gpq(at) towards both ends and towards r'."""
    if not (0.0 < at < gpq.total):
        raise NotInterior(f"arclength {at} is not interior to (0, {gpq.total})")
    r = point_at(gpq, at)
    if r == gpq.start or r == gpq.end:
        raise NotInterior("interior parameter snaps to an endpoint")
    to_p = gpq.sub(at, 0.0)
    to_q = gpq.sub(at, gpq.total)
    to_rp = space.geodesic(r, r_prime)
    if t is None:
        t = default_probe(space, to_p, to_q, to_rp)
    a1 = measure_angle(space, k, r, to_p, to_rp, t).value
    a2 = measure_angle(space, k, r, to_q, to_rp, t).value
    return AdjacentAngles(a1, a2, a1 + a2, t)


@dataclass(frozen=True)
class VariationResidual:
    t: float
    step: float  # |q q_t| as measured in the space
    residual: float
    ratio: float  # residual / step


def first_variation_check(space: GeodesicSpace, k, p: PointRef, q: PointRef, r: PointRef,
                          ts, t_angle: float | None = None) -> list[VariationResidual]:
    """Residuals of |p q_t| <= |pq| - cos(angle pqr) t + o(t) along [qr]."""
    gqp = space.geodesic(q, p)
    gqr = space.geodesic(q, r)
    angle = measure_angle(space, k, q, gqp, gqr, t_angle).value
    c = math.cos(angle)
    dpq = space.distance(p, q)
    out = []
    for t in ts:
        if not (0 < t <= gqr.total):
            raise RangeError(f"t={t} outside (0, {gqr.total}]")
        qt = point_at(gqr, t)
        step = space.distance(q, qt)
        if step == 0:
            raise RangeError(f"t={t} is below the resolution of the space")
        res = math.fsum((space.distance(p, qt), -dpq, c * step))
        out.append(VariationResidual(t, step, res, res / step))
    return out
