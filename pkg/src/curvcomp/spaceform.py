"""Trigonometry and comparison constructions in the model surfaces S^2_k.

All length arguments are in the units of ``1/sqrt(|k|)``; angles are radians.
Formulas are written in half-angle / product form so that nearly degenerate
triangles (angles close to 0 or pi) keep full relative precision:

    tan(gamma/2)^2 = s((z+x-y)/2) s((z-x+y)/2) / (s((x+y+z)/2) s((x+y-z)/2))

where ``s`` is the generalized sine ``sin(sqrt(k) u)/sqrt(k)`` (``u`` for k=0,
``sinh(sqrt(-k) u)/sqrt(-k)`` for k<0) and ``gamma`` is the angle between the
sides of length x and y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import DomainError, InvalidTriple, RangeError

#: |k| below this is evaluated with the Euclidean branch
K_EUCLIDEAN = 1e-12
#: trig-domain clamping window
CLAMP = 1e-12
#: relative realizability slack (times the perimeter)
TAU_EQ_REL = 1e-9

VERTICES = ("p", "q", "r")


@dataclass(frozen=True)
class CurvatureParam:
    """Lower curvature bound ``k`` with its derived k>0 bounds."""

    k: float

    def __post_init__(self):
        if not math.isfinite(self.k):
            raise DomainError(f"curvature must be finite, got {self.k!r}")
        object.__setattr__(self, "k", float(self.k))

    @property
    def sign(self) -> int:
        if abs(self.k) < K_EUCLIDEAN:
            return 0
        return 1 if self.k > 0 else -1

    @property
    def diameter(self) -> float:
        """pi/sqrt(k) for k>0, infinity otherwise."""
        if self.sign > 0:
            return math.pi / math.sqrt(self.k)
        return math.inf

    @property
    def perimeter_bound(self) -> float:
        """2 pi/sqrt(k) for k>0, infinity otherwise."""
        return 2.0 * self.diameter

    @property
    def radius(self) -> float:
        """Radius of the model chart (sphere or hyperboloid); inf for k=0."""
        if self.sign == 0:
            return math.inf
        return 1.0 / math.sqrt(abs(self.k))


KLike = Union[CurvatureParam, float, int]


def as_curvature(k: KLike) -> CurvatureParam:
    return k if isinstance(k, CurvatureParam) else CurvatureParam(float(k))


@dataclass(frozen=True)
class SideTriple:
    """Side lengths of a triangle pqr.

    ``a = |qr|`` is opposite p, ``b = |pr|`` opposite q, ``c = |pq|`` opposite r.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise InvalidTriple(f"side {name}={v!r} must be finite and >= 0")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_lengths(cls, pq: float, pr: float, qr: float) -> "SideTriple":
        return cls(a=qr, b=pr, c=pq)

    @property
    def pq(self) -> float:
        return self.c

    @property
    def pr(self) -> float:
        return self.b

    @property
    def qr(self) -> float:
        return self.a

    @property
    def perimeter(self) -> float:
        return self.a + self.b + self.c

    def opposite(self, vertex: str) -> float:
        return {"p": self.a, "q": self.b, "r": self.c}[_vertex(vertex)]

    def adjacent(self, vertex: str) -> tuple[float, float]:
        """The two sides meeting at ``vertex``, in a fixed order."""
        v = _vertex(vertex)
        if v == "p":
            return self.c, self.b  # |pq|, |pr|
        if v == "q":
            return self.c, self.a  # |qp|, |qr|
        return self.b, self.a  # |rp|, |rq|


def default_tau(sides: SideTriple) -> float:
    return TAU_EQ_REL * sides.perimeter


def _vertex(vertex: str) -> str:
    if vertex not in VERTICES:
        raise ValueError(f"vertex must be one of {VERTICES}, got {vertex!r}")
    return vertex


# generalized trigonometric functions ---------------------------------------

def gsin(k: KLike, u: float) -> float:
    """sin(sqrt(k) u)/sqrt(k), continuous through k=0."""
    kp = as_curvature(k)
    if kp.sign == 0:
        return u
    kap = math.sqrt(abs(kp.k))
    if kp.sign > 0:
        return math.sin(kap * u) / kap
    return math.sinh(kap * u) / kap


def check_triple(k: KLike, sides: SideTriple, tau: float | None = None,
                 allow_diameter: bool = False) -> None:
    """Raise InvalidTriple unless ``sides`` is realizable in S^2_k.

    With ``allow_diameter`` a k>0 side equal to pi/sqrt(k) is accepted (and the
    perimeter then equals 2 pi/sqrt(k)).
    """
    kp = as_curvature(k)
    tau = default_tau(sides) if tau is None else tau
    a, b, c = sides.a, sides.b, sides.c
    if a > b + c + tau or b > a + c + tau or c > a + b + tau:
        raise InvalidTriple(f"triangle inequality fails for {sides}")
    if kp.sign > 0:
        diam = kp.diameter
        if max(a, b, c) > diam + tau:
            raise InvalidTriple(f"side exceeds pi/sqrt(k)={diam} in {sides}")
        on_diameter = max(a, b, c) >= diam - tau
        if allow_diameter and on_diameter:
            if sides.perimeter > kp.perimeter_bound + 2 * tau:
                raise InvalidTriple(f"perimeter exceeds 2pi/sqrt(k) in {sides}")
        elif sides.perimeter >= kp.perimeter_bound - tau:
            raise InvalidTriple(
                f"perimeter {sides.perimeter} not below 2pi/sqrt(k)={kp.perimeter_bound}")


def _angle_from_sides(kp: CurvatureParam, x: float, y: float, z: float) -> float:
    # angle between sides x, y opposite z; inputs already validated
    def s(u):
        return gsin(kp, u)

    fs = math.fsum
    num = s(0.5 * fs((z, x, -y))) * s(0.5 * fs((z, -x, y)))
    den = s(0.5 * fs((x, y, z))) * s(0.5 * fs((x, y, -z)))
    return 2.0 * math.atan2(math.sqrt(max(num, 0.0)), math.sqrt(max(den, 0.0)))


def comparison_angle(k: KLike, sides: SideTriple, vertex: str,
                     tau: float | None = None) -> float:
    """Angle at ``vertex`` of the comparison triangle of ``sides`` in S^2_k.

    For k>0, a side equal to pi/sqrt(k) incident to the vertex gives 0 by
    convention; if the opposite side is the diameter the vertex lies on a
    meridian between antipodes and the angle is pi. A vanishing adjacent side
    also yields 0.
    """
    kp = as_curvature(k)
    tau = default_tau(sides) if tau is None else tau
    check_triple(kp, sides, tau, allow_diameter=True)
    x, y = sides.adjacent(vertex)
    z = sides.opposite(vertex)
    if kp.sign > 0:
        diam = kp.diameter
        if max(x, y) >= diam - tau:
            return 0.0
        if z >= diam - tau:
            return math.pi
    return _angle_from_sides(kp, x, y, z)


def side_from_angle(k: KLike, a: float, b: float, gamma: float) -> float:
    """Third side of the S^2_k triangle with sides ``a``, ``b`` enclosing ``gamma``."""
    kp = as_curvature(k)
    if a < 0 or b < 0:
        raise DomainError("side lengths must be nonnegative")
    if gamma < -CLAMP or gamma > math.pi + CLAMP:
        raise DomainError(f"angle {gamma} outside [0, pi]")
    gamma = min(max(gamma, 0.0), math.pi)
    sh2 = math.sin(0.5 * gamma) ** 2
    ch2 = math.cos(0.5 * gamma) ** 2
    if kp.sign == 0:
        c0 = math.sqrt((a - b) ** 2 + 4.0 * a * b * sh2)
    else:
        kap = math.sqrt(abs(kp.k))
        if kp.sign > 0:
            diam = kp.diameter
            if a > diam * (1 + CLAMP) or b > diam * (1 + CLAMP):
                raise DomainError(f"side exceeds pi/sqrt(k)={diam}")
            a, b = min(a, diam), min(b, diam)
            u, v = kap * a, kap * b
            prod = math.sin(u) * math.sin(v)
            hs = math.sin(0.5 * (u - v)) ** 2 + prod * sh2
            hc = math.cos(0.5 * (u + v)) ** 2 + prod * ch2
            c0 = 2.0 * math.atan2(math.sqrt(max(hs, 0.0)), math.sqrt(max(hc, 0.0))) / kap
        else:
            u, v = kap * a, kap * b
            hs = math.sinh(0.5 * (u - v)) ** 2 + math.sinh(u) * math.sinh(v) * sh2
            c0 = 2.0 * math.asinh(math.sqrt(max(hs, 0.0))) / kap
    return _polish_side(kp, a, b, sh2, ch2, c0)


def _gasin(kp: CurvatureParam, y: float) -> float:
    # inverse of gsin on its increasing branch
    if kp.sign == 0:
        return y
    kap = math.sqrt(abs(kp.k))
    if kp.sign > 0:
        return math.asin(min(1.0, max(-1.0, kap * y))) / kap
    return math.asinh(kap * y) / kap


def _polish_side(kp, a, b, sh2, ch2, c0):
    """Re-express the third side as |a-b| + small or a+b - small.

    Near gamma = 0 or pi the side is within O(gamma^2) of |a-b| (or a+b) and a
    last-bit error in it becomes a sqrt(eps) error in the angle recovered from
    it.  The identity s(w)^2 - s(u)^2 = s(w-u) s(w+u) for s = gsin gives the
    small difference directly.
    """
    sa, sb = gsin(kp, a), gsin(kp, b)
    if sh2 <= ch2:
        d = abs(a - b)
        x = sa * sb * sh2
        if x == 0.0:
            return d
        den = gsin(kp, 0.5 * (c0 + d))
        if den <= 0.0 or (kp.sign > 0 and 0.5 * (c0 + d) > 0.5 * kp.diameter):
            return c0
        return d + 2.0 * _gasin(kp, x / den)
    total = a + b
    if kp.sign > 0 and total > 0.5 * kp.diameter:
        return c0
    y = sa * sb * ch2
    if y == 0.0:
        return total
    den = gsin(kp, 0.5 * (total + c0))
    if den <= 0.0:
        return c0
    return total - 2.0 * _gasin(kp, y / den)


# model charts -----------------------------------------------------------------

def model_point(k: KLike, dist: float, direction: float) -> np.ndarray:
    """Point at distance ``dist`` from the chart origin along heading ``direction``.

    k=0: the plane R^2.  k>0: the sphere of radius 1/sqrt(k) in R^3 with origin
    at the north pole.  k<0: the upper sheet of the hyperboloid
    x^2 + y^2 - t^2 = -1/|k| with origin at (0, 0, 1/sqrt(|k|)).
    """
    kp = as_curvature(k)
    c, s = math.cos(direction), math.sin(direction)
    if kp.sign == 0:
        return np.array([dist * c, dist * s])
    R = kp.radius
    if kp.sign > 0:
        rho = R * math.sin(dist / R)
        return np.array([rho * c, rho * s, R * math.cos(dist / R)])
    rho = R * math.sinh(dist / R)
    return np.array([rho * c, rho * s, R * math.cosh(dist / R)])


def model_origin(k: KLike) -> np.ndarray:
    return model_point(k, 0.0, 0.0)


def model_distance(k: KLike, u, v) -> float:
    """Distance in S^2_k between two chart points (see :func:`model_point`)."""
    kp = as_curvature(k)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if kp.sign == 0:
        return float(np.hypot(*(u[:2] - v[:2])))
    R = kp.radius
    if kp.sign > 0:
        return 2.0 * R * math.atan2(float(np.linalg.norm(u - v)), float(np.linalg.norm(u + v)))
    d = u - v
    mink = d[0] ** 2 + d[1] ** 2 - d[2] ** 2
    return 2.0 * R * math.asinh(math.sqrt(max(mink, 0.0)) / (2.0 * R))


# comparison triangles -----------------------------------------------------------

@dataclass(frozen=True)
class ComparisonTriangle:
    """Comparison triangle placed canonically: q at the chart origin, r on the
    positive first axis, p in the upper half."""

    k: CurvatureParam
    sides: SideTriple
    angles: tuple[float, float, float]
    coords: tuple[np.ndarray, np.ndarray, np.ndarray]

    def angle(self, vertex: str) -> float:
        return self.angles[VERTICES.index(_vertex(vertex))]

    def coord(self, vertex: str) -> np.ndarray:
        return self.coords[VERTICES.index(_vertex(vertex))]


def build_comparison_triangle(k: KLike, sides: SideTriple,
                              tau: float | None = None) -> ComparisonTriangle:
    kp = as_curvature(k)
    angles = tuple(comparison_angle(kp, sides, v, tau) for v in VERTICES)
    q = model_origin(kp)
    r = model_point(kp, sides.qr, 0.0)
    p = model_point(kp, sides.pq, angles[1])
    for arr in (p, q, r):
        arr.setflags(write=False)
    return ComparisonTriangle(kp, sides, angles, (p, q, r))


_SIDE_OF_APEX = {"p": ("q", "r"), "q": ("p", "r"), "r": ("p", "q")}


def distance_to_side_point(tri: ComparisonTriangle, apex: str, t: float) -> float:
    """|apex~ s~| for s~ on the side opposite ``apex`` at arclength ``t``.

    The side runs between the other two vertices taken in the order p, q, r
    (so for apex p it runs from q~ to r~).
    """
    first, second = _SIDE_OF_APEX[_vertex(apex)]
    sides = tri.sides
    length = sides.opposite(apex)
    slack = CLAMP * max(1.0, length)
    if t < -slack or t > length + slack:
        raise RangeError(f"t={t} outside [0, {length}]")
    to_first = _edge(sides, apex, first)
    if t <= 0.0:
        return to_first
    if t >= length:
        return _edge(sides, apex, second)
    return side_from_angle(tri.k, to_first, t, tri.angle(first))


def _edge(sides: SideTriple, u: str, v: str) -> float:
    key = "".join(sorted(u + v))
    return {"pq": sides.c, "pr": sides.b, "qr": sides.a}[key]


# Alexandrov's lemma --------------------------------------------------------------

class GluingVerdict(str, Enum):
    SUM_LEQ_PI = "SUM_LEQ_PI"
    SUM_GEQ_PI = "SUM_GEQ_PI"
    BOTH = "BOTH"


@dataclass(frozen=True)
class AlexandrovComparison:
    verdict: GluingVerdict
    angle_sum: float  # angle pqr + angle pqs
    at_r: tuple[float, float]  # (angle prq, angle abc)
    at_s: tuple[float, float]  # (angle psq, angle acb)
    holds: bool  # the gluing biconditional on the values above
    tol: float


def alexandrov_compare(k: KLike, pq: float, qr: float, qs: float, pr: float, ps: float,
                       tol: float = 1e-9) -> AlexandrovComparison:
    """Compare two model triangles pqr, pqs glued along pq with the triangle abc
    of sides |ab|=pr, |ac|=ps, |bc|=qr+qs."""
    kp = as_curvature(k)
    t1 = SideTriple.from_lengths(pq=pq, pr=pr, qr=qr)
    t2 = SideTriple.from_lengths(pq=pq, pr=ps, qr=qs)
    t3 = SideTriple.from_lengths(pq=pr, pr=ps, qr=qr + qs)  # p->a, q->b, r->c
    if kp.sign > 0 and pr + ps + qr + qs >= kp.perimeter_bound:
        raise InvalidTriple("glued perimeter not below 2pi/sqrt(k)")
    for t in (t1, t2, t3):
        check_triple(kp, t)
    ang_pqr = comparison_angle(kp, t1, "q")
    ang_prq = comparison_angle(kp, t1, "r")
    ang_pqs = comparison_angle(kp, t2, "q")
    ang_psq = comparison_angle(kp, t2, "r")
    ang_abc = comparison_angle(kp, t3, "q")
    ang_acb = comparison_angle(kp, t3, "r")
    total = ang_pqr + ang_pqs
    leq = total <= math.pi + tol
    geq = total >= math.pi - tol
    verdict = GluingVerdict.BOTH if (leq and geq) else (
        GluingVerdict.SUM_LEQ_PI if leq else GluingVerdict.SUM_GEQ_PI)
    holds = _gluing_biconditional(total, (ang_prq, ang_abc), (ang_psq, ang_acb), tol)
    return AlexandrovComparison(verdict, total, (ang_prq, ang_abc), (ang_psq, ang_acb),
                                holds, tol)


def _gluing_biconditional(total, at_r, at_s, tol) -> bool:
    both_geq = at_r[0] >= at_r[1] - tol and at_s[0] >= at_s[1] - tol
    both_leq = at_r[0] <= at_r[1] + tol and at_s[0] <= at_s[1] + tol
    if total <= math.pi - tol and not both_geq:
        return False
    if total >= math.pi + tol and not both_leq:
        return False
    # converse: strict comparison of both pairs pins the side of pi
    if at_r[0] > at_r[1] + tol and at_s[0] > at_s[1] + tol and total > math.pi + tol:
        return False
    if at_r[0] < at_r[1] - tol and at_s[0] < at_s[1] - tol and total < math.pi - tol:
        return False
    return True
