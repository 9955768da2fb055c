"""Analytic geodesic spaces: plane, round sphere, hyperbolic plane, flat cone.

Points are keyed by coordinate tuples and created lazily.  Distances and
geodesics are exact up to floating point, so ``eta = 0``; ``h`` is a declared
resolution used only to scale probe lengths and sampling floors.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import MalformedInput
from .base import (GeodesicPolyline, GeodesicSpace, PointRef, format_floats,
                   make_polyline, parse_floats)

TWO_PI = 2.0 * math.pi


class AnalyticSpace(GeodesicSpace):
    analytic = True

    def __init__(self, h: float, params: dict):
        if not h > 0:
            raise MalformedInput("resolution must be positive")
        super().__init__(h=h, eta=0.0, params=params)

    def _ref(self, key) -> PointRef:
        return PointRef(tuple(float(c) for c in key), self.uid)

    def distance(self, x, y):
        self._check(x, y)
        if x.key == y.key:
            return 0.0
        return self._dist(x.key, y.key)

    def geodesic(self, x, y):
        self._check(x, y)
        keys = self._route(x.key, y.key)
        pts = [x] + [self._ref(k) for k in keys[1:-1]] + ([y] if len(keys) > 1 else [])
        steps = [self._dist(a, b) for a, b in zip(keys[:-1], keys[1:])]
        return make_polyline(self, pts, steps)

    def _route(self, a, b):
        return [a] if a == b else [a, b]

    def _point_on(self, g: GeodesicPolyline, t: float) -> PointRef:
        i = min(int(np.searchsorted(g.cum, t, side="right")) - 1, len(g.points) - 2)
        a, b = g.points[i].key, g.points[i + 1].key
        return self._ref(self._interp(a, b, t - g.cum[i], g.cum[i + 1] - g.cum[i]))

    def _subpath(self, g, t0, t1):
        from .base import point_at
        return self.geodesic(point_at(g, t0), point_at(g, t1))

    def parse_point(self, text):
        return self.point(*parse_floats(text, self._n_chart))

    def format_point(self, x):
        return format_floats(self.chart(x))

    def _dist(self, a, b) -> float:
        raise NotImplementedError

    def _interp(self, a, b, s, length):
        raise NotImplementedError


# plane ----------------------------------------------------------------------------

class PlaneSpace(AnalyticSpace):
    """Euclidean plane; ``extent`` bounds random sampling only."""

    kind = "plane"
    _n_chart = 2

    def __init__(self, extent: float = 1.0, h: float = 1e-3):
        super().__init__(h, {"extent": extent})
        self.extent = float(extent)

    def point(self, x: float, y: float) -> PointRef:
        return self._ref((x, y))

    def chart(self, p):
        return p.key

    def _dist(self, a, b):
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def _interp(self, a, b, s, length):
        f = s / length
        return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))

    def sample_points(self, n, rng):
        return self._disk(0.0, 0.0, self.extent, n, rng)

    def sample_ball(self, o, radius, n, rng):
        self._check(o)
        return self._disk(o.key[0], o.key[1], radius, n, rng)

    def _disk(self, cx, cy, radius, n, rng):
        rho = radius * np.sqrt(rng.random(n))
        ang = TWO_PI * rng.random(n)
        return [self.point(cx + r * math.cos(a), cy + r * math.sin(a)) for r, a in zip(rho, ang)]


# sphere ---------------------------------------------------------------------------

def _frame(n):
    """Two unit vectors completing the unit vector ``n`` to an orthonormal frame."""
    n = np.asarray(n, dtype=float)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    e1 = axis - (axis @ n) * n
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n, e1)


class SphereSpace(AnalyticSpace):
    """Round sphere of radius R in R^3 (curvature 1/R^2).

    Chart coordinates for parsing/printing are (polar angle, azimuth).
    """

    kind = "sphere"
    _n_chart = 2

    def __init__(self, radius: float = 1.0, h: float = 1e-3):
        if not radius > 0:
            raise MalformedInput("sphere radius must be positive")
        super().__init__(h, {"R": radius})
        self.R = float(radius)

    @property
    def curvature(self) -> float:
        return 1.0 / self.R ** 2

    def point(self, polar: float, azimuth: float) -> PointRef:
        s = math.sin(polar)
        return self.point_xyz((s * math.cos(azimuth), s * math.sin(azimuth), math.cos(polar)))

    def point_xyz(self, xyz) -> PointRef:
        v = np.asarray(xyz, dtype=float)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise MalformedInput("zero vector is not a sphere point")
        return self._ref(self.R * v / nrm)

    def chart(self, p):
        x, y, z = p.key
        return (math.atan2(math.hypot(x, y), z), math.atan2(y, x))

    def _dist(self, a, b):
        d = math.dist(a, b)
        s = math.hypot(a[0] + b[0], a[1] + b[1], a[2] + b[2])
        return 2.0 * self.R * math.atan2(d, s)

    def _interp(self, a, b, s, length):
        R = self.R
        av, bv = np.array(a) / R, np.array(b) / R
        u = bv - (av @ bv) * av
        nu = np.linalg.norm(u)
        if nu < 1e-15:
            u = _frame(av)[0]
        else:
            u /= nu
        ang = s / R
        return tuple(R * (math.cos(ang) * av + math.sin(ang) * u))

    def sample_points(self, n, rng):
        v = rng.normal(size=(n, 3))
        return [self.point_xyz(row) for row in v]

    def sample_ball(self, o, radius, n, rng):
        self._check(o)
        nvec = np.array(o.key) / self.R
        e1, e2 = _frame(nvec)
        cmin = math.cos(min(radius / self.R, math.pi))
        ca = cmin + (1.0 - cmin) * rng.random(n)
        sa = np.sqrt(np.maximum(0.0, 1.0 - ca ** 2))
        psi = TWO_PI * rng.random(n)
        pts = (ca[:, None] * nvec + sa[:, None] * (np.cos(psi)[:, None] * e1
                                                   + np.sin(psi)[:, None] * e2))
        return [self._ref(self.R * row) for row in pts]


# hyperbolic plane -------------------------------------------------------------------

def _mink(u, v):
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]


class HyperbolicSpace(AnalyticSpace):
    """Hyperbolic plane of curvature -1/R^2, hyperboloid model.

    Points satisfy x^2 + y^2 - t^2 = -R^2, t > 0.  Chart coordinates are
    geodesic polar coordinates (distance, heading) about (0, 0, R).
    ``extent`` bounds random sampling only.
    """

    kind = "hyperbolic"
    _n_chart = 2

    def __init__(self, extent: float = 2.0, radius: float = 1.0, h: float = 1e-3):
        if not radius > 0:
            raise MalformedInput("curvature radius must be positive")
        super().__init__(h, {"extent": extent, "R": radius})
        self.extent = float(extent)
        self.R = float(radius)

    @property
    def curvature(self) -> float:
        return -1.0 / self.R ** 2

    def point(self, dist: float, heading: float) -> PointRef:
        rho = self.R * math.sinh(dist / self.R)
        return self._ref((rho * math.cos(heading), rho * math.sin(heading),
                          self.R * math.cosh(dist / self.R)))

    def _lift(self, x, y) -> PointRef:
        return self._ref((x, y, math.sqrt(self.R ** 2 + x * x + y * y)))

    def chart(self, p):
        x, y, t = p.key
        return (self.R * math.asinh(math.hypot(x, y) / self.R), math.atan2(y, x))

    def _dist(self, a, b):
        d = (a[0] - b[0], a[1] - b[1], a[2] - b[2])
        m = d[0] * d[0] + d[1] * d[1] - d[2] * d[2]
        return 2.0 * self.R * math.asinh(math.sqrt(max(m, 0.0)) / (2.0 * self.R))

    def _interp(self, a, b, s, length):
        R = self.R
        ch = -_mink(a, b) / R ** 2
        u = [b[i] - ch * a[i] for i in range(3)]
        nu = math.sqrt(max(_mink(u, u), 0.0))
        ang = s / R
        c, sh = math.cosh(ang), math.sinh(ang)
        x = c * a[0] + R * sh * u[0] / nu
        y = c * a[1] + R * sh * u[1] / nu
        return (x, y, math.sqrt(R * R + x * x + y * y))

    def _boost(self, o):
        """Isometry (as a function) taking the chart origin to ``o``."""
        R = self.R
        x, y, t = o
        beta = math.acosh(max(t / R, 1.0))
        phi = math.atan2(y, x)
        cb, sb, cp, sp = math.cosh(beta), math.sinh(beta), math.cos(phi), math.sin(phi)

        def apply(px, py, pt):
            # rotate by -phi, boost along x, rotate back
            u = cp * px + sp * py
            v = -sp * px + cp * py
            u, pt = cb * u + sb * pt, sb * u + cb * pt
            return (cp * u - sp * v, sp * u + cp * v)

        return apply

    def _disk_around(self, o, radius, n, rng):
        R = self.R
        cmax = math.cosh(radius / R)
        ch = 1.0 + (cmax - 1.0) * rng.random(n)
        rho = R * np.sqrt(np.maximum(ch ** 2 - 1.0, 0.0))
        psi = TWO_PI * rng.random(n)
        move = self._boost(o)
        out = []
        for r_, c_, a_ in zip(rho, ch, psi):
            x, y = move(r_ * math.cos(a_), r_ * math.sin(a_), R * c_)
            out.append(self._lift(x, y))
        return out

    def sample_points(self, n, rng):
        return self._disk_around((0.0, 0.0, self.R), self.extent, n, rng)

    def sample_ball(self, o, radius, n, rng):
        self._check(o)
        return self._disk_around(o.key, radius, n, rng)


# flat cone -------------------------------------------------------------------------

class ConeSpace(AnalyticSpace):
    """Flat cone of total angle ``theta``: a planar sector with its rays glued.

    Points are (rho, phi) with 0 <= phi < theta; the apex is (0, 0).  A pair
    at angular separation D = min(|dphi|, theta - |dphi|) is joined by the
    unrolled chord when D < pi and through the apex otherwise.
    """

    kind = "cone"
    _n_chart = 2

    def __init__(self, theta: float, h: float = 0.01, extent: float = 2.0):
        if not (theta > 0 and math.isfinite(theta)):
            raise MalformedInput("cone angle must be positive")
        super().__init__(h, {"angle": theta, "extent": extent})
        self.theta = float(theta)
        self.extent = float(extent)
        self.apex = self._ref((0.0, 0.0))

    def point(self, rho: float, phi: float) -> PointRef:
        if rho < 0:
            raise MalformedInput("cone radius must be >= 0")
        if rho == 0:
            return self.apex
        phi = math.fmod(phi, self.theta)
        if phi < 0:
            phi += self.theta
        if phi >= self.theta:
            phi = 0.0
        return self._ref((rho, phi))

    def chart(self, p):
        return p.key

    def _signed_sep(self, a, b):
        """Angular offset from a to b along the shorter way round."""
        fwd = (b[1] - a[1]) % self.theta
        back = self.theta - fwd
        return fwd if fwd <= back else -back

    def _dist(self, a, b):
        d = abs(a[1] - b[1])
        d = min(d, self.theta - d)
        if d < math.pi:
            return math.sqrt((a[0] - b[0]) ** 2 + 4.0 * a[0] * b[0] * math.sin(0.5 * d) ** 2)
        return a[0] + b[0]

    def _route(self, a, b):
        if a == b:
            return [a]
        if a[0] == 0.0 or b[0] == 0.0 or abs(self._signed_sep(a, b)) < math.pi:
            return [a, b]
        return [a, (0.0, 0.0), b]

    def _interp(self, a, b, s, length):
        f = s / length
        if a[0] == 0.0:
            return (f * b[0], b[1])
        sep = self._signed_sep(a, b)
        bx, by = b[0] * math.cos(sep), b[0] * math.sin(sep)
        x = a[0] + f * (bx - a[0])
        y = f * by
        rho = math.hypot(x, y)
        if rho == 0.0:
            return (0.0, 0.0)
        phi = (a[1] + math.atan2(y, x)) % self.theta
        return (rho, phi)

    def _ref(self, key):
        if key[0] == 0.0:
            key = (0.0, 0.0)
        return super()._ref(key)

    def unrolled(self, p: PointRef, around: PointRef | None = None) -> np.ndarray:
        """Planar position of ``p`` with the sector unrolled about ``around``'s ray
        (about phi = 0 when ``around`` is None)."""
        if around is None or around.key[0] == 0.0:
            ang = p.key[1]
        else:
            ang = self._signed_sep(around.key, p.key)
        return np.array([p.key[0] * math.cos(ang), p.key[0] * math.sin(ang)])

    def sample_points(self, n, rng):
        rho = self.extent * np.sqrt(rng.random(n))
        phi = self.theta * rng.random(n)
        return [self.point(r, f) for r, f in zip(rho, phi)]

    def sample_ball(self, o, radius, n, rng):
        self._check(o)
        rho_o, phi_o = o.key
        out: list[PointRef] = []
        if radius <= rho_o and self.theta >= math.pi:
            # the ball is a Euclidean disk in the sector unrolled about o
            rr = radius * np.sqrt(rng.random(n))
            aa = TWO_PI * rng.random(n)
            for r_, a_ in zip(rr, aa):
                x, y = rho_o + r_ * math.cos(a_), r_ * math.sin(a_)
                out.append(self.point(math.hypot(x, y), phi_o + math.atan2(y, x)))
            return out
        outer = rho_o + radius
        while len(out) < n:
            m = 4 * (n - len(out)) + 8
            rho = outer * np.sqrt(rng.random(m))
            phi = self.theta * rng.random(m)
            for r_, f_ in zip(rho, phi):
                cand = self.point(r_, f_)
                if self.distance(o, cand) <= radius:
                    out.append(cand)
                    if len(out) == n:
                        break
        return out
