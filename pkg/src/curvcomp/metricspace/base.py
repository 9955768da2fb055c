"""Common interface of geodesic-space backends."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from ..errors import RangeError, UnknownPoint

_owner_ids = itertools.count(1)


@dataclass(frozen=True)
class PointRef:
    """A point of one specific space.

    ``key`` is the backend identifier (a vertex index or a coordinate tuple);
    ``owner`` ties the reference to the space that issued it.
    """

    key: Hashable
    owner: int = field(repr=False)
    label: str | None = field(default=None, compare=False)

    def __str__(self):
        return self.label if self.label is not None else str(self.key)


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    params: dict
    h: float  # typical point spacing / declared resolution
    eta: float  # distance error bound


@dataclass(frozen=True, eq=False)
class GeodesicPolyline:
    """A shortest path as an arclength-parameterized point sequence.

    For analytic backends consecutive points are joined by exact model
    geodesic segments; for graphs they are edges.
    """

    space: "GeodesicSpace" = field(repr=False)
    points: tuple[PointRef, ...]
    cum: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cum[-1])

    @property
    def start(self) -> PointRef:
        return self.points[0]

    @property
    def end(self) -> PointRef:
        return self.points[-1]

    def reversed(self) -> "GeodesicPolyline":
        cum = self.total - self.cum[::-1]
        cum[0] = 0.0
        return GeodesicPolyline(self.space, self.points[::-1], cum)

    def sub(self, t0: float, t1: float) -> "GeodesicPolyline":
        """Sub-path between arclengths ``t0`` and ``t1`` (reversed if t1 < t0)."""
        return self.space._subpath(self, t0, t1)


def make_polyline(space, points: Sequence[PointRef], steps: Sequence[float]) -> GeodesicPolyline:
    cum = np.concatenate([[0.0], np.cumsum(np.asarray(steps, dtype=float))])
    cum.setflags(write=False)
    return GeodesicPolyline(space, tuple(points), cum)


def point_at(g: GeodesicPolyline, t: float) -> PointRef:
    """Point of ``g`` at arclength ``t``."""
    slack = 1e-12 * max(1.0, g.total)
    if t < -slack or t > g.total + slack:
        raise RangeError(f"t={t} outside [0, {g.total}]")
    t = min(max(t, 0.0), g.total)
    if t == 0.0:
        return g.start
    if t == g.total:
        return g.end
    return g.space._point_on(g, t)


class GeodesicSpace:
    """Base class; subclasses provide the metric, geodesics and sampling."""

    kind = "abstract"
    analytic = True

    def __init__(self, h: float, eta: float, params: dict | None = None):
        self.uid = next(_owner_ids)
        self.descriptor = SpaceDescriptor(self.kind, dict(params or {}), float(h), float(eta))

    @property
    def h(self) -> float:
        return self.descriptor.h

    @property
    def eta(self) -> float:
        return self.descriptor.eta

    def _check(self, *pts: PointRef) -> None:
        for x in pts:
            if not isinstance(x, PointRef) or x.owner != self.uid:
                raise UnknownPoint(x)

    # metric interface
    def distance(self, x: PointRef, y: PointRef) -> float:
        raise NotImplementedError

    def geodesic(self, x: PointRef, y: PointRef) -> GeodesicPolyline:
        raise NotImplementedError

    def _point_on(self, g: GeodesicPolyline, t: float) -> PointRef:
        raise NotImplementedError

    def _subpath(self, g: GeodesicPolyline, t0: float, t1: float) -> GeodesicPolyline:
        raise NotImplementedError

    # sampling interface
    def sample_points(self, n: int, rng: np.random.Generator) -> list[PointRef]:
        raise NotImplementedError

    def sample_ball(self, o: PointRef, radius: float, n: int,
                    rng: np.random.Generator) -> list[PointRef]:
        raise NotImplementedError

    # textual ids
    def parse_point(self, text: str) -> PointRef:
        raise NotImplementedError

    def format_point(self, x: PointRef) -> str:
        return str(x)

    def coords(self, x: PointRef) -> Any:
        """Report-only coordinates of a point."""
        return x.key

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor.params}, h={self.h:g}, eta={self.eta:g})"


def parse_floats(text: str, n: int) -> tuple[float, ...]:
    from ..errors import MalformedInput

    parts = [s.strip() for s in text.split(",")]
    if len(parts) != n:
        raise MalformedInput(f"expected {n} comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(s) for s in parts)
    except ValueError as exc:
        raise MalformedInput(f"bad number in {text!r}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise MalformedInput(f"non-finite coordinate in {text!r}")
    return vals


def format_floats(vals) -> str:
    return ",".join(repr(float(v)) for v in vals)
