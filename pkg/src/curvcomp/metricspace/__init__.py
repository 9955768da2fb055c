"""Geodesic-space backends behind one interface.

Every backend answers ``distance``, ``geodesic`` and (through
:func:`point_at`) arclength queries, and declares a resolution ``h`` and a
distance error bound ``eta`` in its :class:`SpaceDescriptor`.
"""

from .analytic import ConeSpace, HyperbolicSpace, PlaneSpace, SphereSpace
from .base import GeodesicPolyline, GeodesicSpace, PointRef, SpaceDescriptor, point_at
from .graph import (GraphSpace, build_graph_space, build_plane_grid, build_sphere_mesh,
                    icosphere)


def distance(space: GeodesicSpace, x: PointRef, y: PointRef) -> float:
    return space.distance(x, y)


def geodesic(space: GeodesicSpace, x: PointRef, y: PointRef) -> GeodesicPolyline:
    return space.geodesic(x, y)


def build_sphere(radius: float = 1.0, level: int | None = None, h: float = 1e-3):
    """Analytic sphere, or the icosphere edge graph when ``level`` is given."""
    if level is None:
        return SphereSpace(radius, h=h)
    return build_sphere_mesh(radius, level)


def build_cone(angle: float, res: float = 0.01, extent: float = 2.0) -> ConeSpace:
    """Analytic flat cone of total angle ``angle`` with declared resolution ``res``."""
    return ConeSpace(angle, h=res, extent=extent)


def build_plane_patch(extent: float = 1.0, resolution: float | None = None):
    """Analytic plane, or an 8-neighbour grid graph when ``resolution`` is given."""
    if resolution is None:
        return PlaneSpace(extent)
    return build_plane_grid(extent, resolution)


def build_hyperbolic_patch(extent: float = 2.0, radius: float = 1.0, h: float = 1e-3):
    return HyperbolicSpace(extent, radius, h=h)


__all__ = [
    "ConeSpace", "GeodesicPolyline", "GeodesicSpace", "GraphSpace", "HyperbolicSpace",
    "PlaneSpace", "PointRef", "SpaceDescriptor", "SphereSpace", "build_cone",
    "build_graph_space", "build_hyperbolic_patch", "build_plane_grid", "build_plane_patch",
    "build_sphere", "build_sphere_mesh", "distance", "geodesic", "icosphere", "point_at",
]
