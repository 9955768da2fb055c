from __future__ import annotations

import math

import pytest

from curvcomp.metricspace import ConeSpace, build_sphere_mesh


@pytest.fixture(scope="session")
def icosphere():
    """Unit icosphere graph, level 4 (2562 vertices)."""
    return build_sphere_mesh(1.0, level=4)


@pytest.fixture
def cone3():
    return ConeSpace(3 * math.pi, h=0.01)


@pytest.fixture
def apex_triangle(cone3):
    """Points of the 3pi cone whose triangle encloses the apex."""
    return (cone3.point(1.0, 0.0), cone3.point(1.0, 0.8 * math.pi),
            cone3.point(1.0, 2.2 * math.pi))


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
