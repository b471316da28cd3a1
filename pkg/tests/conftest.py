import numpy as np
import pytest

from fatpoly.geometry import Hyperplane, Polytope


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte-Carlo checks")


@pytest.fixture
def square():
    return Polytope.cube(2, 1.0)


def wedge(half_angle_deg, apex, axis):
    """2D wedge with the given apex, opening along unit ``axis``."""
    a = np.deg2rad(half_angle_deg)
    ax = np.asarray(axis, float) / np.linalg.norm(axis)
    perp = np.array([-ax[1], ax[0]])
    apex = np.asarray(apex, float)
    hs = []
    for sgn in (1, -1):
        n = np.sin(a) * ax - sgn * np.cos(a) * perp
        hs.append(Hyperplane(n, -n @ apex))
    return Polytope(hs, dim=2)


def vertex_death_instance(c0=0.3, cap_speed=0.5, sides=16):
    """Expanding 2D polytope whose sharp apex is cut off by a slower cap facet.

    A 60-degree wedge opening toward +x (apex at the origin, speed 1 sides),
    a cap facet x >= -c0 moving at ``cap_speed``, and a regular polygon of
    inradius 1 around (0.5, 0) bounding the rest. The apex moves at speed 2
    and meets the cap at tau* = c0 / (2 - cap_speed).
    """
    from fatpoly.envelope import ExpandingPolytope

    a = np.deg2rad(30)
    hs = [Hyperplane([np.sin(a), -np.cos(a)], 0.0), Hyperplane([np.sin(a), np.cos(a)], 0.0),
          Hyperplane([1.0, 0.0], c0)]
    speeds = [1.0, 1.0, cap_speed]
    center = np.array([0.5, 0.0])
    for k in range(sides):
        u = np.array([np.cos(2 * np.pi * k / sides), np.sin(2 * np.pi * k / sides)])
        hs.append(Hyperplane(-u, 1.0 + u @ center))
        speeds.append(1.0)
    return ExpandingPolytope(Polytope(hs, dim=2), speeds), c0 / (2 - cap_speed)
