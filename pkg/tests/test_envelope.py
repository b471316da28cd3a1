import numpy as np
import pytest

from conftest import vertex_death_instance, wedge
from fatpoly.envelope import (ExpandingPolytope, distance_to_polytope, envelope_region, find_witness,
                              hausdorff_distance, hausdorff_speed_profile, membership_along_line,
                              no_reenter_check, project_batch, project_onto_polytope,
                              verify_inner_identity, verify_margin_in_envelope)
from fatpoly.exceptions import ProjectionError
from fatpoly.geometry import Hyperplane, Polytope, RegionTag, polytope_min_value, shift
from fatpoly.sampling import make_rng, sample_unit_ball, sample_unit_sphere


def random_polytope(d, t, rng):
    return Polytope.from_arrays(-sample_unit_sphere(d, rng, size=t), rng.uniform(0.3, 0.9, t))


def test_projection_trivial_cases(square):
    r = project_onto_polytope(square, [0.2, 0.3])
    assert r.distance == 0 and np.array_equal(r.point, [0.2, 0.3]) and r.converged
    half = Polytope([Hyperplane([-1, 0], 0)], dim=2)
    r = project_onto_polytope(half, [1, 0])
    assert np.allclose(r.point, 0) and r.distance == pytest.approx(1)


def test_projection_wedge_matches_brute_force():
    W = wedge(20, [0, 0], [1, 0])
    x = np.array([-0.7, 0.3])
    r = project_onto_polytope(W, x)
    s = np.linspace(0, 5, 500_000)
    a = np.deg2rad(20)
    B = np.vstack([np.c_[s * np.cos(a), s * np.sin(a)], np.c_[s * np.cos(a), -s * np.sin(a)]])
    assert abs(r.distance - np.min(np.linalg.norm(B - x, axis=1))) <= 1e-4


def test_projection_certificates():
    rng = make_rng(0)
    P = random_polytope(4, 6, rng)
    X = 2.0 * sample_unit_ball(4, rng, size=50)
    Z, dist, _, conv = project_batch(P, X)
    assert conv.all() and np.all(polytope_min_value(P, Z) >= -1e-9)
    Z2, _, _, _ = project_batch(P, Z)
    assert np.max(np.linalg.norm(Z2 - Z, axis=1)) <= 1e-9
    Q = sample_unit_ball(4, rng, size=20_000)
    Q = Q[P.contains(Q)][:100]
    for x, z in zip(X, Z):
        assert np.max((Q - z) @ (x - z)) <= 1e-7


def test_projection_nonconvergence_raises():
    # empty intersection: x >= 1 and x <= -1
    P = Polytope([Hyperplane([1.0], -1.0), Hyperplane([-1.0], -1.0)], dim=1)
    with pytest.raises(ProjectionError) as e:
        project_onto_polytope(P, [0.0], max_sweeps=50)
    assert e.value.best is not None and e.value.sweeps == 50


def test_envelope_region(square):
    assert envelope_region(square, 0.2, [1.1, 0]) == RegionTag.OUTER_ENVELOPE
    assert envelope_region(square, 0.2, [1.1, 1.1]) == RegionTag.OUTER_ENVELOPE
    assert envelope_region(square, 0.2, [1.15, 1.15]) == RegionTag.OUTSIDE  # corner distance 0.212
    assert envelope_region(square, 0.2, [0, 0]) == RegionTag.INSIDE
    assert envelope_region(square, 0.2, [0.9, 0]) == RegionTag.INNER_ENVELOPE
    tags = envelope_region(square, 0.2, np.array([[0, 0], [1.1, 0]]))
    assert list(tags) == [RegionTag.INSIDE, RegionTag.OUTER_ENVELOPE]


def test_inner_identity(square):
    assert verify_inner_identity(square, 0.5, 10_000, make_rng(1)) == 0
    half = Polytope([Hyperplane([0.6, -0.8], 0.1)], dim=2)
    assert verify_inner_identity(half, 0.3, 5_000, make_rng(2)) == 0
    assert verify_inner_identity(Polytope([], dim=3), 0.3, 100, make_rng(3)) == 0
    P = random_polytope(5, 8, make_rng(4))
    assert verify_inner_identity(P, 0.2, 5_000, make_rng(5)) == 0


def test_margin_in_envelope_scaled_square():
    P = Polytope.cube(2, 0.6)
    assert verify_margin_in_envelope(P, 0.2, 100_000, make_rng(6)) == 0


def test_margin_in_envelope_needs_witness():
    tiny = Polytope.cube(2, 0.05)
    with pytest.raises(ValueError):
        verify_margin_in_envelope(tiny, 0.2, 100, make_rng(7))
    with pytest.raises(ValueError):
        verify_margin_in_envelope(Polytope.cube(2, 0.6), 1.5, 100, make_rng(7))


def test_margin_band_too_thin_is_vacuous():
    P = Polytope.cube(2, 0.6)
    assert verify_margin_in_envelope(P, 1e-9, 100, make_rng(8), max_draws=10_000) == 0


def test_thin_wedge_escape_outside_ball_only():
    gamma = 0.2
    W = wedge(5, [1.5, 0], [-1, 0])  # 10 degree opening, apex right of the ball
    q = find_witness(W, gamma, make_rng(9))
    assert q is not None and np.linalg.norm(q) <= 1 + 1e-9 and polytope_min_value(W, q) >= gamma
    far = np.array([2.5, 0.0])
    assert -gamma <= polytope_min_value(W, far) < 0
    assert project_onto_polytope(W, far).distance > gamma
    assert verify_margin_in_envelope(W, gamma, 20_000, make_rng(10), witness=q) == 0


def test_expanding_polytope(square):
    Q = ExpandingPolytope(square, [1, 0, 2, 0])
    P = Q.at(0.5)
    assert np.allclose(P.b, square.b + np.array([0.5, 0, 1, 0]))
    with pytest.raises(ValueError):
        ExpandingPolytope(square, [1, 1])
    with pytest.raises(ValueError):
        ExpandingPolytope(square, [1, 1, 1, -1])


def test_no_reenter(square):
    static = ExpandingPolytope(square, np.zeros(4))
    times = np.linspace(-3, 3, 601)
    inside = membership_along_line(static, [0, 0.5], [1, 0], times)
    assert inside.any() and not inside.all()
    assert no_reenter_check(static, [0, 0.5], [1, 0], times)
    assert no_reenter_check(ExpandingPolytope.unit(square), [0, 0], [0, 0], times[times >= 0])
    with pytest.raises(ValueError):
        no_reenter_check(static, [0, 0], [1, 0], [0, 0])


def test_hausdorff_examples(square):
    h = hausdorff_distance(square, shift(square, 0.5), 10_000, make_rng(11))
    assert abs(h.distance - np.sqrt(0.5)) <= 0.02 and h.samples >= 10_000
    half = Polytope([Hyperplane([1, 0], 0)], dim=2)
    assert hausdorff_distance(half, shift(half, 0.3), 500, make_rng(12), box=3).distance == \
        pytest.approx(0.3, abs=1e-6)
    assert hausdorff_distance(square, square, 500, make_rng(13)).distance == 0
    with pytest.raises(ValueError):
        hausdorff_distance(half, shift(half, 0.3), 100, make_rng(14), interior=[1.0, 0.0])


def test_speed_profiles(square):
    sq = hausdorff_speed_profile(ExpandingPolytope.unit(square), [0, 0.5, 1.0], 0.01, 2000, make_rng(15))
    assert np.all(np.abs(sq - np.sqrt(2)) <= 0.05)
    half = Polytope([Hyperplane([1, 0], 0)], dim=2)
    hp = hausdorff_speed_profile(ExpandingPolytope(half, [0.7]), [0, 0.3], 0.01, 200, make_rng(16), box=3)
    assert np.allclose(hp, 0.7, atol=1e-6)


def test_vertex_death_profile_nonincreasing():
    Q, tau_star = vertex_death_instance()
    times = np.arange(0.0, 0.41, 0.05)
    prof = hausdorff_speed_profile(Q, times, 0.01, 3000, make_rng(17))
    assert np.all(np.diff(prof) <= 0.05)
    assert prof[times < tau_star - 0.01].min() > prof[times > tau_star + 0.01].max() + 0.5
