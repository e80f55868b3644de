import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lionman.errors import DegenerateGeodesicError, InvalidInputError, InvalidStateError
from lionman.spaces import (
    Ball,
    Box,
    Euclidean,
    Lp,
    Octant,
    Sphere2,
    SphericalCap,
    clamp_move,
    dist_to_segment,
    distance,
    domain_contains,
    domain_from_dict,
    interpolate,
    parse_domain,
    parse_space,
    sample_point,
    space_from_dict,
)

from oracles import dense_dist_to_segment

E2 = Euclidean(2)
L3 = Lp(2, 3)
S2 = Sphere2()
CAP = SphericalCap(S2, [0, 0, 1], math.pi / 8)

coord = st.floats(min_value=-1, max_value=1)
planar = st.tuples(coord, coord).map(np.array)
unit = st.floats(min_value=0, max_value=1)


def cap_points(rng, n):
    return CAP.sample(rng, n)


def test_distance_examples():
    assert distance(E2, [0, 0], [3, 4]) == pytest.approx(5.0, abs=1e-15)
    assert distance(S2, [1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2, abs=1e-15)
    assert distance(L3, [0, 0], [1, 1]) == pytest.approx(2 ** (1 / 3), abs=1e-15)


def test_distance_errors():
    with pytest.raises(InvalidInputError):
        distance(E2, [0, 0, 0], [1, 1])
    with pytest.raises(InvalidInputError):
        distance(S2, [1, 0, 0], [0, 2, 0])


@pytest.mark.parametrize("p", [1.0, 0.5, math.inf])
def test_lp_rejects_non_uniquely_geodesic(p):
    with pytest.raises(InvalidInputError):
        Lp(2, p)


def test_interpolate_examples():
    x = np.array([0.3, -0.2])
    np.testing.assert_array_equal(interpolate(E2, x, [1, 1], 0), x)
    np.testing.assert_allclose(interpolate(E2, [0, 0], [2, 0], 0.25), [0.5, 0])
    m = interpolate(S2, [1, 0, 0], [0, 1, 0], 0.5)
    np.testing.assert_allclose(m, [2**-0.5, 2**-0.5, 0], atol=1e-15)
    assert distance(S2, m, [1, 0, 0]) == pytest.approx(math.pi / 4, abs=1e-12)


def test_interpolate_errors():
    with pytest.raises(InvalidInputError):
        interpolate(E2, [0, 0], [1, 0], 1.5)
    with pytest.raises(DegenerateGeodesicError):
        interpolate(S2, [0, 0, 1], [0, 0, -1], 0.5)


@pytest.mark.parametrize("space", [E2, L3, Euclidean(3), Lp(3, 1.5)])
def test_metric_axioms(space, rng):
    x, y, z = (rng.uniform(-1, 1, (2000, space.dim)) for _ in range(3))
    dxy, dyz, dxz = space.distance(x, y), space.distance(y, z), space.distance(x, z)
    np.testing.assert_allclose(dxy, space.distance(y, x), rtol=1e-15)
    assert np.all(dxz <= dxy + dyz + 1e-9)
    assert np.all(space.distance(x, x) == 0)


def test_sphere_metric_axioms(rng):
    x, y, z = (cap_points(rng, 2000) for _ in range(3))
    assert np.all(S2.distance(x, z) <= S2.distance(x, y) + S2.distance(y, z) + 1e-9)


@pytest.mark.parametrize("space, sampler", [
    (E2, lambda rng, n: rng.uniform(-1, 1, (n, 2))),
    (L3, lambda rng, n: rng.uniform(-1, 1, (n, 2))),
    (S2, cap_points),
])
def test_geodesic_parametrization(space, sampler, rng):
    x, y = sampler(rng, 500), sampler(rng, 500)
    s, s2 = rng.uniform(0, 1, 500), rng.uniform(0, 1, 500)
    gap = space.distance(space.interpolate(x, y, s), space.interpolate(x, y, s2))
    assert np.all(np.abs(gap - np.abs(s - s2) * space.distance(x, y)) <= 1e-8)


@pytest.mark.parametrize("space, sampler", [
    (E2, lambda rng, n: rng.uniform(-1, 1, (n, 2))),
    (L3, lambda rng, n: rng.uniform(-1, 1, (n, 2))),
    (S2, cap_points),
])
def test_distance_is_convex_along_geodesics(space, sampler, rng):
    x, y, z = sampler(rng, 2000), sampler(rng, 2000), sampler(rng, 2000)
    t = rng.uniform(0, 1, 2000)
    lhs = space.distance(z, space.interpolate(x, y, t))
    rhs = (1 - t) * space.distance(z, x) + t * space.distance(z, y)
    assert np.all(lhs <= rhs + 1e-9)


def test_sphere_points_stay_on_sphere(rng):
    x, y = cap_points(rng, 1000), cap_points(rng, 1000)
    m = S2.interpolate(x, y, rng.uniform(0, 1, 1000))
    assert np.all(np.abs(np.sum(m * m, axis=1) - 1) <= 1e-12)


@given(planar, planar)
def test_midpoint_is_the_unique_equidistant_point(x, y):
    m = E2.midpoint(x, y)
    d = E2.distance(x, y)
    assert E2.distance(m, x) == pytest.approx(d / 2, abs=1e-12)
    assert E2.distance(m, y) == pytest.approx(d / 2, abs=1e-12)


def test_dist_to_segment_examples():
    assert dist_to_segment(E2, [1, 1], [0, 0], [2, 0]) == pytest.approx(1.0, abs=1e-12)
    x, y = np.array([0.1, 0.4]), np.array([-0.7, 0.2])
    assert dist_to_segment(L3, L3.interpolate(x, y, 0.3), x, y) == pytest.approx(0.0, abs=1e-12)


@given(planar, planar, planar)
def test_dist_to_segment_matches_projection(z, x, y):
    d = x - y
    denom = float(d @ d)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((x - z) @ d) / denom))
    expected = np.linalg.norm(z - (x + t * (y - x)))
    got = dist_to_segment(E2, z, x, y)
    assert got == pytest.approx(expected, abs=1e-8)
    assert got <= min(E2.distance(z, x), E2.distance(z, y)) + 1e-15


@pytest.mark.parametrize("seed", range(4))
def test_dist_to_segment_matches_dense_grid_in_l3(seed):
    rng = np.random.default_rng(seed)
    z, x, y = rng.uniform(-1, 1, (3, 2))
    assert dist_to_segment(L3, z, x, y) == pytest.approx(dense_dist_to_segment(L3, z, x, y), abs=1e-6)


def test_dist_to_segment_on_sphere_matches_dense_grid(rng):
    z, x, y = cap_points(rng, 3)
    got = dist_to_segment(S2, z, x, y)
    assert got == pytest.approx(dense_dist_to_segment(S2, z, x, y, n=200_001), abs=1e-8)


def test_dist_to_segment_is_vectorized(rng):
    z, x, y = (rng.uniform(-1, 1, (50, 2)) for _ in range(3))
    batch = E2.dist_to_segment(z, x, y)
    single = [E2.dist_to_segment(z[i], x[i], y[i]) for i in range(50)]
    np.testing.assert_allclose(batch, single, atol=1e-12)


def test_domain_contains_examples():
    ball = Ball(E2, [0, 0], 1)
    assert domain_contains(ball, [0, 0])
    assert not domain_contains(ball, [1 + 1e-3, 0])
    assert domain_contains(SphericalCap(S2, [0, 0, 1], math.pi / 6), [0, 0, 1])


@pytest.mark.parametrize("domain, b", [
    (Ball(E2, [0, 0], 1), 2.0),
    (Ball(L3, [0.5, 0.5], 0.25), 0.5),
    (Box(E2, [0, 0], [3, 4]), 5.0),
    (Box(L3, [-1, -1], [1, 1]), 2 * 2 ** (1 / 3)),
    (SphericalCap(S2, [0, 0, 1], math.pi / 8), math.pi / 4),
    (Octant(S2), math.pi / 2),
])
def test_diameter_bounds(domain, b):
    assert domain.diameter_bound == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("domain", [
    Ball(E2, [0.2, -0.1], 0.7),
    Box(L3, [0, 0], [1, 2]),
    SphericalCap(S2, [0, 0, 1], math.pi / 4),
])
def test_domains_are_convex_and_sampled_inside(domain, rng):
    x, y = domain.sample(rng, 3000), domain.sample(rng, 3000)
    assert np.all(domain.contains(x))
    m = domain.space.interpolate(x, y, rng.uniform(0, 1, 3000))
    assert np.all(domain.contains(m))
    assert np.max(domain.space.distance(x, y)) <= domain.diameter_bound + 1e-12


def test_sample_point_is_deterministic_and_centered():
    ball = Ball(E2, [0, 0], 1)
    a = sample_point(ball, np.random.default_rng(42))
    b = sample_point(ball, np.random.default_rng(42))
    np.testing.assert_array_equal(a, b)
    pts = ball.sample(np.random.default_rng(0), 10_000)
    assert np.all(ball.contains(pts))
    assert np.linalg.norm(pts.mean(axis=0)) < 0.05


def test_domain_constructors_validate():
    with pytest.raises(InvalidInputError):
        Ball(S2, [0, 0, 1], 0.1)
    with pytest.raises(InvalidInputError):
        Box(E2, [0, 0], [0, 1])
    with pytest.raises(InvalidInputError):
        SphericalCap(S2, [0, 0, 1], 1.0)
    with pytest.raises(InvalidInputError):
        Octant(E2)
    assert not Octant().game_domain


def test_clamp_move_examples():
    ball = Ball(E2, [0, 0], 1)
    np.testing.assert_allclose(clamp_move(ball, [0.9, 0], [2, 0], 0.5), [1, 0], atol=1e-12)
    np.testing.assert_array_equal(clamp_move(ball, [0.1, 0.2], [0.2, 0.2], 0.5), [0.2, 0.2])
    np.testing.assert_array_equal(clamp_move(ball, [0.1, 0.2], [0.1, 0.2], 0.5), [0.1, 0.2])
    with pytest.raises(InvalidStateError):
        clamp_move(ball, [2, 0], [0, 0], 0.5)


@pytest.mark.parametrize("domain", [
    Ball(E2, [0, 0], 1),
    Box(L3, [-1, -1], [1, 1]),
    SphericalCap(S2, [0, 0, 1], math.pi / 8),
])
def test_clamp_move_keeps_both_constraints(domain, rng):
    space = domain.space
    starts = domain.sample(rng, 300)
    for start in starts:
        target = space.extend(start, rng.standard_normal(space.dim), rng.uniform(0, 1.5))
        out = clamp_move(domain, start, target, 0.2)
        assert domain.contains(out)
        assert space.distance(start, out) <= 0.2 + space.tol
        # the repaired move stays on the geodesic toward the target
        assert space.segment_excess(out, start, target) <= 1e-9


@pytest.mark.parametrize("spec, space", [
    ("euclidean:3", Euclidean(3)),
    ("lp:2:3", Lp(2, 3)),
    ("sphere2", Sphere2()),
])
def test_space_specs_round_trip(spec, space):
    assert parse_space(spec) == space
    assert space_from_dict(space.to_dict()) == space


def test_space_spec_errors():
    with pytest.raises(InvalidInputError, match="p must exceed 1"):
        parse_space("lp:2:1")
    with pytest.raises(InvalidInputError):
        parse_space("hyperbolic:2")


def test_domain_specs_round_trip():
    for spec, space in [("ball:0,0:1", E2), ("box:0,0:1,2", L3), ("cap:0,0,1:0.3", S2), ("octant", S2)]:
        d = parse_domain(spec, space)
        assert domain_from_dict(d.to_dict(), space) == d
    assert Ball(E2, [0, 0], 1).to_dict() == {"shape": "ball", "center": [0.0, 0.0], "radius": 1.0}
    assert L3.to_dict() == {"kind": "lp", "dim": 2, "p": 3}


def test_extend_and_rotate(rng):
    x = CAP.sample(rng)
    y = S2.extend(x, rng.standard_normal(3), 0.3)
    assert S2.distance(x, y) == pytest.approx(0.3, abs=1e-12)
    r = S2.rotate_about(np.array([0, 0, 1.0]), x, 1.0)
    assert S2.distance([0, 0, 1], r) == pytest.approx(S2.distance([0, 0, 1], x), abs=1e-12)
    v = E2.rotate_about(np.array([1.0, 1.0]), np.array([2.0, 1.0]), math.pi / 2)
    np.testing.assert_allclose(v, [1, 2], atol=1e-15)
