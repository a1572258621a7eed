import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from philochord.bodies import Ball, Ellipse2D, Polygon2D, PolytopeH, Position, SimplexV
from philochord.chord_scan import Kind, find_extrema
from philochord.nd_search import (
    chord_objective,
    compass_search,
    find_local_extrema_nd,
    global_extremum,
    sample_direction,
    start_directions,
    verify_nd_theorems,
)

from conftest import TETRA, TRIANGLE


def cube():
    return PolytopeH(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))


def sampled_extremes(body, O, count, rng):
    """Oracle: brute-force chord lengths over random directions."""
    d = rng.normal(size=(count, body.dim))
    d /= np.linalg.norm(d, axis=1)[:, None]
    vals = [chord_objective(body, O, x) for x in d]
    vals = np.array([v for v in vals if v is not None])
    return vals.min(), vals.max()


def test_tetrahedron_global_max():
    t0 = time.perf_counter()
    recs = find_local_extrema_nd(SimplexV(TETRA), np.zeros(3), 64, 0)
    assert time.perf_counter() - t0 < 5
    best = global_extremum(recs, Kind.MAX)
    ends = sorted([best.chord.a, best.chord.b], key=lambda p: p[0])
    assert np.linalg.norm(ends[0] - [-1, 0, 0]) < 1e-6
    assert np.linalg.norm(ends[1] - [1, 0, 0]) < 1e-6
    assert best.chord.length == pytest.approx(2, abs=1e-6)


def test_tetrahedron_theorems_hold():
    body = SimplexV(TETRA)
    recs = find_local_extrema_nd(body, np.zeros(3), 64, 0)
    reps = verify_nd_theorems(body, np.zeros(3), recs)
    assert reps and all(r.passed for r in reps)


def test_tetrahedron_named_directions():
    body = SimplexV(TETRA)
    assert chord_objective(body, np.zeros(3), [1, 0, 0]) == pytest.approx(2, abs=1e-12)
    assert chord_objective(body, np.zeros(3), [0, 1, 1]) == pytest.approx(math.sqrt(2), abs=1e-12)
    # vertex directions, by hand: the ray towards (1,-1,0) leaves through the opposite face at (-1/3,1/3,0)
    for v in TETRA:
        assert chord_objective(body, np.zeros(3), v) == pytest.approx(4 * math.sqrt(2) / 3, abs=1e-12)


def test_tetrahedron_vertex_direction_barycentric_oracle():
    # oracle: exit parameters where the smallest barycentric coordinate of t*v reaches zero
    V = np.array(TETRA, float)
    M = np.vstack([V.T, np.ones(4)])

    def min_bary(p):
        return float(np.min(np.linalg.solve(M, np.append(p, 1.0))))

    for v in V:
        u = v / np.linalg.norm(v)
        t_hi = brentq(lambda t: min_bary(t * u), 0.0, 10.0, xtol=1e-15)
        t_lo = brentq(lambda t: min_bary(t * u), -10.0, 0.0, xtol=1e-15)
        assert chord_objective(SimplexV(TETRA), np.zeros(3), v) == pytest.approx(t_hi - t_lo, abs=1e-12)
        assert t_hi - t_lo == pytest.approx(4 * math.sqrt(2) / 3, abs=1e-12)


def test_cube_centre_max_is_body_diagonal():
    body = cube()
    dirs = []
    for v in itertools.product([-1, 0, 1], repeat=3):
        v = np.array(v, float)
        if v.any() and not any(np.allclose(v, -w) for w in dirs):
            dirs.append(v)
    assert len(dirs) == 13
    brute = max(chord_objective(body, np.zeros(3), d) for d in dirs)
    assert brute == pytest.approx(2 * math.sqrt(3))
    best = global_extremum(find_local_extrema_nd(body, np.zeros(3), 64, 1), Kind.MAX)
    assert best.chord.length == pytest.approx(brute, abs=1e-8)
    assert np.allclose(np.abs(best.chord.a), 1, atol=1e-6)


def test_cube_offcentre_against_sampling(rng):
    body = cube()
    O = np.array([0.3, -0.2, 0.5])
    recs = find_local_extrema_nd(body, O, 64, 2)
    lo, hi = sampled_extremes(body, O, 20000, rng)
    gmax = global_extremum(recs, Kind.MAX).chord.length
    gmin = global_extremum(recs, Kind.MIN).chord.length
    assert gmax >= hi - 1e-12
    assert gmin <= lo + 1e-12
    assert all(r.passed for r in verify_nd_theorems(body, O, recs))


def test_ball_interior_closed_form():
    c = np.array([1.0, -2.0, 0.5])
    r = 1.5
    O = c + np.array([0.6, 0.2, -0.3])
    recs = find_local_extrema_nd(Ball(c, r), O, 32, 0)
    dist = np.linalg.norm(O - c)
    assert global_extremum(recs, Kind.MAX).chord.length == pytest.approx(2 * r, abs=1e-9)
    assert global_extremum(recs, Kind.MIN).chord.length == pytest.approx(2 * math.sqrt(r * r - dist * dist), abs=1e-9)
    for rep in verify_nd_theorems(Ball(c, r), O, recs):
        assert rep.passed
        assert max(rep.residual_normals, rep.residual_hyperplane) < 1e-6


def test_ball_exterior_only_the_diameter():
    ball = Ball(np.zeros(4), 1.0)
    O = np.array([3.0, 0, 0, 0])
    recs = find_local_extrema_nd(ball, O, 32, 0)
    assert [r.kind for r in recs] == [Kind.MAX]
    assert recs[0].chord.length == pytest.approx(2, abs=1e-9)


def test_ball_slice_agrees_with_planar_scan():
    # chords of a ball through O in the plane of O, the centre and any direction are chords of a great disk
    c = np.zeros(3)
    O = np.array([0.4, 0.3, 0.0])
    nd = find_local_extrema_nd(Ball(c, 1.0), O, 32, 0)
    planar = find_extrema(Ellipse2D([0, 0], 1, 1), O[:2])
    for kind in Kind:
        assert global_extremum(nd, kind).chord.length == pytest.approx(
            global_extremum(planar, kind).chord.length, abs=1e-9)


def test_planar_triangle_matches_find_extrema():
    body = Polygon2D(TRIANGLE)
    for O in ([1.0, 0.5], [0.0, 3.0]):
        nd = find_local_extrema_nd(body, O, 32, 0)
        planar = find_extrema(body, O)
        assert global_extremum(nd, Kind.MAX).chord.length == pytest.approx(
            global_extremum(planar, Kind.MAX).chord.length, abs=1e-8)


def test_exterior_triangle_long_chord():
    recs = find_local_extrema_nd(Polygon2D(TRIANGLE), [0, 3], 64, 0)
    assert global_extremum(recs, Kind.MAX).chord.length >= math.sqrt(4.5) - 1e-12


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_interior_symmetry_of_directions(seed):
    rng = np.random.default_rng(seed)
    body = SimplexV(TETRA)
    O = rng.dirichlet(np.ones(4)) @ np.array(TETRA, float)
    d = rng.normal(size=3)
    assert chord_objective(body, O, d) == pytest.approx(chord_objective(body, O, -d), abs=1e-12)


def test_deterministic_for_seed():
    body = SimplexV(TETRA)
    O = np.array([0.1, 0.2, -0.05])
    r1 = find_local_extrema_nd(body, O, 32, 7)
    r2 = find_local_extrema_nd(body, O, 32, 7)
    assert len(r1) == len(r2)
    for a, b in zip(r1, r2):
        assert a.kind is b.kind
        assert np.array_equal(a.chord.a, b.chord.a) and np.array_equal(a.chord.b, b.chord.b)


def test_min_records_satisfy_cpp():
    body = PolytopeH(np.vstack([np.eye(3), -np.eye(3), [[1, 1, 1]]]), [1, 2, 1.5, 1, 1, 1, 2])
    O = np.array([0.1, 0.3, -0.2])
    recs = find_local_extrema_nd(body, O, 64, 3)
    mins = [r for r in recs if r.kind is Kind.MIN]
    assert mins
    for rep in verify_nd_theorems(body, O, mins):
        assert rep.passed, rep.violations
        assert max(rep.residual_normals, rep.residual_hyperplane) <= 1e-6


def test_sample_direction_and_miss():
    body = cube()
    s = sample_direction(body, [3, 0, 0], [1, 0, 0])
    assert s.chord is None and math.isnan(s.length)
    s = sample_direction(body, [3, 0, 0], [-1, 0, 0])
    assert s.length == pytest.approx(2)
    assert s.chord.pivot_position is Position.EXTERIOR


def test_start_directions_are_spread(rng):
    dirs = start_directions(cube(), np.zeros(3), 16, rng, Position.INTERIOR)
    assert dirs.shape == (16, 3)
    g = np.abs(dirs @ dirs.T) - np.eye(16)
    assert g.max() < 0.95


def test_compass_search_finds_quadratic_max(rng):
    target = np.array([0.0, 0.6, 0.8])

    class Obj:
        def __call__(self, d):
            return float(d @ target)

        def batch(self, ds):
            return ds @ target

    d, val, at_edge = compass_search(Obj(), np.array([1.0, 0, 0]), True, rng)
    assert val == pytest.approx(1, abs=1e-12)
    assert np.allclose(d, target, atol=1e-5)
    assert not at_edge


def test_argument_validation():
    with pytest.raises(ValueError):
        find_local_extrema_nd(cube(), np.zeros(3), 4)
    with pytest.raises(ValueError):
        find_local_extrema_nd(cube(), [1, 0, 0], 16)
