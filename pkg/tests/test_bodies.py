import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from philochord.bodies import (
    Angle2D,
    Ball,
    Ellipse2D,
    Polygon2D,
    PolytopeH,
    Position,
    SimplexV,
    Strip2D,
    chord,
    classify_point,
    face_dimension,
    simplex_to_halfspaces,
    supporting_hyperplanes_at,
)
from philochord.bodyfile import BodyFileError, body_from_dict, body_to_dict, dump_body, load_body
from philochord.geometry import Line

from conftest import TETRA, TRIANGLE, random_convex_polygon, random_rotation

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def cube(h=1.0):
    return PolytopeH(np.vstack([np.eye(3), -np.eye(3)]), h * np.ones(6))


def test_square_classification():
    sq = Polygon2D(SQUARE)
    assert classify_point(sq, [0.5, 0.5]).position is Position.INTERIOR
    c = classify_point(sq, [0.5, 0])
    assert c.position is Position.BOUNDARY and c.feature.d_C == 1
    c = classify_point(sq, [0, 0])
    assert c.position is Position.BOUNDARY and c.feature.d_C == 0
    assert classify_point(sq, [2, 2]).position is Position.EXTERIOR


def test_polygon_tags():
    sq = Polygon2D(SQUARE)
    assert sq.classify([0.5, 0]).feature.tag == "edge 0"
    assert sq.classify([1, 0]).feature.tag == "vertex 1"


def test_chord_example2_triangle():
    tri = Polygon2D(TRIANGLE)
    ch = chord(tri, Line.through([0, 3], [3, 0]))
    ends = sorted([ch.a.tolist(), ch.b.tolist()])
    assert np.allclose(ends, [[1.5, 1.5], [3, 0]], atol=1e-12)
    assert ch.length == pytest.approx(math.sqrt(4.5), abs=1e-12)


def test_chord_tetrahedron_x_axis():
    ch = chord(SimplexV(TETRA), Line([0, 0, 0], [1, 0, 0]))
    assert np.allclose(sorted([ch.a[0], ch.b[0]]), [-1, 1], atol=1e-12)
    assert ch.length == pytest.approx(2, abs=1e-12)


def test_chord_disk_diameter(rng):
    disk = Ellipse2D([0, 0], 1, 1)
    for a in rng.uniform(0, math.pi, 20):
        assert chord(disk, Line([0, 0], [math.cos(a), math.sin(a)])).length == pytest.approx(2, abs=1e-12)


def test_chord_miss_and_tangent():
    disk = Ellipse2D([0, 0], 1, 1)
    assert chord(disk, Line([0, 2], [1, 0])) is None
    sq = Polygon2D(SQUARE)
    tangent = chord(sq, Line([-1, 1], [1, -1]))  # touches only the vertex (0,0)
    assert tangent is not None and tangent.degenerate and tangent.length == pytest.approx(0, abs=1e-12)


def test_supports_ellipse_axis_point():
    ell = Ellipse2D([0, 0], 12, 1.6)
    f = ell.classify([12, 0]).feature
    s = supporting_hyperplanes_at(ell, f)
    assert s.unique and np.allclose(s.hyperplanes[0].normal, [1, 0])


def test_supports_square_vertex_cone():
    sq = Polygon2D(SQUARE)
    s = supporting_hyperplanes_at(sq, sq.classify([0, 0]).feature)
    assert not s.unique
    normals = sorted(tuple(np.round(h.normal, 12)) for h in s.hyperplanes)
    assert normals == [(-1.0, 0.0), (0.0, -1.0)]


def test_supports_tetra_edge_midpoint():
    tet = SimplexV(TETRA)
    s = supporting_hyperplanes_at(tet, tet.classify([1, 0, 0]).feature)
    # oracle: facet i omits vertex i; the facets containing A1 and A2 omit A3 or A4
    expected = {2, 3}
    got = {int(np.argmax(tet.normals @ h.normal)) for h in s.hyperplanes}
    assert got == expected and len(s.hyperplanes) == 2
    for h in s.hyperplanes:
        verts_on = [i for i, v in enumerate(TETRA) if abs(h.signed_distance(v)) < 1e-12]
        assert {0, 1} <= set(verts_on)


def test_supports_interior_point_error():
    sq = Polygon2D(SQUARE)
    with pytest.raises(ValueError):
        supporting_hyperplanes_at(sq, None)


def test_face_dimension_examples():
    tet = SimplexV(TETRA)
    assert face_dimension(tet, [1, 0, 0]) == 1
    centroid = np.mean([TETRA[0], TETRA[1], TETRA[2]], axis=0)
    assert face_dimension(tet, centroid) == 2
    assert face_dimension(tet, TETRA[0]) == 0
    assert face_dimension(tet, [0, 0, 0]) == 3
    assert face_dimension(Polygon2D(SQUARE), [0.3, 0]) == 1
    with pytest.raises(ValueError):
        face_dimension(tet, [5, 5, 5])


def test_face_dimension_redundant_constraints():
    # the same facet listed twice must not lower d_C
    body = PolytopeH(np.vstack([np.eye(3), -np.eye(3), [[2, 0, 0]]]), np.r_[np.ones(6), 2.0])
    assert face_dimension(body, [1, 0.2, 0.3]) == 2


def test_simplex_to_halfspaces_example1():
    h = simplex_to_halfspaces(SimplexV(TETRA))
    assert len(h.offsets) == 4
    assert h.classify([0, 0, 0]).position is Position.INTERIOR
    for v in TETRA:
        assert h.classify(v).position is Position.BOUNDARY


def test_standard_2_simplex():
    h = simplex_to_halfspaces(SimplexV([[0, 0], [1, 0], [0, 1]]))
    rows = sorted(zip(map(tuple, np.round(h.normals * math.sqrt(2), 12)), np.round(h.offsets * math.sqrt(2), 12)))
    # oracle: x >= 0, y >= 0, x + y <= 1 written as <n, x> <= b with unit normals (scaled by sqrt 2 here)
    s2 = round(math.sqrt(2), 12)
    assert rows == sorted([((-s2, 0.0), 0.0), ((0.0, -s2), 0.0), ((1.0, 1.0), 1.0)])


def test_reflected_simplex_same_body():
    v = np.array(TETRA, dtype=float)
    s1 = SimplexV(v)
    s2 = SimplexV(v[::-1])
    rng = np.random.default_rng(3)
    for p in rng.uniform(-1.5, 1.5, (200, 3)):
        assert s1.classify(p).position == s2.classify(p).position
    # outward orientation: every normal points away from the omitted vertex
    for i in range(4):
        assert s2.normals[i] @ v[::-1][i] < s2.offsets[i]


def test_validation_errors():
    with pytest.raises(ValueError):
        Polygon2D([[0, 0], [0, 1], [1, 1], [1, 0]])  # clockwise
    with pytest.raises(ValueError):
        Angle2D([0, 0], [1, 0], [0, 1], theta=1.0)
    with pytest.raises(ValueError):
        Angle2D([0, 0], [1, 0], [-1, 0])
    with pytest.raises(ValueError):
        SimplexV([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        PolytopeH([[1, 0], [0, 1]], [1, 1])  # unbounded quadrant
    with pytest.raises(ValueError):
        Strip2D(Line([0, 0], [1, 0]), Line([0, 1], [1, 1]))
    with pytest.raises(ValueError):
        Ellipse2D([0, 0], -1, 1)


def test_angle_and_strip_classification():
    ang = Angle2D([0, 0], [1, 0], [0, 1], theta=math.pi / 2)
    assert ang.classify([1, 1]).position is Position.INTERIOR
    assert ang.classify([1, 0]).feature.tag == "arm1"
    assert ang.classify([0, 0]).feature.d_C == 0
    assert ang.classify([-1, 1]).position is Position.EXTERIOR
    strip = Strip2D(Line([0, 0], [1, 0]), Line([0, 2], [1, 0]))
    assert strip.width == pytest.approx(2)
    assert strip.classify([5, 1]).position is Position.INTERIOR
    ch = chord(strip, Line([5, 1], [0, 1]))
    assert ch.length == pytest.approx(2)


def test_ball_nd():
    b = Ball([0, 0, 0, 0], 2)
    ch = chord(b, Line([0, 0, 0, 0], [1, 1, 1, 1]))
    assert ch.length == pytest.approx(4)
    assert b.classify([2, 0, 0, 0]).position is Position.BOUNDARY


@given(st.integers(0, 10_000))
def test_chord_endpoints_on_boundary(seed):
    rng = np.random.default_rng(seed)
    poly = Polygon2D(random_convex_polygon(rng, int(rng.integers(3, 15))))
    O = poly.interior_point() + rng.normal(scale=0.1, size=2)
    if poly.classify(O).position is not Position.INTERIOR:
        return
    ch = chord(poly, Line(O, rng.normal(size=2)))
    for p in (ch.a, ch.b):
        assert poly.classify(p).position is Position.BOUNDARY
    assert poly.classify(ch.midpoint).position is Position.INTERIOR


@given(st.integers(0, 10_000))
def test_polytope_permutation_and_redundancy_invariance(seed):
    rng = np.random.default_rng(seed)
    body = SimplexV(TETRA)
    d = rng.normal(size=3)
    O = rng.uniform(-0.2, 0.2, 3)
    base = chord(body, Line(O, d)).length
    perm = rng.permutation(4)
    shuffled = PolytopeH(body.normals[perm], body.offsets[perm])
    assert chord(shuffled, Line(O, d)).length == pytest.approx(base, abs=1e-12)
    extra = PolytopeH(np.vstack([body.normals, [[1, 0, 0]]]), np.r_[body.offsets, 5.0])
    assert chord(extra, Line(O, d)).length == pytest.approx(base, abs=1e-12)


@given(st.integers(0, 10_000), st.floats(0.1, 10))
def test_rigid_motion_and_scaling(seed, s):
    rng = np.random.default_rng(seed)
    body = SimplexV(TETRA)
    q = random_rotation(rng, 3)
    t = rng.normal(size=3)
    O = rng.uniform(-0.2, 0.2, 3)
    d = rng.normal(size=3)
    base = chord(body, Line(O, d)).length
    moved = body.moved(q, t, s)
    L = chord(moved, Line(s * q @ O + t, q @ d)).length
    assert L == pytest.approx(s * base, rel=1e-9)


@given(st.integers(0, 10_000))
def test_face_dimension_sum_bound(seed):
    rng = np.random.default_rng(seed)
    body = cube() if seed % 2 else SimplexV(TETRA)
    O = rng.uniform(-0.2, 0.2, 3)
    d = rng.normal(size=3)
    if seed % 5 == 0:
        d = np.eye(3)[seed % 3]
    ch = chord(body, Line(O, d))
    assert face_dimension(body, ch.a) + face_dimension(body, ch.b) <= 2 * (3 - 1)


# ----------------------------------------------------------------------------
# body files


@pytest.mark.parametrize("body", [
    Angle2D([0, 0], [1, 0], [0, 1]),
    Strip2D(Line([0, 0], [1, 0]), Line([0, 2], [1, 0])),
    Polygon2D(SQUARE),
    Ellipse2D([1, 2], 12, 1.6, 0.3),
    cube(),
    SimplexV(TETRA),
    Ball([0, 0, 0], 1),
])
def test_bodyfile_round_trip(body, tmp_path):
    path = tmp_path / "b.json"
    dump_body(body, path)
    doc = json.loads(path.read_text())
    assert doc["schema"] == 1
    again = load_body(path)
    assert type(again) is type(body)
    assert body_to_dict(again) == body_to_dict(body)


def test_bodyfile_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(BodyFileError):
        load_body(p)
    with pytest.raises(BodyFileError):
        body_from_dict({"kind": "dodecahedron"})
    with pytest.raises(BodyFileError):
        body_from_dict({"kind": "polygon"})
    with pytest.raises(BodyFileError):
        body_from_dict({"kind": "polygon", "vertices": [[0, 0], [0, 1], [1, 0]]})
    with pytest.raises(BodyFileError):
        body_from_dict({"schema": 2, "kind": "ball", "center": [0, 0], "radius": 1})
    with pytest.raises(BodyFileError):
        body_from_dict([1, 2])
