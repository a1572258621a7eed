import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from philochord.bodies import Angle2D
from philochord.chord_scan import Kind, find_extrema
from philochord.geometry import Line
from philochord.philo import (
    check_property_star,
    chord_ends,
    construct,
    intersection_polynomial,
    right_angle_closed_form,
    with_line,
)

from conftest import interior_of_angle, random_angle, random_rotation

E0, U1, U2 = [0, 0], [1, 0], [0, 1]


def brute_force_right_angle(a, b):
    """Oracle: minimise the intercept length over the slope of lines through (a, b)."""
    def length(t):  # t = angle of the line below the x-axis
        return a / math.cos(t) + b / math.sin(t)

    res = minimize_scalar(length, bounds=(1e-9, math.pi / 2 - 1e-9), method="bounded", options={"xatol": 1e-13})
    t = res.x
    return a + b / math.tan(t), b + a * math.tan(t), res.fun


def test_right_angle_1_8():
    c = construct(E0, U1, U2, [1, 8])
    a, b = chord_ends(c)
    assert np.allclose(a, [5, 0], atol=1e-9)
    assert np.allclose(b, [0, 10], atol=1e-9)
    assert np.allclose(c.E_prime, [4, 2], atol=1e-9)
    assert not c.degenerate_tangency
    len_res, ang_res = check_property_star(c)
    assert len_res <= 1e-12 and ang_res <= 1e-12


def test_right_angle_1_1_degenerate():
    c = construct(E0, U1, U2, [1, 1])
    a, b = chord_ends(c)
    assert c.degenerate_tangency
    assert np.allclose(c.E_prime, [1, 1])
    assert np.allclose(a, [2, 0], atol=1e-9) and np.allclose(b, [0, 2], atol=1e-9)
    assert check_property_star(c)[0] <= 1e-12


@pytest.mark.parametrize("p", [(1, 1), (1, 8), (8, 1), (0.3, 2.5)])
def test_closed_form_matches_brute_force(p):
    xa, yb = right_angle_closed_form(*p)
    bx, by, blen = brute_force_right_angle(*p)
    assert xa == pytest.approx(bx, abs=1e-6)
    assert yb == pytest.approx(by, abs=1e-6)
    assert math.hypot(xa, yb) == pytest.approx(blen, abs=1e-9)


def test_closed_form_values():
    assert right_angle_closed_form(1, 8) == pytest.approx((5, 10), abs=1e-12)
    assert right_angle_closed_form(8, 1) == pytest.approx((10, 5), abs=1e-12)
    assert right_angle_closed_form(1, 1) == pytest.approx((2, 2), abs=1e-12)
    with pytest.raises(ValueError):
        right_angle_closed_form(0, 1)


def test_closed_form_line_has_zero_property_residual():
    c = construct(E0, U1, U2, [8, 1])
    xa, yb = right_angle_closed_form(8, 1)
    other = with_line(c, Line.through([xa, 0], [0, yb]))
    assert check_property_star(other)[0] <= 1e-12
    assert check_property_star(other)[1] <= 1e-12


def test_rotated_line_breaks_property():
    c = construct(E0, U1, U2, [1, 8])
    d = c.line.dir
    r = 0.05
    rot = np.array([[math.cos(r), -math.sin(r)], [math.sin(r), math.cos(r)]])
    off = with_line(c, Line(c.pivot, rot @ d))
    assert check_property_star(off)[0] > 1e-3


def test_construction_point_on_both_conics():
    c = construct(E0, U1, U2, [1, 8])
    hyp, circ = c.conic_values(c.E_prime)
    assert abs(hyp) < 1e-9 and abs(circ) < 1e-9
    # the pivot is on both conics as well
    hyp, circ = c.conic_values(c.pivot)
    assert abs(hyp) < 1e-12 and abs(circ) < 1e-12


def test_intersection_polynomial_has_pivot_root():
    q = intersection_polynomial(E0, U1, U2, [1, 8])
    assert q[-1] == pytest.approx(0, abs=1e-12)


def test_exterior_pivot_rejected():
    with pytest.raises(ValueError):
        construct(E0, U1, U2, [-1, 1])
    with pytest.raises(ValueError):
        construct(E0, U1, U2, [0, 1])


def test_agrees_with_chord_scan(rng):
    worst_angle = worst_prop = 0.0
    for _ in range(100):
        E, u1, u2, th = random_angle(rng)
        O = interior_of_angle(rng, E, u1, u2)
        c = construct(E, u1, u2, O)
        (rec,) = [r for r in find_extrema(Angle2D(E, u1, u2), O) if r.kind is Kind.MIN]
        d = c.line.dir
        diff = abs(math.atan2(d[1], d[0]) - rec.phi_star) % math.pi
        worst_angle = max(worst_angle, min(diff, math.pi - diff))
        worst_prop = max(worst_prop, *check_property_star(c))
    assert worst_angle <= 1e-8
    assert worst_prop <= 1e-8


@given(st.integers(0, 10_000), st.floats(0.2, 20))
def test_equivariant_under_similarity(seed, scale):
    rng = np.random.default_rng(seed)
    E, u1, u2, th = random_angle(rng)
    O = interior_of_angle(rng, E, u1, u2)
    R = random_rotation(rng, 2)
    t = rng.uniform(-3, 3, 2)
    c = construct(E, u1, u2, O)
    m = construct(scale * R @ E + t, R @ u1, R @ u2, scale * R @ O + t)
    a, b = chord_ends(c)
    ma, mb = chord_ends(m)
    assert np.allclose(ma, scale * R @ a + t, atol=1e-7 * scale)
    assert np.allclose(mb, scale * R @ b + t, atol=1e-7 * scale)
    assert np.allclose(m.E_prime, scale * R @ c.E_prime + t, atol=1e-7 * scale)
