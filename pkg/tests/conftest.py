import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

TETRA = [[1, -1, 0], [1, 1, 0], [-1, 0, 1], [-1, 0, -1]]
TRIANGLE = [[0, 0], [6, 0], [0, 2]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_convex_polygon(rng, k):
    """``k`` points on a random ellipse at sorted random angles: strictly convex, counter-clockwise."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        if np.min(np.diff(np.append(ang, ang[0] + 2 * math.pi))) > 0.02:
            break
    a, b = rng.uniform(1, 3), rng.uniform(1, 3)
    rot = rng.uniform(0, math.pi)
    c, s = math.cos(rot), math.sin(rot)
    pts = np.column_stack([a * np.cos(ang), b * np.sin(ang)]) @ np.array([[c, s], [-s, c]])
    return pts + rng.uniform(-2, 2, 2)


def random_angle(rng, theta_lo=0.1, theta_hi=math.pi - 0.1):
    th = rng.uniform(theta_lo, theta_hi)
    r0 = rng.uniform(0, 2 * math.pi)
    E = rng.normal(size=2)
    u1 = np.array([math.cos(r0), math.sin(r0)])
    u2 = np.array([math.cos(r0 + th), math.sin(r0 + th)])
    return E, u1, u2, th


def interior_of_angle(rng, E, u1, u2):
    return E + rng.uniform(0.2, 3) * u1 + rng.uniform(0.2, 3) * u2
