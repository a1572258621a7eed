"""Classical construction of the shortest chord of an angle through an interior point.

The hyperbola through ``O`` with the arm lines as asymptotes and the circle
on the diameter ``[EO]`` meet at ``O`` and at the foot ``E'`` of the
perpendicular from ``E`` to the optimal line; the line is ``OE'``.

Intersection is reduced to one polynomial.  A point of the circle is
reached along the ray from ``E`` with direction ``e + s f`` (``e`` the unit
vector towards ``O``, ``f`` its normal) at ``x(s) = E + rho (e + s f) / (1 + s^2)``.
Substituting into the hyperbola gives a quartic in ``s`` whose root
``s = 0`` is ``O`` itself; dividing it out leaves a cubic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bodies import Angle2D, Position
from .geometry import Line, angle_between, foot_of_perpendicular, as_point, line_intersection_2d, perp, unit

ROOT_IMAG_TOL = 1e-10
TANGENCY_TOL = 1e-9


@dataclass(eq=False)
class PhiloConstruction:
    vertex: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    pivot: np.ndarray
    hyperbola: tuple[float, float, float, float, float, float]
    circle_center: np.ndarray
    circle_radius: float
    E_prime: np.ndarray
    line: Line
    degenerate_tangency: bool = False
    candidates: list[np.ndarray] = field(default_factory=list)

    def conic_values(self, p) -> tuple[float, float]:
        """Residuals of ``p`` in the hyperbola and circle equations."""
        A, B, C, D, E, F = self.hyperbola
        x, y = p
        hyp = A * x * x + B * x * y + C * y * y + D * x + E * y + F
        circ = float(np.sum((np.asarray(p) - self.circle_center) ** 2)) - self.circle_radius ** 2
        return hyp, circ


def _hyperbola_coefficients(E, m1, m2, k):
    s = 0.5 * (np.outer(m1, m2) + np.outer(m2, m1))
    se = s @ E
    return (float(s[0, 0]), float(2 * s[0, 1]), float(s[1, 1]),
            float(-2 * se[0]), float(-2 * se[1]), float(E @ se - k))


def _polish(coeffs, r, steps=3):
    dp = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dp, r)
        if d == 0:
            break
        r = r - np.polyval(coeffs, r) / d
    return r


def intersection_polynomial(E, u1, u2, O) -> np.ndarray:
    """Quartic coefficients (highest degree first) in the pencil slope ``s``."""
    E, O = as_point(E, 2), as_point(O, 2)
    rho = float(np.linalg.norm(O - E))
    e = (O - E) / rho
    f = perp(e)
    m1, m2 = perp(unit(u1)), perp(unit(u2))
    a1, b1 = float(m1 @ e), float(m1 @ f)
    a2, b2 = float(m2 @ e), float(m2 @ f)
    k = rho * rho * a1 * a2
    r2 = rho * rho
    return np.array([-k, 0.0, r2 * b1 * b2 - 2 * k, r2 * (a1 * b2 + a2 * b1), r2 * a1 * a2 - k])


def construct(E, u1, u2, O) -> PhiloConstruction:
    """Hyperbola/circle construction of the shortest chord through ``O``."""
    E, O = as_point(E, 2), as_point(O, 2)
    u1, u2 = unit(u1), unit(u2)
    angle = Angle2D(E, u1, u2)
    cls = angle.classify(O)
    if cls.position is Position.BOUNDARY:
        raise ValueError("pivot lies on an arm")
    if cls.position is not Position.INTERIOR:
        raise ValueError("pivot must be interior to the angle")
    rho = float(np.linalg.norm(O - E))
    e = (O - E) / rho
    f = perp(e)
    m1, m2 = perp(u1), perp(u2)
    k = float((m1 @ (O - E)) * (m2 @ (O - E)))
    quartic = intersection_polynomial(E, u1, u2, O)
    # s = 0 is the pivot; its constant term vanishes identically
    cubic = quartic[:-1]
    roots = np.roots(cubic)
    real = [float(_polish(cubic, r.real)) for r in roots if abs(r.imag) <= ROOT_IMAG_TOL * (1 + abs(r))]

    def point(s):
        return E + rho * (e + s * f) / (1 + s * s)

    inside = [s for s in real if angle.classify(point(s)).position is not Position.EXTERIOR]
    hyperbola = _hyperbola_coefficients(E, m1, m2, k)
    center, radius = 0.5 * (E + O), 0.5 * rho

    tangent = [s for s in inside if abs(s) <= TANGENCY_TOL]
    best = None
    for s in inside:
        # direction of O -> x(s) is proportional to f - s e, which stays finite as s -> 0
        line = Line(O, f - s * e)
        a = line_intersection_2d(line, angle.arm_line(1))
        b = line_intersection_2d(line, angle.arm_line(2))
        if a is None or b is None:
            continue
        if (a - E) @ u1 < 0 or (b - E) @ u2 < 0 or (a - O) @ (b - O) > 0:
            continue
        length = float(np.linalg.norm(a - b))
        if best is None or length < best[0]:
            best = (length, s, line)
    if best is None:
        raise ValueError("no admissible second intersection of circle and hyperbola")
    _, s, line = best
    degenerate = bool(tangent) and abs(s) <= TANGENCY_TOL
    e_prime = O.copy() if degenerate else point(s)
    return PhiloConstruction(E, u1, u2, O, hyperbola, center, radius, e_prime, line, degenerate,
                             [point(s) for s in inside])


def chord_ends(c: PhiloConstruction) -> tuple[np.ndarray, np.ndarray]:
    a = line_intersection_2d(c.line, Line(c.vertex, c.u1))
    b = line_intersection_2d(c.line, Line(c.vertex, c.u2))
    if a is None or b is None:
        raise ValueError("line is parallel to an arm")
    return a, b


def check_property_star(c: PhiloConstruction) -> tuple[float, float]:
    """``(||BE'| - |AO|| / |AB|, |angle(E E' O) - pi/2|)``."""
    a, b = chord_ends(c)
    ab = float(np.linalg.norm(a - b))
    len_res = abs(float(np.linalg.norm(b - c.E_prime)) - float(np.linalg.norm(a - c.pivot))) / ab
    if c.degenerate_tangency:
        return len_res, 0.0
    ang = angle_between(c.vertex - c.E_prime, c.pivot - c.E_prime)
    return len_res, abs(ang - math.pi / 2)


def right_angle_closed_form(a: float, b: float) -> tuple[float, float]:
    """Axis intercepts of the shortest segment through ``(a, b)`` between the positive axes."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    return a + a ** (1 / 3) * b ** (2 / 3), b + a ** (2 / 3) * b ** (1 / 3)


def with_line(c: PhiloConstruction, line: Line) -> PhiloConstruction:
    """Same angle and pivot with another line; ``E'`` becomes the foot of the perpendicular from ``E``."""
    foot = foot_of_perpendicular(c.vertex, line)
    return replace(c, line=line, E_prime=foot, degenerate_tangency=False, candidates=[])
