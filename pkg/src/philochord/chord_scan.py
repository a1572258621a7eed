"""Chord length as a function of the direction of a line rotating about a pivot.

Two angle conventions are used:

* the *direction angle* ``alpha`` of the line, used for every body.  For an
  interior pivot the line ``{O + t (cos alpha, sin alpha)}`` is sampled over
  ``[0, pi)``; for an exterior pivot the ray direction is sampled over the
  domain ``D`` of directions whose ray meets the body in a bounded chord.
* the *projection angle* ``phi`` of the angle analytics: the signed angle
  between ``O -> A`` and the perpendicular from ``O`` to the arm carrying
  ``A``, positive when ``A`` lies farther from the vertex than the foot of
  that perpendicular.  :func:`phi_to_alpha` and :func:`alpha_to_phi`
  convert between the two (the map is ``alpha = alpha_0 +/- phi``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bodies import Angle2D, Body, BoundaryFeature, Chord, Position, Strip2D
from .geometry import DEFAULT_TOL, Line, as_point, cross2, perp

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
KINK_STEP = 1e-7
REFINE_WIDTH = 1e-10


class Kind(enum.Enum):
    MIN = "min"
    MAX = "max"


@dataclass
class SweepSample:
    phi: float
    length: float | None
    derivative: float | None
    in_domain: bool


@dataclass(eq=False)
class ExtremumRecord:
    phi_star: float
    kind: Kind
    chord: Chord
    endpoint_features: tuple[BoundaryFeature, BoundaryFeature]
    refinement_width: float


# ----------------------------------------------------------------------------
# angle analytics in the projection-angle convention


def _require_2d_angle(body):
    if not isinstance(body, Angle2D):
        raise TypeError("angle analytics need an Angle2D body")


def _arm_frame(body: Angle2D, O, arm: int):
    """Foot distance, unit vector towards the arm line, arm direction and foot coordinate."""
    u = body.u1 if arm == 1 else body.u2
    w = O - body.vertex
    s = float(w @ u)
    foot = body.vertex + s * u
    h = float(np.linalg.norm(foot - O))
    if h <= 1e-15:
        raise ValueError("pivot lies on an arm line")
    return h, (foot - O) / h, u, s


def _far_arm(body: Angle2D, O) -> int:
    """Arm carrying the far endpoint ``A`` for an exterior pivot."""
    r = body.normals @ O - body.offsets
    outside = r > 0
    if outside.sum() != 1:
        raise ValueError("pivot must lie outside the angle and outside its opposite angle")
    # the violated arm is crossed first, so A sits on the other one
    return 2 if outside[0] else 1


def _pivot_position(body: Body, O, tol=DEFAULT_TOL) -> Position:
    return body.classify(O, tol).position


def angle_f(body: Angle2D, O, phi: float) -> tuple[float, float, float]:
    """Length, first and second derivative of ``|OA| + |OB|`` for an interior pivot.

    ``phi`` must lie in ``(theta - pi/2, pi/2)``.
    """
    _require_2d_angle(body)
    O = as_point(O, 2)
    if _pivot_position(body, O) is not Position.INTERIOR:
        raise ValueError("angle_f needs an interior pivot")
    th = body.theta
    if not th - math.pi / 2 < phi < math.pi / 2:
        raise ValueError(f"phi={phi} outside ({th - math.pi / 2}, {math.pi / 2})")
    h1 = _arm_frame(body, O, 1)[0]
    h2 = _arm_frame(body, O, 2)[0]
    psi = th - phi
    oa = h1 / math.cos(phi)
    ob = h2 / math.cos(psi)
    oa_p = oa * abs(math.tan(phi))
    ob_p = ob * abs(math.tan(psi))
    d1 = np.sign(phi) * oa_p - np.sign(psi) * ob_p
    d2 = oa * (math.tan(phi) ** 2 + math.cos(phi) ** -2) + ob * (math.tan(psi) ** 2 + math.cos(psi) ** -2)
    return oa + ob, float(d1), float(d2)


def angle_g_domain(body: Angle2D, O) -> tuple[float, float]:
    """Open interval of ``phi`` for an exterior pivot; the lower end is the line through the vertex."""
    _require_2d_angle(body)
    O = as_point(O, 2)
    h, _, _, s = _arm_frame(body, O, _far_arm(body, O))
    return math.atan2(-s, h), math.pi / 2


def angle_g(body: Angle2D, O, phi: float) -> tuple[float, float]:
    """Length ``|OA| - |OB|`` and its derivative for an exterior pivot.

    ``A`` lies on the far arm, ``B`` on the near one with ``B`` on ``[OA]``.
    """
    _require_2d_angle(body)
    O = as_point(O, 2)
    lo, hi = angle_g_domain(body, O)
    if not lo < phi < hi:
        raise ValueError(f"phi={phi} outside ({lo}, {hi})")
    far = _far_arm(body, O)
    h1 = _arm_frame(body, O, far)[0]
    h2 = _arm_frame(body, O, 3 - far)[0]
    th = body.theta
    psi = phi - th
    oa = h1 / math.cos(phi)
    ob = h2 / math.cos(psi)
    oa_p = oa * abs(math.tan(phi))
    ob_p = ob * abs(math.tan(psi))
    return oa - ob, float(np.sign(phi) * oa_p - np.sign(psi) * ob_p)


def angle_g_critical(body: Angle2D, O, grid_size: int = 512) -> list[tuple[float, float, float]]:
    """Critical points of ``g`` as ``(phi, |OA|, |OB|)``, from sign changes of the closed-form derivative."""
    O = as_point(O, 2)
    lo, hi = angle_g_domain(body, O)
    far = _far_arm(body, O)
    h1 = _arm_frame(body, O, far)[0]
    h2 = _arm_frame(body, O, 3 - far)[0]
    th = body.theta

    def deriv(phi):
        psi = phi - th
        oa, ob = h1 / np.cos(phi), h2 / np.cos(psi)
        return np.sign(phi) * oa * np.abs(np.tan(phi)) - np.sign(psi) * ob * np.abs(np.tan(psi))

    pad = 1e-9 * (hi - lo)
    phis = np.linspace(lo + pad, hi - pad, grid_size)
    ds = deriv(phis)
    out = []
    for i in range(grid_size - 1):
        if ds[i] == 0 or ds[i] * ds[i + 1] < 0:
            a, b = bisect_sign(lambda p: float(deriv(p)), float(phis[i]), float(phis[i + 1]))
            phi = 0.5 * (a + b)
            out.append((phi, h1 / math.cos(phi), h2 / math.cos(phi - th)))
    return out


def _phi_frame(body: Angle2D, O):
    pos = _pivot_position(body, O)
    arm = 1 if pos is Position.INTERIOR else _far_arm(body, O)
    _, n, u, _ = _arm_frame(body, O, arm)
    return n, u


def phi_to_alpha(body: Angle2D, O, phi: float) -> float:
    """Direction angle of the ray ``O -> A`` for projection angle ``phi``."""
    n, u = _phi_frame(body, as_point(O, 2))
    v = n * math.cos(phi) + u * math.sin(phi)
    return math.atan2(v[1], v[0])


def alpha_to_phi(body: Angle2D, O, alpha: float) -> float:
    """Projection angle of the line with direction angle ``alpha``."""
    n, u = _phi_frame(body, as_point(O, 2))
    d = np.array([math.cos(alpha), math.sin(alpha)])
    if d @ n < 0:
        d = -d
    return math.atan2(float(d @ u), float(d @ n))


def _phi_orientation(body: Angle2D, O) -> float:
    n, u = _phi_frame(body, O)
    return 1.0 if cross2(n, u) > 0 else -1.0


# ----------------------------------------------------------------------------
# generic chord functions of the direction angle


def _direction(alpha: float) -> np.ndarray:
    return np.array([math.cos(alpha), math.sin(alpha)])


class ChordFunction:
    """Chord length and its analytic slope for lines through ``O``.

    The slope uses the outward normals at both chord ends: an end point at
    parameter ``t`` on a boundary piece with normal ``n`` moves as
    ``dt/dalpha = -t <n, d'> / <n, d>``, which is exact wherever the
    boundary has a tangent there.
    """

    def __init__(self, body: Body, O, tol: float = DEFAULT_TOL):
        if body.dim != 2:
            raise ValueError("direction sweeps are planar; use nd_search for n > 2")
        self.body = body
        self.O = as_point(O, 2)
        pos = body.classify(self.O, tol).position
        if pos is Position.BOUNDARY:
            raise ValueError("pivot on the boundary is not supported")
        self.position = pos
        self.exterior = pos is Position.EXTERIOR

    def hit(self, alpha: float):
        h = self.body.hit(self.O, _direction(alpha))
        if h is None or not (math.isfinite(h.t_lo) and math.isfinite(h.t_hi)):
            return None
        if self.exterior and h.t_lo <= 0:
            return None
        return h

    def length(self, alpha: float) -> float:
        h = self.hit(alpha)
        return math.nan if h is None else h.t_hi - h.t_lo

    def slope(self, alpha: float) -> float:
        h = self.hit(alpha)
        if h is None:
            return math.nan
        return _slope_from_hit(alpha, h)

    def chord(self, alpha: float) -> Chord | None:
        h = self.hit(alpha)
        if h is None:
            return None
        return Chord(Line(self.O, _direction(alpha)), h.t_lo, h.t_hi, self.position)

    def domain(self, coarse: int = 1024) -> tuple[float, float]:
        """``[0, pi)`` for interior pivots, else the arc of directions with a bounded chord."""
        if not self.exterior:
            return 0.0, math.pi
        alphas = np.linspace(0.0, 2 * math.pi, coarse, endpoint=False)
        c = self.body.interior_point()
        toward = math.atan2(c[1] - self.O[1], c[0] - self.O[0]) % (2 * math.pi)
        alphas = np.sort(np.append(alphas, toward))
        ok = np.array([self.hit(a) is not None for a in alphas])
        if not ok.any():
            raise ValueError("no line through the pivot meets the body in a bounded chord")
        if ok.all():
            raise ValueError("exterior pivot sees the body in every direction")
        m = len(alphas)
        # unwrap the circle starting at an invalid sample so the valid arc is contiguous
        k0 = int(np.flatnonzero(~ok)[0])

        def angle_at(k):
            return float(alphas[(k0 + k) % m]) + 2 * math.pi * ((k0 + k) // m)

        first = next(k for k in range(m) if ok[(k0 + k) % m])
        last = first
        while last + 1 < m and ok[(k0 + last + 1) % m]:
            last += 1
        lo = self._edge(angle_at(first - 1), angle_at(first))
        hi = self._edge(angle_at(last + 1), angle_at(last))
        return lo, hi

    def _edge(self, bad: float, good: float) -> float:
        for _ in range(200):
            if abs(good - bad) <= 1e-14:
                break
            mid = 0.5 * (bad + good)
            if self.hit(mid) is None:
                bad = mid
            else:
                good = mid
        return good


def _slope_from_hit(alpha: float, h) -> float:
    d = _direction(alpha)
    dp = perp(d)

    def rate(t, n):
        nd = float(n @ d)
        return math.nan if nd == 0 else -t * float(n @ dp) / nd

    return rate(h.t_hi, h.n_hi) - rate(h.t_lo, h.n_lo)


def _analytic_angle_slope(fn: ChordFunction, alpha: float) -> float | None:
    body = fn.body
    if not isinstance(body, Angle2D):
        return None
    try:
        phi = alpha_to_phi(body, fn.O, alpha)
        s = _phi_orientation(body, fn.O)
        if fn.exterior:
            return s * angle_g(body, fn.O, phi)[1]
        return s * angle_f(body, fn.O, phi)[1]
    except ValueError:
        return None


def sweep(body: Body, O, grid_size: int = 1024, step: float = 1e-6) -> list[SweepSample]:
    """Uniform samples of the chord length over the direction domain.

    Derivatives are analytic: the closed form for angles, the end-point
    normal formula of :class:`ChordFunction` otherwise.  Central differences
    with ``step`` are the fallback where the normals give no slope.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    fn = ChordFunction(body, O)
    lo, hi = fn.domain()
    if fn.exterior:
        alphas = lo + (np.arange(grid_size) + 0.5) * (hi - lo) / grid_size
    else:
        alphas = np.arange(grid_size) * (math.pi / grid_size)
    angle = isinstance(body, Angle2D)
    out = []
    for a in alphas:
        a = float(a)
        h = fn.hit(a)
        if h is None:
            out.append(SweepSample(a, None, None, False))
            continue
        length = h.t_hi - h.t_lo
        deriv = _analytic_angle_slope(fn, a) if angle else _slope_from_hit(a, h)
        if deriv is None or not math.isfinite(deriv):
            fp, fm = fn.length(a + step), fn.length(a - step)
            deriv = None if math.isnan(fp) or math.isnan(fm) else (fp - fm) / (2 * step)
        out.append(SweepSample(a, length, deriv, True))
    return out


# ----------------------------------------------------------------------------
# extremum search


def bisect_sign(f, lo: float, hi: float, width: float = 1e-13, max_iter: int = 200) -> tuple[float, float]:
    """Shrink a bracket on which ``f`` changes sign; returns the final bracket."""
    flo = f(lo)
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def golden_section(f, lo: float, hi: float, width: float = 1e-14, maximize: bool = False) -> tuple[float, float]:
    """Golden-section search for a unimodal ``f`` on ``[lo, hi]``; returns the final bracket."""
    sgn = -1.0 if maximize else 1.0
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = sgn * f(c), sgn * f(d)
    while hi - lo > width:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = sgn * f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = sgn * f(d)
        if d <= c:
            break
    return lo, hi


def default_grid(body: Body) -> int:
    return max(1024, 8 * body.vertex_count)


def _is_kink(fn: ChordFunction, x: float, scale: float) -> bool:
    f0 = fn.length(x)
    fp, fm = fn.length(x + KINK_STEP), fn.length(x - KINK_STEP)
    if math.isnan(fp) or math.isnan(fm):
        return False
    right = (fp - f0) / KINK_STEP
    left = (f0 - fm) / KINK_STEP
    return abs(right - left) > 1e-3 * scale


def _endpoint_features(body: Body, ch: Chord, tol: float):
    feats = []
    for p in (ch.a, ch.b):
        cls = body.classify(p, tol)
        if cls.feature is None:
            # rounding put the end point a hair off the boundary; snap via supports
            feats.append(BoundaryFeature(p, 0 if body.smooth else body.dim - 1, (), None, "unclassified"))
        else:
            feats.append(cls.feature)
    return tuple(feats)


def find_extrema(body: Body, O, grid_size: int | None = None, tol: float = DEFAULT_TOL) -> list[ExtremumRecord]:
    """Local minima and maxima of the chord length over the direction domain.

    Sign changes of the analytic slope on a uniform grid are bracketed and
    refined by bisection; brackets that turn out to contain a kink (an end
    point crossing a vertex) are re-refined by golden-section search on the
    length itself.
    """
    fn = ChordFunction(body, O, tol)
    n = grid_size or default_grid(body)
    if n < 16:
        raise ValueError("grid_size must be at least 16")
    lo, hi = fn.domain()
    if fn.exterior:
        alphas = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    else:
        alphas = np.arange(n + 1) * (math.pi / n)
    slopes = np.array([fn.slope(float(a)) for a in alphas])
    lengths = np.array([fn.length(float(a)) for a in alphas])
    scale = body.scale
    finite = lengths[np.isfinite(lengths)]
    if finite.size and finite.max() - finite.min() <= 1e-12 * max(1.0, scale):
        return []
    zero = 1e-13 * max(1.0, scale)
    records: list[ExtremumRecord] = []
    for i in range(len(alphas) - 1):
        s0, s1 = slopes[i], slopes[i + 1]
        if not (np.isfinite(s0) and np.isfinite(s1)):
            continue
        if s0 > zero and s1 <= zero:
            kind = Kind.MAX
        elif s0 < -zero and s1 >= -zero:
            kind = Kind.MIN
        else:
            continue
        a, b = float(alphas[i]), float(alphas[i + 1])
        blo, bhi = bisect_sign(fn.slope, a, b)
        x = 0.5 * (blo + bhi)
        if _is_kink(fn, x, scale):
            glo, ghi = golden_section(fn.length, max(a, x - 1e-9), min(b, x + 1e-9),
                                      maximize=kind is Kind.MAX)
            x = 0.5 * (glo + ghi)
            width = ghi - glo
        else:
            width = bhi - blo
        if not fn.exterior:
            x = x % math.pi
        ch = fn.chord(x)
        if ch is None:
            continue
        records.append(ExtremumRecord(x, kind, ch, _endpoint_features(body, ch, tol), width))
    records.sort(key=lambda r: r.phi_star)
    return records


# ----------------------------------------------------------------------------
# linearisation


def linearized_f(body: Body, O, phi0: float):
    """Length of the chord cut by ``l(alpha)`` from the two tangents at the ``alpha = phi0`` chord ends.

    Returns a callable of the direction angle; it yields ``nan`` where the
    line is parallel to a tangent or the orientation constraint fails.
    """
    fn = ChordFunction(body, O)
    h = fn.hit(phi0)
    if h is None:
        raise ValueError("no chord at phi0")
    d0 = _direction(phi0)
    tangents = []
    for t, n in ((h.t_hi, h.n_hi), (h.t_lo, h.n_lo)):
        p = fn.O + t * d0
        sup = body.supports(p)
        if len(sup) != 1:
            raise ValueError("tangent at a chord end point is not unique")
        tangents.append((n, float(n @ p)))
    O_ = fn.O

    def f(alpha: float) -> float:
        d = _direction(alpha)
        ts = []
        for n, c in tangents:
            den = float(n @ d)
            if abs(den) < 1e-14:
                return math.nan
            ts.append((c - float(n @ O_)) / den)
        t_a, t_b = ts
        if fn.exterior:
            if not (t_a > t_b > 0):
                return math.nan
        elif not (t_a > 0 > t_b):
            return math.nan
        return t_a - t_b

    return f


def strip_minimizer_direction(body: Strip2D) -> float:
    """Direction angle perpendicular to the strip lines."""
    d = perp(body.line1.dir)
    return math.atan2(d[1], d[0]) % math.pi
