"""Convex bodies: membership, line clipping, supporting hyperplanes, face dimension.

Every body answers the same small protocol:

* ``hit(base, direction)`` clips the line ``base + t*direction`` and returns
  the parameter interval together with the outward normals of the
  boundary pieces that bound it;
* ``classify(point)`` returns interior / boundary / exterior, with a
  :class:`BoundaryFeature` for boundary points;
* ``supports(point)`` lists the extreme supporting hyperplanes.

Polyhedral bodies (angles, strips, polygons, H-polytopes, simplices) share a
single halfspace implementation.  ``Ellipse2D`` and ``Ball`` are smooth.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    Hyperplane,
    Line,
    angle_between,
    as_point,
    cross2,
    perp,
    rank,
    unit,
)

PARALLEL_EPS = 1e-14
MAX_FACE_FACETS = 12


class Position(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(eq=False)
class BoundaryFeature:
    point: np.ndarray
    d_C: int
    active: tuple[int, ...] = ()
    tangent: Line | None = None
    tag: str | None = None


@dataclass(eq=False)
class Classification:
    position: Position
    feature: BoundaryFeature | None = None


class Hit(NamedTuple):
    """Clipped parameter interval with outward normals at both ends.

    A normal is ``None`` when its end of the interval is infinite.
    """

    t_lo: float
    t_hi: float
    n_lo: np.ndarray | None
    n_hi: np.ndarray | None


@dataclass(frozen=True, eq=False)
class Chord:
    """Segment cut from a body by ``line``.

    ``a`` sits at the larger line parameter and ``b`` at the smaller one, so
    for a line oriented from an exterior pivot towards the body ``b`` lies
    on ``[O a]``.
    """

    line: Line
    t_lo: float
    t_hi: float
    pivot_position: Position | None = None
    degenerate: bool = False

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self.t_lo) and np.isfinite(self.t_hi))

    @property
    def a(self) -> np.ndarray:
        if not np.isfinite(self.t_hi):
            raise ValueError("chord is unbounded at its upper end")
        return self.line.at(self.t_hi)

    @property
    def b(self) -> np.ndarray:
        if not np.isfinite(self.t_lo):
            raise ValueError("chord is unbounded at its lower end")
        return self.line.at(self.t_lo)

    @property
    def length(self) -> float:
        return float(self.t_hi - self.t_lo)

    @property
    def midpoint(self) -> np.ndarray:
        return self.line.at(0.5 * (self.t_lo + self.t_hi))

    def __repr__(self):
        if self.bounded:
            return f"Chord(a={self.a.tolist()}, b={self.b.tolist()}, length={self.length!r})"
        return f"Chord(line={self.line!r}, t=[{self.t_lo}, {self.t_hi}])"


class SupportSet(NamedTuple):
    hyperplanes: list[Hyperplane]

    @property
    def unique(self) -> bool:
        return len(self.hyperplanes) == 1


class Body:
    """Common interface of all convex bodies."""

    kind: str = "body"
    smooth: bool = False
    bounded: bool = True

    dim: int

    def hit(self, base, direction) -> Hit | None:
        raise NotImplementedError

    def classify(self, p, tol: float = DEFAULT_TOL) -> Classification:
        raise NotImplementedError

    def supports(self, p, tol: float = DEFAULT_TOL) -> list[Hyperplane]:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def scale(self) -> float:
        """Diameter for bounded bodies, a characteristic length otherwise."""
        raise NotImplementedError

    @property
    def vertex_count(self) -> int:
        return 0

    def to_dict(self) -> dict:
        raise NotImplementedError

    def tol(self, tol: float = DEFAULT_TOL) -> float:
        return tol * max(1.0, self.scale)


# ----------------------------------------------------------------------------
# polyhedral bodies


class HalfspaceBody(Body):
    """Intersection of halfspaces ``<normals[i], x> <= offsets[i]``."""

    def __init__(self, normals, offsets):
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.asarray(offsets, dtype=float).reshape(-1)
        if a.shape[0] != b.size:
            raise ValueError("one offset per normal required")
        norms = np.linalg.norm(a, axis=1)
        if np.any(norms == 0) or not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ValueError("halfspace normals must be finite and non-zero")
        self.normals = a / norms[:, None]
        self.offsets = b / norms
        self.dim = a.shape[1]
        if self.dim < 2:
            raise ValueError("bodies live in dimension >= 2")

    @property
    def halfspaces(self) -> list[tuple[np.ndarray, float]]:
        return [(n.copy(), float(o)) for n, o in zip(self.normals, self.offsets)]

    def hit(self, base, direction) -> Hit | None:
        p = np.asarray(base, dtype=float)
        if p.shape != (self.dim,):
            p = as_point(base, self.dim)
        d = np.asarray(direction, dtype=float)
        ad = self.normals @ d
        slack = self.offsets - self.normals @ p
        up = ad > PARALLEL_EPS
        dn = ad < -PARALLEL_EPS
        par = ~(up | dn)
        if par.any() and (slack[par] < -DEFAULT_TOL * (1.0 + np.abs(self.offsets[par]))).any():
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / ad
        t_hi, n_hi = math.inf, None
        t_lo, n_lo = -math.inf, None
        if up.any():
            i = int(np.argmin(np.where(up, ratio, np.inf)))
            t_hi, n_hi = float(ratio[i]), self.normals[i]
        if dn.any():
            i = int(np.argmax(np.where(dn, ratio, -np.inf)))
            t_lo, n_lo = float(ratio[i]), self.normals[i]
        if t_lo > t_hi:
            # tangent lines graze a face; tiny negative widths are rounding
            if t_lo - t_hi > DEFAULT_TOL * max(1.0, abs(t_lo)):
                return None
            t_lo = t_hi = 0.5 * (t_lo + t_hi)
        return Hit(t_lo, t_hi, n_lo, n_hi)

    def _residuals(self, p) -> np.ndarray:
        return self.normals @ p - self.offsets

    def active_set(self, p, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
        p = as_point(p, self.dim)
        r = self._residuals(p)
        return tuple(int(i) for i in np.flatnonzero(np.abs(r) <= tol * (1.0 + np.abs(self.offsets))))

    def _dedup(self, idx) -> list[int]:
        kept: list[int] = []
        for i in idx:
            if all(float(self.normals[i] @ self.normals[j]) < 1.0 - 1e-12 for j in kept):
                kept.append(i)
        return kept

    def _tag(self, active: tuple[int, ...]) -> str | None:
        return None

    def classify(self, p, tol: float = DEFAULT_TOL) -> Classification:
        p = as_point(p, self.dim)
        r = self._residuals(p)
        band = tol * (1.0 + np.abs(self.offsets))
        if np.any(r > band):
            return Classification(Position.EXTERIOR)
        active = tuple(int(i) for i in np.flatnonzero(np.abs(r) <= band))
        if not active:
            return Classification(Position.INTERIOR)
        kept = self._dedup(active)
        d_c = self.dim - rank(self.normals[kept], tol)
        tangent = None
        if self.dim == 2 and len(kept) == 1:
            tangent = Line(p, perp(self.normals[kept[0]]))
        feat = BoundaryFeature(p.copy(), d_c, active, tangent, self._tag(active))
        return Classification(Position.BOUNDARY, feat)

    def supports(self, p, tol: float = DEFAULT_TOL) -> list[Hyperplane]:
        p = as_point(p, self.dim)
        kept = self._dedup(self.active_set(p, tol))
        return [Hyperplane.through(p, self.normals[i]) for i in kept]

    def moved(self, rotation, translation, scale: float = 1.0) -> "PolytopeH":
        """Image under ``x -> scale * rotation @ x + translation`` as an H-body."""
        rot = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        normals = self.normals @ rot.T
        offsets = scale * self.offsets + normals @ t
        return PolytopeH(normals, offsets, check=self.bounded)


class Angle2D(HalfspaceBody):
    kind = "angle"
    bounded = False

    def __init__(self, vertex, u1, u2, theta: float | None = None):
        self.vertex = as_point(vertex, 2)
        self.u1 = unit(u1)
        self.u2 = unit(u2)
        th = angle_between(self.u1, self.u2)
        if not 0.0 < th < np.pi or abs(cross2(self.u1, self.u2)) < 1e-12:
            raise ValueError("angle measure must lie strictly between 0 and pi")
        if theta is not None and abs(theta - th) > 1e-9:
            raise ValueError(f"stored theta {theta} disagrees with arm directions ({th})")
        self.theta = th
        n1 = perp(self.u1)
        if n1 @ self.u2 > 0:
            n1 = -n1
        n2 = perp(self.u2)
        if n2 @ self.u1 > 0:
            n2 = -n2
        super().__init__([n1, n2], [n1 @ self.vertex, n2 @ self.vertex])

    def _tag(self, active):
        if len(active) == 2:
            return "vertex"
        return "arm1" if active == (0,) else "arm2"

    def interior_point(self):
        return self.vertex + unit(self.u1 + self.u2)

    @property
    def scale(self):
        return 1.0

    def arm_line(self, i: int) -> Line:
        return Line(self.vertex, self.u1 if i == 1 else self.u2)

    def to_dict(self):
        return {"kind": self.kind, "vertex": self.vertex.tolist(), "arm1": self.u1.tolist(),
                "arm2": self.u2.tolist(), "theta": self.theta}


class Strip2D(HalfspaceBody):
    kind = "strip"
    bounded = False

    def __init__(self, line1: Line, line2: Line):
        if line1.dim != 2 or line2.dim != 2:
            raise ValueError("strips are planar")
        if abs(cross2(line1.dir, line2.dir)) > 1e-12:
            raise ValueError("strip boundary lines must be parallel")
        n = perp(line1.dir)
        gap = float(n @ (line2.base - line1.base))
        if abs(gap) < 1e-12:
            raise ValueError("strip boundary lines coincide")
        if gap > 0:
            n = -n
        self.line1, self.line2 = line1, line2
        self.width = abs(gap)
        super().__init__([n, -n], [n @ line1.base, -n @ line2.base])

    def _tag(self, active):
        return "line1" if active == (0,) else "line2"

    def interior_point(self):
        return 0.5 * (self.line1.base + self.line2.base)

    @property
    def scale(self):
        return self.width

    def to_dict(self):
        return {"kind": self.kind,
                "line1": {"base": self.line1.base.tolist(), "dir": self.line1.dir.tolist()},
                "line2": {"base": self.line2.base.tolist(), "dir": self.line2.dir.tolist()}}


class PolytopeH(HalfspaceBody):
    """Bounded full-dimensional polytope in H-representation."""

    kind = "polytope"

    def __init__(self, normals, offsets, check: bool = True):
        super().__init__(normals, offsets)
        self._vertices = None
        if check:
            self._validate()

    def _validate(self):
        verts = self.vertices()
        if len(verts) < self.dim + 1:
            raise ValueError("polytope is empty, lower-dimensional or unbounded")
        c = self.interior_point()
        if self.classify(c).position is not Position.INTERIOR:
            raise ValueError("polytope has empty interior")
        eye = np.eye(self.dim)
        rng = np.random.default_rng(0)
        dirs = list(eye) + list(-eye) + list(rng.normal(size=(2 * self.dim, self.dim)))
        for d in dirs:
            h = self.hit(c, unit(d))
            if h is None or not (np.isfinite(h.t_lo) and np.isfinite(h.t_hi)):
                raise ValueError("polytope is unbounded")

    def vertices(self) -> np.ndarray:
        """Vertices by enumerating ``dim``-subsets of facet planes."""
        if self._vertices is None:
            n = self.dim
            found: list[np.ndarray] = []
            for combo in itertools.combinations(range(len(self.offsets)), n):
                a = self.normals[list(combo)]
                if abs(np.linalg.det(a)) < 1e-12:
                    continue
                x = np.linalg.solve(a, self.offsets[list(combo)])
                if np.all(self._residuals(x) <= 1e-9 * (1.0 + np.abs(self.offsets))):
                    if not any(np.linalg.norm(x - y) <= 1e-9 * (1.0 + np.linalg.norm(x)) for y in found):
                        found.append(x)
            self._vertices = np.array(found).reshape(-1, n)
        return self._vertices

    def interior_point(self):
        return self.vertices().mean(axis=0)

    @property
    def scale(self):
        v = self.vertices()
        if len(v) < 2:
            return 1.0
        return float(max(np.linalg.norm(p - q) for p, q in itertools.combinations(v, 2)))

    @property
    def vertex_count(self):
        return len(self.vertices())

    def to_dict(self):
        return {"kind": self.kind, "dimension": self.dim,
                "halfspaces": [{"normal": n.tolist(), "offset": float(o)}
                               for n, o in zip(self.normals, self.offsets)]}


class Polygon2D(PolytopeH):
    kind = "polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least three planar vertices")
        edges = np.roll(v, -1, axis=0) - v
        crosses = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        if np.any(crosses <= 0):
            raise ValueError("polygon vertices must be strictly convex and counter-clockwise")
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        norms = np.linalg.norm(normals, axis=1)
        normals = normals / norms[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        super().__init__(normals, offsets, check=False)
        self._vertices = v.copy()
        self.polygon_vertices = v.copy()

    def _tag(self, active):
        m = len(self.offsets)
        if len(active) == 1:
            return f"edge {active[0]}"
        s = set(active)
        for j in range(m):
            if s == {j, (j - 1) % m}:
                return f"vertex {j}"
        return "vertex"

    def to_dict(self):
        return {"kind": self.kind, "vertices": self.polygon_vertices.tolist()}


class SimplexV(PolytopeH):
    """Simplex given by its ``n + 1`` vertices; stored as an H-polytope."""

    kind = "simplex"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError("a simplex in R^n needs exactly n + 1 vertices")
        n = v.shape[1]
        edge_mat = (v[1:] - v[0]).T
        vol = abs(np.linalg.det(edge_mat))
        scale = max(1.0, float(np.max(np.linalg.norm(v[:, None] - v[None], axis=2))))
        if vol <= DEFAULT_TOL * scale ** n:
            raise ValueError("degenerate simplex")
        normals, offsets = [], []
        for i in range(n + 1):
            others = np.delete(v, i, axis=0)
            diffs = others[1:] - others[0]
            # facet normal spans the null space of the facet's edge vectors
            _, _, vt = np.linalg.svd(diffs)
            nrm = vt[-1]
            off = float(nrm @ others[0])
            if nrm @ v[i] > off:
                nrm, off = -nrm, -off
            normals.append(nrm)
            offsets.append(off)
        super().__init__(normals, offsets, check=False)
        self._vertices = v.copy()
        self.simplex_vertices = v.copy()

    def to_dict(self):
        return {"kind": self.kind, "vertices": self.simplex_vertices.tolist()}


def simplex_to_halfspaces(s: SimplexV) -> PolytopeH:
    """H-representation of a simplex; facet ``i`` omits vertex ``i``."""
    return PolytopeH(s.normals.copy(), s.offsets.copy())


# ----------------------------------------------------------------------------
# smooth bodies


def _quadratic_interval(a, b, c):
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return None
    sq = np.sqrt(disc)
    q = -0.5 * (b + np.copysign(sq, b))
    r1 = q / a
    r2 = c / q if q != 0 else r1
    return min(r1, r2), max(r1, r2)


class Ellipse2D(Body):
    kind = "ellipse"
    smooth = True

    def __init__(self, center, a: float, b: float, rotation: float = 0.0):
        if not (a > 0 and b > 0):
            raise ValueError("semi-axes must be positive")
        self.center = as_point(center, 2)
        self.a, self.b, self.rotation = float(a), float(b), float(rotation)
        c, s = np.cos(self.rotation), np.sin(self.rotation)
        self._rot = np.array([[c, -s], [s, c]])
        self.dim = 2

    def _local(self, p):
        return self._rot.T @ (np.asarray(p, dtype=float) - self.center)

    def _normal(self, p):
        x = self._local(p)
        return unit(self._rot @ np.array([x[0] / self.a ** 2, x[1] / self.b ** 2]))

    def hit(self, base, direction):
        p = self._local(as_point(base, 2))
        d = self._rot.T @ np.asarray(direction, dtype=float)
        px, py, dx, dy = float(p[0]), float(p[1]), float(d[0]), float(d[1])
        ia2, ib2 = 1.0 / self.a ** 2, 1.0 / self.b ** 2
        qa = dx * dx * ia2 + dy * dy * ib2
        qb = 2.0 * (px * dx * ia2 + py * dy * ib2)
        qc = px * px * ia2 + py * py * ib2 - 1.0
        roots = _quadratic_interval(qa, qb, qc)
        if roots is None:
            return None
        lo, hi = roots

        def normal(t):
            # gradient of the level function at the local end point, rotated back
            gx, gy = (px + t * dx) * ia2, (py + t * dy) * ib2
            g = math.hypot(gx, gy)
            return self._rot @ np.array([gx / g, gy / g])

        return Hit(float(lo), float(hi), normal(lo), normal(hi))

    def level(self, p) -> float:
        x = self._local(p)
        return (x[0] / self.a) ** 2 + (x[1] / self.b) ** 2 - 1.0

    def classify(self, p, tol=DEFAULT_TOL):
        p = as_point(p, 2)
        q = self.level(p)
        if q > 2 * tol:
            return Classification(Position.EXTERIOR)
        if q < -2 * tol:
            return Classification(Position.INTERIOR)
        n = self._normal(p)
        return Classification(Position.BOUNDARY,
                              BoundaryFeature(p.copy(), 0, (), Line(p, perp(n)), "smooth"))

    def supports(self, p, tol=DEFAULT_TOL):
        return [Hyperplane.through(p, self._normal(p))]

    def interior_point(self):
        return self.center.copy()

    @property
    def scale(self):
        return 2.0 * max(self.a, self.b)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "a": self.a, "b": self.b,
                "rotation": self.rotation}


class Ball(Body):
    """Euclidean ball in any dimension (smooth test body for the n-D search)."""

    kind = "ball"
    smooth = True

    def __init__(self, center, radius: float):
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.center = as_point(center)
        self.radius = float(radius)
        self.dim = self.center.size

    def hit(self, base, direction):
        p = as_point(base, self.dim) - self.center
        d = np.asarray(direction, dtype=float)
        roots = _quadratic_interval(float(d @ d), 2.0 * float(p @ d), float(p @ p) - self.radius ** 2)
        if roots is None:
            return None
        lo, hi = roots
        return Hit(lo, hi, unit(p + lo * d), unit(p + hi * d))

    def classify(self, p, tol=DEFAULT_TOL):
        p = as_point(p, self.dim)
        r = np.linalg.norm(p - self.center) - self.radius
        band = tol * max(1.0, self.radius)
        if r > band:
            return Classification(Position.EXTERIOR)
        if r < -band:
            return Classification(Position.INTERIOR)
        tangent = Line(p, perp(p - self.center)) if self.dim == 2 else None
        return Classification(Position.BOUNDARY, BoundaryFeature(p.copy(), 0, (), tangent, "smooth"))

    def supports(self, p, tol=DEFAULT_TOL):
        return [Hyperplane.through(p, np.asarray(p, dtype=float) - self.center)]

    def interior_point(self):
        return self.center.copy()

    @property
    def scale(self):
        return 2.0 * self.radius

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


# ----------------------------------------------------------------------------
# module-level operations


def classify_point(body: Body, p, tol: float = DEFAULT_TOL) -> Classification:
    return body.classify(p, tol)


def chord(body: Body, line: Line, pivot_position: Position | None = None) -> Chord | None:
    """Segment cut by ``line``; ``None`` when the line misses the body."""
    h = body.hit(line.base, line.dir)
    if h is None:
        return None
    degenerate = bool(h.t_hi - h.t_lo <= body.tol() * 1e-3)
    return Chord(line, h.t_lo, h.t_hi, pivot_position, degenerate)


def supporting_hyperplanes_at(body: Body, feature: BoundaryFeature, tol: float = DEFAULT_TOL) -> SupportSet:
    if feature is None:
        raise ValueError("supporting hyperplanes need a boundary feature")
    if body.classify(feature.point, tol).position is not Position.BOUNDARY:
        raise ValueError("point is not on the boundary")
    return SupportSet(body.supports(feature.point, tol))


def face_dimension(body: Body, p, tol: float = DEFAULT_TOL) -> int:
    """``d_C`` of a point: ``n`` inside, ``n - rank(active normals)`` on a polytope boundary."""
    cls = body.classify(p, tol)
    if cls.position is Position.INTERIOR:
        return body.dim
    if cls.position is Position.EXTERIOR:
        raise ValueError("face dimension is defined for points of the body only")
    return cls.feature.d_C
