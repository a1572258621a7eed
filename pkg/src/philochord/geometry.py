"""Small-dimension affine primitives: lines, hyperplanes, projections.

Points are plain ``numpy`` float arrays of shape ``(n,)``.  Lines and
hyperplanes are frozen dataclasses that normalise their direction/normal
on construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_TOL = 1e-9
PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Tolerance policy shared by every module.

    ``abs_tol`` is used as-is for configurations of scale <= 1 and is
    multiplied by the scale (bounding-box diameter) otherwise.
    """

    abs_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("tolerance must be positive")

    def scaled(self, scale: float) -> float:
        return self.abs_tol * max(1.0, float(scale))


def as_point(p, n: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.size < 2:
        raise ValueError("points need at least two coordinates")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if n is not None and arr.size != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {arr.size}")
    return arr


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("cannot normalise a zero or non-finite vector")
    return v / norm


def perp(v) -> np.ndarray:
    """Rotate a 2D vector by +90 degrees."""
    return np.array([-v[1], v[0]], dtype=float)


def cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True, eq=False)
class Line:
    base: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        base = as_point(self.base)
        d = unit(self.dir)
        if d.size != base.size:
            raise ValueError("dimension mismatch between base and direction")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dir", d)

    @classmethod
    def through(cls, p, q) -> "Line":
        p = as_point(p)
        return cls(p, as_point(q, p.size) - p)

    @property
    def dim(self) -> int:
        return self.base.size

    def at(self, t: float) -> np.ndarray:
        return self.base + t * self.dir

    def param(self, p) -> float:
        """Parameter of the orthogonal projection of ``p`` onto the line."""
        return float(np.dot(np.asarray(p, dtype=float) - self.base, self.dir))

    def __repr__(self):
        return f"Line(base={self.base.tolist()}, dir={self.dir.tolist()})"


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The set ``{x : <normal, x> = offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        raw = np.asarray(self.normal, dtype=float).reshape(-1)
        norm = np.linalg.norm(raw)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("hyperplane normal must be non-zero")
        object.__setattr__(self, "normal", raw / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @classmethod
    def through(cls, point, normal) -> "Hyperplane":
        n = unit(normal)
        return cls(n, float(np.dot(n, as_point(point))))

    @property
    def dim(self) -> int:
        return self.normal.size

    def signed_distance(self, p) -> float:
        return float(np.dot(self.normal, p) - self.offset)

    def __repr__(self):
        return f"Hyperplane(normal={self.normal.tolist()}, offset={self.offset!r})"


class ClosestApproach(NamedTuple):
    p1: np.ndarray
    p2: np.ndarray
    gap: float
    parallel: bool


def foot_of_perpendicular(p, line: Line) -> np.ndarray:
    p = as_point(p, line.dim)
    return line.at(line.param(p))


def line_line_closest(l1: Line, l2: Line) -> ClosestApproach:
    """Closest points of two lines.

    For parallel lines the pair is ``(projection of l2.base on l1, l2.base)``
    and ``parallel`` is set; identical lines then have ``gap == 0``.
    """
    if l1.dim != l2.dim:
        raise ValueError("dimension mismatch")
    w = l1.base - l2.base
    b = float(np.dot(l1.dir, l2.dir))
    denom = 1.0 - b * b
    if denom < PARALLEL_EPS:
        p1 = foot_of_perpendicular(l2.base, l1)
        p2 = l2.base.copy()
        return ClosestApproach(p1, p2, float(np.linalg.norm(p1 - p2)), True)
    d = float(np.dot(l1.dir, w))
    e = float(np.dot(l2.dir, w))
    s = (b * e - d) / denom
    t = (e - b * d) / denom
    p1 = l1.at(s)
    p2 = l2.at(t)
    # one Newton-style correction keeps the pair symmetric to rounding
    s += float(np.dot(p2 - p1, l1.dir))
    t -= float(np.dot(p2 - p1, l2.dir))
    p1 = l1.at(s)
    p2 = l2.at(t)
    return ClosestApproach(p1, p2, float(np.linalg.norm(p1 - p2)), False)


def line_hyperplane_intersect(line: Line, plane: Hyperplane) -> np.ndarray | None:
    """Intersection point, or ``None`` when the line is parallel to the plane."""
    if line.dim != plane.dim:
        raise ValueError("dimension mismatch")
    denom = float(np.dot(line.dir, plane.normal))
    if abs(denom) < PARALLEL_EPS:
        return None
    t = (plane.offset - float(np.dot(plane.normal, line.base))) / denom
    return line.at(t)


def line_intersection_2d(l1: Line, l2: Line) -> np.ndarray | None:
    """Intersection of two planar lines (``None`` if parallel)."""
    den = cross2(l1.dir, l2.dir)
    if abs(den) < PARALLEL_EPS:
        return None
    w = l2.base - l1.base
    s = cross2(w, l2.dir) / den
    return l1.at(s)


def angle_between(u, v) -> float:
    """Unsigned angle in [0, pi] between two vectors (atan2 form, stable near 0 and pi)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = float(np.dot(u, v))
    if u.size == 2:
        s = abs(cross2(u, v))
    else:
        s = float(np.linalg.norm(np.outer(u, v) - np.outer(v, u))) / np.sqrt(2.0)
    return float(np.arctan2(s, c))


def rank(rows, tol: float) -> int:
    """Numerical rank by Gaussian elimination with complete pivoting."""
    m = np.array(rows, dtype=float, copy=True)
    if m.size == 0:
        return 0
    m = np.atleast_2d(m)
    r = 0
    nrows, ncols = m.shape
    for _ in range(min(nrows, ncols)):
        sub = np.abs(m[r:, r:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= tol:
            break
        i += r
        j += r
        m[[r, i]] = m[[i, r]]
        m[:, [r, j]] = m[:, [j, r]]
        m[r + 1:] -= np.outer(m[r + 1:, r] / m[r, r], m[r])
        r += 1
    return r
