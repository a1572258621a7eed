"""Extremal chords through a pivot in any dimension, found by multistart direction search.

Chord length is a function on the unit sphere of directions (on the
projective space for an interior pivot, since ``d`` and ``-d`` give the
same chord).  It is only piecewise smooth for polytopes, so the search is
derivative free: a compass search in tangent-chart coordinates around the
current direction, re-normalised after every step.  When no compass move
improves, a few fresh random tangent bases are tried before the step is
halved; this keeps the search from stalling on the ridges that polytope
maxima sit on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import Body, Chord, HalfspaceBody, Position
from .chord_scan import ExtremumRecord, Kind, _endpoint_features
from .cpp import VERIFY_TOL, CppReport, verify_extremum
from .geometry import DEFAULT_TOL, PARALLEL_EPS, Line, as_point

MIN_STEP = 1e-10
START_STEP = 0.25
BASIS_RETRIES = 3
MERGE_TOL = 1e-6


@dataclass
class DirectionSample:
    dir: np.ndarray
    chord: Chord | None
    length: float


def _hit_interval(body: Body, O: np.ndarray, d: np.ndarray, exterior: bool):
    h = body.hit(O, d)
    if h is None or not (math.isfinite(h.t_lo) and math.isfinite(h.t_hi)):
        return None
    # exterior pivot: the near end B must lie on the segment [OA]
    if exterior and h.t_lo <= 0:
        return None
    return h


def chord_objective(body: Body, O, direction, tol: float = DEFAULT_TOL) -> float | None:
    """``|AB|`` on the line through ``O`` with the given direction, ``None`` if undefined."""
    O = as_point(O, body.dim)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    exterior = body.classify(O, tol).position is Position.EXTERIOR
    h = _hit_interval(body, O, d, exterior)
    return None if h is None else float(h.t_hi - h.t_lo)


def sample_direction(body: Body, O, direction, tol: float = DEFAULT_TOL) -> DirectionSample:
    O = as_point(O, body.dim)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    pos = body.classify(O, tol).position
    h = _hit_interval(body, O, d, pos is Position.EXTERIOR)
    if h is None:
        return DirectionSample(d, None, math.nan)
    return DirectionSample(d, Chord(Line(O, d), h.t_lo, h.t_hi, pos), float(h.t_hi - h.t_lo))


class _Objective:
    """Chord length as a function of direction, with a vectorised path for halfspace bodies."""

    def __init__(self, body: Body, O: np.ndarray, position: Position):
        self.body = body
        self.O = O
        self.exterior = position is Position.EXTERIOR
        self.fast = isinstance(body, HalfspaceBody) and body.bounded
        if self.fast:
            self.normals = body.normals
            self.slack = body.offsets - body.normals @ O
            self.normals_t = body.normals.T.copy()
            self.violated = self.slack < -DEFAULT_TOL * (1.0 + np.abs(body.offsets))

    def __call__(self, d: np.ndarray) -> float | None:
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self.batch(d[None, :])[0]
        return None if math.isnan(v) else float(v)

    def batch(self, dirs: np.ndarray) -> np.ndarray:
        """Lengths for the rows of ``dirs``; ``nan`` where undefined."""
        if not self.fast:
            out = [_hit_interval(self.body, self.O, d, self.exterior) for d in dirs]
            return np.array([math.nan if h is None else h.t_hi - h.t_lo for h in out])
        ad = dirs @ self.normals_t
        up = ad > PARALLEL_EPS
        dn = ad < -PARALLEL_EPS
        par = ~(up | dn)
        bad = (par & self.violated).any(axis=1)
        # callers run under np.errstate; parallel entries are masked out below
        ratio = self.slack / ad
        t_hi = np.where(up, ratio, np.inf).min(axis=1)
        t_lo = np.where(dn, ratio, -np.inf).max(axis=1)
        bad |= ~(np.isfinite(t_lo) & np.isfinite(t_hi))
        # tangent lines graze a face; tiny negative widths are rounding
        cross = t_lo > t_hi
        if cross.any():
            bad |= cross & (t_lo - t_hi > DEFAULT_TOL * np.maximum(1.0, np.abs(t_lo)))
            t_lo = np.where(cross, t_hi, t_lo)
        if self.exterior:
            bad |= t_lo <= 0
        return np.where(bad, math.nan, t_hi - t_lo)


def _tangent_basis(d: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random orthonormal basis of the hyperplane orthogonal to ``d`` (rows)."""
    n = d.size
    if n == 2:
        return np.array([[-d[1], d[0]]])
    m = np.column_stack([d, rng.standard_normal((n, n - 1))])
    q, _ = np.linalg.qr(m)
    return q[:, 1:].T


def compass_search(obj, d0: np.ndarray, maximize: bool, rng: np.random.Generator,
                   step: float = START_STEP, min_step: float = MIN_STEP):
    """Local optimum of ``obj`` on the sphere from ``d0``.

    All ``2 (n - 1)`` compass probes are evaluated together and the best
    improving one is taken.  Returns ``(direction, value, at_edge)``;
    ``at_edge`` is set when probes at the final step size left the domain
    of ``obj``.
    """
    sign = -1.0 if maximize else 1.0
    d = d0 / np.linalg.norm(d0)
    v = obj(d)
    if v is None:
        return None
    best = sign * v
    at_edge = False
    basis = _tangent_basis(d, rng)
    # in the plane a fresh tangent basis is the same line, so retrying is pointless
    retries = 1 if d.size == 2 else BASIS_RETRIES
    attempt = 0
    while step >= min_step:
        cands = np.concatenate([d + step * basis, d - step * basis])
        cands /= np.sqrt(np.einsum("ij,ij->i", cands, cands))[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = sign * obj.batch(cands)
        edge_here = bool(np.any(np.isnan(vals)))
        vals = np.where(np.isnan(vals), np.inf, vals)
        i = int(np.argmin(vals))
        if vals[i] < best:
            d, best = cands[i], float(vals[i])
            attempt = 0
            continue
        attempt += 1
        if attempt >= retries:
            at_edge = edge_here
            step *= 0.5
            attempt = 0
        basis = _tangent_basis(d, rng)
    return d, sign * best, at_edge


def _farthest_subset(cands: np.ndarray, k: int, projective: bool) -> np.ndarray:
    """Greedy farthest-point selection of ``k`` rows, starting from the first."""
    chosen = [0]
    if projective:
        dist = 1.0 - np.abs(cands @ cands[0])
    else:
        dist = 1.0 - cands @ cands[0]
    for _ in range(1, k):
        i = int(np.argmax(dist))
        chosen.append(i)
        nd = 1.0 - (np.abs(cands @ cands[i]) if projective else cands @ cands[i])
        dist = np.minimum(dist, nd)
    return cands[chosen]


def _random_interior_points(body: Body, count: int, rng: np.random.Generator) -> np.ndarray:
    c = body.interior_point()
    pts = []
    while len(pts) < count:
        u = rng.standard_normal(body.dim)
        u /= np.linalg.norm(u)
        h = body.hit(c, u)
        if h is None or not (math.isfinite(h.t_lo) and math.isfinite(h.t_hi)):
            continue
        t = h.t_lo + (h.t_hi - h.t_lo) * (0.01 + 0.98 * rng.random())
        pts.append(c + t * u)
    return np.array(pts)


def start_directions(body: Body, O, multistart: int, rng: np.random.Generator,
                     position: Position) -> np.ndarray:
    """Quasi-uniform starting directions (rows)."""
    n = body.dim
    O = as_point(O, n)
    if position is Position.EXTERIOR:
        pts = _random_interior_points(body, 8 * multistart, rng)
        cands = pts - O
        cands /= np.linalg.norm(cands, axis=1)[:, None]
        return _farthest_subset(cands, multistart, projective=False)
    if n == 2:
        a = (np.arange(multistart) + rng.random()) * (math.pi / multistart)
        return np.column_stack([np.cos(a), np.sin(a)])
    cands = rng.standard_normal((8 * multistart, n))
    cands /= np.linalg.norm(cands, axis=1)[:, None]
    return _farthest_subset(cands, multistart, projective=True)


def _same_chord(c1: Chord, c2: Chord, tol: float) -> bool:
    a1, b1, a2, b2 = c1.a, c1.b, c2.a, c2.b
    direct = max(np.linalg.norm(a1 - a2), np.linalg.norm(b1 - b2))
    swapped = max(np.linalg.norm(a1 - b2), np.linalg.norm(b1 - a2))
    return min(direct, swapped) <= tol


def _record(body: Body, O: np.ndarray, d: np.ndarray, kind: Kind, position: Position,
            tol: float) -> ExtremumRecord | None:
    h = _hit_interval(body, O, d, position is Position.EXTERIOR)
    if h is None:
        return None
    ch = Chord(Line(O, d), h.t_lo, h.t_hi, position)
    phi = math.atan2(d[1], d[0]) if body.dim == 2 else math.nan
    return ExtremumRecord(phi, kind, ch, _endpoint_features(body, ch, tol), MIN_STEP)


def find_local_extrema_nd(body: Body, O, multistart: int = 64, seed: int = 0,
                          kinds: tuple[Kind, ...] = (Kind.MIN, Kind.MAX),
                          tol: float = DEFAULT_TOL) -> list[ExtremumRecord]:
    """Local minima and maxima of the chord length found from ``multistart`` starts.

    Minima that sit on the edge of the direction domain (exterior pivot,
    chord shrinking towards a tangent line) are dropped: they are infima of
    the length, not critical chords.  Duplicates are merged when both end
    points agree within ``1e-6 * diam``, keeping the first in start order.
    """
    if multistart < 8:
        raise ValueError("multistart must be at least 8")
    O = as_point(O, body.dim)
    position = body.classify(O, tol).position
    if position is Position.BOUNDARY:
        raise ValueError("pivot on the boundary is not supported")
    rng = np.random.default_rng(seed)
    starts = start_directions(body, O, multistart, rng, position)
    obj = _Objective(body, O, position)
    merge_tol = MERGE_TOL * body.scale
    records: list[ExtremumRecord] = []
    for idx, d0 in enumerate(starts):
        for kind in kinds:
            # each branch owns its generator, so branches are independent of evaluation order
            branch_rng = np.random.default_rng([seed, idx, 0 if kind is Kind.MIN else 1])
            found = compass_search(obj, d0, kind is Kind.MAX, branch_rng)
            if found is None:
                continue
            d, value, at_edge = found
            if kind is Kind.MIN and (at_edge or value <= 1e-9 * body.scale):
                continue
            rec = _record(body, O, d, kind, position, tol)
            if rec is None:
                continue
            if any(r.kind is kind and _same_chord(r.chord, rec.chord, merge_tol) for r in records):
                continue
            records.append(rec)
    return records


def global_extremum(records: list[ExtremumRecord], kind: Kind) -> ExtremumRecord | None:
    pool = [r for r in records if r.kind is kind]
    if not pool:
        return None
    key = (lambda r: r.chord.length) if kind is Kind.MIN else (lambda r: -r.chord.length)
    return min(pool, key=key)


def verify_nd_theorems(body: Body, O, recs: list[ExtremumRecord],
                       tol: float = VERIFY_TOL) -> list[CppReport]:
    """One report per record, each naming the result it was checked against."""
    return [verify_extremum(body, O, r, tol) for r in recs]
