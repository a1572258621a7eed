"""Polytope-specific constants and audits for maximal and minimal chords from far pivots.

``far_field_constants`` computes the cosine bound ``c`` between directions
of exposed faces whose linear hulls meet only at the origin, the multiplier
``M = (1 + 1/sqrt(1 - c^2)) / 2`` and the radius ``M * diam``.  Beyond that
radius every local maximizer of the chord length through an exterior pivot
satisfies ``d(A) + d(B) <= n - 1``.  ``facet_angles`` gives the smallest
sine ``m`` between non-parallel facets, used for the analogous minimizer
statement.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import PolytopeH, Position
from .chord_scan import Kind
from .cpp import fmt, fmt_vec
from .geometry import DEFAULT_TOL
from .nd_search import find_local_extrema_nd

MAX_FACETS = 12
PARALLEL_TOL = 1e-12


@dataclass
class FarFieldConstants:
    c: float
    M: float
    U_radius: float
    m: float | None
    M_min: float | None
    diam: float


@dataclass
class Face:
    facets: tuple[int, ...]
    vertices: tuple[int, ...]
    dim: int
    basis: np.ndarray  # orthonormal rows spanning the direction space


def _check_size(body: PolytopeH):
    if not isinstance(body, PolytopeH):
        raise TypeError("far-field analysis needs a bounded polytope")
    if len(body.offsets) > MAX_FACETS:
        raise ValueError(f"face enumeration is capped at {MAX_FACETS} facets")


def exposed_faces(body: PolytopeH, tol: float = DEFAULT_TOL) -> list[Face]:
    """Faces of dimension ``1 .. n-1``, one per distinct vertex set."""
    _check_size(body)
    verts = body.vertices()
    res = verts @ body.normals.T - body.offsets  # <= 0 inside
    on = np.abs(res) <= tol * (1.0 + np.abs(body.offsets))
    faces: dict[tuple[int, ...], Face] = {}
    m = len(body.offsets)
    for k in range(1, m + 1):
        for combo in itertools.combinations(range(m), k):
            vs = tuple(int(i) for i in np.flatnonzero(np.all(on[:, combo], axis=1)))
            if len(vs) < 2 or vs in faces:
                continue
            diffs = verts[list(vs[1:])] - verts[vs[0]]
            u, s, vt = np.linalg.svd(diffs)
            r = int(np.sum(s > 1e-9 * max(1.0, s[0])))
            if r < 1 or r >= body.dim:
                continue
            faces[vs] = Face(combo, vs, r, vt[:r])
    return list(faces.values())


def _trivially_intersecting(b1: np.ndarray, b2: np.ndarray) -> bool:
    joint = np.vstack([b1, b2])
    s = np.linalg.svd(joint, compute_uv=False)
    r = int(np.sum(s > 1e-9 * max(1.0, s[0])))
    return r == len(b1) + len(b2)


def subspace_cosine(b1: np.ndarray, b2: np.ndarray) -> float:
    """Largest ``<u1, u2>`` over unit vectors of two subspaces (cosine of the smallest principal angle)."""
    return float(np.linalg.svd(b1 @ b2.T, compute_uv=False)[0])


def facet_angles(body: PolytopeH, tol: float = PARALLEL_TOL):
    """Angles between all facet pairs, the smallest non-parallel ``|sin|`` and a parallel flag."""
    nrm = body.normals
    angles = []
    sines = []
    parallel = False
    for i, j in itertools.combinations(range(len(nrm)), 2):
        cos = float(np.clip(nrm[i] @ nrm[j], -1.0, 1.0))
        angles.append(math.acos(cos))
        if 1.0 - abs(cos) <= tol:
            parallel = True
            continue
        # sine from the cross term keeps accuracy near parallel pairs
        sines.append(math.sqrt(max(0.0, 1.0 - cos * cos)))
    m = min(sines) if sines else None
    return angles, m, parallel


def far_field_constants(body: PolytopeH) -> FarFieldConstants:
    faces = exposed_faces(body)
    c = 0.0
    for f1, f2 in itertools.combinations(faces, 2):
        if _trivially_intersecting(f1.basis, f2.basis):
            c = max(c, subspace_cosine(f1.basis, f2.basis))
    c = min(c, 1.0)
    if c >= 1.0:
        raise ArithmeticError("cosine bound reached 1; face subspaces are not trivially intersecting")
    M = 0.5 * (1.0 + 1.0 / math.sqrt(1.0 - c * c))
    diam = body.scale
    _, m, _ = facet_angles(body)
    M_min = None if m is None else 0.5 * (1.0 + 1.0 / m)
    return FarFieldConstants(c, M, M * diam, m, M_min, diam)


def l9_bound_check(OA: float, AB: float, theta: float) -> float:
    """Slack ``1 + 1/sin(theta) - 2 OA / AB`` of the far-angle inequality."""
    if not (0.0 < theta < math.pi / 2):
        raise ValueError("theta must lie in (0, pi/2)")
    if not (OA > AB > 0):
        raise ValueError("need OA > AB > 0")
    return 1.0 + 1.0 / math.sin(theta) - 2.0 * OA / AB


def audit_radius(body: PolytopeH, consts: FarFieldConstants | None = None) -> float:
    consts = consts or far_field_constants(body)
    reach = consts.U_radius
    if consts.M_min is not None:
        reach = max(reach, consts.M_min * consts.diam)
    return 1.0 + reach + consts.diam


@dataclass
class AuditReport:
    constants: FarFieldConstants
    radius: float
    has_parallel_facets: bool
    lines: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    max_records: int = 0
    min_records: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        head = [
            f"c={fmt(self.constants.c)}",
            f"M={fmt(self.constants.M)}",
            f"U_radius={fmt(self.constants.U_radius)}",
            f"m={'-' if self.constants.m is None else fmt(self.constants.m)}",
            f"M_min={'-' if self.constants.M_min is None else fmt(self.constants.M_min)}",
            f"radius={fmt(self.radius)}",
            f"parallel_facets={str(self.has_parallel_facets).lower()}",
        ]
        tail = [f"verdict={'pass' if self.passed else 'fail'}"]
        return "\n".join(head + self.lines + tail) + "\n"


def _sphere_points(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1)[:, None]


def far_field_audit(body: PolytopeH, O_samples: int = 20, seed: int = 0,
                    multistart: int = 16, tol: float = DEFAULT_TOL) -> AuditReport:
    """Check maximizer dimension sums and minimizer placement for pivots far outside the body."""
    consts = far_field_constants(body)
    _, _, parallel = facet_angles(body)
    radius = audit_radius(body, consts)
    report = AuditReport(consts, radius, parallel)
    rng = np.random.default_rng(seed)
    center = body.interior_point()
    n = body.dim
    for k, u in enumerate(_sphere_points(n, O_samples, rng)):
        O = center + radius * u
        recs = find_local_extrema_nd(body, O, multistart, seed + 1 + k, tol=tol)
        for i, r in enumerate(recs):
            fa, fb = r.endpoint_features
            where = f"O={fmt_vec(O)} record={i} kind={r.kind.value} length={fmt(r.chord.length)}"
            if r.kind is Kind.MAX:
                report.max_records += 1
                s = fa.d_C + fb.d_C
                ok = s <= n - 1
                line = f"{where} d_a={fa.d_C} d_b={fb.d_C} check=dimension-sum verdict={'pass' if ok else 'fail'}"
            else:
                report.min_records += 1
                if parallel:
                    line = f"{where} check=min-in-boundary verdict=skipped"
                    report.lines.append(line)
                    continue
                pts = (r.chord.a, r.chord.b, r.chord.midpoint)
                ok = all(body.classify(p, tol).position is Position.BOUNDARY for p in pts)
                line = f"{where} check=min-in-boundary verdict={'pass' if ok else 'fail'}"
            report.lines.append(line)
            if not ok:
                report.failures.append(line)
    return report
