"""Residuals of the concurrent-perpendiculars property at a chord.

At a chord ``[AB]`` through a pivot ``O`` the property asks that the normal
to the supporting line (hyperplane) at ``A``, the normal at ``B`` and the
hyperplane through ``O`` orthogonal to ``AB`` share a point.  Residuals are
distances divided by ``|AB|`` so thresholds are scale free.  A small
residual is a necessary condition for a critical chord, never a proof of
optimality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Body, Chord, Position
from .chord_scan import ExtremumRecord, Kind
from .geometry import (
    DEFAULT_TOL,
    Hyperplane,
    Line,
    as_point,
    line_intersection_2d,
    line_line_closest,
    perp,
)

VERIFY_TOL = 1e-6


def segment_chord(a, b, pivot_position: Position | None = None) -> Chord:
    """Chord with end points ``a`` (upper parameter) and ``b``."""
    a = as_point(a)
    b = as_point(b, a.size)
    length = float(np.linalg.norm(a - b))
    if length == 0:
        raise ValueError("zero-length chord")
    return Chord(Line.through(b, a), 0.0, length, pivot_position)


@dataclass(eq=False)
class CppReport:
    chord: Chord
    pivot: np.ndarray
    support_a: Hyperplane | None
    support_b: Hyperplane | None
    normal_a: Line
    normal_b: Line
    concurrency_point: np.ndarray | None
    residual_normals: float
    residual_hyperplane: float
    smooth_a: bool = True
    smooth_b: bool = True
    kind: str | None = None
    theorem: str | None = None
    passed: bool | None = None
    d_a: int | None = None
    d_b: int | None = None
    violations: list[str] = field(default_factory=list)
    cone_residuals: list[tuple[int, int, float, float]] = field(default_factory=list)

    def to_text(self, prefix: str = "") -> str:
        """Flat ``key=value`` block, one key per line, floats with 17 significant digits."""
        return "\n".join(f"{prefix}{k}={v}" for k, v in self.items()) + "\n"

    def items(self):
        yield "kind", self.kind or "-"
        yield "a", fmt_vec(self.chord.a)
        yield "b", fmt_vec(self.chord.b)
        yield "length", fmt(self.chord.length)
        yield "pivot", fmt_vec(self.pivot)
        yield "smooth_a", str(self.smooth_a).lower()
        yield "smooth_b", str(self.smooth_b).lower()
        yield "d_a", "-" if self.d_a is None else str(self.d_a)
        yield "d_b", "-" if self.d_b is None else str(self.d_b)
        yield "concurrency_point", "absent" if self.concurrency_point is None else fmt_vec(self.concurrency_point)
        yield "residual_normals", fmt(self.residual_normals)
        yield "residual_hyperplane", fmt(self.residual_hyperplane)
        yield "theorem", self.theorem or "-"
        yield "verdict", {True: "pass", False: "fail", None: "n/a"}[self.passed]
        yield "violations", ";".join(self.violations) or "-"


def fmt(x: float) -> str:
    # adding 0.0 folds -0.0 into 0.0 so reports do not flip sign on zeros
    return format(float(x) + 0.0, ".17g")


def fmt_vec(v) -> str:
    return ",".join(fmt(x) for x in np.asarray(v, dtype=float))


def parse_report(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            out[key] = value
    return out


def _check_chord(chord: Chord, O) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    a, b = chord.a, chord.b
    length = float(np.linalg.norm(a - b))
    if length == 0:
        raise ValueError("zero-length chord")
    O = as_point(O, a.size)
    return a, b, O, length


def cpp_residual_2d(l1: Line, l2: Line, chord: Chord, O) -> CppReport:
    """Perpendiculars to ``l1`` at ``A``, to ``l2`` at ``B`` and to ``AB`` at ``O``.

    ``residual_normals`` is the distance from the meeting point of the first
    two perpendiculars to the third one, over ``|AB|``.  In the plane this
    is also the distance to the hyperplane through ``O``, so both residuals
    coincide.
    """
    a, b, O, length = _check_chord(chord, O)
    d = (a - b) / length
    normal_a = Line(a, perp(l1.dir))
    normal_b = Line(b, perp(l2.dir))
    p = line_intersection_2d(normal_a, normal_b)
    if p is None:
        gap = line_line_closest(normal_a, normal_b)
        if gap.gap <= 1e-12 * max(1.0, length):
            # both normals are the chord line; the perpendicular at O meets it at O
            p = O.copy()
            res = 0.0
        else:
            mid = 0.5 * (gap.p1 + gap.p2)
            res = gap.gap / length
            rep = CppReport(chord, O, Hyperplane.through(a, normal_a.dir), Hyperplane.through(b, normal_b.dir),
                            normal_a, normal_b, None, res, abs(float((mid - O) @ d)) / length)
            return rep
    else:
        res = abs(float((p - O) @ d)) / length
    return CppReport(chord, O, Hyperplane.through(a, normal_a.dir), Hyperplane.through(b, normal_b.dir),
                     normal_a, normal_b, p, res, res)


def cpp_residual_nd(support_a: Hyperplane, support_b: Hyperplane, chord: Chord, O) -> CppReport:
    """Gap between the two normal lines and offset of their meeting point from ``O``'s hyperplane."""
    a, b, O, length = _check_chord(chord, O)
    d = (a - b) / length
    normal_a = Line(a, support_a.normal)
    normal_b = Line(b, support_b.normal)
    ca = line_line_closest(normal_a, normal_b)
    if ca.parallel and ca.gap <= 1e-12 * max(1.0, length):
        # coincident normals run along the chord; the orthogonal hyperplane at O cuts them at O
        point = O.copy()
        res_n = 0.0
    elif ca.parallel:
        # closest approach is a whole family; take the one nearest the hyperplane through O
        pa = normal_a.at(normal_a.param(O))
        pb = normal_b.at(normal_b.param(O))
        point = 0.5 * (pa + pb)
        res_n = ca.gap / length
    else:
        point = 0.5 * (ca.p1 + ca.p2)
        res_n = ca.gap / length
    res_h = abs(float((point - O) @ d)) / length
    concurrency = None if (ca.parallel and res_n > 0) else point
    return CppReport(chord, O, support_a, support_b, normal_a, normal_b, concurrency, res_n, res_h)


def _pair_report(body: Body, sa: Hyperplane, sb: Hyperplane, chord: Chord, O) -> CppReport:
    if body.dim == 2:
        return cpp_residual_2d(Line(chord.a, perp(sa.normal)), Line(chord.b, perp(sb.normal)), chord, O)
    return cpp_residual_nd(sa, sb, chord, O)


def verify_extremum(body: Body, O, rec: ExtremumRecord, tol: float = VERIFY_TOL,
                    feature_tol: float = DEFAULT_TOL) -> CppReport:
    """Check a critical chord against the result that governs its kind and pivot position.

    * minimum, interior pivot (or exterior pivot with the chord meeting the
      interior): both ends smooth and residuals <= ``tol``;
    * maximum of a smooth body: residuals <= ``tol``;
    * maximum of a polyhedral body: face dimensions of the end points sum to
      at most ``n - 1`` (interior pivot) or ``n`` (exterior pivot); with an
      interior pivot an end point interior to a facet forces the other to be
      a vertex.
    """
    O = as_point(O, body.dim)
    ch = rec.chord
    dist = np.linalg.norm((O - ch.line.base) - ch.line.param(O) * ch.line.dir)
    if dist > 1e-7 * max(1.0, body.scale):
        raise ValueError("record chord does not pass through the pivot")
    pos = body.classify(O, feature_tol).position
    sup_a = body.supports(ch.a, feature_tol)
    sup_b = body.supports(ch.b, feature_tol)
    if not sup_a or not sup_b:
        raise ValueError("record end points are not on the boundary")
    pairs = []
    for i, sa in enumerate(sup_a):
        for j, sb in enumerate(sup_b):
            rep = _pair_report(body, sa, sb, ch, O)
            pairs.append((max(rep.residual_normals, rep.residual_hyperplane), i, j, rep))
    # cones are reported by their worst extreme pair, never averaged
    _, _, _, report = max(pairs, key=lambda p: p[0])
    report.cone_residuals = [(i, j, r.residual_normals, r.residual_hyperplane) for _, i, j, r in pairs]
    report.smooth_a = len(sup_a) == 1
    report.smooth_b = len(sup_b) == 1
    report.kind = rec.kind.value
    fa, fb = rec.endpoint_features
    report.d_a, report.d_b = fa.d_C, fb.d_C
    n = body.dim
    worst = max(report.residual_normals, report.residual_hyperplane)
    if rec.kind is Kind.MIN:
        meets_interior = body.classify(ch.midpoint, feature_tol).position is Position.INTERIOR
        if pos is Position.INTERIOR or meets_interior:
            report.theorem = "min-interior-pivot" if pos is Position.INTERIOR else "min-exterior-pivot"
            if not report.smooth_a:
                report.violations.append(f"{report.theorem}(i): several supports at A")
            if not report.smooth_b:
                report.violations.append(f"{report.theorem}(i): several supports at B")
            if worst > tol:
                report.violations.append(f"{report.theorem}(ii): cpp residual {worst:.3g} > {tol:g}")
            report.passed = not report.violations
        else:
            report.theorem = "min-in-boundary"
    elif body.smooth:
        report.theorem = "max-smooth"
        if worst > tol:
            report.violations.append(f"max-smooth: cpp residual {worst:.3g} > {tol:g}")
        report.passed = not report.violations
    else:
        bound = n - 1 if pos is Position.INTERIOR else n
        report.theorem = "max-dimension-interior" if pos is Position.INTERIOR else "max-dimension-exterior"
        if fa.d_C + fb.d_C > bound:
            report.violations.append(f"{report.theorem}: d(A)+d(B)={fa.d_C + fb.d_C} > {bound}")
        if pos is Position.INTERIOR:
            for da, db in ((fa.d_C, fb.d_C), (fb.d_C, fa.d_C)):
                if da == n - 1 and db != 0:
                    report.violations.append("facet-corollary: opposite end point is not extreme")
        report.passed = not report.violations
    if math.isnan(worst):
        report.passed = False
        report.violations.append("residual is nan")
    return report
