"""Command-line front end.

    philochord analyze  --body B.json --pivot x,y[,z...] [--grid N] [--multistart K] [--seed S] [--tol T] [--out F]
    philochord sweep    --body B.json --pivot x,y [--grid N] [--out F.csv]
    philochord philo    --body ANGLE.json --pivot x,y [--tol T] [--out F]
    philochord examples [--tol T] [--body TETRA.json] [--stated-values] [--out F]
    philochord polytope-audit --body P.json [--samples N] [--multistart K] [--seed S] [--out F]

Exit codes: 0 success, 1 a checked assertion failed, 2 the input could not
be parsed, 3 the pivot lies on the boundary, 4 a planar-only command got a
body of higher dimension.  Output goes to ``--out`` (written to a temporary
file and renamed, so a failed run never leaves a partial file) or stdout.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bodies import Angle2D, Body, PolytopeH, Position
from .bodyfile import BodyFileError, load_body
from .chord_scan import find_extrema, sweep
from .cpp import VERIFY_TOL, fmt, fmt_vec
from .nd_search import find_local_extrema_nd, verify_nd_theorems
from .philo import check_property_star, chord_ends, construct
from .polytope import far_field_audit
from .reproduce import all_checks

EXIT_OK = 0
EXIT_ASSERT = 1
EXIT_PARSE = 2
EXIT_BOUNDARY = 3
EXIT_DIMENSION = 4

DEFAULT_TOL = {"analyze": VERIFY_TOL, "sweep": VERIFY_TOL, "philo": 1e-8, "examples": 1e-9,
               "polytope-audit": 1e-9}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    body_path: str | None
    pivot: np.ndarray | None
    grid: int
    multistart: int
    seed: int
    out_path: str | None
    tolerance: float
    samples: int = 20
    stated_values: bool = False


def parse_pivot(text: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"cannot parse pivot {text!r}") from exc
    if len(vals) < 2 or not all(np.isfinite(vals)):
        raise CliError(EXIT_PARSE, "pivot needs at least two finite coordinates")
    return np.array(vals)


def _load(cfg: RunConfig) -> Body:
    if cfg.body_path is None:
        raise CliError(EXIT_PARSE, "--body is required")
    try:
        return load_body(cfg.body_path)
    except (OSError, BodyFileError) as exc:
        raise CliError(EXIT_PARSE, f"cannot load body: {exc}") from exc


def _pivot(cfg: RunConfig, body: Body) -> tuple[np.ndarray, Position]:
    if cfg.pivot is None:
        raise CliError(EXIT_PARSE, "--pivot is required")
    if cfg.pivot.size != body.dim:
        raise CliError(EXIT_PARSE, f"pivot has {cfg.pivot.size} coordinates, body dimension is {body.dim}")
    pos = body.classify(cfg.pivot).position
    if pos is Position.BOUNDARY:
        raise CliError(EXIT_BOUNDARY, "pivot lies on the boundary of the body")
    return cfg.pivot, pos


def cmd_analyze(cfg: RunConfig) -> tuple[str, int]:
    body = _load(cfg)
    O, pos = _pivot(cfg, body)
    out = io.StringIO()
    if body.dim == 2:
        recs = find_extrema(body, O, cfg.grid)
        method = f"direction-sweep grid={cfg.grid}"
    else:
        recs = find_local_extrema_nd(body, O, cfg.multistart, cfg.seed)
        method = f"compass-search multistart={cfg.multistart} seed={cfg.seed}"
    reports = verify_nd_theorems(body, O, recs, cfg.tolerance)
    failed = sum(r.passed is False for r in reports)
    out.write(f"body={body.kind}\ndim={body.dim}\npivot={fmt_vec(O)}\nposition={pos.value}\n")
    out.write(f"method={method}\ntol={cfg.tolerance:g}\nrecords={len(recs)}\n")
    for i, (rec, rep) in enumerate(zip(recs, reports)):
        out.write(f"\n[record {i}]\n")
        out.write(f"direction_angle={fmt(rec.phi_star)}\n")
        out.write(f"endpoint_tags={rec.endpoint_features[0].tag},{rec.endpoint_features[1].tag}\n")
        out.write(rep.to_text())
    out.write(f"\nfailed={failed}\nverdict={'pass' if failed == 0 else 'fail'}\n")
    return out.getvalue(), EXIT_OK if failed == 0 else EXIT_ASSERT


def cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    body = _load(cfg)
    if body.dim != 2:
        raise CliError(EXIT_DIMENSION, "sweep is planar only; use analyze for higher dimensions")
    O, _ = _pivot(cfg, body)
    out = io.StringIO()
    out.write("phi,length,derivative,in_domain\n")
    for s in sweep(body, O, cfg.grid):
        length = "" if s.length is None else fmt(s.length)
        deriv = "" if s.derivative is None else fmt(s.derivative)
        out.write(f"{fmt(s.phi)},{length},{deriv},{str(s.in_domain).lower()}\n")
    return out.getvalue(), EXIT_OK


def cmd_philo(cfg: RunConfig) -> tuple[str, int]:
    body = _load(cfg)
    if not isinstance(body, Angle2D):
        raise CliError(EXIT_PARSE, "philo needs an angle body")
    O, pos = _pivot(cfg, body)
    if pos is not Position.INTERIOR:
        raise CliError(EXIT_PARSE, "philo needs a pivot inside the angle")
    c = construct(body.vertex, body.u1, body.u2, O)
    a, b = chord_ends(c)
    len_res, ang_res = check_property_star(c)
    ok = len_res <= cfg.tolerance and ang_res <= cfg.tolerance
    lines = [
        f"vertex={fmt_vec(c.vertex)}",
        f"pivot={fmt_vec(c.pivot)}",
        "hyperbola=" + ",".join(fmt(x) for x in c.hyperbola),
        f"circle_center={fmt_vec(c.circle_center)}",
        f"circle_radius={fmt(c.circle_radius)}",
        f"E_prime={fmt_vec(c.E_prime)}",
        f"degenerate_tangency={str(c.degenerate_tangency).lower()}",
        f"a={fmt_vec(a)}",
        f"b={fmt_vec(b)}",
        f"length={fmt(np.linalg.norm(a - b))}",
        f"property_length_residual={fmt(len_res)}",
        f"property_angle_residual={fmt(ang_res)}",
        f"verdict={'pass' if ok else 'fail'}",
    ]
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_ASSERT


def cmd_examples(cfg: RunConfig) -> tuple[str, int]:
    body = _load(cfg) if cfg.body_path else None
    if body is not None and body.dim != 3:
        raise CliError(EXIT_PARSE, "the tetrahedron override must be three-dimensional")
    checks = all_checks(cfg.tolerance, body, cfg.multistart, cfg.seed, cfg.stated_values)
    failed = [c for c in checks if not c.passed]
    lines = [c.line() for c in checks]
    lines.append(f"summary passed={len(checks) - len(failed)} failed={len(failed)}")
    return "\n".join(lines) + "\n", EXIT_OK if not failed else EXIT_ASSERT


def cmd_polytope_audit(cfg: RunConfig) -> tuple[str, int]:
    body = _load(cfg)
    if not isinstance(body, PolytopeH):
        raise CliError(EXIT_PARSE, "polytope-audit needs a polytope, polygon or simplex body")
    try:
        rep = far_field_audit(body, cfg.samples, cfg.seed, cfg.multistart)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    return rep.to_text(), EXIT_OK if rep.passed else EXIT_ASSERT


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "philo": cmd_philo,
    "examples": cmd_examples,
    "polytope-audit": cmd_polytope_audit,
}


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="philochord", description="Extremal chords of convex bodies through a pivot.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--body", help="JSON body description")
        sp.add_argument("--pivot", help="comma-separated coordinates of the pivot")
        sp.add_argument("--grid", type=int, default=1024, help="direction grid size (>= 16)")
        sp.add_argument("--multistart", type=int, default=64, help="starting directions for the nD search (>= 8)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output file; stdout when omitted")
        sp.add_argument("--tol", type=float, default=None, help="verification tolerance")
        if name == "polytope-audit":
            sp.add_argument("--samples", type=int, default=20, help="number of far pivots")
        if name == "examples":
            sp.add_argument("--stated-values", action="store_true",
                            help="assert 4*sqrt(5)/5 for the vertex-direction chords instead of the clipped value")
    return p


def config_from_args(args) -> RunConfig:
    tol = DEFAULT_TOL[args.command] if args.tol is None else args.tol
    if not tol > 0:
        raise CliError(EXIT_PARSE, "--tol must be positive")
    if args.grid < 16:
        raise CliError(EXIT_PARSE, "--grid must be at least 16")
    if args.multistart < 8:
        raise CliError(EXIT_PARSE, "--multistart must be at least 8")
    pivot = parse_pivot(args.pivot) if args.pivot else None
    return RunConfig(args.command, args.body, pivot, args.grid, args.multistart, args.seed, args.out, tol,
                     getattr(args, "samples", 20), getattr(args, "stated_values", False))


def _join_pivot(argv: list[str]) -> list[str]:
    # argparse takes "-1,2" for an option flag; glue a pivot value to its flag
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--pivot" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--pivot={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_pivot(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        text, code = COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if cfg.out_path:
        write_atomic(cfg.out_path, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
