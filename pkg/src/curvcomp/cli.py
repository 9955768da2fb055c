"""Command-line front end.

    curvcomp angle --space plane --k 0 1,0 0,0 0,1
    curvcomp audit --space cone:angle=3pi --k 0 --out verdict.json 1,0 1,2.513 1,6.911
    curvcomp check --space sphere:R=1,mesh=4 --k 1 --radius 0.5 v0

Point ids are vertex ids for graph spaces and comma-separated chart
coordinates for analytic ones (plane: x,y; sphere: polar,azimuth;
hyperbolic: distance,heading from the origin; cone: rho,phi).  Put ``--``
before ids that start with a minus sign.

Exit codes: 0 good / HOLDS, 3 bad / VIOLATED, 2 input or runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import comparison, globalize
from .errors import GeometryError, MalformedInput, UnknownPoint
from .metricspace import (GeodesicSpace, GraphSpace, build_cone, build_graph_space,
                          build_hyperbolic_patch, build_plane_patch, build_sphere)
from .metricspace.base import parse_floats

EXIT_GOOD, EXIT_ERROR, EXIT_BAD = 0, 2, 3

_NUM = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$")


def parse_number(text: str) -> float:
    """A float, optionally followed by ``pi`` (``3pi``, ``0.5pi``, ``pi``)."""
    m = _NUM.match(text)
    if not m or not (m.group(1) or m.group(2)):
        raise MalformedInput(f"not a number: {text!r}")
    val = float(m.group(1)) if m.group(1) else 1.0
    if m.group(2):
        val *= math.pi
    if not math.isfinite(val):
        raise MalformedInput(f"not finite: {text!r}")
    return val


def _options(body: str, allowed: set[str]) -> dict[str, str]:
    out = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, val = item.partition("=")
        if not sep or key not in allowed or key in out:
            raise MalformedInput(f"bad space option {item!r}")
        out[key] = val
    return out


def parse_space(spec: str) -> GeodesicSpace:
    """Build a space from ``graph:<path> | plane | sphere:R=..[,mesh=..] | hyperbolic |
    cone:angle=..[,res=..]``."""
    kind, _, body = spec.partition(":")
    if kind == "graph":
        if not body:
            raise MalformedInput("graph: needs a path")
        try:
            return build_graph_space(body)
        except OSError as exc:
            raise MalformedInput(f"cannot read {body}: {exc}") from exc
    if kind == "plane" and not body:
        return build_plane_patch(extent=10.0)
    if kind == "hyperbolic" and not body:
        return build_hyperbolic_patch()
    if kind == "sphere":
        opts = _options(body, {"R", "mesh"})
        radius = parse_number(opts.get("R", "1"))
        if not radius > 0:
            raise MalformedInput("sphere radius must be positive")
        if "mesh" in opts:
            level = opts["mesh"]
            if not level.isdigit():
                raise MalformedInput(f"mesh level must be a nonnegative integer: {level!r}")
            return build_sphere(radius, level=int(level))
        return build_sphere(radius)
    if kind == "cone":
        opts = _options(body, {"angle", "res"})
        if "angle" not in opts:
            raise MalformedInput("cone needs angle=")
        res = parse_number(opts["res"]) if "res" in opts else 0.01
        if not res > 0:
            raise MalformedInput("cone resolution must be positive")
        return build_cone(parse_number(opts["angle"]), res=res)
    raise MalformedInput(f"unknown space spec {spec!r}")


def parse_point(space: GeodesicSpace, text: str):
    try:
        return space.parse_point(text)
    except UnknownPoint:
        # mesh spheres also accept polar,azimuth and snap to the nearest vertex
        if isinstance(space, GraphSpace) and "," in text and space.coords(space.point(0)) is not None:
            polar, az = parse_floats(text, 2)
            scale = float(space.descriptor.params.get("R", 1.0))
            xyz = scale * np.array([math.sin(polar) * math.cos(az),
                                    math.sin(polar) * math.sin(az), math.cos(polar)])
            return space.nearest_vertex(xyz)
        raise


def _fmt(x):
    return "" if x is None else repr(float(x))


def _atomic_write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


# commands ------------------------------------------------------------------------

def cmd_angle(args) -> int:
    space = parse_space(args.space)
    p, q, r = (parse_point(space, s) for s in args.points)
    tri = comparison.make_triangle(space, p, q, r)
    tol = comparison.default_tol(space) if args.tol is None else args.tol
    comp, est = comparison.angle_deficit(space, args.k, tri, "q", args.t)
    deficit = comp - est.value
    bad = deficit > tol
    _emit({"vertex": space.format_point(q), "measured": est.value, "comparison": comp,
           "deficit": deficit, "probe": est.t, "tol": tol, "bad": bad}, args.out)
    return EXIT_BAD if bad else EXIT_GOOD


def trace_csv(space, result: globalize.AuditResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "o_id", "delta_i", "dist_p_oi", "witness_deficit"])
    rows = result.trace.rows if result.trace is not None else ()
    for row in rows:
        w.writerow([row.i, space.format_point(row.o), _fmt(row.delta), _fmt(row.dist_p_o),
                    _fmt(row.witness_deficit)])
    return buf.getvalue()


def verdict_json(space, result: globalize.AuditResult) -> dict:
    terminal = None if result.terminal is None else space.format_point(result.terminal)
    return {
        "verdict": result.verdict,
        "k": result.k,
        "trace_len": 0 if result.trace is None else len(result.trace.rows),
        "terminal": {"point": terminal, "worst_deficit": result.worst_deficit},
        "invariants": {key: bool(result.invariants[key])
                       for key in ("step_decrease", "step_locality", "delta_sum")},
    }


def cmd_audit(args) -> int:
    space = parse_space(args.space)
    p, q, r = (parse_point(space, s) for s in args.points)
    result = globalize.globalization_audit(space, args.k, p, q, r, tol=args.tol,
                                           budget=args.budget, seed=args.seed,
                                           max_steps=args.max_steps)
    trace_path = args.trace
    if trace_path is None and args.out:
        trace_path = os.path.splitext(args.out)[0] + ".csv"
    if trace_path:
        _atomic_write(trace_path, trace_csv(space, result))
    _emit(verdict_json(space, result), args.out)
    return EXIT_GOOD if result.holds else EXIT_BAD


def cmd_check(args) -> int:
    space = parse_space(args.space)
    o = parse_point(space, args.center)
    rep = comparison.local_check(space, args.k, o, args.radius, budget=args.budget,
                                 tol=args.tol, seed=args.seed)
    worst = None
    if rep.worst is not None:
        w = rep.worst
        tri = w.triangle
        worst = {"vertex": space.format_point(w.point), "measured": w.measured.value,
                 "comparison": w.comparison, "deficit": w.deficit,
                 "triangle": [space.format_point(x) for x in (tri.p, tri.q, tri.r)]}
    _emit({"center": space.format_point(o), "radius": rep.radius, "good": rep.good,
           "triangles": rep.triangles, "max_deficit": rep.max_deficit, "worst": worst},
          args.out)
    return EXIT_GOOD if rep.good else EXIT_BAD


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", required=True, help="space spec, e.g. plane or cone:angle=3pi")
    common.add_argument("--k", type=parse_number, required=True, help="curvature lower bound")
    common.add_argument("--tol", type=float, default=None,
                        help="badness tolerance (default 5h discrete, 1e-6 analytic)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=60, help="triangles sampled per ball")
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")

    ap = argparse.ArgumentParser(prog="curvcomp", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    a = sub.add_parser("angle", parents=[common], help="angle at the middle point vs comparison")
    a.add_argument("points", nargs=3, metavar="ID")
    a.add_argument("--t", type=float, default=None, help="probe scale")
    a.set_defaults(func=cmd_angle)
    b = sub.add_parser("audit", parents=[common], help="globalization audit of a seed triangle")
    b.add_argument("points", nargs=3, metavar="ID")
    b.add_argument("--trace", default=None, help="trace CSV path (default: --out with .csv)")
    b.add_argument("--max-steps", type=int, default=40)
    b.set_defaults(func=cmd_audit)
    c = sub.add_parser("check", parents=[common], help="sample triangles in a ball")
    c.add_argument("center", metavar="ID")
    c.add_argument("--radius", type=float, required=True)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except MalformedInput as exc:  # raised by parse_number inside argparse
        print(f"curvcomp: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (GeometryError, ValueError, OSError) as exc:
        print(f"curvcomp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
