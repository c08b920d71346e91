"""Command line front end.

Every subcommand prints one JSON document on stdout (or a CSV rendering with
``--format csv``).  Exit status: 0 affirmative, 1 well-formed but negative
or infeasible, 2 malformed input.

Settings are resolved as flags > config file > defaults.  The config file is
given with ``--config`` or the ``MOMENTCURVE_CONFIG`` environment variable
and holds ``key = value`` lines; recognised keys are ``eps``, ``root_eps``,
``format``, ``out`` and ``verbosity``.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import geometry, moments, oracle, region
from .kernel import Infeasible
from .tolerance import DEFAULT_TOL, Tolerance

log = logging.getLogger("momentcurve")

CONFIG_ENV = "MOMENTCURVE_CONFIG"
CONFIG_KEYS = {"eps", "root_eps", "format", "out", "verbosity"}
# options whose values may start with "-" (negative coordinates)
VALUE_OPTIONS = {"--point", "--xy", "--moments", "--tr", "--det"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, count, what):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be {count} comma-separated numbers, got {text!r}")
    if len(vals) != count or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what} must be {count} comma-separated finite numbers, got {text!r}")
    return vals


def read_config(path):
    conf = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            conf[key] = value
    return conf


def resolve_settings(args):
    path = args.config or os.environ.get(CONFIG_ENV)
    conf = read_config(path) if path else {}
    try:
        eps = float(conf.get("eps", DEFAULT_TOL.eps))
        root_eps = float(conf.get("root_eps", DEFAULT_TOL.root_eps))
        verbosity = int(conf.get("verbosity", 0))
    except ValueError as exc:
        raise UsageError(f"bad config value: {exc}")
    if args.tol is not None:
        factor = args.tol / DEFAULT_TOL.eps
        eps, root_eps = DEFAULT_TOL.eps * factor, DEFAULT_TOL.root_eps * factor
    try:
        tol = Tolerance(eps, root_eps)
    except ValueError as exc:
        raise UsageError(str(exc))
    fmt = args.format or conf.get("format", "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {fmt!r}")
    out = getattr(args, "out", None) or conf.get("out")
    return tol, fmt, out, max(verbosity, args.verbose)


# --------------------------------------------------------------------------
# subcommands; each returns (exit_code, payload)


def _n_arg(n, minimum):
    if n < minimum:
        raise UsageError(f"--n must be >= {minimum}, got {n}")
    return n


def cmd_member(args, tol, out):
    n = _n_arg(args.n, 1)
    p = _floats(args.point, 3, "--point")
    if n < 3:
        inside = region.member_small_n(n, p, tol)
        payload = {
            "n": n,
            "point": p,
            "inside": inside,
            "verdict": region.Verdict.RIM.value if inside else region.Verdict.OUTSIDE.value,
            "z_minus": p[2] if inside else None,
            "z_plus": p[2] if inside else None,
        }
        return (0 if inside else 1), payload
    cfg = region.RegionConfig(n, tol)
    cl = region.classify(cfg, p, want_witness=True)
    zr = cl.z_range
    if zr is None:
        try:
            zr = region.z_range(cfg, p[:2])
        except Infeasible:
            zr = None
    inside = cl.verdict is not region.Verdict.OUTSIDE
    payload = {
        "n": n,
        "point": p,
        "inside": inside,
        "verdict": cl.verdict.value,
        "z_minus": zr.z_minus if zr else None,
        "z_plus": zr.z_plus if zr else None,
    }
    if cl.witness is not None:
        payload["witness"] = cl.witness.to_list()
    return (0 if inside else 1), payload


def cmd_zrange(args, tol, out):
    n = _n_arg(args.n, 3)
    xy = _floats(args.xy, 2, "--xy")
    cfg = region.RegionConfig(n, tol)
    try:
        zr = region.z_range(cfg, xy)
    except Infeasible:
        return 1, {"n": n, "xy": xy, "feasible": False}
    return 0, {
        "n": n,
        "xy": xy,
        "feasible": True,
        "z_minus": zr.z_minus,
        "z_plus": zr.z_plus,
        "upper_sheet": zr.upper_sheet.to_dict(),
        "lower_sheet": zr.lower_sheet.to_dict(),
        "on_boundary": region.bflat_contains(cfg, xy) is region.Flat.ON_BOUNDARY,
    }


def _solve_payload(mv, depth, samples, tol):
    if mv.n < 3:
        sols = moments.solve_exact(mv, tol)
        return bool(sols), {"solutions": [w.to_list() for w in sols]}
    tree = moments.solve_recursive(mv, depth, samples, tol)
    sols = list(tree.solutions())
    return (not tree.empty), {"tree": tree.to_dict(), "solutions": [w.to_list() for w in sols]}


def cmd_solve(args, tol, out):
    n = _n_arg(args.n, 3)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.depth is not None and args.depth < 0:
        raise UsageError("--depth must be >= 0")
    mv = moments.MomentVector(n, *_floats(args.moments, 3, "--moments"))
    ok, body = _solve_payload(mv, args.depth, args.samples, tol)
    return (0 if ok else 1), {"n": n, "moments": list(mv.as_tuple()), "feasible": ok, **body}


def cmd_traces(args, tol, out):
    tr = _floats(args.tr, 3, "--tr")
    det = None
    if args.det is not None:
        if args.det not in ("1", "+1", "-1"):
            raise UsageError(f"--det must be +1 or -1, got {args.det!r}")
        det = int(args.det)
    try:
        ti = moments.TraceInput(args.dim, tuple(tr), det)
    except ValueError as exc:
        raise UsageError(str(exc))
    payload = {"dim": ti.dim, "n": ti.n, "branches": []}
    try:
        branches = moments.traces_to_power_sums(ti, tol)
    except Infeasible:
        return 1, payload
    any_ok = False
    for d, mv in branches:
        ok, body = _solve_payload(mv, args.depth, args.samples, tol)
        any_ok |= ok
        payload["branches"].append(
            {"det": d, "power_sums": list(mv.as_tuple()), "feasible": ok, **body}
        )
    return (0 if any_ok else 1), payload


def cmd_mesh(args, tol, out):
    n = _n_arg(args.n, 3)
    if args.subdiv < 1:
        raise UsageError("--subdiv must be >= 1")
    mesh = geometry.shell_mesh(region.RegionConfig(n, tol), args.subdiv, weld=args.weld)
    if out:
        with open(out, "w", newline="\n") as fh:
            geometry.write_obj(mesh, fh)
    return 0, {"n": n, "subdiv": args.subdiv, "out": out, **mesh.summary(), "group_names": mesh.group_names}


def cmd_outline(args, tol, out):
    n = _n_arg(args.n, 3)
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    outline = geometry.bflat_outline(region.RegionConfig(n, tol), args.samples)
    if out:
        with open(out, "w", newline="\n") as fh:
            if out.lower().endswith(".csv"):
                geometry.write_outline_csv(outline, fh)
            else:
                geometry.write_outline_svg(outline, fh)
    return 0, {"n": n, "out": out, **outline.summary(), "names": [a.name for a in outline.arcs]}


def cmd_oracle(args, tol, out):
    if args.n not in (3, 4):
        raise UsageError("--n must be 3 or 4 for the grid oracle")
    if args.check < 0:
        raise UsageError("--check must be >= 0")
    try:
        orc = oracle.build(args.n, args.step)
    except (ValueError, oracle.OracleBudgetError) as exc:
        raise UsageError(str(exc))
    probes = oracle.random_probes(args.n, args.check, args.seed)
    report = orc.agreement(probes, region.RegionConfig(args.n, tol))
    ok = report["sound_violations"] == 0 and report["complete_violations"] == 0
    return (0 if ok else 1), report


# --------------------------------------------------------------------------


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, help="sign-test eps (root_eps scales with it)")
    common.add_argument("--config", help=f"key=value settings file (default: ${CONFIG_ENV})")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="momentcurve", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("member", parents=[common], help="membership and classification")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--point", required=True, metavar="X,Y,Z")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("zrange", parents=[common], help="z range over a planar point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xy", required=True, metavar="X,Y")
    p.set_defaults(func=cmd_zrange)

    for name, func, helptext in (
        ("solve", cmd_solve, "sample solutions of the three-moment problem"),
        ("traces", cmd_traces, "orthogonal-matrix traces to eigenvalue configurations"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "solve":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--moments", required=True, metavar="X1,X2,X3")
        else:
            p.add_argument("--dim", type=int, required=True)
            p.add_argument("--tr", required=True, metavar="T1,T2,T3")
            p.add_argument("--det")
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--samples", type=int, default=3)
        p.set_defaults(func=func)

    p = sub.add_parser("mesh", parents=[common], help="OBJ mesh of both shells")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--subdiv", type=int, default=64)
    p.add_argument("--weld", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("outline", parents=[common], help="SVG/CSV outline of the planar region")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_outline)

    p = sub.add_parser("oracle", parents=[common], help="grid-oracle agreement report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--check", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)
    return parser


def _join_values(argv):
    """Turn ``--point -1,2,3`` into ``--point=-1,2,3`` so argparse accepts it."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render(payload, fmt):
    if fmt == "json":
        return json.dumps(payload, default=_jsonable, allow_nan=False)
    flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(flat.keys())
    writer.writerow(["" if v is None else v for v in flat.values()])
    return buf.getvalue().rstrip("\n")


def main(argv=None):
    argv = _join_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        tol, fmt, out, verbosity = resolve_settings(args)
        logging.basicConfig(
            level=logging.WARNING - 10 * min(verbosity, 2), stream=sys.stderr, format="%(message)s"
        )
        log.debug("tolerance %s", tol)
        code, payload = args.func(args, tol, out)
    except UsageError as exc:
        print(f"momentcurve: {exc}", file=sys.stderr)
        print(json.dumps({"error": str(exc)}))
        return 2
    except OSError as exc:
        print(f"momentcurve: {exc}", file=sys.stderr)
        print(json.dumps({"error": str(exc)}))
        return 2
    print(render(payload, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
