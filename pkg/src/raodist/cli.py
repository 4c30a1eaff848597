"""Command-line front end.

Subcommands: ``dist``, ``fisher``, ``geodesic``, ``verify`` and ``table``.
Exit status is 0 on success, 1 when verification fails and 2 on parse or
domain errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import List, Optional

import numpy as np

from . import core
from .errors import RaoDistError

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE = 0, 1, 2

_POINT_FLAGS = ("--a", "--b", "--at")


class CliError(Exception):
    """Bad input detected after argparse; reported with exit status 2."""


# -- output -------------------------------------------------------------------


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits.

    Dict order is preserved and non-finite floats become ``null``, so equal
    inputs give byte-identical output.
    """
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _matrix_text(m) -> str:
    return "[" + ", ".join("[" + ", ".join(_fmt(v) for v in row) + "]" for row in m) + "]"


# -- input --------------------------------------------------------------------


def _hyper_value(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_hyper(items: Optional[List[str]]) -> dict:
    """``["n=5", "a=1,b=2"]`` -> ``{"n": 5, "a": 1, "b": 2}``."""
    out = {}
    for item in items or ():
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            key, sep, val = part.partition("=")
            if not sep or not key.strip():
                raise CliError(f"hyperparameter {part!r} must look like key=value")
            out[key.strip()] = _hyper_value(val.strip())
    return out


def parse_vector(raw: str, flag: str) -> list:
    try:
        vals = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"{flag} must be comma-separated reals, got {raw!r}") from None
    if not vals:
        raise CliError(f"{flag} must not be empty")
    return vals


def parse_json(raw: str, flag: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"{flag} is not valid JSON: {exc.msg}") from None


def _point(args, name: str):
    raw_json = getattr(args, f"{name}_json", None)
    raw = getattr(args, name, None)
    if raw_json is not None and raw is not None:
        raise CliError(f"give either --{name} or --{name}-json, not both")
    if raw_json is not None:
        coords = parse_json(raw_json, f"--{name}-json")
    elif raw is not None:
        coords = parse_vector(raw, f"--{name}")
    else:
        raise CliError(f"--{name} is required")
    # going through the name lets simplex families infer their size
    return core.validate_params(args.family, coords, **parse_hyper(args.hyper))


def _normalise_argv(argv: List[str]) -> List[str]:
    # let "--a -1,2" through: argparse would take "-1,2" for an option
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _POINT_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _env_seed() -> int:
    raw = os.environ.get("RAODIST_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"RAODIST_SEED must be an integer, got {raw!r}") from None


# -- commands -------------------------------------------------------------------


def _pair(args):
    p, q = _point(args, "a"), _point(args, "b")
    if p.family != q.family:
        raise CliError(f"--a and --b give different manifolds: {p.family.label} vs {q.family.label}")
    return p.family, p, q


def cmd_dist(args, out) -> int:
    fam, p, q = _pair(args)
    d = core.distance(p, q)
    if args.format == "json":
        out.write(dumps({"family": fam.label, "a": list(p.coords), "b": list(q.coords),
                         "distance": d}) + "\n")
    elif args.format == "csv":
        out.write("distance\n" + _num(d) + "\n")
    else:
        out.write(_fmt(d) + "\n")
    return EXIT_OK


def cmd_fisher(args, out) -> int:
    p = _point(args, "at")
    fam = p.family
    g = core.fisher(p)
    if args.format == "json":
        out.write(dumps({"family": fam.label, "at": list(p.coords), "fisher": g}) + "\n")
    elif args.format == "csv":
        out.write(",".join(fam.coord_names) + "\n")
        for row in g:
            out.write(",".join(_num(v) for v in row) + "\n")
    else:
        out.write(_matrix_text(g) + "\n")
    return EXIT_OK


def cmd_geodesic(args, out) -> int:
    fam, p, q = _pair(args)
    if args.steps < 1:
        raise CliError("--steps must be a positive integer")
    pts = core.geodesic_path(p, q, args.steps)
    ts = np.linspace(0.0, 1.0, args.steps + 1)
    rows = [list(pt.coords) for pt in pts]
    if args.format == "json":
        out.write(dumps({"family": fam.label, "coords": list(fam.coord_names), "steps": args.steps,
                         "t": ts, "points": rows, "distance": core.distance(p, q)}) + "\n")
    elif args.format == "csv":
        out.write(",".join(["t"] + [f"coord{i + 1}" for i in range(fam.dim)]) + "\n")
        for t, row in zip(ts, rows):
            out.write(",".join(_num(v) for v in [t] + row) + "\n")
    else:
        for t, row in zip(ts, rows):
            out.write(" ".join(_fmt(v) for v in [t] + row) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .oracle.verify import BVP_TOL, FISHER_TOL, ORACLE_SUITE, run_verification

    seed = args.seed if args.seed is not None else _env_seed()
    suite = ORACLE_SUITE
    if args.families:
        wanted = {core.normalise_name(n) for n in args.families.split(",") if n.strip()}
        suite = tuple(s for s in ORACLE_SUITE if s[0] in wanted)
        missing = wanted - {s[0] for s in suite}
        if missing:
            raise CliError(f"no oracle suite entry for {', '.join(sorted(missing))}")
    if args.quick:
        n_points, n_pairs = 3, 5
    else:
        n_points, n_pairs = 10, 20
    report = run_verification(
        seed=seed, suite=suite, n_points=n_points, n_pairs=n_pairs,
        fisher_tol=FISHER_TOL if args.tol is None else args.tol,
        bvp_tol=BVP_TOL if args.bvp_tol is None else args.bvp_tol,
        workers=args.workers,
    )
    if args.format == "json":
        out.write(dumps(report) + "\n")
    elif args.format == "csv":
        out.write("family,fisher_max_rel_error,bvp_max_rel_error,pass\n")
        for e in report["families"]:
            out.write(",".join([
                json.dumps(e["family"]),
                "" if e["fisher_max_rel_error"] is None else _num(e["fisher_max_rel_error"]),
                "" if e["bvp_max_rel_error"] is None else _num(e["bvp_max_rel_error"]),
                "true" if e["pass"] else "false",
            ]) + "\n")
    else:
        for e in report["families"]:
            fe = "-" if e["fisher_max_rel_error"] is None else f"{e['fisher_max_rel_error']:.2e}"
            be = "-" if e["bvp_max_rel_error"] is None else f"{e['bvp_max_rel_error']:.2e}"
            status = "PASS" if e["pass"] else "FAIL"
            out.write(f"{status}  {e['family']:<42} fisher {fe:>9}  bvp {be:>9}\n")
        out.write(("all checks passed" if report["pass"] else "verification FAILED") + "\n")
    return EXIT_OK if report["pass"] else EXIT_VERIFY_FAILED


# families whose size has no default
TABLE_HYPER = {
    "categorical": {"categories": 3},
    "multinomial": {"categories": 3, "trials": 1},
    "negative_multinomial": {"categories": 3, "x_n": 1},
}


def table_rows() -> list:
    """Closed-form distance of every registered family at its canonical points."""
    rows = []
    for name in core.family_names():
        fam = core.get_family(name, **TABLE_HYPER.get(name, {}))
        if not fam.canonical:
            continue
        a, b = fam.canonical
        p, q = core.validate_params(fam, a), core.validate_params(fam, b)
        rows.append({"family": fam.label, "a": list(p.coords), "b": list(q.coords),
                     "distance": core.distance(p, q), "formula": fam.description})
    return rows


def cmd_table(args, out) -> int:
    rows = table_rows()
    if args.format == "json":
        out.write(dumps({"rows": rows}) + "\n")
    elif args.format == "csv":
        out.write("family,a,b,distance\n")
        for r in rows:
            a = " ".join(_num(v) for v in r["a"])
            b = " ".join(_num(v) for v in r["b"])
            out.write(f"{json.dumps(r['family'])},{a},{b},{_num(r['distance'])}\n")
    else:
        for r in rows:
            a = "(" + ", ".join(_fmt(v) for v in r["a"]) + ")"
            b = "(" + ", ".join(_fmt(v) for v in r["b"]) + ")"
            out.write(f"{r['family']:<42} {a:<26} {b:<26} {_fmt(r['distance'])}\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="raodist", description="Fisher-Rao distances between distributions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, points=()):
        p.add_argument("--family", required=True, help="registered family name")
        p.add_argument("--hyper", action="append", metavar="KEY=VALUE",
                       help="hyperparameter; repeat or comma-separate")
        for name in points:
            p.add_argument(f"--{name}", metavar="X1,X2,...", help="comma-separated coordinates")
            if name != "at":
                p.add_argument(f"--{name}-json", dest=f"{name}_json", metavar="JSON",
                               help="coordinates or matrix as JSON")
        if "at" in points:
            p.add_argument("--at-json", dest="at_json", metavar="JSON")

    def fmt(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("dist", help="closed-form Fisher-Rao distance")
    common(p, ("a", "b"))
    fmt(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("fisher", help="Fisher information matrix")
    common(p, ("at",))
    fmt(p)
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("geodesic", help="sample the minimising geodesic")
    common(p, ("a", "b"))
    p.add_argument("--steps", type=int, default=10, help="number of intervals")
    fmt(p)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("verify", help="check closed forms against the numerical oracle")
    p.add_argument("--seed", type=int, default=None, help="default: $RAODIST_SEED or 0")
    p.add_argument("--tol", type=float, default=None, help="Fisher relative threshold (1e-4)")
    p.add_argument("--bvp-tol", type=float, default=None, help="distance relative threshold (3e-3)")
    p.add_argument("--families", default=None, help="comma-separated subset of the suite")
    p.add_argument("--quick", action="store_true", help="3 points and 5 pairs per family")
    p.add_argument("--workers", type=int, default=1)
    fmt(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="distances at canonical points for every family")
    fmt(p)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_normalise_argv(argv))
        buf = io.StringIO()
        code = args.func(args, buf)
    except (CliError, RaoDistError) as exc:
        err.write(f"raodist: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and friends
        return int(exc.code or 0)
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
