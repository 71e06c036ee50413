"""``reflcutoff`` command line.

Tables go to ``--out`` (``-`` for stdout).  Without ``--out``, ``profile`` and
``finite-n`` write ``profile.<fmt>`` / ``finite_n.<fmt>`` into
``$REFLCUTOFF_OUT_DIR`` (or the current directory) together with a matplotlib
rendering of the same curves; the other commands print to stdout.

Exit status: 0 on success, 1 on invalid input, 2 when a verify suite fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .characters import WordParseError, fuse, parse_word
from .measures import eta_cs, finite_n_measure, nu_s
from .plotting import render_figure, render_svg
from .profiles import (
    COMMUTATIVE_TV,
    c_grid,
    cutoff_window_check,
    f_inf,
    finite_n_sweep,
    profile_sweep,
)
from .quadrature import DEFAULT_NODES, VERIFY_NODES
from .semigroup import ModelParams

OUT_DIR_ENV = "REFLCUTOFF_OUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_VERIFY_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def _check_s(values) -> None:
    if not values:
        raise UsageError("--s needs at least one value")
    for s in values:
        if s < 1:
            raise UsageError(f"s must be >= 1, got {s}")


def _check_nodes(nodes: int) -> None:
    if nodes < 64:
        raise UsageError(f"--nodes must be at least 64, got {nodes}")


def _default_path(name: str) -> Path:
    return Path(os.environ.get(OUT_DIR_ENV) or ".") / name


def _emit(text: str, out: str | None, default_name: str | None = None) -> Path | None:
    """Write ``text`` to ``out``; ``-`` (or no default) means stdout.  Returns the file written."""
    if out == "-" or (out is None and default_name is None):
        sys.stdout.write(text)
        return None
    path = Path(out) if out is not None else _default_path(default_name)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)
    return path


def _figure(curves, args, path: Path | None, **labels) -> None:
    target = args.figure
    if target is None and path is not None and not args.no_figure and path.suffix != ".svg":
        target = path.with_suffix(".png")
    if target:
        render_figure(curves, target, **labels)
        print(f"wrote {target}", file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_profile(args) -> int:
    _check_s(args.s)
    _check_nodes(args.nodes)
    try:
        grid = c_grid(args.c_min, args.c_max, args.step)
    except ValueError as exc:
        raise UsageError(str(exc))
    tables = [profile_sweep(s, args.c_min, args.c_max, args.step, args.nodes) for s in args.s]
    inf_curve = [f_inf(float(c)) for c in grid]
    curves = [(f"f_{t.s}", t.c, t.f_s) for t in tables] + [("f_inf", grid, inf_curve)]

    if args.format == "csv":
        text = "".join(t.to_csv(header=(k == 0)) for k, t in enumerate(tables))
    elif args.format == "json":
        text = json.dumps({
            "c": [float(c) for c in grid],
            "f_inf": inf_curve,
            "curves": [{"s": t.s, "sup_distance_to_f_inf": float(np.max(np.abs(t.f_s - t.f_inf))),
                        "points": t.to_records()} for t in tables],
        }, indent=2) + "\n"
    else:
        text = render_svg(curves, title="cutoff profiles", ylabel="d_TV")
    path = _emit(text, args.out, f"profile.{args.format}")
    _figure(curves, args, path, title="cutoff profiles", ylabel="d_TV")
    return EXIT_OK


def cmd_finite_n(args) -> int:
    _check_s([args.s])
    _check_nodes(args.nodes)
    if not args.N or min(args.N) < 2:
        raise UsageError("--N values must be integers >= 2")
    if not args.c:
        raise UsageError("--c needs at least one value")
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    rows = finite_n_sweep(args.s, args.N, args.c, args.n_max, args.nodes)
    for row in rows:
        row["status"] = "diverged" if row["tv"] is None else "ok"

    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "c", "t", "tv_commutative", "limit", "gap", "status"])
        for r in rows:
            writer.writerow([r["N"], _fmt(r["c"]), _fmt(r["t"]), _fmt(r["tv"]),
                             _fmt(r["limit"]), _fmt(r["gap"]), r["status"]])
        text = buf.getvalue()
    else:
        text = json.dumps({"s": args.s, "quantity": COMMUTATIVE_TV, "rows": rows}, indent=2) + "\n"
    path = _emit(text, args.out, f"finite_n.{args.format}")

    curves = []
    for c in args.c:
        pts = [(r["N"], r["gap"]) for r in rows if r["c"] == c and r["gap"] is not None]
        if pts:
            curves.append((f"c={c:g}", [p[0] for p in pts], [p[1] for p in pts]))
    if curves:
        top = max(max(y) for _, _, y in curves)
        _figure(curves, args, path, title=f"finite-N gap, s={args.s}", xlabel="N", ylabel="gap",
                ylim=(0.0, max(top * 1.1, 1e-6)))
    return EXIT_OK


def cmd_fuse(args) -> int:
    if args.s < 1:
        raise UsageError(f"s must be >= 1, got {args.s}")
    try:
        w1 = parse_word(args.w1, args.s)
        w2 = parse_word(args.w2, args.s)
    except WordParseError as exc:
        raise UsageError(str(exc))
    print(fuse(w1, w2))
    return EXIT_OK


def cmd_measure(args) -> int:
    _check_s([args.s])
    _check_nodes(args.nodes)
    if args.N is not None:
        if args.t is None:
            raise UsageError("--N needs --t")
        try:
            params = ModelParams(args.N, args.s, args.t)
        except ValueError as exc:
            raise UsageError(str(exc))
        fin = finite_n_measure(params, args.n_max, args.nodes)
        payload = {
            "N": args.N, "s": args.s, "t": args.t,
            "diverged": fin.diverged,
            "tail_estimate": fin.tail_estimate,
            "clipped_mass": fin.clipped_mass,
            "moments_phi": [float(m) for m in fin.moments],
            "measure": None if fin.measure is None
            else fin.measure.to_dict(args.moments, args.grid, args.nodes),
        }
    else:
        mu = nu_s(args.s) if args.c is None else eta_cs(args.s, args.c)
        payload = mu.to_dict(args.moments, args.grid, args.nodes)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_window(args) -> int:
    _check_s([args.s])
    if not args.N or min(args.N) < 2:
        raise UsageError("--N values must be integers >= 2")
    try:
        rows = cutoff_window_check(args.N, args.s, args.epsilon, args.n_max, args.nodes)
    except ValueError as exc:
        raise UsageError(str(exc))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "side", "t", "c_eff", "value", "lower_bound_only"])
    for r in rows:
        writer.writerow([r.N, r.side, _fmt(r.t), _fmt(r.c_eff), _fmt(r.value), int(r.lower_bound_only)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_nodes(args.nodes)
    try:
        reports = verify_mod.run(args.suite, args.nodes)
    except ValueError as exc:
        raise UsageError(str(exc))
    for r in reports:
        print(f"{r['suite']}: {r['cases']} cases, {r['failures']} failures, {r['seconds']:.1f}s", file=sys.stderr)
    # timings vary between runs and stay out of the report
    public = [{k: r[k] for k in ("suite", "cases", "failures", "max_error")} for r in reports]
    _emit(json.dumps(public, indent=2) + "\n", args.out)
    return EXIT_VERIFY_FAILED if any(r["failures"] for r in reports) else EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reflcutoff", description="Cutoff profiles for Brownian motion on H_N^{s+}.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out_opts(p, figure=False):
        p.add_argument("--out", help="output file, '-' for stdout")
        p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes")
        if figure:
            p.add_argument("--figure", help="also render a matplotlib figure here (png, pdf, ...)")
            p.add_argument("--no-figure", action="store_true", help="skip the figure written next to --out")

    p = sub.add_parser("profile", help="f_s(c) and f_inf(c) over a c-grid")
    p.add_argument("--s", type=_int_list, default=[1, 2, 4, 9])
    p.add_argument("--c-min", type=float, default=-4.0)
    p.add_argument("--c-max", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    out_opts(p, figure=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("finite-n", help="finite-N distance against the limit profile")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--N", type=_int_list, default=[20, 50, 100, 200])
    p.add_argument("--c", type=_float_list, default=[1.0])
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    out_opts(p, figure=True)
    p.set_defaults(func=cmd_finite_n)

    p = sub.add_parser("fuse", help="product of two irreducible characters")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("w1")
    p.add_argument("w2")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("measure", help="nu_s, eta_c^s or a finite-N law as JSON")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--c", type=float, help="tilt parameter for eta_c^s")
    p.add_argument("--N", type=int, help="finite-N law (needs --t)")
    p.add_argument("--t", type=float)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--moments", type=int, default=0, help="number of Q_n moments to include")
    p.add_argument("--grid", type=int, default=0, help="density samples to include")
    out_opts(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("window", help="distances at t = (1 +- eps) N ln N")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--N", type=_int_list, default=[200])
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--n-max", type=int, default=40)
    out_opts(p)
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("verify", help="run invariant suites, JSON report")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(verify_mod.SUITES)} or 'all'")
    p.add_argument("--out")
    p.add_argument("--nodes", type=int, default=VERIFY_NODES)
    p.set_defaults(func=cmd_verify)
    return parser


def _glue_negative_values(argv: list[str]) -> list[str]:
    """``--c -1,10`` -> ``--c=-1,10``; argparse would otherwise read ``-1,10`` as an option."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reflcutoff: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"reflcutoff: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
