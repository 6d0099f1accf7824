"""Command-line entry point: ``dcenters <command> [options]``.

Exit status is 0 when every requested check passes, 1 when one fails and
2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import circle, dynamics, hcomp, render, series, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def format_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(x) for x in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _positive(name: str, value: int, low: int = 1) -> None:
    if value < low:
        raise UsageError(f"--{name} must be at least {low}")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_identity(args) -> int:
    _positive("n-max", args.n_max)
    _positive("d-max", args.d_max)
    rows, ok = [], True
    for n in range(1, args.n_max + 1):
        for d in range(1, args.d_max + 1):
            lhs, rhs, eq = hcomp.identity_check(n, d)
            ok &= eq
            rows.append((n, d, lhs, "=" if eq else "!=", rhs))
    print(format_table(["n", "d", "sum", "", "d^n-1"], rows))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_series(args) -> int:
    _positive("d", args.d)
    _positive("order", args.order, 0)
    stages = series.g_series_stages(args.d, args.order)
    target = series.closed_form_series(args.d, args.order)
    names = list(stages)
    rows = []
    for k in range(args.order + 1):
        rows.append([k] + [stages[s][k] for s in names] + [target[k]])
    print(format_table(["k"] + names + ["closed_form"], rows))
    ok = all(s == target for s in stages.values())
    print("all stages agree" if ok else "stages disagree with the closed form")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rotation_sets(args) -> int:
    try:
        sets = circle.enumerate_rotation_sets(args.d, args.p, args.q)
    except circle.CircleDomainError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for rs in sets:
        tm, tp = circle.widest_gap(rs)
        rows.append((rs.sector(), " ".join(str(a) for a in rs.angles), f"({tm}, {tp})"))
    print(format_table(["sector", "angles", "widest gap"], rows))
    return EXIT_OK if len(sets) == args.d - 1 else EXIT_FAIL


def cmd_counts(args) -> int:
    _positive("n", args.n)
    _positive("d", args.d, 2)
    rows, total = [], 0
    ok = True
    for P in hcomp.iter_hcompositions(args.n):
        term = hcomp.term_value(P, args.d)
        renorm = "yes" if hcomp.renormalization_split(P) else "no"
        if P.first == 1:
            # every return is immediate: only c = 0, counted once below
            rows.append((str(P), P.r, P.omega, "-", "-", "-", "-", term, renorm))
            continue
        n_sets, n_its, pairs = circle.angle_pair_factors(P, args.d)
        cnt = circle.angle_pair_count(P, args.d)
        ok &= cnt == term
        total += cnt
        rows.append((str(P), P.r, P.omega, n_sets, n_its, pairs, cnt, term, renorm))
    headers = ["P", "r", "omega", "sets", "itineraries", "pairs", "count", "term", "renormalizing"]
    print(format_table(headers, rows))
    centers = args.d ** (args.n - 1)
    ok &= total + 1 == centers
    print(f"sum of counts + 1 = {total + 1}; d^(n-1) = {centers}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_centers(args) -> int:
    _positive("d", args.d, 2)
    _positive("n", args.n)
    try:
        centers = dynamics.find_centers(args.d, args.n)
    except dynamics.PolynomialSizeError as exc:
        raise UsageError(str(exc)) from None
    except (dynamics.SolverError, dynamics.CensusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rows = [(f"{x.c.real:+.15f}", f"{x.c.imag:+.15f}", x.exact_period, f"{x.residual:.1e}") for x in centers]
    print(format_table(["re", "im", "period", "residual"], rows))
    census = dynamics.exact_period_census(args.d, args.n, centers=centers)
    oracle = {m: dynamics.exact_period_count(args.d, m) for m in census}
    print(format_table(["period", "found", "expected"], [(m, census[m], oracle[m]) for m in census]))
    if args.dump:
        dynamics.write_root_dump(args.dump, args.d, args.n, centers)
    return EXIT_OK if census == oracle else EXIT_FAIL


def cmd_render(args) -> int:
    _positive("d", args.d, 2)
    try:
        vp = render.Viewport(args.center, args.half_width, args.width, args.height or args.width, args.max_iter)
        mask = render.render_julia(args.c, args.d, vp, args.out, orbit_n=args.orbit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"wrote {args.out}: {vp.width}x{vp.height}, {int(mask.sum())} interior pixels")
    return EXIT_OK


def cmd_verify_all(args) -> int:
    try:
        report = verify.run_checks()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print("\n".join(report.lines()))
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcenters", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identity", help="check the weighted H-composition sum against d^n - 1")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("series", help="compare every generating-function stage with the closed form")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("rotation-sets", help="list rotation sets with rotation number p/q")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_rotation_sets)

    p = sub.add_parser("counts", help="per-composition count ledger")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("centers", help="solve for all centers of period dividing n")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dump", metavar="CSV", help="write the roots to a CSV file")
    p.set_defaults(func=cmd_centers)

    p = sub.add_parser("render", help="render a filled Julia set to a P6 PPM file")
    p.add_argument("--c", type=parse_complex, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--center", type=parse_complex, default=0j)
    p.add_argument("--half-width", type=float, default=2.0)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=None, help="defaults to --width")
    p.add_argument("--max-iter", type=int, default=256)
    p.add_argument("--orbit", type=int, default=None, metavar="N", help="mark N critical-orbit points")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify-all", help="run the acceptance checks")
    p.add_argument("--json", metavar="PATH", help="also write a JSON report")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
