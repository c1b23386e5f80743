"""Command-line front end.

Exit codes: 0 success / found, 1 well-formed "not found", 2 usage or input
error. Output is line-oriented ``key value`` text and depends only on the
arguments and input files.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import engine, grid, quasirand, search
from .prng import SplitMix64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one-line diagnostic, exit 2
        raise UsageError(f"{self.prog}: {message}")


def _rational(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    try:
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected NUM/DEN, got {text!r}") from None
    return value


def _index_list(text: str) -> Optional[list[int]]:
    """``1,3,5-8`` style list of 1-based labels; ``all`` gives ``None``."""
    if text == "all":
        return None
    out: list[int] = []
    try:
        for part in text.split(","):
            lo, sep, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from None
    return out


def _load_grid(path: str) -> grid.GridColouring:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return grid.parse_colouring(data)
    except grid.GridFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _fmt_rect(rect: grid.Rectangle) -> str:
    return f"RECT {rect.i} {rect.i2} {rect.j} {rect.j2}"


def _fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# subcommands ------------------------------------------------------------------

def cmd_gen(args, out) -> int:
    c = grid.random_colouring(args.r, args.m, args.n, args.seed)
    data = grid.serialize_colouring(c)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        out.write(data.decode())
    return 0


def cmd_verify(args, out) -> int:
    c = _load_grid(args.file)
    print(f"valid 1\nr {c.r}\nM {c.M}\nN {c.N}", file=out)
    print(f"rectangles {grid.count_alternating_rectangles(c)}", file=out)
    return 0


def cmd_rect(args, out) -> int:
    c = _load_grid(args.file)
    rect = grid.find_alternating_rectangle(c)
    print(_fmt_rect(rect) if rect else "NONE", file=out)
    if args.count:
        print(f"count {grid.count_alternating_rectangles(c)}", file=out)
    return 0 if rect else 1


def _print_graph_stats(g: quasirand.Graph, out) -> None:
    print(f"n {g.n}\nedges {g.num_edges}", file=out)
    print(f"hom {quasirand.hom_c4(g)}", file=out)
    if g.n:
        print(f"density {_fmt_q(quasirand.density(g))}", file=out)


def _print_partition_stats(pg: quasirand.PartitionedGraph, out) -> None:
    ok, edge = quasirand.is_kpartite(pg)
    print(f"k {pg.k}\nkpartite {int(ok)}", file=out)
    if not ok:
        print(f"violation {edge[0]} {edge[1]}", file=out)
        return
    print(f"imbalance {_fmt_q(quasirand.partition_imbalance(pg))}", file=out)
    try:
        print(f"bound {_fmt_q(quasirand.lemma_lower_bound(pg))}", file=out)
    except ValueError as exc:
        print(f"bound n/a ({exc})", file=out)


def cmd_hom(args, out) -> int:
    if args.graph:
        try:
            obj = quasirand.parse_graph(Path(args.graph).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {args.graph}: {exc.strerror}") from None
        except ValueError as exc:
            raise UsageError(f"{args.graph}: {exc}") from None
        if isinstance(obj, quasirand.PartitionedGraph):
            _print_graph_stats(obj.graph, out)
            _print_partition_stats(obj, out)
        else:
            _print_graph_stats(obj, out)
        return 0
    if args.rows is None:
        raise UsageError("hom --grid needs --rows J1 J2")
    c = _load_grid(args.grid)
    try:
        pg = grid.vertical_partition(c, *args.rows)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _print_graph_stats(pg.graph, out)
    _print_partition_stats(pg, out)
    return 0


def cmd_lemma_check(args, out) -> int:
    seeds = SplitMix64(args.seed)
    violations = 0
    for _ in range(args.trials):
        pg = quasirand.random_kpartite(args.k, args.class_size, args.p, seeds.next())
        if quasirand.hom_c4(pg.graph) < quasirand.lemma_lower_bound(pg):
            violations += 1
    print(f"trials {args.trials}\nviolations {violations}", file=out)
    return 0 if violations == 0 else 1


def cmd_shelah(args, out) -> int:
    c = _load_grid(args.file)
    try:
        res = engine.shelah_extract(c, args.rows)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(res, engine.NoCollision):
        print(f"NO_COLLISION\nsignatures {res.count}", file=out)
        return 1
    print(_fmt_rect(res), file=out)
    return 0


def cmd_dichotomy(args, out) -> int:
    c = _load_grid(args.file)
    cols = args.cols or list(range(1, c.M + 1))
    rows = args.rows or list(range(1, c.N + 1))
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples needs --seed")
    mode = "sampled" if args.samples is not None else "exact"
    try:
        res = engine.dichotomy_search(
            c, cols, rows, args.c4const, mode, args.samples or 0, args.seed, args.cap
        )
    except engine.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"row_threshold {_fmt_q(engine.row_threshold(c.r, len(set(rows))))}", file=out)
    print(f"column_threshold {_fmt_q(engine.column_threshold(c.r, len(set(cols)), args.c4const))}", file=out)
    if isinstance(res, engine.RowPattern):
        p = res.pattern
        print("outcome row", file=out)
        print("cycle " + " ".join(map(str, p.vertices)), file=out)
        print("colours " + " ".join(map(str, p.kappas)), file=out)
        print(f"support {len(res.rows)}", file=out)
        print("members " + " ".join(map(str, res.rows)), file=out)
        return 0
    if isinstance(res, engine.ColumnPattern):
        p = res.pattern
        print(f"outcome column\nedge {p.b1} {p.b2}\ncolour {p.kappa}", file=out)
        print(f"support {len(res.columns)}", file=out)
        print("members " + " ".join(map(str, res.columns)), file=out)
        return 0
    print("outcome none", file=out)
    return 1


def cmd_refine(args, out) -> int:
    c = _load_grid(args.file)
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples needs --seed")
    mode = "sampled" if args.samples is not None else "exact"
    try:
        traj = engine.refine(
            c, args.max_steps, args.c4const, mode, args.samples or 0, args.seed,
            enforce_precondition=not args.relaxed, cap=args.cap,
        )
    except engine.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    out.write(engine.format_trajectory(traj, args.verbose))
    return 0


def cmd_pigeonhole(args, out) -> int:
    c = _load_grid(args.file)
    try:
        state = engine.parse_trajectory(Path(args.state).read_text())[-1]
    except OSError as exc:
        raise UsageError(f"cannot read {args.state}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{args.state}: {exc}") from None
    try:
        res = engine.final_pigeonhole(c, state, args.case)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print("V " + " ".join(map(str, res.V)), file=out)
    if isinstance(res, engine.NoCollision):
        print(f"NO_COLLISION\nsignatures {res.count}", file=out)
        return 1
    print(f"COLLISION {res.first} {res.second}", file=out)
    print(_fmt_rect(res.rectangle), file=out)
    return 0


def cmd_search(args, out) -> int:
    progress = search.progress_printer(sys.stderr) if args.progress else None
    res = search.exhaustive_search(
        args.r, args.m, args.n, args.timeout_ms / 1000, not args.no_symmetry, args.seed, progress
    )
    print(f"outcome {res.kind}\nnodes {res.nodes}", file=out)
    if res.kind != "witness":
        return 1
    data = grid.serialize_colouring(res.witness)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        out.write(data.decode())
    return 0


def cmd_bounds(args, out) -> int:
    try:
        rep = engine.bounds_table(args.r, args.c4const)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dec = engine.decimal_string
    rows = [
        ("r", rep.r),
        ("shelah", rep.shelah),
        ("shelah_approx", dec(rep.shelah)),
        ("gyarfas", rep.gyarfas),
        ("gyarfas_approx", dec(rep.gyarfas)),
        ("theorem_threshold", _fmt_q(rep.theorem_threshold)),
        ("theorem_threshold_approx", dec(rep.theorem_threshold)),
        ("ratio_approx", dec(rep.ratio)),
        ("deficit_times_r2_approx", dec((1 - rep.ratio) * rep.r**2)),
        ("worst_J", rep.worst_J),
        ("worst_case", rep.worst_case),
        ("constant_c", _fmt_q(rep.constant_c)),
        ("valid", int(rep.valid)),
        ("message", rep.message),
        ("corsten", rep.corsten),
    ]
    for key, value in rows:
        print(f"{key} {value}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gridramsey", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", help="seeded random colouring")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("verify", help="check a GRIDCOL file and count rectangles")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("rect", help="least alternating rectangle")
    s.add_argument("file")
    s.add_argument("--count", action="store_true")
    s.set_defaults(func=cmd_rect)

    s = sub.add_parser("hom", help="C4 homomorphism count of a graph or intersection graph")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--grid")
    s.add_argument("--rows", type=int, nargs=2, metavar=("J1", "J2"))
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("lemma-check", help="random k-partite check of the C4 lower bound")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--class-size", type=int, required=True)
    s.add_argument("--p", type=_rational, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_lemma_check)

    s = sub.add_parser("shelah", help="signature pigeonhole on r+1 rows")
    s.add_argument("file")
    s.add_argument("--rows", type=_index_list)
    s.set_defaults(func=cmd_shelah)

    s = sub.add_parser("dichotomy", help="over-represented C4 or vertical edge")
    s.add_argument("file")
    s.add_argument("--cols", type=_index_list, required=True)
    s.add_argument("--rows", type=_index_list, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--c4const", type=_rational, default=engine.DEFAULT_CONSTANT_C)
    s.add_argument("--cap", type=int, default=engine.EXACT_CAP)
    s.set_defaults(func=cmd_dichotomy)

    s = sub.add_parser("refine", help="iterate the dichotomy and dump the trajectory")
    s.add_argument("file")
    s.add_argument("--max-steps", type=int, required=True)
    s.add_argument("--c4const", type=_rational, default=engine.DEFAULT_CONSTANT_C)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--cap", type=int, default=engine.EXACT_CAP)
    s.add_argument("--relaxed", action="store_true", help="continue below |B| = r^5")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("pigeonhole", help="closing pigeonhole on a refinement state")
    s.add_argument("file")
    s.add_argument("--state", required=True)
    s.add_argument("--case", type=int, choices=(1, 2), required=True)
    s.set_defaults(func=cmd_pigeonhole)

    s = sub.add_parser("search", help="backtracking search for a rectangle-free colouring")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--timeout-ms", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--no-symmetry", action="store_true")
    s.add_argument("--progress", action="store_true", help="NODES/DEPTH lines on stderr")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("bounds", help="exact Shelah, Gyarfas and refinement bounds")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--c4const", type=_rational, default=engine.DEFAULT_CONSTANT_C)
    s.set_defaults(func=cmd_bounds)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
