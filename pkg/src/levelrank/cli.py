"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time

import numpy as np

from .engine import compute_pagerank
from .generate import GeneratorConfig, generate_ba, replicate
from .graph import Graph, GraphFormatError, read_edge_list, serialize
from .partition import find_components, format_census, reference_partition, scc_partition, validate_partition
from .schedule import DEFAULT_SMALL_THRESHOLD, build_schedule, export_reordered
from .solvers import SolverParams, dense_solve, oracle_r1_to_r3, solve_baseline_trace

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VALIDATION = 0, 1, 2, 3
VALIDATE_MAX_VERTICES = 2000

TOL_SWEEP = [10.0 ** -k for k in range(1, 21)]
C_SWEEP_TOL = 1e-10
C_SWEEP = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99]

log = logging.getLogger("levelrank")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _damping(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("c must lie in (0, 1)")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _keep_rule(text):
    if text in ("log2", "all"):
        return text
    if text.startswith("fixed:") and text[6:].isdigit():
        return text
    raise argparse.ArgumentTypeError("expected log2, all or fixed:K")


def _values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levelrank", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def rank_opts(p, tol_default=1e-9):
        p.add_argument("--c", type=_damping, default=0.85)
        p.add_argument("--tol", type=_positive_float, default=tol_default)
        p.add_argument("--small-threshold", type=_positive_int, default=DEFAULT_SMALL_THRESHOLD)
        p.add_argument("--keep-loops", action="store_true")
        p.add_argument("--parallel", action="store_true")
        p.add_argument("--threads", type=_positive_int, default=None)

    gen = sub.add_parser("generate", help="write a synthetic edge list")
    gen.add_argument("kind", choices=["ba", "replicate"])
    gen.add_argument("--input")
    gen.add_argument("--out")
    gen.add_argument("--n", type=_positive_int, default=100_000)
    gen.add_argument("--m", type=_positive_int, default=12)
    gen.add_argument("--keep-rule", type=_keep_rule, default="log2")
    gen.add_argument("--copies", type=_positive_int, default=10)
    gen.add_argument("--bridges", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)

    part = sub.add_parser("partition", help="SCC/CAC census of a graph")
    part.add_argument("--input", required=True)
    part.add_argument("--out")

    rank = sub.add_parser("rank", help="compute non-normalized PageRank")
    rank.add_argument("--input", required=True)
    rank.add_argument("--out")
    rank.add_argument("--report")
    rank.add_argument("--method", choices=["baseline", "partitioned"], default="partitioned")
    rank.add_argument("--weights")
    rank_opts(rank)

    bench = sub.add_parser("bench", help="tolerance or damping sweep to CSV")
    bench.add_argument("--input", required=True)
    bench.add_argument("--out")
    bench.add_argument("--sweep", choices=["tol", "c"], default="tol")
    bench.add_argument("--values", type=_values)
    bench.add_argument("--weights")
    # c sweeps default to C_SWEEP_TOL
    rank_opts(bench, tol_default=None)

    spy = sub.add_parser("spy", help="edge coordinates after level/component reordering")
    spy.add_argument("--input", required=True)
    spy.add_argument("--out")
    spy.add_argument("--small-threshold", type=_positive_int, default=DEFAULT_SMALL_THRESHOLD)

    val = sub.add_parser("validate", help="oracle checks on a small graph")
    val.add_argument("--input", required=True)
    val.add_argument("--c", type=_damping, default=0.85)
    val.add_argument("--tol", type=_positive_float, default=1e-12)
    val.add_argument("--seed", type=int, default=0)
    return parser


def _load(path, keep_loops=False) -> Graph:
    return read_edge_list(path, dense_ids=True, keep_loops=keep_loops)


def _load_weights(path, n) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        if rows and all(len(r) == 1 for r in rows):
            w = np.array([float(r[0]) for r in rows])
            if w.shape[0] != n:
                raise UsageError(f"weights file has {w.shape[0]} values for {n} vertices")
        else:
            w = np.zeros(n)
            for r in rows:
                if len(r) != 2:
                    raise UsageError(f"bad weights line: {' '.join(r)!r}")
                w[int(r[0])] = float(r[1])
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad weights file: {exc}") from exc
    if (w < 0).any() or not w.any():
        raise UsageError("weights must be non-negative with some positive entry")
    return w


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args):
    if args.kind == "ba":
        g = generate_ba(GeneratorConfig(n=args.n, m=args.m, keep_rule=args.keep_rule, rng_seed=args.seed))
    else:
        if not args.input:
            raise UsageError("generate replicate needs --input")
        g = replicate(_load(args.input), args.copies, args.bridges, args.seed)
    _emit(serialize(g), args.out)
    log.info("wrote %d vertices, %d edges", g.vertex_count, g.edge_count)
    return EXIT_OK


def cmd_partition(args):
    g = _load(args.input)
    p = find_components(g)
    _emit(format_census(g, p, scc_partition(g)), args.out)
    return EXIT_OK


def _run_method(g, w, method, params, parallel, threads, small_threshold):
    if w is None:
        w = np.ones(g.vertex_count)
    start = time.perf_counter()
    if method == "baseline":
        res = solve_baseline_trace(g, w, params)
        wall = time.perf_counter() - start
        stats = {
            "method": "baseline",
            "c": params.c,
            "tol": params.tol,
            "keep_loops": params.keep_loops,
            "vertex_count": g.vertex_count,
            "edge_count": g.edge_count,
            "total_iterations": res.iterations,
            "iter_edge_work": res.iterations * int(g.rank_csr[1].shape[0]),
            "wall_time": wall,
        }
        return res.ranks, stats, None
    mode = "parallel" if parallel else "sequential"
    ranks, report = compute_pagerank(g, w, params, mode=mode, threads=threads, small_threshold=small_threshold)
    stats = {
        "method": "partitioned" if not parallel else "partitioned-parallel",
        "c": params.c,
        "tol": params.tol,
        "total_iterations": report.total_iterations,
        "iter_edge_work": report.iter_edge_work + report.single_pass_edge_work,
        "wall_time": time.perf_counter() - start,
    }
    return ranks, stats, report


def cmd_rank(args):
    g = _load(args.input, args.keep_loops)
    w = _load_weights(args.weights, g.vertex_count) if args.weights else None
    params = SolverParams(args.c, args.tol, args.keep_loops)
    ranks, stats, report = _run_method(g, w, args.method, params, args.parallel, args.threads, args.small_threshold)
    buf = io.StringIO()
    for v, r in enumerate(ranks.tolist()):
        buf.write(f"{v}\t{r:.12g}\n")
    _emit(buf.getvalue(), args.out)
    if args.report:
        if report is None:
            text = "\n".join(f"{k}: {v}" for k, v in stats.items()) + "\n"
            if args.report.endswith(".json"):
                text = json.dumps(stats, indent=2)
        else:
            text = report.to_json() if args.report.endswith(".json") else report.to_text()
        _emit(text, args.report)
    elif report is not None and args.out:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_bench(args):
    g = _load(args.input, args.keep_loops)
    w = _load_weights(args.weights, g.vertex_count) if args.weights else None
    values = sorted(args.values or (TOL_SWEEP if args.sweep == "tol" else C_SWEEP))
    methods = [("baseline", False), ("partitioned", False), ("partitioned", True)]
    rows = []
    for value in values:
        c, tol = (args.c, value) if args.sweep == "tol" else (value, args.tol or C_SWEEP_TOL)
        params = SolverParams(c, tol, args.keep_loops)
        for method, parallel in methods:
            _, stats, _ = _run_method(g, w, method, params, parallel, args.threads, args.small_threshold)
            rows.append([stats["method"], repr(c), repr(tol), stats["total_iterations"],
                         stats["iter_edge_work"], f"{stats['wall_time'] * 1000:.3f}"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "c", "tol", "total_iterations", "iter_edge_work", "wall_ms"])
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_spy(args):
    g = _load(args.input)
    s = build_schedule(g, find_components(g), args.small_threshold)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            export_reordered(g, s, fh)
    else:
        export_reordered(g, s, sys.stdout)
    return EXIT_OK


def validation_checks(g: Graph, c: float = 0.85, tol: float = 1e-12, seed: int = 0):
    """Yield ``(name, ok, detail)`` for every oracle comparison on ``g``."""
    p = find_components(g)
    ref = reference_partition(g)
    yield "partition matches reference", p.canonical() == ref.canonical(), ""
    problems = validate_partition(g, p)
    yield "partition invariants", not problems, "; ".join(problems[:5])

    rng = np.random.default_rng(seed)
    perm = rng.permutation(g.vertex_count)
    gp = Graph.from_edges(g.vertex_count, perm[g.sources], perm[g.out_targets])
    pp = find_components(gp)
    relabeled = {(tuple(sorted(perm[list(m)].tolist())), k, lv) for m, k, lv in p.canonical()}
    yield "relabeling invariance", pp.canonical() == relabeled, ""

    plain = scc_partition(g)
    yield "max level not above plain SCC", p.max_level <= plain.max_level, f"{p.max_level} vs {plain.max_level}"

    params = SolverParams(c, tol)
    w = np.ones(g.vertex_count)
    exact = dense_solve(g, w, c)
    bound = tol * c / (1 - c)
    for mode in ("sequential", "parallel"):
        ranks, _ = compute_pagerank(g, w, params, mode=mode)
        err = float(np.abs(ranks - exact).max())
        yield f"{mode} ranks vs dense solve", err <= bound, f"max abs diff {err:.3g}"
    ranks, _ = compute_pagerank(g, w, params, small_threshold=1)
    err = float(np.abs(ranks - exact).max())
    yield "iterative-only ranks vs dense solve", err <= bound, f"max abs diff {err:.3g}"
    base = solve_baseline_trace(g, w, params)
    err = float(np.abs(base.ranks - exact).max())
    yield "baseline vs dense solve", err <= bound, f"max abs diff {err:.3g}"
    orc = oracle_r1_to_r3(g, w, c)
    rel = float((np.abs(orc.r3 - exact) / np.maximum(np.abs(exact), 1e-300)).max())
    yield "eigenvector PageRank rescaled vs dense solve", rel <= 1e-8, f"max rel diff {rel:.3g}"


def cmd_validate(args):
    g = _load(args.input)
    if g.vertex_count > VALIDATE_MAX_VERTICES:
        raise UsageError(f"validate is meant for small graphs (<= {VALIDATE_MAX_VERTICES} vertices)")
    failed = 0
    for name, ok, detail in validation_checks(g, args.c, args.tol, args.seed):
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail and not ok else ""))
        failed += not ok
    if failed:
        print(f"{failed} check(s) failed")
        return EXIT_VALIDATION
    print("all checks passed")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "partition": cmd_partition,
    "rank": cmd_rank,
    "bench": cmd_bench,
    "spy": cmd_spy,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already printed
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for attr in ("input", "weights"):
        path = getattr(args, attr, None)
        if path and not os.path.isfile(path):
            print(f"levelrank: cannot read {path}", file=sys.stderr)
            return EXIT_IO
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"levelrank: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError) as exc:
        print(f"levelrank: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"levelrank: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
