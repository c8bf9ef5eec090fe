"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at import.

    python benchmarks/bench_backends.py --n 100000 --m 12
"""
import argparse
import json
import os
import subprocess
import sys

import numpy as np

WORKLOAD = """
import json, sys, time
import numpy as np
from levelrank import (BACKEND, GeneratorConfig, SolverParams, build_schedule, compute_pagerank,
                       find_components, generate_ba, replicate)

n, m, copies, tol, repeats = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3]), float(sys.argv[4]), int(sys.argv[5])


def best(fn):
    fn()  # warm-up, pays any JIT cost
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, 1000 * min(times)


# the degree orientation gives one big SCC, so the power series dominates
g, t_gen = best(lambda: generate_ba(GeneratorConfig(n=n, m=m, rng_seed=1)))
cyc = generate_ba(GeneratorConfig(n=n // 4, m=m, rng_seed=2, orientation="degree"))
g = replicate(g, copies)
p, t_part = best(lambda: find_components(g))
_, t_sched = best(lambda: build_schedule(g, p))
params = SolverParams(tol=tol)
(r, rep), t_rank = best(lambda: compute_pagerank(g, None, params, partition=p))
(rc, repc), t_scc = best(lambda: compute_pagerank(cyc, None, params, small_threshold=1))
print(json.dumps({
    "backend": BACKEND, "vertices": g.vertex_count, "edges": g.edge_count,
    "ms": {"generate": t_gen, "partition": t_part, "schedule": t_sched, "rank_acyclic": t_rank,
           "rank_scc": t_scc},
    "comp": p.comp_of.tolist(), "ranks": r.tolist(), "scc_ranks": rc.tolist(),
    "iters": repc.total_iterations,
}))
"""


def run(backend, argv):
    env = {k: v for k, v in os.environ.items() if k not in ("LEVELRANK_BACKEND", "LEVELRANK_NO_NUMBA")}
    env["LEVELRANK_BACKEND"] = backend
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, *argv], env=env, capture_output=True, text=True,
                          check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--m", type=int, default=12)
    ap.add_argument("--copies", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    argv = [str(args.n), str(args.m), str(args.copies), str(args.tol), str(args.repeats)]

    fast = run("numba", argv)
    slow = run("numpy", argv)
    if fast["backend"] != "numba":
        print("numba unavailable, comparing numpy against itself", file=sys.stderr)

    print(f"graph: {fast['vertices']:,} vertices, {fast['edges']:,} edges, tol {args.tol:g}")
    print(f"{'stage':<14}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for stage, t_fast in fast["ms"].items():
        t_slow = slow["ms"][stage]
        print(f"{stage:<14}{t_fast:>12.1f}{t_slow:>12.1f}{t_slow / t_fast:>9.1f}x")

    same_comp = fast["comp"] == slow["comp"]
    same_iters = fast["iters"] == slow["iters"]
    drift = max(np.abs(np.subtract(fast["ranks"], slow["ranks"])).max(),
                np.abs(np.subtract(fast["scc_ranks"], slow["scc_ranks"])).max())
    print(f"partition identical: {same_comp}")
    print(f"iteration counts identical: {same_iters}")
    print(f"max rank difference: {drift:.3e}")
    return 0 if same_comp and same_iters and drift <= 1e-9 else 1


if __name__ == "__main__":
    sys.exit(main())
