"""Compare the compiled and pure-Python simplex kernels.

    python3 benchmarks/bench_simplex.py [--repeat N]

Each case is a fixture model solved by branch-and-bound under both kernels;
the script checks that both give the same objective and iteration count.
"""

from __future__ import annotations

import argparse
import time
import warnings

from otsconn.constraints import assemble
from otsconn.fixtures import make_fixture
from otsconn.grid import SwitchConfig
from otsconn.solver import SolverOptions, available_kernels, solve, use_kernel

CASES = [("fig1", "M3"), ("fig1", "N3"), ("bridge2", "N4"), ("nis-demo", "M3"), ("nis-demo", "N4")]


def bench(repeat: int) -> list[dict]:
    rows = []
    kernels = available_kernels()
    for name, variant in CASES:
        net = make_fixture(name)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = assemble(variant, net, SwitchConfig.from_network(net))
        row = {"case": f"{name}/{variant}", "rows": model.n_rows, "vars": model.n_vars}
        results = {}
        for k in kernels:
            use_kernel(k)
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                sol = solve(model, SolverOptions())
                best = min(best, time.perf_counter() - t0)
            results[k] = sol
            row[k] = best
        objs = {round(s.objective, 9) for s in results.values()}
        iters = {s.stats["lp_iterations"] for s in results.values()}
        row["agree"] = len(objs) == 1 and len(iters) == 1
        rows.append(row)
    use_kernel(kernels[0])
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = bench(args.repeat)
    kernels = available_kernels()
    print(f"{'case':<16}{'rows':>6}{'vars':>6}" + "".join(f"{k + ' s':>12}" for k in kernels)
          + f"{'speedup':>9}  agree")
    for r in rows:
        speed = r["python"] / r["compiled"] if "compiled" in r else 1.0
        print(f"{r['case']:<16}{r['rows']:>6}{r['vars']:>6}"
              + "".join(f"{r[k]:>12.4f}" for k in kernels) + f"{speed:>9.2f}  {r['agree']}")


if __name__ == "__main__":
    main()
