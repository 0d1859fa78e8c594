"""``ots`` command line: run, summarize, fixture, verify.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver cap reached.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys

import numpy as np

from .constraints import VARIANTS, BigMPolicy, connectedness_model, make_uniquely_balanced_c
from .fixtures import FIXTURES, write_fixture
from .graph import is_connected, potential_feasible
from .grid import CaseError, load_case
from .harness import ExperimentSpec, any_cap_hit, format_summary, run, summarize
from .solver import SolverOptions, solve_lp

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3
VERIFY_MAX_EDGES = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(text: str, conv=str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("empty list")
    try:
        return [conv(t) for t in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ots", description="Optimal transmission switching with exact connectedness.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("run", help="sweep variants x alphas x samples, write CSV")
    r.add_argument("--case", required=True)
    r.add_argument("--variants", default="M1,M2,M3,M4")
    r.add_argument("--alphas", default="0.3,0.4,0.5,0.6,0.7")
    r.add_argument("--samples", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--solver-time-cap", type=float, default=None, metavar="SEC")
    r.add_argument("--node-cap", type=int, default=10**6)
    r.add_argument("--big-m", type=float, default=None, metavar="VAL")
    r.add_argument("--pivot", type=int, default=1, metavar="BUS")
    r.add_argument("--export-lp", default=None, metavar="DIR")
    r.add_argument("--strategy", choices=("exhaustive", "seeded"), default="seeded")

    s = sub.add_parser("summarize", help="per (variant, alpha) connected counts and solve times")
    s.add_argument("csv")

    f = sub.add_parser("fixture", help="write a bundled case file")
    f.add_argument("name", choices=FIXTURES)
    f.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check the connectedness block against union-find")
    v.add_argument("--case", required=True)
    v.add_argument("--exhaustive", action="store_true", help="sweep every topology")
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    return p


def _cmd_run(args) -> int:
    variants = _csv_list(args.variants)
    alphas = _csv_list(args.alphas, float)
    try:
        opts = SolverOptions(time_cap=args.solver_time_cap, node_cap=args.node_cap)
        spec = ExperimentSpec(args.case, tuple(variants), tuple(alphas), args.samples, args.seed,
                              args.out, opts, args.big_m, args.pivot, args.export_lp,
                              args.strategy)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    network = load_case(args.case)
    if not 1 <= args.pivot <= network.n_buses:
        raise UsageError(f"--pivot {args.pivot} outside 1..{network.n_buses}")
    if args.big_m is not None:
        try:
            BigMPolicy.for_network(network, args.pivot, M=args.big_m).check(network)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    records = run(spec)
    print(format_summary(summarize(args.out)), end="")
    return EXIT_CAP if any_cap_hit(records) else EXIT_OK


def _cmd_summarize(args) -> int:
    try:
        rows = summarize(args.csv)
    except (ValueError, KeyError) as exc:
        print(f"ots: malformed results file: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(format_summary(rows), end="")
    return EXIT_OK


def _cmd_fixture(args) -> int:
    path = write_fixture(args.name, args.out)
    print(path)
    return EXIT_OK


def verify_case(network, exhaustive: bool = True, samples: int = 1000, seed: int = 0) -> dict:
    """Connectedness block and potential test vs union-find over topologies."""
    graph = network.graph()
    m = graph.m
    if exhaustive and m > VERIFY_MAX_EDGES:
        raise ValueError(f"{m} branches is too many for an exhaustive sweep (max {VERIFY_MAX_EDGES})")
    c = make_uniquely_balanced_c(graph.n)
    model = connectedness_model(graph, c)
    cv, A, senses, b, lo0, up0 = model.dense()
    zidx = np.array([model.var(f"z_{k}") for k in range(1, m + 1)])
    if exhaustive:
        topologies = itertools.product((0, 1), repeat=m)
        total = 2 ** m
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        topologies = (tuple(rng.integers(0, 2, m)) for _ in range(samples))
        total = samples
    block_bad = lemma_bad = connected = 0
    for z in topologies:
        lo, up = lo0.copy(), up0.copy()
        lo[zidx] = up[zidx] = z
        feas = solve_lp(np.zeros_like(cv), A, senses, b, lo, up).status == "optimal"
        sub = graph.edge_induced(z)
        conn = is_connected(sub)
        connected += conn
        block_bad += feas != conn
        lemma_bad += potential_feasible(sub, c) != conn
    return {"topologies": total, "connected": connected, "block_mismatches": block_bad,
            "potential_mismatches": lemma_bad}


def _cmd_verify(args) -> int:
    network = load_case(args.case)
    try:
        rep = verify_case(network, args.exhaustive, args.samples, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for k, v in rep.items():
        print(f"{k}: {v}")
    ok = rep["block_mismatches"] == 0 and rep["potential_mismatches"] == 0
    print("verdict: " + ("agree" if ok else "MISMATCH"))
    return EXIT_OK if ok else EXIT_DATA


COMMANDS = {"run": _cmd_run, "summarize": _cmd_summarize, "fixture": _cmd_fixture,
            "verify": _cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ots: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CaseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"ots: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
