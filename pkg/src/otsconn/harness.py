"""Experiment sweeps over model variants, switchable fractions and samples."""

from __future__ import annotations

import csv
import logging
import math
import statistics
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constraints import VARIANTS, BigMPolicy, assemble
from .graph import is_connected
from .grid import Network, default_contingencies, load_case, sample_switchable
from .solver import CAP_HIT, OPTIMAL, SolverOptions, export_lp, solve

log = logging.getLogger(__name__)

PRNG = "numpy.PCG64"
FIELDS = (
    "case", "variant", "alpha", "sample", "seed", "prng", "switchable", "status",
    "objective", "connected", "contingency_connected", "wall_time", "nodes",
    "lp_iterations", "error",
)
TIMING_FIELDS = ("wall_time",)


@dataclass
class ExperimentSpec:
    case: Path | str
    variants: tuple[str, ...] = ("M1", "M2", "M3", "M4")
    alphas: tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7)
    samples: int = 100
    seed: int = 0
    out: Path | str = "results.csv"
    options: SolverOptions = field(default_factory=SolverOptions)
    big_m: float | None = None
    pivot: int = 1
    export_lp: Path | str | None = None
    strategy: str = "seeded"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        bad = [a for a in self.alphas if not 0 < a <= 1]
        if bad:
            raise ValueError(f"alphas must lie in (0, 1]: {bad}")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown:
            raise ValueError(f"unknown variants {unknown}; expected some of {VARIANTS}")
        if not self.variants or not self.alphas:
            raise ValueError("need at least one variant and one alpha")


@dataclass
class RunRecord:
    case: str
    variant: str
    alpha: float
    sample: int
    seed: int
    switchable: tuple[int, ...]
    status: str
    objective: float
    connected: bool | None
    contingency_connected: bool | None
    wall_time: float
    nodes: int = 0
    lp_iterations: int = 0
    error: str = ""
    prng: str = PRNG

    def row(self) -> dict:
        def flag(v):
            return "" if v is None else str(v).lower()

        return {
            "case": self.case,
            "variant": self.variant,
            "alpha": repr(self.alpha),
            "sample": self.sample,
            "seed": self.seed,
            "prng": self.prng,
            "switchable": ";".join(str(k) for k in self.switchable),
            "status": self.status,
            "objective": "" if not math.isfinite(self.objective) else repr(self.objective),
            "connected": flag(self.connected),
            "contingency_connected": flag(self.contingency_connected),
            "wall_time": f"{self.wall_time:.6f}",
            "nodes": self.nodes,
            "lp_iterations": self.lp_iterations,
            "error": self.error,
        }


def sample_seed(seed: int, alpha_index: int, sample: int) -> int:
    """Per-sample seed shared by every variant, so comparisons are paired."""
    return int(np.random.SeedSequence([seed, alpha_index, sample]).generate_state(1)[0])


def topology_connected(network: Network, z) -> bool:
    return is_connected(network.graph().edge_induced(z))


def contingency_connected(network: Network, z, contingencies) -> bool:
    """Base topology and every single-contingency topology are connected."""
    if not topology_connected(network, z):
        return False
    graph = network.graph()
    for kappa in contingencies:
        zk = list(z)
        zk[kappa - 1] = 0
        if not is_connected(graph.edge_induced(zk)):
            return False
    return True


def run_one(network: Network, variant: str, alpha: float, sample: int, seed: int,
            spec: ExperimentSpec, contingencies=None) -> RunRecord:
    config = sample_switchable(network, alpha, seed)
    ids = tuple(sorted(config.switchable_ids))
    base = dict(case=network.name, variant=variant, alpha=alpha, sample=sample, seed=seed,
                switchable=ids)
    try:
        policy = BigMPolicy.for_network(network, spec.pivot, M=spec.big_m)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty contingency sets are expected on trees
            model = assemble(variant, network, config, contingencies, policy,
                             pivot=spec.pivot, strategy=spec.strategy)
        if spec.export_lp is not None:
            out_dir = Path(spec.export_lp)
            out_dir.mkdir(parents=True, exist_ok=True)
            export_lp(model, out_dir / f"{network.name}_{variant}_a{alpha:g}_s{sample}.lp")
        t0 = time.monotonic()
        sol = solve(model, spec.options)
        wall = time.monotonic() - t0
    except Exception as exc:  # recorded, never aborts the sweep
        log.warning("run %s/%s/%s failed: %s", variant, alpha, sample, exc)
        return RunRecord(**base, status="Error", objective=math.nan, connected=None,
                         contingency_connected=None, wall_time=0.0, error=str(exc))
    connected = cont = None
    if sol.z is not None:
        connected = topology_connected(network, sol.z)
        if variant.startswith("N"):
            cont = contingency_connected(network, sol.z, contingencies)
    return RunRecord(**base, status=sol.status, objective=sol.objective, connected=connected,
                     contingency_connected=cont, wall_time=wall, nodes=sol.stats["nodes"],
                     lp_iterations=sol.stats["lp_iterations"])


def iter_runs(network: Network, spec: ExperimentSpec):
    contingencies = default_contingencies(network)
    for ai, alpha in enumerate(spec.alphas):
        for sample in range(spec.samples):
            seed = sample_seed(spec.seed, ai, sample)
            for variant in spec.variants:
                yield run_one(network, variant, alpha, sample, seed, spec, contingencies)


def run(spec: ExperimentSpec) -> list[RunRecord]:
    """Execute the sweep and write one CSV row per (alpha, sample, variant)."""
    network = load_case(spec.case)
    if spec.big_m is not None:
        BigMPolicy.for_network(network, spec.pivot, M=spec.big_m).check(network)
    records = []
    out = Path(spec.out)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in iter_runs(network, spec):
            writer.writerow(rec.row())
            records.append(rec)
    return records


@dataclass
class SummaryRow:
    variant: str
    alpha: str
    runs: int
    optimal: int
    connected: int
    contingency_connected: int | None
    excluded: dict[str, int]
    mean_time: float | None
    median_time: float | None


def summarize(path) -> list[SummaryRow]:
    """Per (variant, alpha): connected optima and solve time over Optimal rows only."""
    groups: dict[tuple[str, str], list[dict]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = {"variant", "alpha", "status", "connected", "wall_time"} - set(reader.fieldnames)
        if missing:
            raise ValueError(f"not a results file: missing columns {sorted(missing)}")
        for row in reader:
            groups.setdefault((row["variant"], row["alpha"]), []).append(row)
    out = []
    for (variant, alpha), rows in sorted(groups.items(), key=lambda kv: (kv[0][0], float(kv[0][1]))):
        opt = [r for r in rows if r["status"] == OPTIMAL]
        try:
            times = [float(r["wall_time"]) for r in opt]
        except ValueError as exc:
            raise ValueError(f"bad wall_time in {variant}/{alpha}: {exc}") from None
        excluded: dict[str, int] = {}
        for r in rows:
            if r["status"] != OPTIMAL:
                excluded[r["status"]] = excluded.get(r["status"], 0) + 1
        cont = None
        if variant.startswith("N"):
            cont = sum(r.get("contingency_connected") == "true" for r in opt)
        out.append(SummaryRow(
            variant, alpha, len(rows), len(opt),
            sum(r["connected"] == "true" for r in opt), cont, excluded,
            statistics.fmean(times) if times else None,
            statistics.median(times) if times else None,
        ))
    return out


def format_summary(rows: list[SummaryRow]) -> str:
    head = f"{'variant':<8}{'alpha':>6}{'runs':>6}{'optimal':>9}{'connected':>11}" \
           f"{'n-1 conn':>10}{'mean s':>10}{'median s':>10}  excluded"
    lines = [head]
    for r in rows:
        cont = "-" if r.contingency_connected is None else str(r.contingency_connected)
        mean = "-" if r.mean_time is None else f"{r.mean_time:.4f}"
        med = "-" if r.median_time is None else f"{r.median_time:.4f}"
        exc = ",".join(f"{k}={v}" for k, v in sorted(r.excluded.items())) or "-"
        lines.append(f"{r.variant:<8}{r.alpha:>6}{r.runs:>6}{r.optimal:>9}{r.connected:>11}"
                     f"{cont:>10}{mean:>10}{med:>10}  {exc}")
    return "\n".join(lines) + "\n"


def any_cap_hit(records) -> bool:
    return any(r.status == CAP_HIT for r in records)


__all__ = [
    "ExperimentSpec", "RunRecord", "SummaryRow", "any_cap_hit", "contingency_connected",
    "format_summary", "iter_runs", "run", "run_one", "sample_seed", "summarize",
    "topology_connected",
]
