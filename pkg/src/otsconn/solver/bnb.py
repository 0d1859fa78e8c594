"""Best-bound branch-and-bound over the binary variables of a MilpModel."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..model import BINARY, MilpModel, provenance
from .simplex import solve_lp

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
CAP_HIT = "CapHit"


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-6
    int_tol: float = 1e-6
    rel_gap: float = 1e-6
    node_cap: int = 10**6
    time_cap: float | None = None
    branch_rule: str = "most-fractional"
    pricing: str = "bland"

    def __post_init__(self):
        for name in ("feas_tol", "int_tol", "rel_gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.node_cap < 1:
            raise ValueError("node_cap must be >= 1")
        if self.branch_rule not in ("most-fractional", "lowest-index"):
            raise ValueError(f"unknown branch rule {self.branch_rule}")
        if self.pricing not in ("dantzig", "bland"):
            raise ValueError(f"unknown pricing rule {self.pricing}")


@dataclass
class Solution:
    status: str
    objective: float
    values: dict[str, float]
    z: tuple[int, ...] | None
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _extract_z(model: MilpModel, values: dict[str, float]):
    n = model.meta.get("n_branches")
    if n is None:
        return None
    return tuple(int(round(values[f"z_{k}"])) for k in range(1, n + 1))


def _gap(obj: float, rel_gap: float) -> float:
    return rel_gap * max(1.0, abs(obj))


def solve(model: MilpModel, opts: SolverOptions | None = None) -> Solution:
    """Minimise ``model``; binaries are relaxed to [0, 1] at each node.

    Nodes are explored lowest bound first; equal bounds pop in creation
    order, and the down branch is created before the up branch.
    """
    opts = opts or SolverOptions()
    start = time.monotonic()
    c, A, senses, b, lo0, up0 = model.dense()
    bins = np.array(model.binaries(), dtype=int)

    incumbent = None
    inc_obj = math.inf
    nodes = 0
    lp_iters = 0
    root_bound = None
    counter = 0
    heap: list = [(-math.inf, counter, {})]
    status = None
    max_lp_gap = 0.0
    lp_failures = 0

    while heap:
        bound, _, fixings = heapq.heappop(heap)
        if incumbent is not None and bound >= inc_obj - _gap(inc_obj, opts.rel_gap):
            heap.clear()
            break
        if nodes >= opts.node_cap or (
                opts.time_cap is not None and time.monotonic() - start > opts.time_cap):
            status = CAP_HIT
            heapq.heappush(heap, (bound, counter, fixings))
            break
        lo, up = lo0.copy(), up0.copy()
        for j, (l, u) in fixings.items():
            lo[j], up[j] = l, u
        res = solve_lp(c, A, senses, b, lo, up, rule=opts.pricing)
        nodes += 1
        lp_iters += res.iterations
        if res.status == "unbounded":
            if nodes == 1:
                status = UNBOUNDED
                break
            continue
        if res.status != "optimal":
            lp_failures += res.status == "iteration_limit"
            continue
        obj = res.objective
        if root_bound is None:
            root_bound = obj
        if bound > -math.inf:
            max_lp_gap = max(max_lp_gap, bound - obj)
        if incumbent is not None and obj >= inc_obj - _gap(inc_obj, opts.rel_gap):
            continue
        x = res.x
        frac = np.abs(x[bins] - np.round(x[bins])) if len(bins) else np.zeros(0)
        if not np.any(frac > opts.int_tol):
            incumbent, inc_obj = x.copy(), obj
            continue
        cand = np.flatnonzero(frac > opts.int_tol)
        if opts.branch_rule == "lowest-index":
            pick = cand[0]
        else:
            dist = np.minimum(frac[cand], 1 - frac[cand])
            pick = cand[np.argmax(dist)]
        j = int(bins[pick])
        down = dict(fixings)
        down[j] = (lo[j], 0.0)
        upf = dict(fixings)
        upf[j] = (1.0, up[j])
        counter += 1
        heapq.heappush(heap, (obj, counter, down))
        counter += 1
        heapq.heappush(heap, (obj, counter, upf))

    elapsed = time.monotonic() - start
    best_bound = min((h[0] for h in heap), default=inc_obj)
    stats = {
        "nodes": nodes,
        "lp_iterations": lp_iters,
        "wall_time": elapsed,
        "root_bound": root_bound,
        "best_bound": best_bound,
        "child_below_parent": max_lp_gap,
        "lp_failures": lp_failures,
    }
    if status == UNBOUNDED:
        return Solution(UNBOUNDED, -math.inf, {}, None, stats)
    if incumbent is None:
        if status == CAP_HIT:
            return Solution(CAP_HIT, math.nan, {}, None, stats)
        return Solution(INFEASIBLE, math.inf, {}, None, stats)
    x = incumbent.copy()
    if len(bins):
        # re-solve with the binaries at their rounded values so that the
        # continuous part is exactly consistent with the reported topology
        lo, up = lo0.copy(), up0.copy()
        lo[bins] = up[bins] = np.round(x[bins])
        res = solve_lp(c, A, senses, b, lo, up, rule=opts.pricing)
        lp_iters += res.iterations
        stats["lp_iterations"] = lp_iters
        if res.status == "optimal":
            x = res.x
        else:
            x[bins] = np.round(x[bins])
    values = {v.name: float(x[j]) for j, v in enumerate(model.variables)}
    objective = float(c @ x) + model.obj_constant
    return Solution(status or OPTIMAL, objective, values, _extract_z(model, values), stats)


@dataclass
class Violation:
    tag: str
    block: str
    amount: float


def check_solution(model: MilpModel, values: dict[str, float], feas_tol: float = 1e-6,
                   int_tol: float = 1e-6) -> list[Violation]:
    """Re-evaluate every row, bound and integrality requirement."""
    missing = [v.name for v in model.variables if v.name not in values]
    if missing:
        raise KeyError(f"missing values for {missing[:5]}")
    x = np.array([values[v.name] for v in model.variables], dtype=float)
    out = []
    lhs = model.evaluate_rows(x)
    for i, (tag, sense, rhs) in enumerate(zip(model.tags, model.senses, model.rhs)):
        scale = max(1.0, abs(rhs))
        if sense == "<=":
            viol = lhs[i] - rhs
        elif sense == ">=":
            viol = rhs - lhs[i]
        else:
            viol = abs(lhs[i] - rhs)
        if viol > feas_tol * scale:
            out.append(Violation(tag, provenance(tag), float(viol)))
    for j, v in enumerate(model.variables):
        viol = max(v.lower - x[j], x[j] - v.upper, 0.0)
        if viol > feas_tol * max(1.0, abs(x[j])):
            out.append(Violation(f"bound:{v.name}", "bound", float(viol)))
        if v.kind == BINARY and abs(x[j] - round(x[j])) > int_tol:
            out.append(Violation(f"integrality:{v.name}", "integrality", float(abs(x[j] - round(x[j])))))
    return out
