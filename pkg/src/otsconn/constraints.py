"""MILP assembly: DC OTS, necessary and exact connectedness, N-1 security.

Variable names: ``z_<branch>``, ``pg_<bus>``, ``th_<bus>``, ``pb_<branch>``,
``vth_<node>``, ``rho_<edge>``; contingency copies append ``_k<branch>``;
the reduced connectedness block uses ``vthr_<node>`` and ``rhor_<edge>``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .graph import (
    BalanceKind,
    Multigraph,
    classify_balance,
    enumerate_connected_nis,
    is_connected,
)
from .grid import ContingencySet, Network, SwitchConfig, default_contingencies
from .model import BINARY, CONTINUOUS, MilpModel

VARIANTS = ("M1", "M2", "M3", "M4", "N1", "N2", "N3", "N4")


def flow_big_m(network: Network) -> float:
    """Smallest uniform K that deactivates the angle-flow rows, plus one."""
    span = max(b.theta_max for b in network.buses) - min(b.theta_min for b in network.buses)
    bmax = max((br.b for br in network.branches), default=0.0)
    return bmax * span + 1.0


def connectedness_bound(c) -> float:
    """Bound on |rho| and on potential gaps of the unit-resistance flow for injections c."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    half = float(np.abs(c).sum()) / 2
    return max(2 * half, (n - 1) * half)


def connectedness_big_m(c) -> float:
    return connectedness_bound(c) + 1.0


@dataclass(frozen=True)
class BigMPolicy:
    K: float
    M: float

    def __post_init__(self):
        if not (self.K > 0 and self.M > 0 and math.isfinite(self.K) and math.isfinite(self.M)):
            raise ValueError("big-M constants must be positive and finite")

    @classmethod
    def for_network(cls, network: Network, pivot: int = 1, M: float | None = None) -> "BigMPolicy":
        c = make_uniquely_balanced_c(max(network.n_buses, 2), min(pivot, max(network.n_buses, 2)))
        return cls(K=flow_big_m(network), M=connectedness_big_m(c) if M is None else M)

    def check(self, network: Network) -> None:
        need = flow_big_m(network) - 1.0
        if self.K < need:
            raise ValueError(f"K={self.K} is below the safe bound {need}")
        if network.n_buses >= 2:
            need = connectedness_bound(make_uniquely_balanced_c(network.n_buses))
            if self.M <= need:
                raise ValueError(f"M={self.M} does not exceed the safe bound {need}")


def make_uniquely_balanced_c(n: int, pivot: int = 1) -> np.ndarray:
    """Injection vector with 1 - n at ``pivot`` and 1 elsewhere."""
    if n < 2:
        raise ValueError("need at least two nodes")
    if not 1 <= pivot <= n:
        raise ValueError(f"pivot {pivot} outside 1..{n}")
    c = np.ones(n)
    c[pivot - 1] = 1 - n
    return c


def _is_canonical(c: np.ndarray) -> bool:
    n = len(c)
    odd = np.flatnonzero(c != 1.0)
    return n >= 2 and len(odd) == 1 and c[odd[0]] == 1 - n


def require_uniquely_balanced(graph: Multigraph, c) -> None:
    c = np.asarray(c, dtype=float)
    if len(c) != graph.n:
        raise ValueError(f"c has {len(c)} entries for {graph.n} nodes")
    if not is_connected(graph):
        raise ValueError("the connectedness block needs a connected base graph")
    if _is_canonical(c):
        # any connected set sums to |S| or |S| - n, zero only for the full set
        return
    cls = classify_balance(c, enumerate_connected_nis(graph))
    if cls.kind is not BalanceKind.UNIQUELY_BALANCED:
        raise ValueError(f"c is {cls.kind.value}, not uniquely balanced")


def _status_terms(status, coef):
    """Split ``coef * status`` into (variable terms, constant)."""
    if isinstance(status, tuple):  # ("const", value)
        return {}, coef * status[1]
    return {status: coef}, 0.0


def const(value: float) -> tuple:
    return ("const", float(value))


def _add_dc_block(model: MilpModel, network: Network, status: list, K: float,
                  suffix: str = "") -> None:
    """Rows (1c)-(1f) with pg/th/pb copies named by ``suffix``."""
    pg = [model.add_variable(f"pg_{b.id}{suffix}", CONTINUOUS, b.p_g_min, b.p_g_max)
          for b in network.buses]
    th = [model.add_variable(f"th_{b.id}{suffix}", CONTINUOUS, b.theta_min, b.theta_max)
          for b in network.buses]
    pb = [model.add_variable(f"pb_{br.id}{suffix}") for br in network.branches]
    for br, st in zip(network.branches, status):
        k, i, j = br.id, br.from_bus - 1, br.to_bus - 1
        p = pb[k - 1]
        terms, cst = _status_terms(st, br.p_b_max)
        # -pmax z <= p <= pmax z
        model.add_row({p: 1.0, **{v: -a for v, a in terms.items()}}, "<=", cst, f"eq1c_up_b{k}{suffix}")
        model.add_row({p: 1.0, **terms}, ">=", -cst, f"eq1c_lo_b{k}{suffix}")
        # b(th_i - th_j) - p + (1 - z) K >= 0 and b(th_i - th_j) - p - (1 - z) K <= 0
        terms, cst = _status_terms(st, K)
        flow = {th[i]: br.b, th[j]: -br.b, p: -1.0}
        model.add_row({**flow, **{v: -a for v, a in terms.items()}}, ">=", -K + cst, f"eq1d_b{k}{suffix}")
        model.add_row({**flow, **terms}, "<=", K - cst, f"eq1e_b{k}{suffix}")
    for bus in network.buses:
        row = {pg[bus.id - 1]: 1.0}
        for br in network.branches:
            if br.from_bus == bus.id:
                row[pb[br.id - 1]] = row.get(pb[br.id - 1], 0.0) - 1.0
            elif br.to_bus == bus.id:
                row[pb[br.id - 1]] = row.get(pb[br.id - 1], 0.0) + 1.0
        model.add_row(row, "=", bus.p_d, f"eq1f_n{bus.id}{suffix}")


def build_base_ots(network: Network, config: SwitchConfig | None = None,
                   policy: BigMPolicy | None = None) -> MilpModel:
    """DC OTS model: min sum c_g p_g (+ sum c_b z over switchable lines)."""
    config = config or SwitchConfig.from_network(network)
    policy = policy or BigMPolicy.for_network(network)
    policy.check(network)
    unknown = sorted(set(config.switchable_ids) - {br.id for br in network.branches})
    if unknown:
        raise ValueError(f"switchable ids {unknown} are not branches of {network.name}")

    model = MilpModel(f"{network.name}_ots")
    z = []
    for br in network.branches:
        lower = 0.0 if config.is_switchable(br.id) else 1.0
        z.append(model.add_variable(f"z_{br.id}", BINARY, lower, 1.0))
    _add_dc_block(model, network, z, policy.K)
    for bus in network.buses:
        if bus.c_g:
            model.add_objective(model.var(f"pg_{bus.id}"), bus.c_g)
    for br in network.branches:
        if br.c_b > 0 and config.is_switchable(br.id):
            model.add_objective(z[br.id - 1], br.c_b)
    model.meta.update(
        n_branches=network.n_branches,
        n_buses=network.n_buses,
        network=network.name,
        switchable=sorted(config.switchable_ids),
        K=policy.K,
        M=policy.M,
    )
    return model


def add_necessary_connectedness(model: MilpModel, network: Network) -> MilpModel:
    """Every bus keeps at least one incident branch switched on."""
    out = model.copy()
    for bus in network.buses:
        row = {}
        for k in network.incident(bus.id):
            j = out.var(f"z_{k}")
            row[j] = row.get(j, 0.0) + 1.0
        out.add_row(row, ">=", 1.0, f"eq3_n{bus.id}")
    return out


def add_connectedness_block(model: MilpModel, graph: Multigraph, status: list, c, M: float,
                            prefix: str = "", suffix: str = "") -> None:
    """Append the exact connectedness rows in place.

    ``status[k]`` is a variable index or ``const(v)`` for edge k; potentials
    and auxiliary flows are named ``vth<prefix>_<node><suffix>`` and
    ``rho<prefix>_<edge><suffix>``.
    """
    c = np.asarray(c, dtype=float)
    vth = [model.add_variable(f"vth{prefix}_{i}{suffix}") for i in range(1, graph.n + 1)]
    rho = [model.add_variable(f"rho{prefix}_{k}{suffix}") for k in range(1, graph.m + 1)]
    for k, ((f, t), st) in enumerate(zip(graph.edges, status), start=1):
        r = rho[k - 1]
        name = f"{prefix}e{k}{suffix}"
        terms, cst = _status_terms(st, M)
        diff = {vth[f - 1]: 1.0, vth[t - 1]: -1.0, r: -1.0}
        # |E^T vth - rho| <= M (1 - z)
        model.add_row({**diff, **terms}, "<=", M - cst, f"eq4a_up_{name}")
        model.add_row({**diff, **{v: -a for v, a in terms.items()}}, ">=", -M + cst, f"eq4a_lo_{name}")
        # |rho| <= M z
        model.add_row({r: 1.0, **{v: -a for v, a in terms.items()}}, "<=", cst, f"eq4b_up_{name}")
        model.add_row({r: 1.0, **terms}, ">=", -cst, f"eq4b_lo_{name}")
    for i in range(1, graph.n + 1):
        row = {}
        for k, (f, t) in enumerate(graph.edges):
            if f == i:
                row[rho[k]] = row.get(rho[k], 0.0) + 1.0
            elif t == i:
                row[rho[k]] = row.get(rho[k], 0.0) - 1.0
        model.add_row(row, "=", float(c[i - 1]), f"eq4c_{prefix}n{i}{suffix}")


def _check_m(M: float, c) -> None:
    need = connectedness_bound(c)
    if not M >= need:
        raise ValueError(f"M={M} is below the safe bound {need} for this injection vector")


def add_connectedness(model: MilpModel, graph: Multigraph, c, M: float) -> MilpModel:
    """Exact connectedness block over the branch statuses ``z_<k>``; no new binaries."""
    require_uniquely_balanced(graph, c)
    _check_m(M, c)
    out = model.copy()
    status = [out.var(f"z_{k}") for k in range(1, graph.m + 1)]
    add_connectedness_block(out, graph, status, c, M)
    return out


def connectedness_model(graph: Multigraph, c=None, M: float | None = None) -> MilpModel:
    """Stand-alone model: one binary per edge plus the connectedness block."""
    c = make_uniquely_balanced_c(graph.n) if c is None else np.asarray(c, dtype=float)
    M = connectedness_big_m(c) if M is None else M
    model = MilpModel("connectedness")
    for k in range(1, graph.m + 1):
        model.add_variable(f"z_{k}", BINARY, 0.0, 1.0)
    model.meta["n_branches"] = graph.m
    return add_connectedness(model, graph, c, M)


def add_n_minus_1(model: MilpModel, network: Network, contingencies: ContingencySet,
                  policy: BigMPolicy) -> MilpModel:
    """Post-contingency DC copies sharing z, with the faulted branch forced open."""
    if not len(contingencies):
        warnings.warn("empty contingency set; model returned unchanged", stacklevel=2)
        return model.copy()
    out = model.copy()
    z = [out.var(f"z_{br.id}") for br in network.branches]
    for kappa in contingencies:
        suffix = f"_k{kappa}"
        status = [const(0.0) if k == kappa - 1 else z[k] for k in range(network.n_branches)]
        _add_dc_block(out, network, status, policy.K, suffix)
        for bus in network.buses:
            base = out.var(f"pg_{bus.id}")
            post = out.var(f"pg_{bus.id}{suffix}")
            out.add_row({post: 1.0, base: -1.0}, "<=", bus.r_up, f"eq2_up_n{bus.id}{suffix}")
            out.add_row({post: 1.0, base: -1.0}, ">=", -bus.r_down, f"eq2_dn_n{bus.id}{suffix}")
    out.meta["contingencies"] = sorted(contingencies.branch_ids)
    return out


def add_contingency_connectedness(model: MilpModel, graph: Multigraph,
                                  contingencies: ContingencySet, c, M: float) -> MilpModel:
    """One connectedness block per contingency over z with the faulted edge at 0."""
    if not len(contingencies):
        return model.copy()
    require_uniquely_balanced(graph, c)
    _check_m(M, c)
    out = model.copy()
    z = [out.var(f"z_{k}") for k in range(1, graph.m + 1)]
    for kappa in contingencies:
        status = [const(0.0) if k == kappa - 1 else z[k] for k in range(graph.m)]
        add_connectedness_block(out, graph, status, c, M, suffix=f"_k{kappa}")
    return out


def assemble(variant: str, network: Network, config: SwitchConfig | None = None,
             contingencies: ContingencySet | None = None, policy: BigMPolicy | None = None,
             pivot: int = 1, strategy: str = "seeded", plan=None) -> MilpModel:
    """Build one of the M1-M4 / N1-N4 model variants."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    config = config or SwitchConfig.from_network(network)
    policy = policy or BigMPolicy.for_network(network, pivot)
    level = int(variant[1])
    secure = variant[0] == "N"
    model = build_base_ots(network, config, policy)
    if level == 2:
        model = add_necessary_connectedness(model, network)
    c = make_uniquely_balanced_c(network.n_buses, pivot) if network.n_buses >= 2 else None
    graph = network.graph()
    if level == 3 and c is not None:
        model = add_connectedness(model, graph, c, policy.M)
    nis_set = None
    if level == 4 and c is not None:
        from . import reduction

        if plan is None:
            nis_set = reduction.find_unbalanced_nis(network, strategy)
            plan = reduction.contract(network, config, nis_set)
        model = reduction.reduced_connectedness(model, plan, pivot, policy.M)
        nis_set = plan.nis_set
    if secure:
        contingencies = default_contingencies(network) if contingencies is None else contingencies
        model = add_n_minus_1(model, network, contingencies, policy)
        if level == 3 and c is not None:
            model = add_contingency_connectedness(model, graph, contingencies, c, policy.M)
        if level == 4 and c is not None:
            from . import reduction

            model = reduction.reduced_contingency_connectedness(
                model, network, config, contingencies, nis_set, pivot, policy.M)
    model.name = f"{network.name}_{variant}"
    model.meta["variant"] = variant
    return model
