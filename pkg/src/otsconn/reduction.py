"""Graph reduction for the connectedness block.

Two contractions shrink the graph the block is written over:

* an unbalanced node set (no admissible dispatch zeroes the net injection of
  any connected part of it) is replaced by its boundary nodes, since every
  dispatch-feasible topology must already tie it to the rest of the grid;
* each connected component of always-on branches is replaced by the nodes
  touching switchable crossing branches, joined by a fixed connector path.

By default only sets that meet the rest of the grid at a single node are
contracted. With two or more boundary nodes the connector edges can stand
in for a path that the topology has actually opened, so connectedness of the
contracted graph no longer implies connectedness of the original one;
``single_boundary=False`` exposes that literal rule for experiments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .constraints import (
    BigMPolicy,
    add_connectedness_block,
    build_base_ots,
    connectedness_big_m,
    const,
    make_uniquely_balanced_c,
)
from .graph import (
    EnumerationCapError,
    Multigraph,
    UnionFind,
    is_connected,
    is_unbalanced_nis,
    iter_connected_sets,
)
from .grid import ContingencySet, Network, SwitchConfig
from .model import MilpModel
from .solver.simplex import solve_lp

STRATEGIES = ("exhaustive", "seeded")
CERTIFY_CAP = 100_000


@dataclass(frozen=True)
class UnbalancedNisSet:
    node_sets: tuple[frozenset[int], ...] = ()
    boundary_sets: tuple[frozenset[int], ...] = ()

    def __len__(self):
        return len(self.node_sets)


@dataclass(frozen=True)
class ReductionPlan:
    contracted: Multigraph
    node_map: dict[int, int]
    edge_map: dict[int, int]
    fixed_edges: tuple[int, ...]
    steps: tuple[str, ...]
    kept_nodes: tuple[int, ...]
    nis_set: UnbalancedNisSet = field(default_factory=UnbalancedNisSet)

    @property
    def audit_log(self) -> str:
        return "\n".join(self.steps) + "\n"

    def reduced_topology(self, z) -> list[int]:
        """z' for the contracted graph: fixed edges on, free edges copy z."""
        out = [1] * self.contracted.m
        for e, k in self.edge_map.items():
            out[e - 1] = int(round(z[k - 1]))
        return out


def _fmt(nodes) -> str:
    return "{" + ",".join(str(v) for v in sorted(nodes)) + "}"


def boundary_nodes(network: Network, node_set) -> frozenset[int]:
    """Members of ``node_set`` with a branch leaving the set."""
    s = set(node_set)
    out = set()
    for br in network.branches:
        a, b = br.from_bus, br.to_bus
        if (a in s) != (b in s):
            out.add(a if a in s else b)
    return frozenset(out)


def _sign(bus) -> int:
    lo, hi = bus.injection_interval()
    return -1 if hi < 0 else (1 if lo > 0 else 0)


def certify_unbalanced(network: Network, node_set, cap: int = CERTIFY_CAP) -> bool:
    """Every connected part of ``node_set`` has a net-injection interval excluding 0."""
    nodes = sorted(node_set)
    signs = {_sign(network.bus(v)) for v in nodes}
    if len(signs) == 1 and 0 not in signs:
        return True
    graph = network.graph()
    count = 0
    for sub in iter_connected_sets(graph, within=nodes):
        count += 1
        if count > cap:
            raise EnumerationCapError(f"certifying {_fmt(nodes)} needs more than {cap} subsets")
        if not is_unbalanced_nis(sub, network):
            return False
    return True


def _select_disjoint(candidates) -> list[frozenset[int]]:
    # largest first, then lowest smallest-node id, then lexicographic
    ordered = sorted(set(candidates), key=lambda s: (-len(s), min(s), sorted(s)))
    taken: set[int] = set()
    out = []
    for s in ordered:
        if taken.isdisjoint(s):
            out.append(s)
            taken |= s
    return sorted(out, key=lambda s: min(s))


def _pockets_in(network: Network, region: set[int], adj) -> list[frozenset[int]]:
    """Subsets of ``region`` attached to the rest of the grid through one node."""
    out = []
    n = network.n_buses
    for w in sorted(region):
        inside: set[int] = set()
        seen = {w}
        for start in range(1, n + 1):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u not in seen:
                        seen.add(u)
                        comp.add(u)
                        stack.append(u)
            if comp <= region:
                inside |= comp
        if inside and len(inside) + 1 < n:
            out.append(frozenset(inside | {w}))
    return out


def find_unbalanced_nis(network: Network, strategy: str = "seeded", max_nodes: int = 6,
                        single_boundary: bool = True, cap: int = 10**6) -> UnbalancedNisSet:
    """Disjoint certified unbalanced connected node sets worth contracting.

    ``exhaustive`` checks every connected set up to ``max_nodes`` buses;
    ``seeded`` grows same-sign regions from buses whose injection interval
    excludes zero, which needs no enumeration.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    n = network.n_buses
    graph = network.graph()
    adj = graph.adjacency()
    candidates = []
    if strategy == "exhaustive":
        count = 0
        for s in iter_connected_sets(graph, max_nodes=min(max_nodes, n - 1)):
            count += 1
            if count > cap:
                raise EnumerationCapError(f"more than {cap} connected sets up to {max_nodes} nodes")
            bnd = boundary_nodes(network, s)
            if single_boundary and len(bnd) != 1:
                continue
            if certify_unbalanced(network, s):
                candidates.append(s)
    else:
        signs = {b.id: _sign(b) for b in network.buses}
        seen: set[int] = set()
        for v in range(1, n + 1):
            if signs[v] == 0 or v in seen:
                continue
            region = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in region and signs[w] == signs[v]:
                        region.add(w)
                        stack.append(w)
            seen |= region
            candidates.extend(frozenset({u}) for u in region)
            if single_boundary:
                candidates.extend(_pockets_in(network, region, adj))
            else:
                for s in iter_connected_sets(graph, within=region):
                    if 1 < len(s) < n:
                        candidates.append(s)
        candidates = [s for s in candidates if certify_unbalanced(network, s)]
    chosen = _select_disjoint(candidates)
    return UnbalancedNisSet(tuple(chosen), tuple(boundary_nodes(network, s) for s in chosen))


def _path(nodes) -> list[tuple[int, int]]:
    nodes = sorted(nodes)
    return list(zip(nodes[:-1], nodes[1:]))


def contract(network: Network, config: SwitchConfig,
             nis_set: UnbalancedNisSet | None = None) -> ReductionPlan:
    """Contract certified sets, then always-on components, into a smaller graph."""
    nis_set = nis_set or UnbalancedNisSet()
    n = network.n_buses
    steps = []

    # S.1 drop set interiors, join boundary nodes by a fixed path
    removed_to: dict[int, int] = {}
    internal: set[int] = set()
    connectors: list[tuple[int, int]] = []
    used: set[int] = set()
    for nodes, bnd in zip(nis_set.node_sets, nis_set.boundary_sets):
        if not used.isdisjoint(nodes):
            raise ValueError(f"node set {_fmt(nodes)} overlaps an earlier one")
        if len(nodes) >= n:
            raise ValueError("cannot contract the whole network")
        if bnd != boundary_nodes(network, nodes):
            raise ValueError(f"boundary of {_fmt(nodes)} is {_fmt(boundary_nodes(network, nodes))}")
        used |= nodes
        if len(nodes) == 1:
            steps.append(f"S1 skip nodes={_fmt(nodes)} (single node)")
            continue
        for br in network.branches:
            if br.from_bus in nodes and br.to_bus in nodes:
                internal.add(br.id)
        for v in nodes - bnd:
            removed_to[v] = min(bnd)
        conn = _path(bnd)
        connectors.extend(conn)
        steps.append(f"S1 contract nodes={_fmt(nodes)} boundary={_fmt(bnd)} "
                     f"connectors={conn}")
    vo = [v for v in range(1, n + 1) if v not in removed_to]
    eo = [br for br in network.branches if br.id not in internal]
    steps.append(f"S1 G_o nodes={len(vo)} edges={len(eo) + len(connectors)}")

    # S.2 components of the always-on part of G_o
    uf = UnionFind(n)
    for br in eo:
        if not config.is_switchable(br.id):
            uf.union(br.from_bus, br.to_bus)
    for a, b in connectors:
        uf.union(a, b)
    comps: dict[int, list[int]] = {}
    for v in vo:
        comps.setdefault(uf.find(v), []).append(v)
    comp_list = sorted(comps.values(), key=lambda c: c[0])
    comp_of = {v: idx for idx, comp in enumerate(comp_list) for v in comp}
    crossing = [br for br in eo
                if config.is_switchable(br.id) and comp_of[br.from_bus] != comp_of[br.to_bus]]
    for idx, comp in enumerate(comp_list, start=1):
        steps.append(f"S2 component {idx} nodes={_fmt(comp)}")
    steps.append(f"S2 crossing={[br.id for br in crossing]}")

    # S.3 keep crossing endpoints of each component, joined by a fixed path
    touched = {br.from_bus for br in crossing} | {br.to_bus for br in crossing}
    kept_per_comp = []
    comp_connectors = []
    for idx, comp in enumerate(comp_list, start=1):
        kept = sorted(v for v in comp if v in touched) or [comp[0]]
        kept_per_comp.append(kept)
        conn = _path(kept)
        comp_connectors.append(conn)
        steps.append(f"S3 component {idx} kept={_fmt(kept)} connectors={conn}")

    # S.4 assemble G'
    kept_nodes = sorted(v for kept in kept_per_comp for v in kept)
    relabel = {v: i for i, v in enumerate(kept_nodes, start=1)}
    edges = []
    edge_map = {}
    for br in crossing:
        edges.append((relabel[br.from_bus], relabel[br.to_bus]))
        edge_map[len(edges)] = br.id
    fixed = []
    for conn in comp_connectors:
        for a, b in conn:
            edges.append((relabel[a], relabel[b]))
            fixed.append(len(edges))
    contracted = Multigraph(len(kept_nodes), edges)
    steps.append(f"S4 nodes={contracted.n} edges={contracted.m} free={len(edge_map)} fixed={len(fixed)}")

    node_map = {}
    for v in range(1, n + 1):
        rep = removed_to.get(v, v)
        kept = kept_per_comp[comp_of[rep]]
        node_map[v] = relabel[rep] if rep in relabel else relabel[kept[0]]
    steps.append("S5 z' free={" + ",".join(f"{e}:{k}" for e, k in edge_map.items())
                 + "} fixed=" + str(fixed))

    all_on = Multigraph(contracted.n, contracted.edges)
    if not is_connected(all_on):
        raise RuntimeError("contracted graph is disconnected with every edge on:\n"
                           + "\n".join(steps))
    return ReductionPlan(contracted, node_map, edge_map, tuple(fixed), tuple(steps),
                         tuple(kept_nodes), nis_set)


def plan_reduction(network: Network, config: SwitchConfig, strategy: str = "seeded",
                   **kw) -> ReductionPlan:
    return contract(network, config, find_unbalanced_nis(network, strategy, **kw))


def _reduced_status(model: MilpModel, plan: ReductionPlan, opened: int | None = None):
    status = []
    fixed = set(plan.fixed_edges)
    for e in range(1, plan.contracted.m + 1):
        if e in fixed:
            status.append(const(1.0))
        elif plan.edge_map[e] == opened:
            status.append(const(0.0))
        else:
            status.append(model.var(f"z_{plan.edge_map[e]}"))
    return status


def reduced_connectedness(model: MilpModel, plan: ReductionPlan, pivot: int = 1,
                          M: float | None = None, suffix: str = "",
                          opened: int | None = None) -> MilpModel:
    """Connectedness block written over the contracted graph; reuses z, adds no binaries."""
    out = model.copy()
    g = plan.contracted
    if g.n < 2:
        out.meta.setdefault("reduced_blocks", []).append({"nodes": g.n, "edges": g.m, "rows": 0})
        return out
    c = make_uniquely_balanced_c(g.n, plan.node_map[pivot])
    M = connectedness_big_m(c) if M is None else M
    before = out.n_rows
    add_connectedness_block(out, g, _reduced_status(out, plan, opened), c, M,
                            prefix="r", suffix=suffix)
    out.meta.setdefault("reduced_blocks", []).append(
        {"nodes": g.n, "edges": g.m, "rows": out.n_rows - before})
    return out


def reduced_contingency_connectedness(model: MilpModel, network: Network, config: SwitchConfig,
                                      contingencies: ContingencySet,
                                      nis_set: UnbalancedNisSet | None, pivot: int = 1,
                                      M: float | None = None) -> MilpModel:
    """Per-contingency reduced blocks; the faulted branch is treated as switchable and open.

    The unbalanced-set certificates carry over because post-contingency
    generation stays inside the same bounds.
    """
    out = model
    for kappa in contingencies:
        cfg = SwitchConfig(config.switchable_ids | {kappa}, config.alpha, config.seed)
        plan = contract(network, cfg, nis_set)
        out = reduced_connectedness(out, plan, pivot, M, suffix=f"_k{kappa}", opened=kappa)
    return out


@dataclass
class EquivalenceReport:
    checked: int
    feasible: int
    attempts: int
    exhaustive: bool
    mismatches: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def equivalence_check(network: Network, config: SwitchConfig, plan: ReductionPlan,
                      sample_count: int = 200, seed: int = 0,
                      policy: BigMPolicy | None = None) -> EquivalenceReport:
    """Compare connectedness of G_z and G'_z' over dispatch-feasible topologies.

    Enumerates every switchable pattern when there are at most
    ``sample_count`` of them, otherwise samples uniformly until
    ``sample_count`` feasible ones are found (or 50x that many attempts).
    """
    base = build_base_ots(network, config, policy)
    c, A, senses, b, lo0, up0 = base.dense()
    zidx = np.array([base.var(f"z_{br.id}") for br in network.branches])
    switchable = sorted(config.switchable_ids)
    graph = network.graph()

    def feasible(z):
        lo, up = lo0.copy(), up0.copy()
        lo[zidx] = up[zidx] = z
        return solve_lp(np.zeros_like(c), A, senses, b, lo, up).status == "optimal"

    def patterns():
        if 2 ** len(switchable) <= sample_count:
            for bits in itertools.product((0, 1), repeat=len(switchable)):
                yield bits
        else:
            rng = np.random.Generator(np.random.PCG64(seed))
            while True:
                yield tuple(int(v) for v in rng.integers(0, 2, len(switchable)))

    exhaustive = 2 ** len(switchable) <= sample_count
    checked = feasible_count = 0
    mismatches = []
    for bits in patterns():
        if not exhaustive and (feasible_count >= sample_count or checked >= 50 * sample_count):
            break
        checked += 1
        z = np.ones(network.n_branches)
        for k, v in zip(switchable, bits):
            z[k - 1] = v
        if not feasible(z):
            continue
        feasible_count += 1
        full = is_connected(graph.edge_induced(z))
        reduced = is_connected(plan.contracted.edge_induced(plan.reduced_topology(z)))
        if full != reduced:
            mismatches.append(tuple(int(v) for v in z))
    return EquivalenceReport(checked, feasible_count, checked, exhaustive, mismatches)
