"""Multigraph linear algebra, connectivity and balance classification.

Nodes are numbered 1..n throughout; edge k (0-based in Python sequences)
is oriented from ``edges[k][0]`` to ``edges[k][1]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_NIS_CAP = 10**6
BALANCE_TOL = 1e-9


class EnumerationCapError(RuntimeError):
    """Raised when connected-subgraph enumeration would exceed its cap."""


@dataclass(frozen=True)
class Multigraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None

    def __init__(self, n: int, edges: Iterable[Sequence[int]], weights=None):
        edges = tuple((int(f), int(t)) for f, t in edges)
        for f, t in edges:
            if not (1 <= f <= n and 1 <= t <= n):
                raise ValueError(f"edge ({f}, {t}) references a node outside 1..{n}")
            if f == t:
                raise ValueError(f"self-loop at node {f}")
        if weights is not None:
            weights = tuple(float(w) for w in weights)
            if len(weights) != len(edges):
                raise ValueError("one weight per edge is required")
            if any(w <= 0 for w in weights):
                raise ValueError("edge weights must be positive")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_induced(self, z) -> "Multigraph":
        return edge_induced(self, z)

    def adjacency(self) -> list[set[int]]:
        """Neighbour sets indexed by node id (index 0 unused)."""
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for f, t in self.edges:
            adj[f].add(t)
            adj[t].add(f)
        return adj


def oriented_incidence(graph: Multigraph) -> np.ndarray:
    E = np.zeros((graph.n, graph.m))
    for k, (f, t) in enumerate(graph.edges):
        E[f - 1, k] = 1.0
        E[t - 1, k] = -1.0
    return E


def laplacian(graph: Multigraph, weights=None) -> np.ndarray:
    """Weighted Laplacian E diag(w) E^T; unit weights unless given."""
    if weights is None:
        weights = graph.weights
    w = np.ones(graph.m) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (graph.m,):
        raise ValueError("one weight per edge is required")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    E = oriented_incidence(graph)
    return (E * w) @ E.T


def edge_induced(graph: Multigraph, z) -> Multigraph:
    """Keep every node and exactly the edges with z_k = 1."""
    z = list(z)
    if len(z) != graph.m:
        raise ValueError(f"topology has {len(z)} entries for {graph.m} edges")
    keep = [k for k, zk in enumerate(z) if round(float(zk)) == 1]
    weights = None if graph.weights is None else [graph.weights[k] for k in keep]
    return Multigraph(graph.n, [graph.edges[k] for k in keep], weights)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n + 1))
        self.count = n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # smaller root wins so that representatives are the minimum node id
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.count -= 1
        return True


def connected_components(graph: Multigraph) -> list[list[int]]:
    """Partition of 1..n into sorted components, ordered by smallest member."""
    uf = UnionFind(graph.n)
    for f, t in graph.edges:
        uf.union(f, t)
    groups: dict[int, list[int]] = {}
    for v in range(1, graph.n + 1):
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def component_count(graph: Multigraph) -> int:
    uf = UnionFind(graph.n)
    for f, t in graph.edges:
        uf.union(f, t)
    return uf.count


def is_connected(graph: Multigraph) -> bool:
    return component_count(graph) == 1


def induces_connected(graph: Multigraph, nodes: Iterable[int], adj=None) -> bool:
    nodes = set(nodes)
    if not nodes:
        return False
    adj = adj if adj is not None else graph.adjacency()
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u in nodes and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == nodes


@dataclass(frozen=True)
class NisCatalog:
    n: int
    node_sets: tuple[frozenset[int], ...]

    def __len__(self):
        return len(self.node_sets)

    def matrix(self) -> np.ndarray:
        """The 0/1 membership matrix J (one row per listed node set)."""
        J = np.zeros((len(self.node_sets), self.n))
        for i, nodes in enumerate(self.node_sets):
            J[i, [v - 1 for v in nodes]] = 1.0
        return J


def iter_connected_sets(graph: Multigraph, max_nodes: int | None = None, within=None):
    """Yield every connected node set exactly once.

    Extension-set enumeration: each set is grown from its smallest node,
    adding only larger neighbours not already adjacent to an earlier
    member, which makes every set reachable along one path only.
    """
    limit = graph.n if max_nodes is None else max_nodes
    adj = graph.adjacency()
    allowed = set(range(1, graph.n + 1)) if within is None else set(within)

    def extend(sub, ext, root, nbhd):
        yield frozenset(sub)
        if len(sub) >= limit:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_ext = set(ext)
            for u in adj[w]:
                if u > root and u in allowed and u not in nbhd:
                    new_ext.add(u)
            yield from extend(sub | {w}, sorted(new_ext), root, nbhd | adj[w] | {w})

    for v in sorted(allowed):
        ext = sorted(u for u in adj[v] if u > v and u in allowed)
        yield from extend({v}, ext, v, adj[v] | {v})


def enumerate_connected_nis(graph: Multigraph, max_nodes: int | None = None,
                            cap: int = DEFAULT_NIS_CAP) -> NisCatalog:
    """All connected node-induced subgraphs (as node sets), full set first."""
    full = frozenset(range(1, graph.n + 1))
    found = []
    for nodes in iter_connected_sets(graph, max_nodes):
        found.append(nodes)
        if len(found) > cap:
            raise EnumerationCapError(
                f"more than {cap} connected node sets; set max_nodes or raise the cap")
    found.sort(key=lambda s: (len(s), sorted(s)))
    if full in found:
        found.remove(full)
        found.insert(0, full)
    elif is_connected(graph):
        # V_1 = V is listed even when max_nodes cuts it off
        found.insert(0, full)
    return NisCatalog(graph.n, tuple(found))


class BalanceKind(enum.Enum):
    UNIQUELY_BALANCED = "uniquely-balanced"
    MULTIPLY_BALANCED = "multiply-balanced"
    UNBALANCED = "unbalanced"
    # zero sums exist but the whole-graph sum is not among them
    NEITHER = "neither"


@dataclass(frozen=True)
class BalanceClass:
    kind: BalanceKind
    b: np.ndarray
    n_balanced: int


def classify_balance(c, catalog: NisCatalog, tol: float = BALANCE_TOL) -> BalanceClass:
    c = np.asarray(c, dtype=float)
    if c.shape != (catalog.n,):
        raise ValueError(f"expected {catalog.n} injections, got shape {c.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = catalog.matrix() @ c
    zero = np.abs(b) <= tol
    n_zero = int(zero.sum())
    full = frozenset(range(1, catalog.n + 1))
    full_zero = bool(catalog.node_sets) and catalog.node_sets[0] == full and bool(zero[0])
    if n_zero == 0:
        kind = BalanceKind.UNBALANCED
    elif not full_zero:
        kind = BalanceKind.NEITHER
    elif n_zero == 1:
        kind = BalanceKind.UNIQUELY_BALANCED
    else:
        kind = BalanceKind.MULTIPLY_BALANCED
    return BalanceClass(kind, b, n_zero)


def potential_feasible(graph: Multigraph, c, tol: float = 1e-8) -> bool:
    """Whether L theta = c is solvable on the unit-resistance network.

    Uses the minimum-norm least-squares solution and checks its residual,
    scaled by the size of ``c``.
    """
    c = np.asarray(c, dtype=float)
    L = laplacian(Multigraph(graph.n, graph.edges))
    theta = np.linalg.lstsq(L, c, rcond=None)[0]
    resid = np.max(np.abs(L @ theta - c)) if graph.n else 0.0
    return bool(resid <= tol * max(1.0, float(np.max(np.abs(c)))))


def injection_interval(node_set, network) -> tuple[float, float]:
    lo = hi = 0.0
    for v in node_set:
        bus = network.bus(v)
        lo += bus.p_g_min - bus.p_d
        hi += bus.p_g_max - bus.p_d
    return lo, hi


def is_unbalanced_nis(node_set, network) -> bool:
    """True iff the net injection of ``node_set`` can never be zero."""
    lo, hi = injection_interval(node_set, network)
    return not (lo <= 0.0 <= hi)
