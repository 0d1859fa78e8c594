import itertools

import pytest

from otsconn.fixtures import FIXTURES, make_fixture
from otsconn.graph import Multigraph
from otsconn.grid import Branch, Bus, Network

# acceptance verdicts collected by test_acceptance.py, printed at session end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def brute_components(n, edges):
    """Components by repeated flooding, independent of the package's union-find."""
    adj = {v: set() for v in range(1, n + 1)}
    for f, t in edges:
        adj[f].add(t)
        adj[t].add(f)
    seen, comps = set(), []
    for v in range(1, n + 1):
        if v in seen:
            continue
        comp, frontier = {v}, [v]
        while frontier:
            u = frontier.pop()
            for w in adj[u] - comp:
                comp.add(w)
                frontier.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def all_topologies(m):
    return itertools.product((0, 1), repeat=m)


def simple_network(n, edges, loads=None, gens=None, switchable=True, name="t"):
    """Buses 1..n; ``gens`` maps bus -> (p_g_max, c_g); ``loads`` maps bus -> p_d."""
    loads = loads or {}
    gens = gens or {}
    buses = []
    for i in range(1, n + 1):
        pmax, cost = gens.get(i, (0.0, 0.0))
        buses.append(Bus(i, loads.get(i, 0.0), 0.0, pmax, cost, -1.0, 1.0, pmax, pmax))
    branches = [Branch(k, f, t, 10.0, 100.0, switchable) for k, (f, t) in enumerate(edges, start=1)]
    return Network(tuple(buses), tuple(branches), name)


# graphs used by the exhaustive topology sweeps: 5-6 nodes, 7-10 edges
SWEEP_GRAPHS = {
    "house-x": Multigraph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3), (2, 4)]),
    "wheel5": Multigraph(6, [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (2, 3), (3, 4), (4, 5), (5, 6)]),
    "k4-tail": Multigraph(6, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5), (5, 6), (6, 4),
                              (2, 1)]),
    "ladder": Multigraph(6, [(1, 2), (2, 3), (4, 5), (5, 6), (1, 4), (2, 5), (3, 6), (1, 5)]),
}


@pytest.fixture(params=FIXTURES)
def fixture_network(request):
    return make_fixture(request.param)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def lp_feasible(model, fixed=None):
    """Feasibility of ``model`` with binaries relaxed and ``fixed`` names pinned."""
    import numpy as np

    from otsconn.solver import solve_lp

    c, A, senses, b, lo, up = model.dense()
    lo, up = lo.copy(), up.copy()
    for name, v in (fixed or {}).items():
        j = model.var(name)
        lo[j] = up[j] = v
    return solve_lp(np.zeros_like(c), A, senses, b, lo, up).status == "optimal"


def fix_z(z):
    return {f"z_{k}": v for k, v in enumerate(z, start=1)}
