"""Bundled synthetic cases, each engineered to exhibit one behaviour.

fig1      two areas joined by a priced two-line cutset; islanding is strictly
          cheapest when connectedness is not enforced
cycle3    3-bus cycle with a tight line, zero ramping; N-1 changes the dispatch
bridge2   triangle with a two-bridge radial tail of loads
nis-demo  meshed core plus a meshed load pocket behind one cut vertex, with an
          always-on line in the core
"""

from __future__ import annotations

from pathlib import Path

from .grid import Branch, Bus, Network, save_case

FIXTURES = ("fig1", "cycle3", "bridge2", "nis-demo")


def _bus(i, p_d=0.0, p_g_max=0.0, c_g=0.0, theta=0.6, ramp=0.0):
    return Bus(i, p_d, 0.0, p_g_max, c_g, -theta, theta, ramp, ramp)


def fig1() -> Network:
    # area 1 = {1,2,3}, area 2 = {4,5,6}; the cutset is 3-4 and 2-5.
    # Moving 20 MW across one cutset line saves 40 but costs 50 to keep it on.
    buses = (
        _bus(1, p_g_max=100, c_g=10, ramp=100),
        _bus(2, p_d=30),
        _bus(3, p_d=30),
        _bus(4, p_g_max=100, c_g=12, ramp=100),
        _bus(5, p_d=30),
        _bus(6, p_d=30),
    )
    branches = (
        Branch(1, 1, 2, 500, 200, False),
        Branch(2, 2, 3, 500, 200, False),
        Branch(3, 1, 3, 500, 200, False),
        Branch(4, 4, 5, 500, 200, False),
        Branch(5, 4, 5, 500, 200, False),
        Branch(6, 5, 6, 500, 200, False),
        Branch(7, 3, 4, 500, 20, True, 50.0),
        Branch(8, 2, 5, 500, 20, True, 50.0),
    )
    return Network(buses, branches, "fig1")


def cycle3() -> Network:
    # cheap bus 1 would serve all 100 MW, but losing 1-3 pushes it over 1-2
    # (60 MW); with zero ramping bus 2 must carry 40 MW in the base case too
    buses = (
        _bus(1, p_g_max=200, c_g=10, theta=1.0),
        _bus(2, p_g_max=200, c_g=30, theta=1.0),
        _bus(3, p_d=100, theta=1.0),
    )
    branches = (
        Branch(1, 1, 2, 200, 60, True),
        Branch(2, 2, 3, 200, 100, True),
        Branch(3, 1, 3, 200, 100, True),
    )
    return Network(buses, branches, "cycle3")


def bridge2() -> Network:
    buses = (
        _bus(1, p_g_max=100, c_g=10, theta=1.0, ramp=50),
        _bus(2, p_g_max=100, c_g=20, theta=1.0, ramp=50),
        _bus(3, p_d=10, theta=1.0),
        _bus(4, p_d=20, theta=1.0),
        _bus(5, p_d=20, theta=1.0),
    )
    branches = (
        Branch(1, 1, 2, 100, 80, True),
        Branch(2, 2, 3, 100, 80, True),
        Branch(3, 1, 3, 100, 80, True),
        Branch(4, 3, 4, 100, 80, True),
        Branch(5, 4, 5, 100, 80, True),
    )
    return Network(buses, branches, "bridge2")


def nis_demo() -> Network:
    # core {1,2,3,4} with 1-2 always on; pocket {4,5,6,7} hangs off bus 4
    buses = (
        _bus(1, p_g_max=150, c_g=10, theta=1.0, ramp=60),
        _bus(2, p_g_max=150, c_g=15, theta=1.0, ramp=60),
        _bus(3, p_d=20, theta=1.0),
        _bus(4, p_d=20, theta=1.0),
        _bus(5, p_d=15, theta=1.0),
        _bus(6, p_d=15, theta=1.0),
        _bus(7, p_d=15, theta=1.0),
    )
    branches = (
        Branch(1, 1, 2, 100, 120, False),
        Branch(2, 2, 3, 100, 120, True),
        Branch(3, 3, 4, 100, 120, True),
        Branch(4, 4, 1, 100, 120, True),
        Branch(5, 1, 3, 100, 120, True),
        Branch(6, 4, 5, 100, 120, True),
        Branch(7, 4, 6, 100, 120, True),
        Branch(8, 5, 6, 100, 120, True),
        Branch(9, 5, 7, 100, 120, True),
        Branch(10, 6, 7, 100, 120, True),
    )
    return Network(buses, branches, "nis-demo")


_BUILDERS = {"fig1": fig1, "cycle3": cycle3, "bridge2": bridge2, "nis-demo": nis_demo}


def make_fixture(name: str) -> Network:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURES}") from None


def write_fixture(name: str, path) -> Path:
    path = Path(path)
    save_case(make_fixture(name), path)
    return path
