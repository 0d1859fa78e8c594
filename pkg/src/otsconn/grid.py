"""Physical network model, case-file I/O and switchable-line sampling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graph import Multigraph, connected_components, is_connected

CASE_VERSION = 1
PRNG_NAME = "numpy.PCG64"

_BUS_KEYS = ("id", "p_d", "p_g_min", "p_g_max", "c_g", "theta_min", "theta_max", "r_up", "r_down")
_BRANCH_KEYS = ("id", "from", "to", "b", "p_b_max", "switchable", "c_b")
_TOP_KEYS = ("version", "name", "buses", "branches")


class CaseError(ValueError):
    """Base class for case-file problems."""


class CaseFormatError(CaseError):
    """The file is not parseable as a case document."""


class CaseValidationError(CaseError):
    """The case parses but violates a model invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Bus:
    id: int
    p_d: float = 0.0
    p_g_min: float = 0.0
    p_g_max: float = 0.0
    c_g: float = 0.0
    theta_min: float = -math.pi / 6
    theta_max: float = math.pi / 6
    r_up: float = 0.0
    r_down: float = 0.0

    def injection_interval(self) -> tuple[float, float]:
        """Range of net injection p_g - p_d over admissible generation."""
        return self.p_g_min - self.p_d, self.p_g_max - self.p_d


@dataclass(frozen=True)
class Branch:
    id: int
    from_bus: int
    to_bus: int
    b: float
    p_b_max: float
    switchable: bool = False
    c_b: float = 0.0


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    name: str = "case"

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        _validate(self)

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def bus(self, bus_id: int) -> Bus:
        return self.buses[bus_id - 1]

    def branch(self, branch_id: int) -> Branch:
        return self.branches[branch_id - 1]

    def graph(self, weighted: bool = False) -> Multigraph:
        edges = [(br.from_bus, br.to_bus) for br in self.branches]
        weights = [br.b for br in self.branches] if weighted else None
        return Multigraph(self.n_buses, edges, weights)

    def incident(self, bus_id: int) -> list[int]:
        """Branch ids with an endpoint at ``bus_id`` (the union A_f(i) | A_t(i))."""
        return [br.id for br in self.branches if bus_id in (br.from_bus, br.to_bus)]

    def replace(self, **changes) -> "Network":
        kw = dict(buses=self.buses, branches=self.branches, name=self.name)
        kw.update(changes)
        return Network(**kw)


@dataclass(frozen=True)
class SwitchConfig:
    switchable_ids: frozenset[int]
    alpha: float | None = None
    seed: int | None = None
    algorithm: str = PRNG_NAME

    @classmethod
    def from_network(cls, network: Network) -> "SwitchConfig":
        """The switchable set declared by the case file itself."""
        return cls(frozenset(br.id for br in network.branches if br.switchable))

    def is_switchable(self, branch_id: int) -> bool:
        return branch_id in self.switchable_ids


@dataclass(frozen=True)
class ContingencySet:
    branch_ids: frozenset[int] = field(default_factory=frozenset)

    def __iter__(self):
        return iter(sorted(self.branch_ids))

    def __len__(self):
        return len(self.branch_ids)


def _check_finite(field_name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CaseValidationError(field_name, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise CaseValidationError(field_name, "must be finite")
    return value


def _validate(net: Network) -> None:
    if len(net.buses) < 1:
        raise CaseValidationError("buses", "at least one bus is required")
    for pos, bus in enumerate(net.buses, start=1):
        where = f"buses[{pos - 1}]"
        if bus.id != pos:
            raise CaseValidationError(f"{where}.id", f"bus ids must be 1..N in order, got {bus.id}")
        for name in _BUS_KEYS[1:]:
            _check_finite(f"{where}.{name}", getattr(bus, name))
        if bus.p_g_min > bus.p_g_max:
            raise CaseValidationError(f"{where}.p_g_min", "exceeds p_g_max")
        if bus.theta_min > bus.theta_max:
            raise CaseValidationError(f"{where}.theta_min", "exceeds theta_max")
        if bus.r_up < 0 or bus.r_down < 0:
            raise CaseValidationError(f"{where}.r_up", "ramp limits must be >= 0")
    n = len(net.buses)
    for pos, br in enumerate(net.branches, start=1):
        where = f"branches[{pos - 1}]"
        if br.id != pos:
            raise CaseValidationError(f"{where}.id", f"branch ids must be 1..N in order, got {br.id}")
        for name, value in (("from", br.from_bus), ("to", br.to_bus)):
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= n:
                raise CaseValidationError(f"{where}.{name}", f"unknown bus {value!r}")
        if br.from_bus == br.to_bus:
            raise CaseValidationError(f"{where}.to", "self-loops are not allowed")
        if _check_finite(f"{where}.b", br.b) <= 0:
            raise CaseValidationError(f"{where}.b", "susceptance must be > 0")
        if _check_finite(f"{where}.p_b_max", br.p_b_max) <= 0:
            raise CaseValidationError(f"{where}.p_b_max", "capacity must be > 0")
        if _check_finite(f"{where}.c_b", br.c_b) < 0:
            raise CaseValidationError(f"{where}.c_b", "switching cost must be >= 0")
    if not is_connected(net.graph()):
        comps = connected_components(net.graph())
        raise CaseValidationError("branches", f"network is disconnected ({len(comps)} components)")


def _reject_constant(token):
    raise CaseFormatError(f"non-finite literal {token} is not allowed")


def _expect_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise CaseFormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise CaseValidationError(f"{where}.{unknown[0]}", "unknown key")
    missing = [k for k in required if k not in obj]
    if missing:
        raise CaseValidationError(f"{where}.{missing[0]}", "missing key")


def network_from_dict(doc: dict) -> Network:
    _expect_keys(doc, _TOP_KEYS, _TOP_KEYS, "case")
    if doc["version"] != CASE_VERSION:
        raise CaseValidationError("version", f"unsupported version {doc['version']!r}")
    if not isinstance(doc["name"], str):
        raise CaseValidationError("name", "must be a string")
    if not isinstance(doc["buses"], list) or not isinstance(doc["branches"], list):
        raise CaseFormatError("buses and branches must be arrays")

    buses = []
    for i, raw in enumerate(doc["buses"]):
        where = f"buses[{i}]"
        _expect_keys(raw, _BUS_KEYS, _BUS_KEYS, where)
        if not isinstance(raw["id"], int) or isinstance(raw["id"], bool):
            raise CaseValidationError(f"{where}.id", "must be an integer")
        vals = {k: _check_finite(f"{where}.{k}", raw[k]) for k in _BUS_KEYS[1:]}
        buses.append(Bus(id=raw["id"], **vals))

    branches = []
    for i, raw in enumerate(doc["branches"]):
        where = f"branches[{i}]"
        _expect_keys(raw, _BRANCH_KEYS, _BRANCH_KEYS[:-1], where)
        for k in ("id", "from", "to"):
            if not isinstance(raw[k], int) or isinstance(raw[k], bool):
                raise CaseValidationError(f"{where}.{k}", "must be an integer")
        if not isinstance(raw["switchable"], bool):
            raise CaseValidationError(f"{where}.switchable", "must be a boolean")
        branches.append(Branch(
            id=raw["id"],
            from_bus=raw["from"],
            to_bus=raw["to"],
            b=_check_finite(f"{where}.b", raw["b"]),
            p_b_max=_check_finite(f"{where}.p_b_max", raw["p_b_max"]),
            switchable=raw["switchable"],
            c_b=_check_finite(f"{where}.c_b", raw.get("c_b", 0.0)),
        ))
    buses.sort(key=lambda b: b.id)
    branches.sort(key=lambda b: b.id)
    return Network(tuple(buses), tuple(branches), doc["name"])


def network_to_dict(net: Network) -> dict:
    return {
        "version": CASE_VERSION,
        "name": net.name,
        "buses": [{"id": b.id, **{k: float(getattr(b, k)) for k in _BUS_KEYS[1:]}}
                  for b in net.buses],
        "branches": [
            {
                "id": br.id,
                "from": br.from_bus,
                "to": br.to_bus,
                "b": float(br.b),
                "p_b_max": float(br.p_b_max),
                "switchable": br.switchable,
                "c_b": float(br.c_b),
            }
            for br in net.branches
        ],
    }


def dumps_case(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def save_case(net: Network, path) -> None:
    Path(path).write_text(dumps_case(net), encoding="utf-8")


def loads_case(text: str) -> Network:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise CaseFormatError(f"malformed JSON: {exc}") from exc
    return network_from_dict(doc)


def load_case(path) -> Network:
    """Read and validate a version-1 JSON case file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CaseFormatError(f"{path}: not UTF-8") from exc
    return loads_case(text)


def switch_count(n_branches: int, alpha: float) -> int:
    # Exact ceiling on the decimal value of alpha; 0.3 * 10 is 3.0000000000000004 in floats.
    return math.ceil(Fraction(repr(float(alpha))) * n_branches)


def sample_switchable(network: Network, alpha: float, seed: int) -> SwitchConfig:
    """Draw ceil(alpha * N_e) distinct switchable branches with a seeded PCG64 stream."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    k = switch_count(network.n_branches, alpha)
    rng = np.random.Generator(np.random.PCG64(seed))
    ids = np.arange(1, network.n_branches + 1)
    chosen = rng.choice(ids, size=k, replace=False) if k else ids[:0]
    return SwitchConfig(frozenset(int(i) for i in chosen), alpha=alpha, seed=seed)


def bridges(network: Network) -> frozenset[int]:
    graph = network.graph()
    out = set()
    for br in network.branches:
        keep = [1] * network.n_branches
        keep[br.id - 1] = 0
        if not is_connected(graph.edge_induced(keep)):
            out.add(br.id)
    return frozenset(out)


def default_contingencies(network: Network) -> ContingencySet:
    """Every branch whose single outage leaves the full network connected."""
    br = bridges(network)
    return ContingencySet(frozenset(b.id for b in network.branches if b.id not in br))
