import json
import math
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otsconn.fixtures import FIXTURES, make_fixture
from otsconn.grid import (
    Branch,
    Bus,
    CaseFormatError,
    CaseValidationError,
    Network,
    SwitchConfig,
    bridges,
    default_contingencies,
    dumps_case,
    load_case,
    loads_case,
    network_to_dict,
    sample_switchable,
    save_case,
    switch_count,
)

from conftest import brute_components, simple_network


def _doc(**override):
    doc = network_to_dict(make_fixture("cycle3"))
    doc.update(override)
    return doc


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip_is_byte_identical(name, tmp_path):
    net = make_fixture(name)
    p = tmp_path / "case.json"
    save_case(net, p)
    again = load_case(p)
    assert network_to_dict(again) == network_to_dict(net)
    assert dumps_case(again) == p.read_text(encoding="utf-8")


def test_c_b_defaults_to_zero():
    doc = _doc()
    for br in doc["branches"]:
        del br["c_b"]
    net = loads_case(json.dumps(doc))
    assert all(br.c_b == 0.0 for br in net.branches)


def test_unknown_key_rejected_with_field():
    doc = _doc()
    doc["buses"][0]["voltage"] = 1.0
    with pytest.raises(CaseValidationError) as err:
        loads_case(json.dumps(doc))
    assert err.value.field == "buses[0].voltage"


@pytest.mark.parametrize("literal", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_rejected(literal):
    text = json.dumps(_doc()).replace('"p_d": 100.0', f'"p_d": {literal}', 1)
    assert f'"p_d": {literal}' in text
    with pytest.raises(CaseFormatError):
        loads_case(text)


def test_missing_field_named():
    doc = _doc()
    del doc["branches"][1]["b"]
    with pytest.raises(CaseValidationError) as err:
        loads_case(json.dumps(doc))
    assert err.value.field == "branches[1].b"


def test_version_checked():
    with pytest.raises(CaseValidationError):
        loads_case(json.dumps(_doc(version=2)))


def test_malformed_json():
    with pytest.raises(CaseFormatError):
        loads_case("{not json")


@pytest.mark.parametrize("change, field", [
    (lambda d: d["buses"][0].update(p_g_min=500.0), "buses[0].p_g_min"),
    (lambda d: d["branches"][0].update(to=99), "branches[0].to"),
    (lambda d: d["branches"][0].update(to=d["branches"][0]["from"]), "branches[0].to"),
    (lambda d: d["branches"][0].update(b=0.0), "branches[0].b"),
    (lambda d: d["buses"][1].update(id=7), "buses[1].id"),
])
def test_validation_errors_name_the_field(change, field):
    doc = _doc()
    change(doc)
    with pytest.raises(CaseValidationError) as err:
        loads_case(json.dumps(doc))
    assert err.value.field == field


def test_disconnected_network_rejected():
    with pytest.raises(CaseValidationError):
        simple_network(4, [(1, 2), (3, 4)])


def test_switch_count_uses_exact_ceiling():
    assert switch_count(10, 0.3) == 3
    assert switch_count(10, 0.7) == 7
    assert switch_count(10, 0.31) == 4
    assert switch_count(10, 1.0) == 10


def test_sample_switchable_examples():
    net = simple_network(10, [(i, i + 1) for i in range(1, 10)] + [(10, 1)])
    a = sample_switchable(net, 0.3, 7)
    assert len(a.switchable_ids) == 3
    assert a == sample_switchable(net, 0.3, 7)
    assert sample_switchable(net, 1.0, 123).switchable_ids == frozenset(range(1, 11))
    eight = simple_network(8, [(i, i + 1) for i in range(1, 8)] + [(8, 1)])
    draws = {sample_switchable(eight, 0.5, s).switchable_ids for s in range(1, 6)}
    assert all(len(d) == 4 for d in draws)
    assert len(draws) > 1
    with pytest.raises(ValueError):
        sample_switchable(net, 0.0, 1)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(min_value=0.01, max_value=1.0), seed=st.integers(0, 2**32 - 1))
def test_sample_size_and_subset(alpha, seed):
    net = make_fixture("nis-demo")
    cfg = sample_switchable(net, alpha, seed)
    assert len(cfg.switchable_ids) == math.ceil(Decimal(repr(alpha)) * net.n_branches)
    assert cfg.switchable_ids <= {br.id for br in net.branches}
    assert cfg.alpha == alpha and cfg.seed == seed


def _brute_bridges(net):
    out = set()
    for br in net.branches:
        edges = [(b.from_bus, b.to_bus) for b in net.branches if b.id != br.id]
        if len(brute_components(net.n_buses, edges)) > 1:
            out.add(br.id)
    return out


def test_contingencies_tree_and_cycle():
    tree = simple_network(4, [(1, 2), (2, 3), (2, 4)])
    assert len(default_contingencies(tree)) == 0
    cycle = simple_network(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
    assert set(default_contingencies(cycle)) == {1, 2, 3, 4}


@pytest.mark.parametrize("name", FIXTURES)
def test_contingencies_partition_branches(name):
    net = make_fixture(name)
    cont = set(default_contingencies(net))
    br = set(bridges(net))
    assert br == _brute_bridges(net)
    assert cont.isdisjoint(br)
    assert cont | br == {b.id for b in net.branches}


def test_fig1_contingencies():
    # the leaf line 5-6 is the only bridge
    assert set(default_contingencies(make_fixture("fig1"))) == {1, 2, 3, 4, 5, 7, 8}


def test_parallel_edges_are_not_bridges():
    net = simple_network(3, [(1, 2), (1, 2), (2, 3)])
    assert set(bridges(net)) == {3}


def test_switch_config_from_network():
    net = make_fixture("fig1")
    cfg = SwitchConfig.from_network(net)
    assert cfg.switchable_ids == {7, 8}
    assert cfg.is_switchable(7) and not cfg.is_switchable(1)


def test_network_is_immutable():
    net = make_fixture("fig1")
    with pytest.raises(Exception):
        net.name = "x"
    assert net.bus(4).c_g == 12
    assert net.incident(5) == [4, 5, 6, 8]
    assert isinstance(net.branch(1), Branch) and isinstance(net.bus(1), Bus)
    assert isinstance(net.replace(name="y"), Network)
