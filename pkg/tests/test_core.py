import dataclasses
import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aarbac import io as aio
from aarbac.core import (
    AttributeSchema,
    CycleError,
    Hierarchy,
    UnknownElement,
    build_hierarchy,
    dominates,
    set_dominates,
    validate_instance,
)

from conftest import CORE_FIXTURES, fixture
from strategies import dags

CHAIN6 = [f"x{i}" for i in range(1, 7)]


def chain(xs):
    return build_hierarchy(xs, zip(xs, xs[1:]))


def reachability(nodes, pairs):
    """Independent closure: networkx descendants plus reflexivity."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(pairs)
    return {(a, b) for a in nodes for b in nx.descendants(g, a) | {a}}


def test_single_edge_closure():
    h = build_hierarchy({"ar1", "ar2"}, {("ar1", "ar2")})
    assert h.closure == {("ar1", "ar1"), ("ar2", "ar2"), ("ar1", "ar2")}


def test_six_chain_closure():
    h = chain(CHAIN6)
    assert ("x1", "x6") in h.closure
    assert len(h.closure) == len(reachability(CHAIN6, zip(CHAIN6, CHAIN6[1:]))) == 21


def test_two_cycle_rejected():
    with pytest.raises(CycleError):
        build_hierarchy({"a", "b"}, {("a", "b"), ("b", "a")})


def test_self_loop_rejected():
    with pytest.raises(CycleError):
        build_hierarchy({"a"}, {("a", "a")})


def test_pair_outside_elements_rejected():
    with pytest.raises(UnknownElement):
        build_hierarchy({"a"}, {("a", "b")})


def test_dominates_on_chain():
    h = chain(CHAIN6)
    assert dominates(h, "x2", "x5")
    assert not dominates(h, "x5", "x2")
    assert all(dominates(h, x, x) for x in CHAIN6)


def test_dominates_unknown_element():
    with pytest.raises(UnknownElement):
        dominates(chain(CHAIN6), "x1", "zz")


def test_juniors_and_seniors():
    h = chain(CHAIN6)
    assert h.juniors("x4") == {"x4", "x5", "x6"}
    assert h.seniors("x2") == {"x1", "x2"}


def test_set_dominates_examples():
    h = chain(["a", "b", "c"])
    assert set_dominates(h, {"a"}, {"b", "c"})
    assert set_dominates(h, {"a"}, {"a"})
    assert not set_dominates(h, set(), {"b"})
    assert set_dominates(h, set(), set())
    assert not set_dominates(h, {"b", "c"}, {"b"})


def test_set_dominates_unknown_element():
    with pytest.raises(UnknownElement):
        set_dominates(chain(["a", "b"]), {"a"}, {"zz"})


def test_hierarchy_equality_ignores_construction_order():
    a = build_hierarchy(["x", "y", "z"], [("x", "y"), ("y", "z")])
    b = build_hierarchy(["z", "y", "x"], [("y", "z"), ("x", "y")])
    assert a == b and hash(a) == hash(b)


@settings(max_examples=100, deadline=None)
@given(dags())
def test_closure_matches_reachability(dag):
    nodes, pairs = dag
    h = build_hierarchy(nodes, pairs)
    assert h.closure == reachability(nodes, pairs)
    assert h.closure >= pairs


@settings(max_examples=100, deadline=None)
@given(dags(max_nodes=8), st.data())
def test_set_dominates_definition(dag, data):
    nodes, pairs = dag
    h = build_hierarchy(nodes, pairs)
    pool = sorted(nodes)
    a = data.draw(st.sets(st.sampled_from(pool)) if pool else st.just(set()))
    b = data.draw(st.sets(st.sampled_from(pool)) if pool else st.just(set()))
    expected = (bool(a) or not b) and all(dominates(h, x, y) for x, y in itertools.product(a, b))
    assert set_dominates(h, a, b) == expected


@pytest.mark.parametrize("name", sorted(CORE_FIXTURES))
def test_core_fixtures_validate_clean(name):
    assert validate_instance(fixture(name)) == []


def test_value_out_of_scope(aura97):
    values = dict(aura97.values)
    values["aroles"] = {**values["aroles"], "u3": frozenset({"zz"})}
    report = validate_instance(dataclasses.replace(aura97, values=values))
    assert [v.code for v in report] == ["VALUE_OUT_OF_SCOPE"]
    assert report[0].path.startswith("aatt.aroles.values.u3")


def test_ordered_without_hierarchy(aura97):
    schema = dataclasses.replace(aura97.attributes["aroles"], hierarchy=Hierarchy())
    report = validate_instance(dataclasses.replace(aura97, attributes={"aroles": schema}))
    assert "ORDERED_WITHOUT_HIERARCHY" in [v.code for v in report]


def test_unordered_with_hierarchy(aura97):
    schema = AttributeSchema("aroles", "admin-user", "set", {"ar1", "ar2"}, False,
                             build_hierarchy({"ar1", "ar2"}, {("ar1", "ar2")}))
    report = validate_instance(dataclasses.replace(aura97, attributes={"aroles": schema}))
    assert "UNORDERED_WITH_HIERARCHY" in [v.code for v in report]


def test_atomic_attribute_multivalued(aura97):
    schema = dataclasses.replace(aura97.attributes["aroles"], form="atomic")
    values = {"aroles": {"u3": {"ar1", "ar2"}}}
    report = validate_instance(dataclasses.replace(aura97, attributes={"aroles": schema}, values=values))
    assert "ATOMIC_MULTIVALUED" in [v.code for v in report]


def test_missing_rule_reported(aura97):
    report = validate_instance(dataclasses.replace(aura97, rules={"assign": aura97.rules["assign"]}))
    assert [(v.code, v.path) for v in report] == [("MISSING_RULE", "rules.revoke")]


def test_assigned_role_must_be_a_role(aura97):
    report = validate_instance(dataclasses.replace(aura97, assigned_roles={"u1": {"nope"}}))
    assert [v.code for v in report] == ["UNKNOWN_ROLE"]


def test_validation_is_deterministic(aura97):
    broken = dataclasses.replace(aura97, assigned_roles={"u1": {"nope"}, "zz": {"x1"}})
    assert validate_instance(broken) == validate_instance(broken)


@pytest.mark.parametrize("name", sorted(CORE_FIXTURES))
def test_valid_instance_survives_round_trip(name):
    inst = fixture(name)
    again = aio.load_instance(aio.save_instance(inst))
    assert again == inst
    assert validate_instance(again) == []
