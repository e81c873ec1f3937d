import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aarbac.authz import (
    NotAuthorized,
    Selector,
    apply_user_op,
    authorize_perm,
    authorize_perm_set,
    authorize_user,
    authorize_user_set,
    eval_selector,
)
from aarbac.core import UnknownOperation, UnknownSubject
from aarbac.legacy import decide_pra

from conftest import fixture, translated

USERS = ["u1", "u2", "u3", "u4"]
ROLES6 = [f"x{i}" for i in range(1, 7)]


def tasks_selector(task):
    return Selector.parse("permissions", f'"{task}" in tasks(p)')


@pytest.mark.parametrize("op, au, u, r, expected", [
    ("assign", "u3", "u1", "x4", True),
    ("assign", "u2", "u1", "x4", False),
    ("revoke", "u3", "u1", "x2", False),
])
def test_authorize_user_examples(aura97, op, au, u, r, expected):
    assert authorize_user(aura97, op, au, u, r).allowed is expected


def test_decision_trace_nonempty(aura97):
    assert authorize_user(aura97, "assign", "u3", "u1", "x4").trace


@pytest.mark.parametrize("args", [
    ("assign", "u3", "u1", "nope"),
    ("assign", "zz", "u1", "x4"),
    ("assign", "u3", "zz", "x4"),
])
def test_out_of_universe_arguments(aura97, args):
    with pytest.raises(UnknownSubject):
        authorize_user(aura97, *args)


def test_unknown_operation(aura97):
    with pytest.raises(UnknownOperation):
        authorize_user(aura97, "delete", "u3", "u1", "x4")


def test_missing_rule_denies_with_note(aura97):
    inst = dataclasses.replace(aura97, rules={"assign": aura97.rules["assign"]})
    decision = authorize_user(inst, "revoke", "u3", "u1", "x4")
    assert not decision.allowed
    assert "no rule" in decision.trace[0][0]


def test_user_set_selector(aura97):
    chi = Selector.parse("users", '"x1" in assigned_roles(u)')
    assert eval_selector(aura97, chi) == ["u1"]
    assert authorize_user_set(aura97, "assign", "u3", chi, "x4").allowed


def test_user_set_empty_denied(aura97):
    assert not authorize_user_set(aura97, "assign", "u3", [], "x4").allowed
    assert not authorize_user_set(aura97, "assign", "u3", Selector.parse("users", "false"), "x4").allowed


def test_user_set_requires_every_member(aura97):
    # u2 holds x3, x4 only, so the x1-and-x2 prerequisite for x4 fails for u2.
    assert authorize_user(aura97, "assign", "u3", "u1", "x4").allowed
    assert not authorize_user(aura97, "assign", "u3", "u2", "x4").allowed
    assert not authorize_user_set(aura97, "assign", "u3", ["u1", "u2"], "x4").allowed


def test_user_set_unknown_member(aura97):
    with pytest.raises(UnknownSubject):
        authorize_user_set(aura97, "assign", "u3", ["u1", "zz"], "x4")


@pytest.mark.parametrize("op, au, p, r, expected", [
    ("assign", "u1", "p2", "x4", True),
    ("assign", "u2", "p2", "x4", False),
    ("revoke", "u1", "p1", "x2", True),
])
def test_authorize_perm_examples(op, au, p, r, expected):
    assert authorize_perm(translated("pra97"), op, au, p, r).allowed is expected


def test_selector_over_worked_example_tasks(arpa_uni):
    assert eval_selector(arpa_uni, tasks_selector("t3")) == ["p4"]
    assert eval_selector(arpa_uni, tasks_selector("t1")) == ["p1", "p2", "p3", "p4"]
    assert eval_selector(arpa_uni, Selector.parse("permissions", "false")) == []


def test_selector_universe_mismatch(arpa_uni):
    with pytest.raises(UnknownSubject):
        eval_selector(arpa_uni, Selector.parse("users", "true"))


def test_worked_example_set_rule_agrees_with_oracle_on_t3(arpa_uni):
    legacy = fixture("pra-uni")
    for op in ("assign", "revoke"):
        decision = authorize_perm_set(arpa_uni, op, "u1", tasks_selector("t3"), "r4")
        assert decision.allowed == decide_pra("uni", legacy, op, "u1", "t3", "r4") is False


def test_worked_example_set_rule_empty_chi_denied(arpa_uni):
    assert all(not authorize_perm_set(arpa_uni, "assign", "u1", [], r).allowed for r in arpa_uni.roles)


def test_worked_example_admin_without_unit_denied(arpa_uni):
    for t in ("t1", "t2", "t3", "t4"):
        for r in sorted(arpa_uni.roles):
            assert not authorize_perm_set(arpa_uni, "assign", "u3", tasks_selector(t), r).allowed


def test_translated_set_rule_allows_unit_admin():
    inst = translated("pra-uni")
    assert authorize_perm_set(inst, "assign", "u1", tasks_selector("t3"), "r3").allowed
    assert decide_pra("uni", fixture("pra-uni"), "assign", "u1", "t3", "r3")


def test_decisions_are_pure(aura97):
    assert authorize_user(aura97, "assign", "u3", "u1", "x4") == authorize_user(aura97, "assign", "u3", "u1", "x4")


@pytest.mark.parametrize("name", ["aura97", "ura02-roles", "ura-uarbac"])
def test_set_single_consistency(name):
    inst = fixture(name) if name == "aura97" else translated(name)
    for op in sorted(inst.rules):
        for au in sorted(inst.admin_users):
            for u in sorted(inst.users):
                for r in sorted(inst.roles):
                    single = authorize_user(inst, op, au, u, r).allowed
                    assert authorize_user_set(inst, op, au, [u], r).allowed == single


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(USERS), st.sets(st.sampled_from(["ar1", "ar2"])), st.sampled_from(["assign", "revoke"]))
def test_monotone_in_admin_roles(au, extra, op):
    inst = fixture("aura97")
    held = inst.values["aroles"].get(au, frozenset())
    values = {"aroles": {**inst.values["aroles"], "u9": held | extra}}
    grown = dataclasses.replace(inst, admin_users=inst.admin_users | {"u9"}, values=values)
    for u in USERS:
        for r in ROLES6:
            if authorize_user(inst, op, au, u, r).allowed:
                assert authorize_user(grown, op, "u9", u, r).allowed


def test_apply_assign(aura97):
    after = apply_user_op(aura97, "assign", "u3", "u1", "x4")
    assert after.assigned_roles["u1"] == {"x1", "x2", "x4"}
    assert aura97.assigned_roles["u1"] == {"x1", "x2"}


def test_apply_revoke_not_held_is_idempotent(aura97):
    assert apply_user_op(aura97, "revoke", "u3", "u1", "x5") == aura97


def test_apply_unauthorized(aura97):
    with pytest.raises(NotAuthorized):
        apply_user_op(aura97, "assign", "u2", "u1", "x4")
    assert aura97.assigned_roles["u1"] == {"x1", "x2"}


def test_apply_unknown_operation(aura97):
    with pytest.raises(UnknownOperation):
        apply_user_op(aura97, "grant", "u3", "u1", "x4")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(USERS), st.sampled_from(USERS), st.sampled_from(ROLES6))
def test_apply_then_inverse_restores(au, u, r):
    inst = fixture("aura97")
    if r in inst.assigned_roles.get(u, ()) or not authorize_user(inst, "assign", au, u, r).allowed:
        return
    after = apply_user_op(inst, "assign", au, u, r)
    if authorize_user(after, "revoke", au, u, r).allowed:
        assert apply_user_op(after, "revoke", au, u, r).assigned_roles == inst.assigned_roles


def test_apply_then_inverse_example(aura97):
    after = apply_user_op(aura97, "assign", "u3", "u1", "x4")
    assert apply_user_op(after, "revoke", "u3", "u1", "x4") == aura97
