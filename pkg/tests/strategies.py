"""Hypothesis strategies shared by the property tests."""

import functools
import itertools
import math

from hypothesis import strategies as st

from aarbac.ruleexpr import (
    AdminUser,
    And,
    BoundedScope,
    BoundVar,
    ConstFalse,
    ConstTrue,
    Eq,
    HierPair,
    Lit,
    Member,
    Not,
    NotMember,
    Or,
    PairTerm,
    Quant,
    RoleIn,
    RoleSet,
    ScopeOf,
    TargetPermission,
    TargetSet,
    TargetUser,
    Universe,
    UniverseMinusTargetSet,
    Var,
)

atoms = st.text(alphabet="abcxyz0123_-", min_size=1, max_size=4)
IDENTS = ("x", "q", "ar", "t1")
atts = st.sampled_from(["aroles", "tasks", "RH", "org_units", "adminunit_role"])
free_vars = st.sampled_from(["u", "p", "r", "au"])


def _permutation(items, index):
    """The ``index``-th permutation of ``items`` (Lehmer code), so one draw picks an order."""
    pool, out = list(items), []
    for k in range(len(pool), 0, -1):
        index, pick = divmod(index, k)
        out.append(pool.pop(pick))
    return out


@st.composite
def dags(draw, max_nodes=12):
    """A random DAG as ``(nodes, pairs)``: edges only go from lower to higher index.

    The edge set is one bitmask and the naming one permutation index, which keeps
    generation cheap and lets shrinking remove edges.
    """
    n = draw(st.integers(min_value=0, max_value=max_nodes))
    candidates = list(itertools.combinations(range(n), 2))
    mask = draw(st.integers(min_value=0, max_value=2 ** len(candidates) - 1))
    order = _permutation([f"n{i}" for i in range(n)], draw(st.integers(0, math.factorial(n) - 1)))
    chosen = [c for i, c in enumerate(candidates) if mask >> i & 1]
    return set(order), {(order[a], order[b]) for a, b in chosen}


@functools.lru_cache(maxsize=None)
def _term(bound):
    names = sorted(bound)
    var = st.sampled_from(names + ["u", "r"]).map(Var) if names else st.sampled_from(["u", "r"]).map(Var)
    lit = atoms.map(Lit)
    pair_lit = st.tuples(atoms, atoms).map(Lit)
    pair_var = st.tuples(var, st.one_of(var, lit)).map(lambda lr: PairTerm(*lr))
    return st.one_of(var, lit, pair_lit, pair_var)


@functools.lru_cache(maxsize=None)
def _subject(bound):
    fixed = st.sampled_from([AdminUser(), TargetUser(), TargetPermission()])
    if not bound:
        return fixed
    return st.one_of(fixed, st.sampled_from(sorted(bound)).map(BoundVar))


_domains = st.one_of(
    atts.map(ScopeOf),
    st.builds(BoundedScope, atts, st.sampled_from([">=", "<="]), atoms),
    st.frozensets(atoms, min_size=1, max_size=3).map(RoleSet),
    st.just(TargetSet()),
    st.just(UniverseMinusTargetSet()),
    st.sampled_from(["USERS", "P", "ROLES"]).map(Universe),
)


@functools.lru_cache(maxsize=None)
def _quant(depth, bound, var):
    return st.builds(Quant, st.sampled_from(["exists", "forall"]), st.just(var), _domains,
                     rule_asts(depth - 1, bound | {var}))


@functools.lru_cache(maxsize=None)
def rule_asts(depth=6, bound=frozenset()):
    """Closed rule ASTs of nesting depth at most ``depth``."""
    leaves = st.one_of(
        st.just(ConstTrue()),
        st.just(ConstFalse()),
        st.builds(Member, _term(bound), atts, _subject(bound)),
        st.builds(NotMember, _term(bound), atts, _subject(bound)),
        st.builds(HierPair, atts, _term(bound), _term(bound)),
        st.frozensets(atoms, min_size=1, max_size=3).map(RoleIn),
        st.builds(Eq, _term(bound), _term(bound)),
    )
    if depth <= 1:
        return leaves

    free = sorted(v for v in IDENTS if v not in bound)
    sub = rule_asts(depth - 1, bound)
    return st.one_of(
        leaves,
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Not, sub),
        st.sampled_from(free).flatmap(lambda var: _quant(depth, bound, var)),
    )
