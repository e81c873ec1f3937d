"""Translate legacy ARBAC instances into equivalent AURA / ARPA instances.

Every map builds attribute schemas and rule ASTs from a legacy instance;
``diff_decisions`` then checks the translation exhaustively against the
legacy model's native decision procedure.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import legacy as L
from .authz import Selector, authorize_perm, authorize_perm_set, authorize_user
from .core import ArpaInstance, AttributeSchema, AuraInstance, Form, Owner, validate_instance
from .ruleexpr import (
    AdminUser,
    And,
    BoundedScope,
    BoundVar,
    ConstTrue,
    HierPair,
    Lit,
    Member,
    NotMember,
    Or,
    PairTerm,
    Quant,
    RoleIn,
    RuleExpr,
    ScopeOf,
    TargetPermission,
    TargetSet,
    TargetUser,
    UniverseMinusTargetSet,
    Var,
    conj,
    disj,
)

RU = Owner.REGULAR_USER
AD = Owner.ADMIN_USER
PE = Owner.PERMISSION
SET = Form.SET

MOBILITY_ATTRIBUTES = ("exp_mob_mem", "imp_mob_mem", "exp_immob_mem", "imp_immob_mem")


class TranslationError(L.AarbacError, ValueError):
    """A translation produced an instance that fails validation (a bug, not bad input)."""


# ---------------------------------------------------------------- prerequisite fragments

def _bounded_literal(x: str, scope_att: str, att: str, cmp: str, subject, negated: bool) -> RuleExpr:
    """``exists x' cmp x . x' in att(subject)`` or its ``forall ... not_in`` negation."""
    domain = BoundedScope(scope_att, cmp, x)
    if negated:
        return Quant("forall", "x", domain, NotMember(Var("x"), att, subject))
    return Quant("exists", "x", domain, Member(Var("x"), att, subject))


def _mobility_literal(x: str, op: str, subject, negated: bool) -> RuleExpr:
    lit = Lit(x)
    if negated:
        return conj(NotMember(lit, att, subject) for att in MOBILITY_ATTRIBUTES)
    if op.endswith("assign"):
        return Or(
            Member(lit, "exp_mob_mem", subject),
            And(Member(lit, "imp_mob_mem", subject), NotMember(lit, "exp_immob_mem", subject)),
        )
    return disj(Member(lit, att, subject) for att in MOBILITY_ATTRIBUTES)


def _translate_cond(cond, literal, literals) -> RuleExpr:
    if isinstance(cond, L.CondTrue):
        return ConstTrue()
    if isinstance(cond, L.CondLit):
        if literals is not None and cond.name not in literals:
            raise L.UnknownLiteral(f"prerequisite literal {cond.name!r} is unknown")
        return literal(cond.name, cond.negated)
    left = _translate_cond(cond.left, literal, literals)
    right = _translate_cond(cond.right, literal, literals)
    return And(left, right) if isinstance(cond, L.CondAnd) else Or(left, right)


def _as_cond(cond):
    return L.parse_cond(cond) if isinstance(cond, str) else cond


def translate_prereq_ura(kind, cond, op: str = "assign", *, basis: str = "role", literals=None) -> RuleExpr:
    """Rule fragment testing a prerequisite condition on the target user ``u``.

    ``literals``, when given, is the set of valid literal names.
    """
    k = L.normalise_kind(kind)
    cond = _as_cond(cond)
    u = TargetUser()
    if k == "99":
        def literal(x, neg):
            return _mobility_literal(x, op, u, neg)
    elif k == "02" and basis == "org-unit":
        def literal(x, neg):
            return _bounded_literal(x, "org_units", "org_units", "<=", u, neg)
    elif k in ("97", "02"):
        def literal(x, neg):
            return _bounded_literal(x, "RH", "assigned_roles", ">=", u, neg)
    else:
        raise L.UnknownKind(f"kind {kind!r} has no prerequisite conditions")
    return _translate_cond(cond, literal, literals)


def translate_prereq_pra(kind, cond, op: str = "assign", *, basis: str = "role", literals=None) -> RuleExpr:
    """Rule fragment testing a prerequisite condition on the target permission ``p``."""
    k = L.normalise_kind(kind)
    cond = _as_cond(cond)
    p = TargetPermission()
    if k == "99":
        def literal(x, neg):
            return _mobility_literal(x, op, p, neg)
    elif k == "02" and basis == "org-unit":
        def literal(x, neg):
            return _bounded_literal(x, "org_units", "org_units", ">=", p, neg)
    elif k in ("97", "02"):
        def literal(x, neg):
            return _bounded_literal(x, "rolesp", "rolesp", "<=", p, neg)
    else:
        raise L.UnknownKind(f"kind {kind!r} has no prerequisite conditions")
    return _translate_cond(cond, literal, literals)


# ---------------------------------------------------------------- shared builders

def _values(pairs) -> dict:
    out: dict = {}
    for subject, value in pairs:
        out.setdefault(subject, set()).add(value)
    return out


def _aroles_schema(inst) -> AttributeSchema:
    return AttributeSchema.build("aroles", AD, SET, inst.admin_roles, ordered=True,
                                 hierarchy_pairs=inst.admin_role_hierarchy.pairs)


def _admin_disjunct(admin_role: str, roles, condition: RuleExpr | None) -> RuleExpr:
    """``exists ar >= admin_role in scope(aroles) . (ar in aroles(au) and r in Z) [and condition]``."""
    head = And(Member(Var("ar"), "aroles", AdminUser()), RoleIn(frozenset(roles)))
    body = head if condition is None else And(head, condition)
    return Quant("exists", "ar", BoundedScope("aroles", ">=", admin_role), body)


def _conditional_rule(table, fragment) -> RuleExpr:
    return disj(_admin_disjunct(e.admin_role, e.roles, fragment(e)) for e in table)


def _revoke_rule(table) -> RuleExpr:
    return disj(_admin_disjunct(e.admin_role, e.roles, None) for e in table)


def _check(inst):
    problems = validate_instance(inst)
    if problems:
        raise TranslationError("; ".join(f"{v.code} at {v.path}: {v.message}" for v in problems))
    return inst


def _expected(inst, types, kind):
    if not isinstance(inst, types):
        raise L.UnknownKind(f"a {type(inst).__name__} cannot be translated as kind {kind!r}")
    L.validate_legacy(inst)


def _expanded_unit_roles(inst, admin_relation) -> dict:
    """``{admin: {(unit, role)}}`` over every unit junior to a unit the admin holds."""
    out: dict = {}
    for admin, unit_i in admin_relation:
        for unit_j in inst.admin_unit_hierarchy.juniors(unit_i):
            for role in inst.unit_roles.get(unit_j, ()):
                out.setdefault(admin, set()).add((unit_j, role))
    return out


def _unit_rule_head(tail: RuleExpr) -> RuleExpr:
    """``exists au1 . exists au2 . (hpair(admin_unit, au1, au2) and au1 in admin_unit(au) and (au2, r) in ...)``."""
    body = conj([
        HierPair("admin_unit", Var("au1"), Var("au2")),
        Member(Var("au1"), "admin_unit", AdminUser()),
        Member(PairTerm(Var("au2"), Var("r")), "adminunit_role", AdminUser()),
        tail,
    ])
    return Quant("exists", "au1", ScopeOf("admin_unit"),
                 Quant("exists", "au2", ScopeOf("admin_unit"), body))


def _unit_admin_schemas(inst):
    return {
        "admin_unit": AttributeSchema.build("admin_unit", AD, SET, inst.admin_units, ordered=True,
                                            hierarchy_pairs=inst.admin_unit_hierarchy.pairs),
        "adminunit_role": AttributeSchema.build("adminunit_role", AD, SET,
                                                {(a, r) for a in inst.admin_units for r in inst.roles}),
    }


def _uarbac_admin_values(state: L.UarbacState, object_class: str, object_att: str) -> dict:
    """Split every user's authorized permissions into object/role/class access-mode pairs."""
    obj, role, cls = {}, {}, {}
    for u in state.users:
        for perm in state.authorized_perms(u):
            if len(perm) == 2:
                cls.setdefault(u, set()).add(perm)
            elif perm[0] == object_class:
                obj.setdefault(u, set()).add((perm[1], perm[2]))
            elif perm[0] == "role":
                role.setdefault(u, set()).add((perm[1], perm[2]))
    return {object_att: obj, "role_am": role, "classp": cls}


def _class_perms(state: L.UarbacState) -> set:
    return {p for p in state.permissions if len(p) == 2}


def _am(pair_left, mode) -> PairTerm | Lit:
    return PairTerm(pair_left, Lit(mode)) if isinstance(pair_left, Var) else Lit((pair_left, mode))


# ---------------------------------------------------------------- URA maps

def map_ura(kind, inst) -> AuraInstance:
    """Translate a legacy URA instance into an equivalent AURA instance."""
    k = L.normalise_kind(kind)
    builder = {"97": _map_ura97, "99": _map_ura99, "02": _map_ura02,
               "uni": _map_ura_uni, "uarbac": _map_ura_uarbac}[k]
    return _check(builder(inst))


def _map_ura97(inst: L.Ura97Instance) -> AuraInstance:
    _expected(inst, L.Ura97Instance, "ura97")
    fragment = lambda e: translate_prereq_ura("97", e.cond, "assign", literals=inst.roles)  # noqa: E731
    return AuraInstance(
        users=inst.users, admin_users=inst.users, roles=inst.roles, role_hierarchy=inst.role_hierarchy,
        aop={"assign", "revoke"}, assigned_roles=_values(inst.ua),
        attributes={"aroles": _aroles_schema(inst)},
        values={"aroles": _values(inst.aua)},
        rules={"assign": _conditional_rule(inst.can_assign, fragment),
               "revoke": _revoke_rule(inst.can_revoke)},
    )


def _mobility_schemas(inst, owner) -> dict:
    return {att: AttributeSchema.build(att, owner, SET, inst.roles, ordered=True,
                                       hierarchy_pairs=inst.role_hierarchy.pairs)
            for att in MOBILITY_ATTRIBUTES}


def _mobility_values(inst, subjects, *, upward) -> dict:
    values: dict = {att: {} for att in MOBILITY_ATTRIBUTES}
    for s in subjects:
        for att, vals in L.mobility_memberships(inst, s, upward=upward).items():
            values[att][s] = vals
    return values


def _map_ura99(inst: L.Ura99Instance) -> AuraInstance:
    _expected(inst, L.Ura99Instance, "ura99")
    rules = {}
    for op in L.OPS_99:
        table = L._table_for_99(inst, op)
        rules[op] = _conditional_rule(
            table, lambda e, op=op: translate_prereq_ura("99", e.cond, op, literals=inst.roles))
    return AuraInstance(
        users=inst.users, admin_users=inst.users, roles=inst.roles, role_hierarchy=inst.role_hierarchy,
        aop=set(L.OPS_99), assigned_roles={},
        attributes={"aroles": _aroles_schema(inst), **_mobility_schemas(inst, RU)},
        values={"aroles": _values(inst.aua), **_mobility_values(inst, inst.users, upward=False)},
        rules=rules,
    )


def _map_ura02(inst: L.Ura02Instance) -> AuraInstance:
    _expected(inst, L.Ura02Instance, "ura02")

    def fragment(e):
        universe = inst.org_units if e.basis == "org-unit" else inst.roles
        return translate_prereq_ura("02", e.cond, "assign", basis=e.basis, literals=universe)

    return AuraInstance(
        users=inst.users, admin_users=inst.users, roles=inst.roles, role_hierarchy=inst.role_hierarchy,
        aop={"assign", "revoke"}, assigned_roles=_values(inst.ua),
        attributes={
            "aroles": _aroles_schema(inst),
            "org_units": AttributeSchema.build("org_units", RU, SET, inst.org_units, ordered=True,
                                               hierarchy_pairs=inst.org_unit_hierarchy.pairs),
        },
        values={"aroles": _values(inst.aua), "org_units": _values(inst.uua)},
        rules={"assign": _conditional_rule(inst.can_assign, fragment),
               "revoke": _revoke_rule(inst.can_revoke)},
    )


def ura_uni_rule() -> RuleExpr:
    pools = Quant("exists", "up1", ScopeOf("userpools"),
                  Quant("exists", "up2", ScopeOf("userpools"), And(
                      HierPair("userpools", Var("up2"), Var("up1")),
                      Member(PairTerm(Var("up2"), Var("au2")), "userpool_adminunit", TargetUser()),
                  )))
    return _unit_rule_head(pools)


def _map_ura_uni(inst: L.UniUraInstance) -> AuraInstance:
    _expected(inst, L.UniUraInstance, "ura-uni")
    pool_units = {}
    for u, up in inst.uupa:
        for unit in inst.admin_units:
            if up in inst.user_pools_star(unit):
                pool_units.setdefault(u, set()).add((up, unit))
    rule = ura_uni_rule()
    return AuraInstance(
        users=inst.users, admin_users=inst.users, roles=inst.roles, role_hierarchy=inst.role_hierarchy,
        aop={"assign", "revoke"}, assigned_roles=_values(inst.ua),
        attributes={
            "userpools": AttributeSchema.build("userpools", RU, SET, inst.user_pools, ordered=True,
                                               hierarchy_pairs=inst.user_pool_hierarchy.pairs),
            "userpool_adminunit": AttributeSchema.build(
                "userpool_adminunit", RU, SET, {(p, a) for p in inst.user_pools for a in inst.admin_units}),
            **_unit_admin_schemas(inst),
        },
        values={
            "userpools": _values(inst.uupa),
            "userpool_adminunit": pool_units,
            "admin_unit": _values(inst.ua_admin),
            "adminunit_role": _expanded_unit_roles(inst, inst.ua_admin),
        },
        rules={"assign": rule, "revoke": rule},
    )


def ura_uarbac_rules() -> dict:
    au = AdminUser()
    user_empower = Member(_am(Var("u"), "empower"), "user_am", au)
    role_grant = Member(_am(Var("r"), "grant"), "role_am", au)
    class_user_empower = Member(_am("user", "empower"), "classp", au)
    class_role_grant = Member(_am("role", "grant"), "classp", au)
    assign = disj([
        And(user_empower, role_grant),
        And(user_empower, class_role_grant),
        And(class_user_empower, role_grant),
        And(class_user_empower, class_role_grant),
    ])
    revoke = disj([
        And(user_empower, role_grant),
        Member(_am(Var("u"), "admin"), "user_am", au),
        Member(_am(Var("r"), "admin"), "role_am", au),
        Member(_am("user", "admin"), "classp", au),
        Member(_am("role", "admin"), "classp", au),
    ])
    return {"assign": assign, "revoke": revoke}


def _map_ura_uarbac(state: L.UarbacState) -> AuraInstance:
    _expected(state, L.UarbacState, "ura-uarbac")
    modes = state.access_modes
    values = _uarbac_admin_values(state, "user", "user_am")
    return AuraInstance(
        users=state.users, admin_users=state.users, roles=state.roles, role_hierarchy=state.role_hierarchy,
        aop={"assign", "revoke"}, assigned_roles=_values(state.ua),
        attributes={
            "user_am": AttributeSchema.build("user_am", AD, SET,
                                             {(u, a) for u in state.users for a in modes.get("user", ())}),
            "role_am": AttributeSchema.build("role_am", AD, SET,
                                             {(r, a) for r in state.roles for a in modes.get("role", ())}),
            "classp": AttributeSchema.build("classp", AD, SET, _class_perms(state)),
        },
        values=values,
        rules=ura_uarbac_rules(),
    )


# ---------------------------------------------------------------- PRA maps

def map_pra(kind, inst) -> ArpaInstance:
    """Translate a legacy PRA instance into an equivalent ARPA instance."""
    k = L.normalise_kind(kind)
    builder = {"97": _map_pra97, "99": _map_pra99, "02": _map_pra02,
               "uni": _map_pra_uni, "uarbac": _map_pra_uarbac}[k]
    return _check(builder(inst))


def _rolesp_schema(inst) -> AttributeSchema:
    return AttributeSchema.build("rolesp", PE, SET, inst.roles, ordered=True,
                                 hierarchy_pairs=inst.role_hierarchy.pairs)


def _map_pra97(inst: L.Pra97Instance) -> ArpaInstance:
    _expected(inst, L.Pra97Instance, "pra97")
    fragment = lambda e: translate_prereq_pra("97", e.cond, "assign", literals=inst.roles)  # noqa: E731
    return ArpaInstance(
        permissions=inst.permissions, admin_users=inst.users, roles=inst.roles,
        role_hierarchy=inst.role_hierarchy, aop={"assign", "revoke"},
        attributes={"aroles": _aroles_schema(inst), "rolesp": _rolesp_schema(inst)},
        values={"aroles": _values(inst.aua), "rolesp": _values(inst.pa)},
        rules={"assign": _conditional_rule(inst.can_assign, fragment),
               "revoke": _revoke_rule(inst.can_revoke)},
    )


def _map_pra99(inst: L.Pra99Instance) -> ArpaInstance:
    _expected(inst, L.Pra99Instance, "pra99")
    rules = {}
    for op in L.OPS_99:
        table = L._table_for_99(inst, op)
        rules[op] = _conditional_rule(
            table, lambda e, op=op: translate_prereq_pra("99", e.cond, op, literals=inst.roles))
    return ArpaInstance(
        permissions=inst.permissions, admin_users=inst.users, roles=inst.roles,
        role_hierarchy=inst.role_hierarchy, aop=set(L.OPS_99),
        attributes={"aroles": _aroles_schema(inst), **_mobility_schemas(inst, PE)},
        values={"aroles": _values(inst.aua), **_mobility_values(inst, inst.permissions, upward=True)},
        rules=rules,
    )


def _map_pra02(inst: L.Pra02Instance) -> ArpaInstance:
    _expected(inst, L.Pra02Instance, "pra02")

    def fragment(e):
        universe = inst.org_units if e.basis == "org-unit" else inst.roles
        return translate_prereq_pra("02", e.cond, "assign", basis=e.basis, literals=universe)

    return ArpaInstance(
        permissions=inst.permissions, admin_users=inst.users, roles=inst.roles,
        role_hierarchy=inst.role_hierarchy, aop={"assign", "revoke"},
        attributes={
            "aroles": _aroles_schema(inst),
            "org_units": AttributeSchema.build("org_units", PE, SET, inst.org_units, ordered=True,
                                               hierarchy_pairs=inst.org_unit_hierarchy.pairs),
            "rolesp": _rolesp_schema(inst),
        },
        values={"aroles": _values(inst.aua), "org_units": _values(inst.ppa), "rolesp": _values(inst.pa)},
        rules={"assign": _conditional_rule(inst.can_assign, fragment),
               "revoke": _revoke_rule(inst.can_revoke)},
    )


def pra_uni_set_rule() -> RuleExpr:
    """Holds iff some task ``t`` has ``chi = {p | t in tasks(p)}`` and is manageable from ``au2``."""
    q, q2 = BoundVar("q"), BoundVar("q2")
    task = Quant("exists", "t", ScopeOf("tasks"), conj([
        Quant("forall", "q", TargetSet(), Member(Var("t"), "tasks", q)),
        Quant("forall", "q2", UniverseMinusTargetSet(), NotMember(Var("t"), "tasks", q2)),
        Quant("exists", "q", TargetSet(), Member(PairTerm(Var("t"), Var("au2")), "task_adminu", q)),
    ]))
    return _unit_rule_head(task)


def permission_tasks(inst: L.UniPraInstance) -> dict:
    """``tasks(p)``: directly assigned tasks closed upward over the task hierarchy."""
    out: dict = {}
    for p, t in inst.pa:
        out.setdefault(p, set()).update(inst.task_hierarchy.seniors(t))
    return out


def _map_pra_uni(inst: L.UniPraInstance) -> ArpaInstance:
    _expected(inst, L.UniPraInstance, "pra-uni")
    tasks = permission_tasks(inst)
    task_units = {}
    for p, ts in tasks.items():
        for unit in inst.admin_units:
            for t in ts & inst.tasks_star(unit):
                task_units.setdefault(p, set()).add((t, unit))
    rule = pra_uni_set_rule()
    return ArpaInstance(
        permissions=inst.permissions, admin_users=inst.users, roles=inst.roles,
        role_hierarchy=inst.role_hierarchy, aop={"assign", "revoke"},
        attributes={
            **_unit_admin_schemas(inst),
            "tasks": AttributeSchema.build("tasks", PE, SET, inst.tasks, ordered=True,
                                           hierarchy_pairs=inst.task_hierarchy.pairs),
            "task_adminu": AttributeSchema.build("task_adminu", PE, SET,
                                                 {(t, a) for t in inst.tasks for a in inst.admin_units}),
        },
        values={
            "admin_unit": _values(inst.ta_admin),
            "adminunit_role": _expanded_unit_roles(inst, inst.ta_admin),
            "tasks": tasks,
            "task_adminu": task_units,
        },
        set_rules={"assign": rule, "revoke": rule},
    )


def perm_token(perm: tuple) -> str:
    """``("file", "o1", "read")`` → ``"[file,o1,read]"``."""
    return "[" + ",".join(perm) + "]"


def parse_perm_token(token: str) -> tuple:
    if not (token.startswith("[") and token.endswith("]")):
        raise L.UnknownSubject(f"{token!r} is not a permission of the form [class,object,mode]")
    return tuple(token[1:-1].split(","))


def pra_uarbac_rules(object_class: str = "file") -> dict:
    au = AdminUser()
    object_admin = Quant("exists", "o", ScopeOf("object_id"), And(
        Member(Var("o"), "object_id", TargetPermission()),
        Member(_am(Var("o"), "admin"), "object_am", au),
    ))
    class_admin = Member(_am(object_class, "admin"), "classp", au)
    assign = And(
        Or(object_admin, class_admin),
        Or(Member(_am(Var("r"), "empower"), "role_am", au), Member(_am("role", "empower"), "classp", au)),
    )
    revoke = disj([
        object_admin,
        Member(_am(Var("r"), "admin"), "role_am", au),
        class_admin,
        Member(_am("role", "admin"), "classp", au),
    ])
    return {"assign": assign, "revoke": revoke}


def _map_pra_uarbac(state: L.UarbacState) -> ArpaInstance:
    _expected(state, L.UarbacState, "pra-uarbac")
    modes = state.access_modes
    perms = state.permissions
    objects = {p[1] for p in perms if len(p) == 3}
    values = _uarbac_admin_values(state, "file", "object_am")
    values["object_id"] = {perm_token(p): {p[1]} for p in perms if len(p) == 3}
    return ArpaInstance(
        permissions={perm_token(p) for p in perms}, admin_users=state.users, roles=state.roles,
        role_hierarchy=state.role_hierarchy, aop={"assign", "revoke"},
        attributes={
            "object_am": AttributeSchema.build("object_am", AD, SET,
                                               {(o, a) for o in state.objects_of("file")
                                                for a in modes.get("file", ())}),
            "role_am": AttributeSchema.build("role_am", AD, SET,
                                             {(r, a) for r in state.roles for a in modes.get("role", ())}),
            "classp": AttributeSchema.build("classp", AD, SET, _class_perms(state)),
            "object_id": AttributeSchema.build("object_id", PE, Form.ATOMIC, objects),
        },
        values=values,
        rules=pra_uarbac_rules("file"),
    )


# ---------------------------------------------------------------- exhaustive comparison

@dataclass(frozen=True)
class DecisionTuple:
    op: str
    admin: str
    target: str
    role: str


@dataclass(frozen=True)
class Mismatch:
    tuple: DecisionTuple
    legacy: bool
    translated: bool


@dataclass(frozen=True)
class DiffReport:
    kind: str
    total: int
    mismatches: tuple

    @property
    def summary(self) -> str:
        return f"{len(self.mismatches)} mismatches / {self.total} tuples"


def _side(kind: str) -> str:
    k = str(kind).lower()
    if k.startswith("ura"):
        return "ura"
    if k.startswith("pra"):
        return "pra"
    raise L.UnknownKind(f"kind {kind!r} must name a ura or pra model (e.g. ura97, pra-uni)")


def decision_targets(kind, inst) -> list[str]:
    """Targets enumerated by the exhaustive comparison, as strings."""
    k = L.normalise_kind(kind)
    if _side(kind) == "ura":
        return sorted(inst.users)
    if k == "uni":
        return sorted(inst.tasks)
    if k == "uarbac":
        return sorted(perm_token(p) for p in inst.permissions if len(p) == 3 and p[0] == "file")
    return sorted(inst.permissions)


def decision_tuples(kind, inst) -> list[DecisionTuple]:
    """Every ``(op, admin, target, role)`` the comparison covers, in sorted order."""
    return [
        DecisionTuple(op, admin, target, role)
        for op in sorted(L.operations(kind))
        for admin in sorted(inst.users)
        for target in decision_targets(kind, inst)
        for role in sorted(inst.roles)
    ]


def decide_legacy(kind, inst, op, admin, target, role) -> bool:
    """Native decision with string targets (UARBAC permissions as ``[c,o,a]`` tokens)."""
    k = L.normalise_kind(kind)
    if _side(kind) == "ura":
        return L.decide_ura(k, inst, op, admin, target, role)
    if k == "uarbac":
        target = parse_perm_token(target)
    return L.decide_pra(k, inst, op, admin, target, role)


def task_selector(task: str) -> Selector:
    """``{p | task in tasks(p)}``."""
    return Selector("permissions", Member(Lit(task), "tasks", TargetPermission()))


def decide_translated(kind, translated, op, admin, target, role) -> bool:
    k = L.normalise_kind(kind)
    if _side(kind) == "ura":
        return authorize_user(translated, op, admin, target, role).allowed
    if k == "uni":
        return authorize_perm_set(translated, op, admin, task_selector(target), role).allowed
    return authorize_perm(translated, op, admin, target, role).allowed


def translate(kind, inst):
    """``map_ura`` or ``map_pra`` depending on the kind's prefix."""
    return map_ura(kind, inst) if _side(kind) == "ura" else map_pra(kind, inst)


def diff_decisions(kind, inst, translated=None) -> DiffReport:
    """Compare native and translated decisions over every argument tuple."""
    if translated is None:
        translated = translate(kind, inst)
    mismatches = []
    tuples = decision_tuples(kind, inst)
    for t in tuples:
        native = decide_legacy(kind, inst, t.op, t.admin, t.target, t.role)
        ours = decide_translated(kind, translated, t.op, t.admin, t.target, t.role)
        if native != ours:
            mismatches.append(Mismatch(t, native, ours))
    return DiffReport(str(kind), len(tuples), tuple(mismatches))
