"""Legacy ARBAC models and their native decision procedures.

Each instance type mirrors the sets and relations of one administrative
model (URA97/99/02, Uni-ARBAC, UARBAC, and the permission-side duals).
``decide_ura`` and ``decide_pra`` answer assign/revoke questions directly
from those relations, independently of any attribute-based translation, so
they serve as ground truth when checking translated instances.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from typing import Callable, Mapping, Union

from .core import AarbacError, Hierarchy, UnknownOperation, UnknownSubject


class UnknownKind(AarbacError, ValueError):
    pass


class UnknownLiteral(AarbacError, LookupError):
    pass


class CondSyntaxError(AarbacError, ValueError):
    pass


class LegacyValidationError(AarbacError, ValueError):
    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in problems))


# ---------------------------------------------------------------- prerequisite conditions

@dataclass(frozen=True)
class CondTrue:
    pass


@dataclass(frozen=True)
class CondLit:
    name: str
    negated: bool = False


@dataclass(frozen=True)
class CondAnd:
    left: "PrereqCond"
    right: "PrereqCond"


@dataclass(frozen=True)
class CondOr:
    left: "PrereqCond"
    right: "PrereqCond"


PrereqCond = Union[CondTrue, CondLit, CondAnd, CondOr]

_COND_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z0-9_][A-Za-z0-9_\-]*))")
_COND_KEYWORDS = {"and", "or", "not", "true"}


def parse_cond(text: str) -> PrereqCond:
    """Parse ``x1 and not x2 or (x3 and x4)``; ``not`` applies to literals only."""
    toks: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _COND_TOKEN.match(text, pos)
        if m is None:
            raise CondSyntaxError(f"unexpected character at offset {pos} in {text!r}")
        toks.append(m.group(m.lastindex))
        pos = m.end()
    toks.append("")
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        tok = toks[i]
        if expected is not None and tok != expected:
            raise CondSyntaxError(f"expected {expected!r}, found {tok or 'end of input'!r} in {text!r}")
        i += 1
        return tok

    def literal(negated):
        tok = take()
        if not tok or tok in _COND_KEYWORDS or tok in "()":
            raise CondSyntaxError(f"expected a literal, found {tok or 'end of input'!r} in {text!r}")
        return CondLit(tok, negated)

    def unary():
        if peek() == "not":
            take()
            return literal(True)
        if peek() == "(":
            take()
            inner = disjunction()
            take(")")
            return inner
        if peek() == "true":
            take()
            return CondTrue()
        return literal(False)

    def conjunction():
        node = unary()
        while peek() == "and":
            take()
            node = CondAnd(node, unary())
        return node

    def disjunction():
        node = conjunction()
        while peek() == "or":
            take()
            node = CondOr(node, conjunction())
        return node

    result = disjunction()
    take("")
    return result


def format_cond(cond: PrereqCond) -> str:
    """Minimal-parenthesis text; ``parse_cond(format_cond(c)) == c``."""

    def go(c, parent):
        if isinstance(c, CondTrue):
            return "true"
        if isinstance(c, CondLit):
            return f"not {c.name}" if c.negated else c.name
        op = "and" if isinstance(c, CondAnd) else "or"
        left = go(c.left, (op, "left"))
        right = go(c.right, (op, "right"))
        text = f"{left} {op} {right}"
        if parent is not None:
            parent_op, side = parent
            if (parent_op == "and" and op == "or") or (parent_op == op and side == "right"):
                return f"({text})"
        return text

    return go(cond, None)


def cond_literals(cond: PrereqCond) -> set[str]:
    if isinstance(cond, CondLit):
        return {cond.name}
    if isinstance(cond, (CondAnd, CondOr)):
        return cond_literals(cond.left) | cond_literals(cond.right)
    return set()


def eval_cond(cond: PrereqCond, positive: Callable[[str], bool], negative: Callable[[str], bool]) -> bool:
    if isinstance(cond, CondTrue):
        return True
    if isinstance(cond, CondLit):
        return negative(cond.name) if cond.negated else positive(cond.name)
    if isinstance(cond, CondAnd):
        return eval_cond(cond.left, positive, negative) and eval_cond(cond.right, positive, negative)
    return eval_cond(cond.left, positive, negative) or eval_cond(cond.right, positive, negative)


# ---------------------------------------------------------------- rule tables

@dataclass(frozen=True)
class CanAssign:
    """``(admin role, prerequisite, target roles)``; ``basis`` marks org-unit literals."""

    admin_role: str
    cond: PrereqCond
    roles: frozenset
    basis: str = "role"  # "role" or "org-unit"

    def __post_init__(self):
        if isinstance(self.cond, str):
            object.__setattr__(self, "cond", parse_cond(self.cond))
        object.__setattr__(self, "roles", frozenset(self.roles))

    def sort_key(self):
        return (self.admin_role, tuple(sorted(self.roles)), format_cond(self.cond), self.basis)


@dataclass(frozen=True)
class CanRevoke:
    admin_role: str
    roles: frozenset

    def __post_init__(self):
        object.__setattr__(self, "roles", frozenset(self.roles))

    def sort_key(self):
        return (self.admin_role, tuple(sorted(self.roles)))


@dataclass(frozen=True)
class TaggedMembership:
    """A mobile (``M``) or immobile (``IM``) membership of a user or permission in a role."""

    subject: str
    role: str
    tag: str  # "M" or "IM"


def _table(entries) -> tuple:
    return tuple(sorted(entries, key=lambda e: e.sort_key()))


def _pairs(items) -> frozenset:
    return frozenset(tuple(x) for x in items)


class _Frozen:
    """Normalises set-valued fields to frozensets and rule tables to sorted tuples."""

    _tables: tuple = ()
    _relations: tuple = ()

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in self._tables:
                object.__setattr__(self, f.name, _table(value))
            elif f.name in self._relations:
                object.__setattr__(self, f.name, _pairs(value))
            elif isinstance(value, Mapping):
                object.__setattr__(self, f.name, {k: frozenset(v) for k, v in sorted(value.items())})
            elif isinstance(value, (set, list, tuple, frozenset)):
                object.__setattr__(self, f.name, frozenset(value))


# ---------------------------------------------------------------- URA / PRA instance types

@dataclass(frozen=True)
class Ura97Instance(_Frozen):
    users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    ua: frozenset
    aua: frozenset
    can_assign: tuple
    can_revoke: tuple
    _tables = ("can_assign", "can_revoke")
    _relations = ("ua", "aua")
    kind = "ura97"


@dataclass(frozen=True)
class Ura99Instance(_Frozen):
    users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    ua: frozenset  # of TaggedMembership
    aua: frozenset
    can_assign_m: tuple
    can_assign_im: tuple
    can_revoke_m: tuple
    can_revoke_im: tuple
    _tables = ("can_assign_m", "can_assign_im", "can_revoke_m", "can_revoke_im")
    _relations = ("aua",)
    kind = "ura99"


@dataclass(frozen=True)
class Ura02Instance(_Frozen):
    users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    ua: frozenset
    aua: frozenset
    org_units: frozenset
    org_unit_hierarchy: Hierarchy
    uua: frozenset
    can_assign: tuple
    can_revoke: tuple
    _tables = ("can_assign", "can_revoke")
    _relations = ("ua", "aua", "uua")
    kind = "ura02"


@dataclass(frozen=True)
class UniUraInstance(_Frozen):
    users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    ua: frozenset
    user_pools: frozenset
    user_pool_hierarchy: Hierarchy
    uupa: frozenset
    admin_units: frozenset
    admin_unit_hierarchy: Hierarchy
    unit_roles: Mapping[str, frozenset]
    unit_user_pools: Mapping[str, frozenset]
    ua_admin: frozenset
    _relations = ("ua", "uupa", "ua_admin")
    kind = "ura-uni"

    def user_pools_star(self, unit: str) -> frozenset:
        """Pools of ``unit`` plus those of every senior unit."""
        out = set()
        for senior in self.admin_unit_hierarchy.seniors(unit):
            out |= self.unit_user_pools.get(senior, frozenset())
        return frozenset(out)


@dataclass(frozen=True)
class UarbacState(_Frozen):
    """UARBAC schema and state; permissions are tuples ``(c, o, a)`` or ``(c, a)``.

    Objects of class ``user`` are the users and of class ``role`` the roles;
    ``objects`` lists the objects of every other class.
    """

    users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    classes: frozenset
    access_modes: Mapping[str, frozenset]
    objects: Mapping[str, frozenset]
    ua: frozenset
    pa: frozenset  # of (permission, role)
    _relations = ("ua",)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "pa", frozenset((tuple(p), r) for p, r in self.pa))

    def objects_of(self, cls: str) -> frozenset:
        if cls == "user":
            return self.users
        if cls == "role":
            return self.roles
        return self.objects.get(cls, frozenset())

    @property
    def permissions(self) -> frozenset:
        perms = set()
        for c in self.classes:
            modes = self.access_modes.get(c, frozenset())
            perms |= {(c, o, a) for o in self.objects_of(c) for a in modes}
            perms |= {(c, a) for a in modes}
        return frozenset(perms)

    def authorized_perms(self, user: str) -> frozenset:
        """``{p | (user, r1) in UA, r1 >= r2, (p, r2) in PA}``."""
        rh = self.role_hierarchy
        reachable = set()
        for u, r1 in self.ua:
            if u == user:
                reachable |= rh.juniors(r1)
        return frozenset(p for p, r2 in self.pa if r2 in reachable)


@dataclass(frozen=True)
class Pra97Instance(_Frozen):
    users: frozenset
    permissions: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    pa: frozenset
    aua: frozenset
    can_assign: tuple
    can_revoke: tuple
    _tables = ("can_assign", "can_revoke")
    _relations = ("pa", "aua")
    kind = "pra97"


@dataclass(frozen=True)
class Pra99Instance(_Frozen):
    users: frozenset
    permissions: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    pa: frozenset  # of TaggedMembership
    aua: frozenset
    can_assign_m: tuple
    can_assign_im: tuple
    can_revoke_m: tuple
    can_revoke_im: tuple
    _tables = ("can_assign_m", "can_assign_im", "can_revoke_m", "can_revoke_im")
    _relations = ("aua",)
    kind = "pra99"


@dataclass(frozen=True)
class Pra02Instance(_Frozen):
    users: frozenset
    permissions: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    admin_roles: frozenset
    admin_role_hierarchy: Hierarchy
    pa: frozenset
    aua: frozenset
    org_units: frozenset
    org_unit_hierarchy: Hierarchy
    ppa: frozenset
    can_assign: tuple
    can_revoke: tuple
    _tables = ("can_assign", "can_revoke")
    _relations = ("pa", "aua", "ppa")
    kind = "pra02"


@dataclass(frozen=True)
class UniPraInstance(_Frozen):
    users: frozenset
    permissions: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    tasks: frozenset
    task_hierarchy: Hierarchy
    pa: frozenset  # (permission, task)
    ta: frozenset  # (task, role)
    admin_units: frozenset
    admin_unit_hierarchy: Hierarchy
    unit_roles: Mapping[str, frozenset]
    unit_tasks: Mapping[str, frozenset]
    ta_admin: frozenset
    _relations = ("pa", "ta", "ta_admin")
    kind = "pra-uni"

    def tasks_star(self, unit: str) -> frozenset:
        """Tasks of ``unit`` plus those of every junior unit."""
        out = set()
        for junior in self.admin_unit_hierarchy.juniors(unit):
            out |= self.unit_tasks.get(junior, frozenset())
        return frozenset(out)


# ---------------------------------------------------------------- kinds and operations

URA_KINDS = ("97", "99", "02", "uni", "uarbac")
OPS_99 = ("mob-assign", "immob-assign", "mob-revoke", "immob-revoke")
OPS_DEFAULT = ("assign", "revoke")


def normalise_kind(kind: str) -> str:
    """``"ura97"``, ``"pra-uni"``, ``"97"`` ... → the bare kind (``"97"``, ``"uni"``)."""
    k = str(kind).lower()
    for prefix in ("ura-", "pra-", "ura", "pra"):
        if k.startswith(prefix):
            k = k[len(prefix):]
            break
    if k not in URA_KINDS:
        raise UnknownKind(f"unknown legacy kind {kind!r}")
    return k


def operations(kind: str) -> tuple[str, ...]:
    return OPS_99 if normalise_kind(kind) == "99" else OPS_DEFAULT


def _check_op(kind, op):
    if op not in operations(kind):
        raise UnknownOperation(f"{op!r} is not an operation of the {kind} model")


def _require(value, universe, what):
    if value not in universe:
        raise UnknownSubject(f"{value!r} is not a known {what}")


# ---------------------------------------------------------------- shared helpers

def _admin_holds(aua, arh: Hierarchy, admin: str, admin_role: str) -> bool:
    """Does ``admin`` hold ``admin_role`` directly or through a senior admin role?"""
    return any(u == admin and arh.dominates(held, admin_role) for u, held in aua)


def _members(relation, subject) -> set:
    return {r for s, r in relation if s == subject}


def _tagged(relation, subject, tag) -> set:
    return {m.role for m in relation if m.subject == subject and m.tag == tag}


def mobility_memberships(inst, subject: str, *, upward: bool) -> dict[str, frozenset]:
    """The four explicit/implicit mobile/immobile membership sets of ``subject``.

    Implicit memberships follow the role hierarchy strictly: downward for
    users (juniors of held roles), upward for permissions (seniors).
    """
    rh = inst.role_hierarchy
    reach = rh.seniors if upward else rh.juniors
    relation = inst.pa if hasattr(inst, "permissions") else inst.ua
    out = {}
    for tag, label in (("M", "mob"), ("IM", "immob")):
        explicit = _tagged(relation, subject, tag)
        implicit = set()
        for role in explicit:
            implicit |= reach(role) - {role}
        out[f"exp_{label}_mem"] = frozenset(explicit)
        out[f"imp_{label}_mem"] = frozenset(implicit)
    return out


def _table_for_99(inst, op):
    return {
        "mob-assign": inst.can_assign_m,
        "immob-assign": inst.can_assign_im,
        "mob-revoke": inst.can_revoke_m,
        "immob-revoke": inst.can_revoke_im,
    }[op]


def _literal_fns_99(mem, op):
    if op.endswith("assign"):
        def positive(x):
            return x in mem["exp_mob_mem"] or (x in mem["imp_mob_mem"] and x not in mem["exp_immob_mem"])
    else:
        def positive(x):
            return any(x in s for s in mem.values())

    def negative(x):
        return all(x not in s for s in mem.values())

    return positive, negative


def _conditional_table(inst, table, admin, role, literal_fns) -> bool:
    for entry in table:
        if role not in entry.roles:
            continue
        if not _admin_holds(inst.aua, inst.admin_role_hierarchy, admin, entry.admin_role):
            continue
        positive, negative = literal_fns(entry)
        if eval_cond(entry.cond, positive, negative):
            return True
    return False


def _revoke_table(inst, table, admin, role) -> bool:
    return any(
        role in entry.roles and _admin_holds(inst.aua, inst.admin_role_hierarchy, admin, entry.admin_role)
        for entry in table
    )


def _hier_literals(holdings: set, h: Hierarchy, *, direction: str):
    """Literal x holds iff some held element is ``>= x`` (``direction=">="``) or ``<= x``."""
    reach = h.seniors if direction == ">=" else h.juniors

    def positive(x):
        return any(y in holdings for y in reach(x))

    def negative(x):
        return all(y not in holdings for y in reach(x))

    return positive, negative


# ---------------------------------------------------------------- URA oracle

def decide_ura(kind, inst, op: str, admin: str, user: str, role: str) -> bool:
    """Native URA decision: may ``admin`` perform ``op`` on ``(user, role)``?"""
    kind = normalise_kind(kind)
    _check_op(kind, op)
    _require(admin, inst.users, "admin user")
    _require(user, inst.users, "user")
    _require(role, inst.roles, "role")

    if kind == "97":
        held = _members(inst.ua, user)
        if op == "revoke":
            return _revoke_table(inst, inst.can_revoke, admin, role)
        fns = _hier_literals(held, inst.role_hierarchy, direction=">=")
        return _conditional_table(inst, inst.can_assign, admin, role, lambda e: fns)

    if kind == "99":
        mem = mobility_memberships(inst, user, upward=False)
        fns = _literal_fns_99(mem, op)
        return _conditional_table(inst, _table_for_99(inst, op), admin, role, lambda e: fns)

    if kind == "02":
        if op == "revoke":
            return _revoke_table(inst, inst.can_revoke, admin, role)
        by_role = _hier_literals(_members(inst.ua, user), inst.role_hierarchy, direction=">=")
        by_unit = _hier_literals(_members(inst.uua, user), inst.org_unit_hierarchy, direction="<=")
        return _conditional_table(inst, inst.can_assign, admin, role,
                                  lambda e: by_unit if e.basis == "org-unit" else by_role)

    if kind == "uni":
        pools = _members(inst.uupa, user)
        auh = inst.admin_unit_hierarchy
        for admin_user, unit_i in inst.ua_admin:
            if admin_user != admin:
                continue
            for unit_j in auh.juniors(unit_i):
                if role in inst.unit_roles.get(unit_j, ()) and pools & inst.user_pools_star(unit_j):
                    return True
        return False

    # UARBAC: the granter's authorized permissions decide.
    perms = inst.authorized_perms(admin)
    user_empower = ("user", user, "empower") in perms or ("user", "empower") in perms
    role_grant = ("role", role, "grant") in perms or ("role", "grant") in perms
    if op == "assign":
        return user_empower and role_grant
    return (
        (("user", user, "empower") in perms and ("role", role, "grant") in perms)
        or ("user", user, "admin") in perms
        or ("role", role, "admin") in perms
        or ("user", "admin") in perms
        or ("role", "admin") in perms
    )


# ---------------------------------------------------------------- PRA oracle

def decide_pra(kind, inst, op: str, admin: str, target, role: str) -> bool:
    """Native PRA decision. ``target`` is a permission, or a task for Uni-ARBAC."""
    kind = normalise_kind(kind)
    _check_op(kind, op)
    _require(admin, inst.users, "admin user")
    _require(role, inst.roles, "role")

    if kind == "uni":
        _require(target, inst.tasks, "task")
        auh = inst.admin_unit_hierarchy
        for admin_user, unit_i in inst.ta_admin:
            if admin_user != admin:
                continue
            for unit_j in auh.juniors(unit_i):
                if role in inst.unit_roles.get(unit_j, ()) and target in inst.tasks_star(unit_j):
                    return True
        return False

    if kind == "uarbac":
        target = tuple(target)
        _require(target, inst.permissions, "permission")
        perms = inst.authorized_perms(admin)
        if len(target) != 3:
            raise UnknownSubject(f"{target!r} is not an object permission")
        cls, obj, _mode = target
        obj_admin = (cls, obj, "admin") in perms or (cls, "admin") in perms
        if op == "assign":
            return obj_admin and (("role", role, "empower") in perms or ("role", "empower") in perms)
        return obj_admin or ("role", role, "admin") in perms or ("role", "admin") in perms

    _require(target, inst.permissions, "permission")

    if kind == "97":
        if op == "revoke":
            return _revoke_table(inst, inst.can_revoke, admin, role)
        fns = _hier_literals(_members(inst.pa, target), inst.role_hierarchy, direction="<=")
        return _conditional_table(inst, inst.can_assign, admin, role, lambda e: fns)

    if kind == "99":
        mem = mobility_memberships(inst, target, upward=True)
        fns = _literal_fns_99(mem, op)
        return _conditional_table(inst, _table_for_99(inst, op), admin, role, lambda e: fns)

    # 02
    if op == "revoke":
        return _revoke_table(inst, inst.can_revoke, admin, role)
    by_role = _hier_literals(_members(inst.pa, target), inst.role_hierarchy, direction="<=")
    by_unit = _hier_literals(_members(inst.ppa, target), inst.org_unit_hierarchy, direction=">=")
    return _conditional_table(inst, inst.can_assign, admin, role,
                              lambda e: by_unit if e.basis == "org-unit" else by_role)


# ---------------------------------------------------------------- validation

def legacy_problems(inst) -> list[tuple[str, str]]:
    """Referential-integrity problems as ``(path, message)`` pairs."""
    problems: list[tuple[str, str]] = []

    def check(cond, path, msg):
        if not cond:
            problems.append((path, msg))

    def rel(name, left, right, left_what, right_what):
        for i, (a, b) in enumerate(sorted(getattr(inst, name))):
            check(a in left, f"{name}[{i}]", f"{a!r} is not a {left_what}")
            check(b in right, f"{name}[{i}]", f"{b!r} is not a {right_what}")

    def hier(name, universe, what):
        h = getattr(inst, name)
        check(h.elements <= universe, name, f"hierarchy mentions unknown {what}s")

    def tables(names, literal_universe):
        for name in names:
            for i, entry in enumerate(getattr(inst, name)):
                path = f"{name}[{i}]"
                check(entry.admin_role in inst.admin_roles, path, f"{entry.admin_role!r} is not an admin role")
                for r in sorted(entry.roles - inst.roles):
                    problems.append((path, f"{r!r} is not a role"))
                if isinstance(entry, CanAssign):
                    universe = literal_universe(entry)
                    for lit in sorted(cond_literals(entry.cond) - universe):
                        problems.append((path, f"prerequisite literal {lit!r} is unknown"))

    if isinstance(inst, UarbacState):
        check({"user", "role"} <= inst.classes, "classes", "classes must include user and role")
        for c in sorted(inst.objects):
            check(c in inst.classes and c not in ("user", "role"), f"objects.{c}",
                  f"{c!r} is not a class with separately listed objects")
        for c in sorted(inst.access_modes):
            check(c in inst.classes, f"accessModes.{c}", f"{c!r} is not a class")
        hier("role_hierarchy", inst.roles, "role")
        rel("ua", inst.users, inst.roles, "user", "role")
        perms = inst.permissions
        for i, (p, r) in enumerate(sorted(inst.pa)):
            check(p in perms, f"pa[{i}]", f"{list(p)!r} is not a permission")
            check(r in inst.roles, f"pa[{i}]", f"{r!r} is not a role")
        return problems

    targets = inst.permissions if hasattr(inst, "permissions") else inst.users
    target_what = "permission" if hasattr(inst, "permissions") else "user"
    hier("role_hierarchy", inst.roles, "role")

    if isinstance(inst, (UniUraInstance, UniPraInstance)):
        hier("admin_unit_hierarchy", inst.admin_units, "admin unit")
        for name in ("unit_roles", "unit_user_pools", "unit_tasks"):
            mapping = getattr(inst, name, None)
            if mapping is None:
                continue
            universe = {"unit_roles": inst.roles,
                        "unit_user_pools": getattr(inst, "user_pools", frozenset()),
                        "unit_tasks": getattr(inst, "tasks", frozenset())}[name]
            for unit, members in mapping.items():
                check(unit in inst.admin_units, f"{name}.{unit}", f"{unit!r} is not an admin unit")
                for m in sorted(members - universe):
                    problems.append((f"{name}.{unit}", f"{m!r} is unknown"))
        if isinstance(inst, UniUraInstance):
            hier("user_pool_hierarchy", inst.user_pools, "user pool")
            rel("ua", inst.users, inst.roles, "user", "role")
            rel("uupa", inst.users, inst.user_pools, "user", "user pool")
            rel("ua_admin", inst.users, inst.admin_units, "user", "admin unit")
        else:
            hier("task_hierarchy", inst.tasks, "task")
            rel("pa", inst.permissions, inst.tasks, "permission", "task")
            rel("ta", inst.tasks, inst.roles, "task", "role")
            rel("ta_admin", inst.users, inst.admin_units, "user", "admin unit")
        return problems

    hier("admin_role_hierarchy", inst.admin_roles, "admin role")
    rel("aua", inst.users, inst.admin_roles, "user", "admin role")
    if isinstance(inst, (Ura99Instance, Pra99Instance)):
        relation = "pa" if isinstance(inst, Pra99Instance) else "ua"
        seen = {}
        for i, m in enumerate(sorted(getattr(inst, relation), key=lambda m: (m.subject, m.role, m.tag))):
            path = f"{relation}[{i}]"
            check(m.subject in targets, path, f"{m.subject!r} is not a {target_what}")
            check(m.role in inst.roles, path, f"{m.role!r} is not a role")
            check(m.tag in ("M", "IM"), path, f"tag must be M or IM, not {m.tag!r}")
            key = (m.subject, m.role)
            check(key not in seen, path, f"{m.subject!r} holds {m.role!r} with two tags")
            seen[key] = m.tag
        tables(("can_assign_m", "can_assign_im", "can_revoke_m", "can_revoke_im"), lambda e: inst.roles)
        return problems

    relation = "pa" if hasattr(inst, "permissions") else "ua"
    rel(relation, targets, inst.roles, target_what, "role")
    if isinstance(inst, (Ura02Instance, Pra02Instance)):
        hier("org_unit_hierarchy", inst.org_units, "org unit")
        unit_rel = "ppa" if isinstance(inst, Pra02Instance) else "uua"
        rel(unit_rel, targets, inst.org_units, target_what, "org unit")
        for i, entry in enumerate(inst.can_assign):
            check(entry.basis in ("role", "org-unit"), f"can_assign[{i}]", f"unknown basis {entry.basis!r}")
        tables(("can_assign", "can_revoke"),
               lambda e: inst.org_units if e.basis == "org-unit" else inst.roles)
    else:
        tables(("can_assign", "can_revoke"), lambda e: inst.roles)
    return problems


def validate_legacy(inst) -> None:
    problems = legacy_problems(inst)
    if problems:
        raise LegacyValidationError(problems)


LegacyInstance = Union[
    Ura97Instance, Ura99Instance, Ura02Instance, UniUraInstance, UarbacState,
    Pra97Instance, Pra99Instance, Pra02Instance, UniPraInstance,
]
