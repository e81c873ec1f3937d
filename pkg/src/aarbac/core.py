"""Domain types for attribute-based administration of RBAC.

Attribute values are plain strings (atoms) or 2-tuples of strings (pairs).
Hierarchies are finite partial orders whose reflexive-transitive closure is
computed once, at construction, so every ordering query is a set lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Iterable, Mapping, NamedTuple, Union

AttrValue = Union[str, tuple[str, str]]

RH = "RH"
ASSIGNED_ROLES = "assigned_roles"
RESERVED_ATTRIBUTES = frozenset({RH, ASSIGNED_ROLES})


class AarbacError(Exception):
    """Base class for every error raised by this package."""


class CycleError(AarbacError, ValueError):
    pass


class UnknownElement(AarbacError, LookupError):
    pass


class UnknownAttribute(AarbacError, LookupError):
    pass


class UnknownSubject(AarbacError, LookupError):
    pass


class UnknownOperation(AarbacError, LookupError):
    pass


def value_key(value: AttrValue) -> tuple:
    """Sort key putting atoms (lexicographically) before pairs."""
    if isinstance(value, tuple):
        return (1, value[0], value[1])
    return (0, value, "")


def sorted_values(values: Iterable[AttrValue]) -> list[AttrValue]:
    return sorted(values, key=value_key)


def is_token(text: object) -> bool:
    return isinstance(text, str) and bool(text) and not any(c.isspace() for c in text)


def is_value(value: object) -> bool:
    if isinstance(value, tuple):
        return len(value) == 2 and all(is_token(v) for v in value)
    return is_token(value)


class Hierarchy:
    """A finite partial order given by senior-junior pairs.

    A pair ``(a, b)`` means ``a >= b``. The closure is reflexive over all
    elements, so an element with no pairs still dominates itself.
    """

    __slots__ = ("elements", "pairs", "closure", "_down", "_up")

    def __init__(self, elements: Iterable = (), pairs: Iterable = ()):
        self.elements = frozenset(elements)
        self.pairs = frozenset(tuple(p) for p in pairs)
        for senior, junior in sorted(self.pairs, key=lambda p: (value_key(p[0]), value_key(p[1]))):
            for end in (senior, junior):
                if end not in self.elements:
                    raise UnknownElement(f"hierarchy pair ({senior}, {junior}) references unknown element {end!r}")
            if senior == junior:
                raise CycleError(f"self-loop on {senior!r}")

        children: dict = {e: [] for e in self.elements}
        for senior, junior in self.pairs:
            children[senior].append(junior)

        down: dict = {}
        for start in self.elements:
            seen = {start}
            stack = [start]
            while stack:
                node = stack.pop()
                for nxt in children[node]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            down[start] = frozenset(seen)

        for a in sorted(self.elements, key=value_key):
            for b in down[a]:
                if a != b and a in down[b]:
                    raise CycleError(f"cycle through {a!r} and {b!r}")

        up: dict = {e: set() for e in self.elements}
        for a, juniors in down.items():
            for b in juniors:
                up[b].add(a)
        self._down = down
        self._up = {e: frozenset(s) for e, s in up.items()}
        self.closure = frozenset((a, b) for a, juniors in down.items() for b in juniors)

    def _require(self, x):
        if x not in self.elements:
            raise UnknownElement(f"{x!r} is not an element of the hierarchy")

    def dominates(self, a, b) -> bool:
        self._require(a)
        self._require(b)
        return b in self._down[a]

    def juniors(self, a) -> frozenset:
        """All ``x`` with ``a >= x`` (including ``a``)."""
        self._require(a)
        return self._down[a]

    def seniors(self, b) -> frozenset:
        """All ``x`` with ``x >= b`` (including ``b``)."""
        self._require(b)
        return self._up[b]

    def __contains__(self, pair) -> bool:
        return pair in self.closure

    def __eq__(self, other):
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return self.elements == other.elements and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.elements, self.pairs))

    def __repr__(self):
        pairs = sorted(self.pairs, key=lambda p: (value_key(p[0]), value_key(p[1])))
        return f"Hierarchy(elements={sorted_values(self.elements)}, pairs={pairs})"


def build_hierarchy(elements: Iterable, senior_pairs: Iterable) -> Hierarchy:
    return Hierarchy(elements, senior_pairs)


def dominates(h: Hierarchy, a, b) -> bool:
    return h.dominates(a, b)


def set_dominates(h: Hierarchy, seniors: Iterable, juniors: Iterable) -> bool:
    """``A >= B`` iff every cross pair is ordered; an empty ``A`` only covers an empty ``B``."""
    seniors, juniors = set(seniors), set(juniors)
    for x in seniors | juniors:
        h._require(x)
    if not seniors:
        return not juniors
    return all(h.dominates(a, b) for a in seniors for b in juniors)


class Owner(str, Enum):
    REGULAR_USER = "regular-user"
    ADMIN_USER = "admin-user"
    PERMISSION = "permission"


class Form(str, Enum):
    ATOMIC = "atomic"
    SET = "set"


OWNER_GROUP = {Owner.REGULAR_USER: "uatt", Owner.ADMIN_USER: "aatt", Owner.PERMISSION: "patt"}


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    owner: Owner
    form: Form
    scope: frozenset
    ordered: bool = False
    hierarchy: Hierarchy = field(default_factory=Hierarchy)

    def __post_init__(self):
        object.__setattr__(self, "owner", Owner(self.owner))
        object.__setattr__(self, "form", Form(self.form))
        object.__setattr__(self, "scope", frozenset(self.scope))

    @classmethod
    def build(cls, name, owner, form, scope, *, ordered=False, hierarchy_pairs=()):
        """Build a schema; an ordered schema's hierarchy spans its atomic scope values."""
        scope = frozenset(scope)
        if ordered:
            atoms = {v for v in scope if isinstance(v, str)}
            hierarchy = Hierarchy(atoms | {x for p in hierarchy_pairs for x in p}, hierarchy_pairs)
        else:
            hierarchy = Hierarchy({x for p in hierarchy_pairs for x in p}, hierarchy_pairs)
        return cls(name, owner, form, scope, ordered, hierarchy)


def _freeze_map(mapping) -> dict:
    return {k: frozenset(v) for k, v in sorted(mapping.items()) if v}


class _InstanceMixin:
    kind: ClassVar[str]
    target_owner: ClassVar[Owner]
    target_var: ClassVar[str]

    def _normalise(self):
        object.__setattr__(self, "admin_users", frozenset(self.admin_users))
        object.__setattr__(self, "roles", frozenset(self.roles))
        object.__setattr__(self, "aop", frozenset(self.aop))
        object.__setattr__(self, "attributes", dict(sorted(self.attributes.items())))
        values = {att: _freeze_map(per) for att, per in sorted(self.values.items())}
        object.__setattr__(self, "values", {att: per for att, per in values.items() if per})
        object.__setattr__(self, "rules", dict(sorted(self.rules.items())))
        object.__setattr__(self, "set_rules", dict(sorted(self.set_rules.items())))

    @property
    def targets(self) -> frozenset:
        raise NotImplementedError

    def owner_universe(self, owner: Owner) -> frozenset:
        if owner is Owner.ADMIN_USER:
            return self.admin_users
        if owner is self.target_owner:
            return self.targets
        return frozenset()

    def schema(self, att: str) -> AttributeSchema:
        if att == RH:
            return AttributeSchema(RH, self.target_owner, Form.SET, self.roles, True, self.role_hierarchy)
        if att == ASSIGNED_ROLES and self.kind == "aura":
            return AttributeSchema(ASSIGNED_ROLES, Owner.REGULAR_USER, Form.SET, self.roles, True,
                                   self.role_hierarchy)
        try:
            return self.attributes[att]
        except KeyError:
            raise UnknownAttribute(f"unknown attribute {att!r}") from None

    def values_of(self, att: str, subject: str) -> frozenset:
        if att == ASSIGNED_ROLES and self.kind == "aura":
            return self.assigned_roles.get(subject, frozenset())
        self.schema(att)
        return self.values.get(att, {}).get(subject, frozenset())

    def universe(self, name: str) -> frozenset:
        if name == "ROLES":
            return self.roles
        if name == "USERS":
            return self.users if self.kind == "aura" else self.admin_users
        if name == "P" and self.kind == "arpa":
            return self.permissions
        raise UnknownAttribute(f"universe {name!r} is not available in a {self.kind} instance")


@dataclass(frozen=True, eq=True)
class AuraInstance(_InstanceMixin):
    users: frozenset
    admin_users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    aop: frozenset
    assigned_roles: Mapping[str, frozenset] = field(default_factory=dict)
    attributes: Mapping[str, AttributeSchema] = field(default_factory=dict)
    values: Mapping[str, Mapping[str, frozenset]] = field(default_factory=dict)
    rules: Mapping[str, object] = field(default_factory=dict)
    set_rules: Mapping[str, object] = field(default_factory=dict)

    kind: ClassVar[str] = "aura"
    target_owner: ClassVar[Owner] = Owner.REGULAR_USER
    target_var: ClassVar[str] = "u"

    def __post_init__(self):
        object.__setattr__(self, "users", frozenset(self.users))
        object.__setattr__(self, "assigned_roles", _freeze_map(self.assigned_roles))
        self._normalise()

    @property
    def targets(self) -> frozenset:
        return self.users


@dataclass(frozen=True, eq=True)
class ArpaInstance(_InstanceMixin):
    permissions: frozenset
    admin_users: frozenset
    roles: frozenset
    role_hierarchy: Hierarchy
    aop: frozenset
    attributes: Mapping[str, AttributeSchema] = field(default_factory=dict)
    values: Mapping[str, Mapping[str, frozenset]] = field(default_factory=dict)
    rules: Mapping[str, object] = field(default_factory=dict)
    set_rules: Mapping[str, object] = field(default_factory=dict)

    kind: ClassVar[str] = "arpa"
    target_owner: ClassVar[Owner] = Owner.PERMISSION
    target_var: ClassVar[str] = "p"

    def __post_init__(self):
        object.__setattr__(self, "permissions", frozenset(self.permissions))
        self._normalise()

    @property
    def targets(self) -> frozenset:
        return self.permissions


class Violation(NamedTuple):
    code: str
    path: str
    message: str


def validate_instance(inst: AuraInstance | ArpaInstance) -> list[Violation]:
    """Check every well-formedness invariant; an empty list means the instance is valid."""
    from .ruleexpr import check_rule

    report: list[Violation] = []

    def add(code, path, message):
        report.append(Violation(code, path, message))

    universes = {"adminUsers": inst.admin_users, "roles": inst.roles}
    universes["users" if inst.kind == "aura" else "permissions"] = inst.targets
    for label, tokens in universes.items():
        for tok in sorted(tokens, key=str):
            if not is_token(tok):
                add("BAD_TOKEN", label, f"{tok!r} is not a valid token")
    for op in sorted(inst.aop, key=str):
        if not is_token(op):
            add("BAD_TOKEN", "aop", f"{op!r} is not a valid operation name")

    if not inst.role_hierarchy.elements <= inst.roles:
        extra = sorted_values(inst.role_hierarchy.elements - inst.roles)
        add("ROLE_HIERARCHY_OUTSIDE_ROLES", "roleHierarchy", f"elements {extra} are not roles")

    if inst.kind == "aura":
        for user, roles in inst.assigned_roles.items():
            if user not in inst.users:
                add("UNKNOWN_SUBJECT", f"assignedRoles.{user}", f"{user!r} is not a user")
            for role in sorted(roles - inst.roles):
                add("UNKNOWN_ROLE", f"assignedRoles.{user}", f"{role!r} is not a role")

    allowed_owners = {Owner.ADMIN_USER, inst.target_owner}
    for key, schema in inst.attributes.items():
        base = f"{OWNER_GROUP[schema.owner]}.{key}"
        if schema.name != key:
            add("NAME_MISMATCH", base, f"schema named {schema.name!r} stored under {key!r}")
        if key in RESERVED_ATTRIBUTES:
            add("RESERVED_ATTRIBUTE", base, f"{key!r} is a reserved name")
        if schema.owner not in allowed_owners:
            add("OWNER_MISMATCH", base, f"owner {schema.owner.value} is not allowed in a {inst.kind} instance")
        for i, value in enumerate(sorted_values(schema.scope)):
            if not is_value(value):
                add("BAD_TOKEN", f"{base}.scope[{i}]", f"{value!r} is not a valid attribute value")
        h = schema.hierarchy
        if schema.ordered and not h.pairs:
            add("ORDERED_WITHOUT_HIERARCHY", f"{base}.hierarchy", "ordered attribute needs a nonempty hierarchy")
        if not schema.ordered and (h.pairs or h.elements):
            add("UNORDERED_WITH_HIERARCHY", f"{base}.hierarchy", "unordered attribute must have an empty hierarchy")
        outside = h.elements - schema.scope
        if outside:
            add("HIERARCHY_OUTSIDE_SCOPE", f"{base}.hierarchy",
                f"hierarchy elements {sorted_values(outside)} are not in scope")

    for att, per_subject in inst.values.items():
        schema = inst.attributes.get(att)
        if schema is None:
            add("UNKNOWN_ATTRIBUTE", f"values.{att}", f"values given for undeclared attribute {att!r}")
            continue
        base = f"{OWNER_GROUP[schema.owner]}.{att}.values"
        universe = inst.owner_universe(schema.owner)
        for subject, vals in per_subject.items():
            if subject not in universe:
                add("UNKNOWN_SUBJECT", f"{base}.{subject}", f"{subject!r} is not a {schema.owner.value}")
            if schema.form is Form.ATOMIC and len(vals) > 1:
                add("ATOMIC_MULTIVALUED", f"{base}.{subject}", f"atomic attribute holds {len(vals)} values")
            for i, value in enumerate(sorted_values(vals)):
                if value not in schema.scope:
                    add("VALUE_OUT_OF_SCOPE", f"{base}.{subject}[{i}]", f"{value!r} is not in Scope({att})")

    for table, set_rule in (("rules", False), ("setRules", True)):
        rules = inst.set_rules if set_rule else inst.rules
        for op, expr in rules.items():
            if op not in inst.aop:
                add("RULE_FOR_UNKNOWN_OP", f"{table}.{op}", f"{op!r} is not in AOP")
            for code, message in check_rule(expr, inst, set_rule=set_rule):
                add(code, f"{table}.{op}", message)
    for op in sorted(inst.aop, key=str):
        if op not in inst.rules and op not in inst.set_rules:
            add("MISSING_RULE", f"rules.{op}", f"no rule configured for {op!r}")
    return report
