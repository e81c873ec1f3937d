"""Versioned JSON documents for AURA, ARPA and every legacy instance kind.

A document is ``{"formatVersion": 1, "kind": ..., "body": {...}}``. Loading
checks the layout, builds the typed instance and runs its validation; saving
emits a canonical form (sorted keys, sorted sets, rules via ``format_rule``)
so equal instances serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable

from . import legacy as L
from .core import (
    AarbacError,
    ArpaInstance,
    AttributeSchema,
    AuraInstance,
    CycleError,
    Form,
    Hierarchy,
    Owner,
    UnknownElement,
    sorted_values,
    validate_instance,
    value_key,
)
from .ruleexpr import RuleSyntaxError, UnboundVariable, format_rule, parse_rule

FORMAT_VERSION = 1


class DocumentError(AarbacError, ValueError):
    """A problem with a document, located by a dotted ``path``."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class ParseError(DocumentError):
    """Text that is not JSON, or a rule / condition that does not parse."""


class SchemaError(DocumentError):
    """Missing, unknown or ill-typed fields, or an unsupported version or kind."""


class SemanticError(DocumentError):
    """A well-formed document describing an invalid instance."""

    def __init__(self, path: str, reason: str, problems=()):
        self.problems = list(problems)
        super().__init__(path, reason)


# ---------------------------------------------------------------- primitive codecs

def _expect(value, typ, path, what):
    if not isinstance(value, typ):
        raise SchemaError(path, f"expected {what}, found {type(value).__name__}")
    return value


def _token(value, path):
    _expect(value, str, path, "a string")
    return value


def _value(value, path):
    """An attribute value: a string, or a two-element array of strings (a pair)."""
    if isinstance(value, list):
        if len(value) != 2:
            raise SchemaError(path, "a pair value must have exactly two elements")
        return (_token(value[0], f"{path}[0]"), _token(value[1], f"{path}[1]"))
    return _token(value, path)


def _enc_value(value):
    return list(value) if isinstance(value, tuple) else value


def _list(value, path, item: Callable):
    _expect(value, list, path, "an array")
    return [item(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _tokens(value, path):
    return frozenset(_list(value, path, _token))


def _enc_tokens(values):
    return sorted(values)


def _pair(value, path):
    _expect(value, list, path, "a two-element array")
    if len(value) != 2:
        raise SchemaError(path, "expected a two-element array")
    return (_token(value[0], f"{path}[0]"), _token(value[1], f"{path}[1]"))


def _value_pair(value, path):
    """A hierarchy pair ``[senior, junior]`` of attribute values."""
    _expect(value, list, path, "a two-element array")
    if len(value) != 2:
        raise SchemaError(path, "expected a two-element array")
    return (_value(value[0], f"{path}[0]"), _value(value[1], f"{path}[1]"))


def _pairs(value, path):
    return frozenset(_list(value, path, _pair))


def _enc_pairs(pairs):
    return [list(p) for p in sorted(pairs)]


def _object(value, path, required=(), optional=()):
    _expect(value, dict, path, "an object")
    for key in sorted(value):
        if key not in required and key not in optional:
            raise SchemaError(f"{path}.{key}", "unknown field")
    for key in required:
        if key not in value:
            raise SchemaError(f"{path}.{key}", "missing required field")
    return value


def _token_map(value, path):
    _expect(value, dict, path, "an object")
    return {k: _tokens(v, f"{path}.{k}") for k, v in sorted(value.items())}


def _enc_token_map(mapping):
    return {k: sorted(v) for k, v in sorted(mapping.items()) if v}


def _hierarchy_pairs(value, path):
    body = _object(value, path, required=("pairs",))
    return _pairs(body["pairs"], f"{path}.pairs")


def _enc_hierarchy(h: Hierarchy):
    return {"pairs": [[_enc_value(a), _enc_value(b)] for a, b in
                      sorted(h.pairs, key=lambda p: (value_key(p[0]), value_key(p[1])))]}


def _build_hierarchy(elements, pairs, path):
    try:
        return Hierarchy(elements, pairs)
    except (CycleError, UnknownElement) as exc:
        raise SemanticError(path, str(exc)) from None


def _rule(value, path):
    _expect(value, str, path, "rule text")
    try:
        return parse_rule(value)
    except (RuleSyntaxError, UnboundVariable) as exc:
        raise ParseError(path, str(exc)) from None


def _rules(value, path):
    _expect(value, dict, path, "an object")
    return {op: _rule(text, f"{path}.{op}") for op, text in sorted(value.items())}


def _enc_rules(rules):
    return {op: format_rule(expr) for op, expr in sorted(rules.items())}


def _cond(value, path):
    _expect(value, str, path, "condition text")
    try:
        return L.parse_cond(value)
    except L.CondSyntaxError as exc:
        raise ParseError(path, str(exc)) from None


# ---------------------------------------------------------------- AURA / ARPA

def _decode_attributes(value, path):
    schemas, values = {}, {}
    for i, item in enumerate(_expect(value, list, path, "an array")):
        p = f"{path}[{i}]"
        body = _object(item, p, required=("name", "owner", "form", "scope", "ordered"),
                       optional=("hierarchyPairs", "values"))
        name = _token(body["name"], f"{p}.name")
        if name in schemas:
            raise SchemaError(f"{p}.name", f"duplicate attribute {name!r}")
        try:
            owner = Owner(_token(body["owner"], f"{p}.owner"))
        except ValueError:
            raise SchemaError(f"{p}.owner", f"owner must be one of {[o.value for o in Owner]}") from None
        try:
            form = Form(_token(body["form"], f"{p}.form"))
        except ValueError:
            raise SchemaError(f"{p}.form", "form must be 'atomic' or 'set'") from None
        scope = _list(body["scope"], f"{p}.scope", _value)
        ordered = _expect(body["ordered"], bool, f"{p}.ordered", "a boolean")
        hpairs = _list(body.get("hierarchyPairs", []), f"{p}.hierarchyPairs", _value_pair)
        try:
            schemas[name] = AttributeSchema.build(name, owner, form, scope, ordered=ordered, hierarchy_pairs=hpairs)
        except (CycleError, UnknownElement) as exc:
            raise SemanticError(f"{p}.hierarchyPairs", str(exc)) from None
        vals = body.get("values", {})
        _expect(vals, dict, f"{p}.values", "an object")
        values[name] = {s: frozenset(_list(v, f"{p}.values.{s}", _value)) for s, v in sorted(vals.items())}
    return schemas, values


def _encode_attributes(inst):
    out = []
    for name, schema in sorted(inst.attributes.items()):
        h = schema.hierarchy
        item = {
            "name": name,
            "owner": schema.owner.value,
            "form": schema.form.value,
            "scope": [_enc_value(v) for v in sorted_values(schema.scope)],
            "ordered": schema.ordered,
            "hierarchyPairs": _enc_hierarchy(h)["pairs"],
            "values": {s: [_enc_value(v) for v in sorted_values(vals)]
                       for s, vals in sorted(inst.values.get(name, {}).items())},
        }
        out.append(item)
    return out


def _decode_core(kind, body, path):
    targets = "users" if kind == "aura" else "permissions"
    required = (targets, "adminUsers", "roles", "roleHierarchy", "aop", "attributes", "rules")
    optional = ("setRules", "assignedRoles") if kind == "aura" else ("setRules",)
    _object(body, path, required=required, optional=optional)
    roles = _tokens(body["roles"], f"{path}.roles")
    rh = _build_hierarchy(roles, _hierarchy_pairs(body["roleHierarchy"], f"{path}.roleHierarchy"),
                          f"{path}.roleHierarchy")
    schemas, values = _decode_attributes(body["attributes"], f"{path}.attributes")
    common = dict(
        admin_users=_tokens(body["adminUsers"], f"{path}.adminUsers"),
        roles=roles,
        role_hierarchy=rh,
        aop=_tokens(body["aop"], f"{path}.aop"),
        attributes=schemas,
        values=values,
        rules=_rules(body["rules"], f"{path}.rules"),
        set_rules=_rules(body.get("setRules", {}), f"{path}.setRules"),
    )
    if kind == "aura":
        return AuraInstance(users=_tokens(body["users"], f"{path}.users"),
                            assigned_roles=_token_map(body.get("assignedRoles", {}), f"{path}.assignedRoles"),
                            **common)
    return ArpaInstance(permissions=_tokens(body["permissions"], f"{path}.permissions"), **common)


def _encode_core(inst):
    body = {
        "adminUsers": _enc_tokens(inst.admin_users),
        "roles": _enc_tokens(inst.roles),
        "roleHierarchy": _enc_hierarchy(inst.role_hierarchy),
        "aop": _enc_tokens(inst.aop),
        "attributes": _encode_attributes(inst),
        "rules": _enc_rules(inst.rules),
        "setRules": _enc_rules(inst.set_rules),
    }
    if inst.kind == "aura":
        body["users"] = _enc_tokens(inst.users)
        body["assignedRoles"] = _enc_token_map(inst.assigned_roles)
    else:
        body["permissions"] = _enc_tokens(inst.permissions)
    return body


# ---------------------------------------------------------------- legacy codecs

def _can_assign(with_basis):
    def decode(value, path):
        fields = ("adminRole", "cond", "roles") + (("basis",) if with_basis else ())
        body = _object(value, path, required=fields)
        basis = _token(body["basis"], f"{path}.basis") if with_basis else "role"
        if basis not in ("role", "org-unit"):
            raise SchemaError(f"{path}.basis", "basis must be 'role' or 'org-unit'")
        return L.CanAssign(_token(body["adminRole"], f"{path}.adminRole"), _cond(body["cond"], f"{path}.cond"),
                           _tokens(body["roles"], f"{path}.roles"), basis)

    def encode(entries):
        out = []
        for e in entries:
            item = {"adminRole": e.admin_role, "cond": L.format_cond(e.cond), "roles": sorted(e.roles)}
            if with_basis:
                item["basis"] = e.basis
            out.append(item)
        return out

    return (lambda v, p: tuple(_list(v, p, decode))), encode


def _can_revoke_decode(value, path):
    body = _object(value, path, required=("adminRole", "roles"))
    return L.CanRevoke(_token(body["adminRole"], f"{path}.adminRole"), _tokens(body["roles"], f"{path}.roles"))


def _can_revoke_encode(entries):
    return [{"adminRole": e.admin_role, "roles": sorted(e.roles)} for e in entries]


def _tagged(subject_key):
    def decode_one(value, path):
        body = _object(value, path, required=(subject_key, "role", "tag"))
        tag = _token(body["tag"], f"{path}.tag")
        if tag not in ("M", "IM"):
            raise SchemaError(f"{path}.tag", "tag must be 'M' or 'IM'")
        return L.TaggedMembership(_token(body[subject_key], f"{path}.{subject_key}"),
                                  _token(body["role"], f"{path}.role"), tag)

    def encode(items):
        return [{subject_key: m.subject, "role": m.role, "tag": m.tag}
                for m in sorted(items, key=lambda m: (m.subject, m.role, m.tag))]

    return (lambda v, p: frozenset(_list(v, p, decode_one))), encode


def _perm(value, path):
    items = _list(value, path, _token)
    if len(items) not in (2, 3):
        raise SchemaError(path, "a permission is [class, mode] or [class, object, mode]")
    return tuple(items)


def _uarbac_pa_decode(value, path):
    def one(item, p):
        body = _object(item, p, required=("perm", "role"))
        return (_perm(body["perm"], f"{p}.perm"), _token(body["role"], f"{p}.role"))
    return frozenset(_list(value, path, one))


def _uarbac_pa_encode(pa):
    return [{"perm": list(p), "role": r} for p, r in sorted(pa)]


TOKENS = (_tokens, _enc_tokens)
PAIRS = (_pairs, _enc_pairs)
TOKEN_MAP = (_token_map, _enc_token_map)
CAN_ASSIGN = _can_assign(False)
CAN_ASSIGN_02 = _can_assign(True)
CAN_REVOKE = ((lambda v, p: tuple(_list(v, p, _can_revoke_decode))), _can_revoke_encode)
UARBAC_PA = (_uarbac_pa_decode, _uarbac_pa_encode)


def _hier(universe_field):
    return ("hierarchy", universe_field)


# (json name, attribute name, codec). A ("hierarchy", universe) codec builds a
# Hierarchy over the already-decoded universe field.
_ADMIN_ROLES = [
    ("adminRoles", "admin_roles", TOKENS),
    ("adminRoleHierarchy", "admin_role_hierarchy", _hier("admin_roles")),
]
_ROLES = [
    ("roles", "roles", TOKENS),
    ("roleHierarchy", "role_hierarchy", _hier("roles")),
]
_ORG = [
    ("orgUnits", "org_units", TOKENS),
    ("orgUnitHierarchy", "org_unit_hierarchy", _hier("org_units")),
]
_UNITS = [
    ("adminUnits", "admin_units", TOKENS),
    ("adminUnitHierarchy", "admin_unit_hierarchy", _hier("admin_units")),
    ("unitRoles", "unit_roles", TOKEN_MAP),
]
_UARBAC = [
    ("users", "users", TOKENS), *_ROLES,
    ("classes", "classes", TOKENS),
    ("accessModes", "access_modes", TOKEN_MAP),
    ("objects", "objects", TOKEN_MAP),
    ("ua", "ua", PAIRS),
    ("pa", "pa", UARBAC_PA),
]

LEGACY_LAYOUTS: dict[str, tuple[type, list]] = {
    "ura97": (L.Ura97Instance, [
        ("users", "users", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("ua", "ua", PAIRS), ("aua", "aua", PAIRS),
        ("canAssign", "can_assign", CAN_ASSIGN), ("canRevoke", "can_revoke", CAN_REVOKE),
    ]),
    "ura99": (L.Ura99Instance, [
        ("users", "users", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("ua", "ua", _tagged("user")), ("aua", "aua", PAIRS),
        ("canAssignM", "can_assign_m", CAN_ASSIGN), ("canAssignIM", "can_assign_im", CAN_ASSIGN),
        ("canRevokeM", "can_revoke_m", CAN_ASSIGN), ("canRevokeIM", "can_revoke_im", CAN_ASSIGN),
    ]),
    "ura02": (L.Ura02Instance, [
        ("users", "users", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("ua", "ua", PAIRS), ("aua", "aua", PAIRS), *_ORG, ("uua", "uua", PAIRS),
        ("canAssign", "can_assign", CAN_ASSIGN_02), ("canRevoke", "can_revoke", CAN_REVOKE),
    ]),
    "ura-uni": (L.UniUraInstance, [
        ("users", "users", TOKENS), *_ROLES, ("ua", "ua", PAIRS),
        ("userPools", "user_pools", TOKENS),
        ("userPoolHierarchy", "user_pool_hierarchy", _hier("user_pools")),
        ("uupa", "uupa", PAIRS), *_UNITS,
        ("unitUserPools", "unit_user_pools", TOKEN_MAP),
        ("uaAdmin", "ua_admin", PAIRS),
    ]),
    "ura-uarbac": (L.UarbacState, _UARBAC),
    "pra97": (L.Pra97Instance, [
        ("users", "users", TOKENS), ("permissions", "permissions", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("pa", "pa", PAIRS), ("aua", "aua", PAIRS),
        ("canAssign", "can_assign", CAN_ASSIGN), ("canRevoke", "can_revoke", CAN_REVOKE),
    ]),
    "pra99": (L.Pra99Instance, [
        ("users", "users", TOKENS), ("permissions", "permissions", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("pa", "pa", _tagged("permission")), ("aua", "aua", PAIRS),
        ("canAssignM", "can_assign_m", CAN_ASSIGN), ("canAssignIM", "can_assign_im", CAN_ASSIGN),
        ("canRevokeM", "can_revoke_m", CAN_ASSIGN), ("canRevokeIM", "can_revoke_im", CAN_ASSIGN),
    ]),
    "pra02": (L.Pra02Instance, [
        ("users", "users", TOKENS), ("permissions", "permissions", TOKENS), *_ROLES, *_ADMIN_ROLES,
        ("pa", "pa", PAIRS), ("aua", "aua", PAIRS), *_ORG, ("ppa", "ppa", PAIRS),
        ("canAssign", "can_assign", CAN_ASSIGN_02), ("canRevoke", "can_revoke", CAN_REVOKE),
    ]),
    "pra-uni": (L.UniPraInstance, [
        ("users", "users", TOKENS), ("permissions", "permissions", TOKENS), *_ROLES,
        ("tasks", "tasks", TOKENS), ("taskHierarchy", "task_hierarchy", _hier("tasks")),
        ("pa", "pa", PAIRS), ("ta", "ta", PAIRS), *_UNITS,
        ("unitTasks", "unit_tasks", TOKEN_MAP),
        ("taAdmin", "ta_admin", PAIRS),
    ]),
    "pra-uarbac": (L.UarbacState, _UARBAC),
}

KINDS = ("aura", "arpa", *LEGACY_LAYOUTS)


def _decode_legacy(kind, body, path):
    cls, layout = LEGACY_LAYOUTS[kind]
    _object(body, path, required=[j for j, _, _ in layout])
    kwargs = {}
    for json_name, attr, codec in layout:
        p = f"{path}.{json_name}"
        if codec[0] == "hierarchy":
            kwargs[attr] = _build_hierarchy(kwargs[codec[1]], _hierarchy_pairs(body[json_name], p), p)
        else:
            kwargs[attr] = codec[0](body[json_name], p)
    return cls(**kwargs)


def _encode_legacy(kind, inst):
    _, layout = LEGACY_LAYOUTS[kind]
    body = {}
    for json_name, attr, codec in layout:
        value = getattr(inst, attr)
        body[json_name] = _enc_hierarchy(value) if codec[0] == "hierarchy" else codec[1](value)
    return body


def _legacy_path(kind, problem_path):
    """Map a legacy problem path (``can_assign[0]``) to its document path (``body.canAssign[0]``)."""
    head, sep, rest = problem_path.partition("[")
    first, dot, tail = head.partition(".")
    for json_name, attr, _ in LEGACY_LAYOUTS[kind][1]:
        if attr == first:
            first = json_name
            break
    return f"body.{first}{dot}{tail}{sep}{rest}"


# ---------------------------------------------------------------- public API

def kind_of(inst, legacy_kind: str | None = None) -> str:
    """Document kind for an instance. UARBAC states need ``legacy_kind`` (ura-uarbac / pra-uarbac)."""
    if isinstance(inst, (AuraInstance, ArpaInstance)):
        return inst.kind
    if isinstance(inst, L.UarbacState):
        if legacy_kind not in ("ura-uarbac", "pra-uarbac"):
            raise SchemaError("kind", "a UARBAC state needs kind 'ura-uarbac' or 'pra-uarbac'")
        return legacy_kind
    return inst.kind


def semantic_problems(kind: str, inst) -> list[tuple[str, str, str]]:
    """``(code, document path, message)`` for every validation problem."""
    if kind in ("aura", "arpa"):
        return [(v.code, f"body.{v.path}", v.message) for v in validate_instance(inst)]
    return [("LEGACY", _legacy_path(kind, p), m) for p, m in L.legacy_problems(inst)]


def parse_document(data: bytes | str) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("$", f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"$ (line {exc.lineno}, column {exc.colno})", exc.msg) from None
    return doc


def decode_document(doc) -> tuple[str, object]:
    """Layout-check a parsed document and build its instance without semantic validation."""
    _object(doc, "$", required=("formatVersion", "kind", "body"))
    version = doc["formatVersion"]
    if isinstance(version, bool) or version != FORMAT_VERSION:
        raise SchemaError("formatVersion", f"unsupported version {version!r}; expected {FORMAT_VERSION}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise SchemaError("kind", f"unknown kind {kind!r}; expected one of {list(KINDS)}")
    body = doc["body"]
    if kind in ("aura", "arpa"):
        return kind, _decode_core(kind, body, "body")
    return kind, _decode_legacy(kind, body, "body")


def load_document(data: bytes | str, *, validate: bool = True) -> tuple[str, object]:
    """``(kind, instance)`` from document text; raises ParseError / SchemaError / SemanticError."""
    kind, inst = decode_document(parse_document(data))
    if validate:
        problems = semantic_problems(kind, inst)
        if problems:
            code, path, message = problems[0]
            reason = f"{code}: {message}"
            if len(problems) > 1:
                reason += f" (and {len(problems) - 1} more)"
            raise SemanticError(path, reason, problems)
    return kind, inst


def load_instance(data: bytes | str, *, validate: bool = True):
    return load_document(data, validate=validate)[1]


def dump_document(inst, kind: str | None = None) -> dict:
    kind = kind_of(inst, kind)
    body = _encode_core(inst) if kind in ("aura", "arpa") else _encode_legacy(kind, inst)
    return {"formatVersion": FORMAT_VERSION, "kind": kind, "body": body}


def save_instance(inst, kind: str | None = None) -> bytes:
    """Canonical UTF-8 JSON; ``kind`` is only needed for UARBAC states."""
    text = json.dumps(dump_document(inst, kind), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def load_file(path) -> tuple[str, object]:
    return load_document(Path(path).read_bytes())


def save_file(inst, path, kind: str | None = None) -> None:
    Path(path).write_bytes(save_instance(inst, kind))


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture, e.g. ``fixture_path("ura97")``."""
    return Path(__file__).parent / "fixtures" / f"{name}.json"


def load_fixture(name: str):
    return load_file(fixture_path(name))[1]
