"""Authorization decisions over AURA and ARPA instances."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Union

from .core import (
    AarbacError,
    ArpaInstance,
    AuraInstance,
    UnknownOperation,
    UnknownSubject,
)
from .ruleexpr import RuleExpr, eval_rule, parse_rule


class NotAuthorized(AarbacError, PermissionError):
    pass


@dataclass(frozen=True)
class Decision:
    allowed: bool
    trace: tuple = field(default=(), compare=True)

    def __bool__(self):
        return self.allowed


@dataclass(frozen=True)
class Selector:
    """``{t in universe | predicate}``; the predicate names the candidate as ``u`` or ``p``."""

    universe: str  # "users" or "permissions"
    predicate: RuleExpr

    @classmethod
    def parse(cls, universe: str, text: str) -> "Selector":
        return cls(universe, parse_rule(text))


def _check_args(inst, op, au, role, targets: Iterable[str] = ()):
    if op not in inst.aop:
        raise UnknownOperation(f"{op!r} is not an administrative operation of this instance")
    if au not in inst.admin_users:
        raise UnknownSubject(f"{au!r} is not an admin user")
    if role not in inst.roles:
        raise UnknownSubject(f"{role!r} is not a role")
    label = "user" if inst.kind == "aura" else "permission"
    for t in targets:
        if t not in inst.targets:
            raise UnknownSubject(f"{t!r} is not a {label}")


def _decide(rule, env, inst) -> Decision:
    trace: list = []
    allowed = eval_rule(rule, env, inst, trace=trace)
    return Decision(allowed, tuple(trace))


def _single(inst, op, au, target, role) -> Decision:
    _check_args(inst, op, au, role, [target])
    rule = inst.rules.get(op)
    if rule is None:
        return Decision(False, ((f"no rule configured for {op!r}", False),))
    return _decide(rule, {"au": au, inst.target_var: target, "r": role}, inst)


def authorize_user(inst: AuraInstance, op: str, au: str, u: str, r: str) -> Decision:
    return _single(inst, op, au, u, r)


def authorize_perm(inst: ArpaInstance, op: str, au: str, p: str, r: str) -> Decision:
    return _single(inst, op, au, p, r)


def eval_selector(inst, sel: Selector) -> list[str]:
    """Members of the selector's universe satisfying its predicate, sorted."""
    expected = "users" if inst.kind == "aura" else "permissions"
    if sel.universe != expected:
        raise UnknownSubject(f"a {inst.kind} instance has no {sel.universe!r} universe")
    var = inst.target_var
    return sorted(t for t in inst.targets if eval_rule(sel.predicate, {var: t}, inst))


def _set(inst, op, au, chi: Union[Selector, Iterable[str]], role) -> Decision:
    if isinstance(chi, Selector):
        members = eval_selector(inst, chi)
    else:
        members = sorted(set(chi))
    _check_args(inst, op, au, role, members)
    rule = inst.set_rules.get(op)
    if rule is not None:
        return _decide(rule, {"au": au, "r": role, "chi": frozenset(members)}, inst)
    if op not in inst.rules:
        return Decision(False, ((f"no rule configured for {op!r}", False),))
    if not members:
        return Decision(False, (("empty target set", False),))
    trace = []
    for t in members:
        d = _single(inst, op, au, t, role)
        trace.append((f"{inst.target_var}={t}", d.allowed))
        if not d.allowed:
            return Decision(False, tuple(trace))
    return Decision(True, tuple(trace))


def authorize_user_set(inst: AuraInstance, op: str, au: str, chi, r: str) -> Decision:
    return _set(inst, op, au, chi, r)


def authorize_perm_set(inst: ArpaInstance, op: str, au: str, chi, r: str) -> Decision:
    return _set(inst, op, au, chi, r)


def apply_user_op(inst: AuraInstance, op: str, au: str, u: str, r: str) -> AuraInstance:
    """Perform an authorized assign/revoke, returning the updated instance."""
    if op not in inst.aop or not (op.endswith("assign") or op.endswith("revoke")):
        raise UnknownOperation(f"{op!r} is not an assign or revoke operation of this instance")
    if not authorize_user(inst, op, au, u, r).allowed:
        raise NotAuthorized(f"{au} may not {op} {u} to {r}")
    assigned = dict(inst.assigned_roles)
    held = assigned.get(u, frozenset())
    assigned[u] = held | {r} if op.endswith("assign") else held - {r}
    return dataclasses.replace(inst, assigned_roles=assigned)
