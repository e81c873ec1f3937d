"""The authorization-rule language: AST, parser, canonical printer, evaluator.

Text form (precedence ``not`` > ``and`` > ``or``)::

    rule   := or
    or     := and ("or" and)*
    and    := unary ("and" unary)*
    unary  := "not" unary | "(" rule ")" | quant | pred | "true" | "false"
    quant  := ("exists" | "forall") IDENT [(">=" | "<=") value] "in" domain "." rule
    domain := "scope(" IDENT ")" | "{" value ("," value)* "}" | "chi" | "P_minus_chi"
            | "USERS" | "P" | "ROLES"
    pred   := value "in" IDENT "(" subj ")" | value "not_in" IDENT "(" subj ")"
            | "r" "in" "{" value ("," value)* "}" | "hpair(" IDENT "," value "," value ")"
            | value "==" value
    value  := STRING | IDENT | "(" value "," value ")"

A quantifier body extends as far as possible, so ``exists x in D . a and b``
quantifies over the whole conjunction. Strings use JSON escaping. The names
``r``, ``au``, ``u`` and ``p`` are free variables (target role, admin user,
target user, target permission) and cannot be rebound.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .core import (
    AarbacError,
    Form,
    Owner,
    UnknownAttribute,
    AttrValue,
    RH,
    sorted_values,
    value_key,
)


class RuleSyntaxError(AarbacError, ValueError):
    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f", found {found!r}" if found else ""
        super().__init__(f"at offset {position}: expected {expected}{detail}")


class UnboundVariable(AarbacError, NameError):
    pass


class MissingBinding(AarbacError, LookupError):
    pass


class BindingError(AarbacError, ValueError):
    """A rule that parses but does not fit the instance it is evaluated against."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: AttrValue


@dataclass(frozen=True)
class PairTerm:
    left: "Term"
    right: "Term"


Term = Union[Var, Lit, PairTerm]


@dataclass(frozen=True)
class AdminUser:
    pass


@dataclass(frozen=True)
class TargetUser:
    pass


@dataclass(frozen=True)
class TargetPermission:
    pass


@dataclass(frozen=True)
class BoundVar:
    name: str


SubjectRef = Union[AdminUser, TargetUser, TargetPermission, BoundVar]


@dataclass(frozen=True)
class ScopeOf:
    att: str


@dataclass(frozen=True)
class BoundedScope:
    att: str
    cmp: str  # ">=" or "<="
    bound: AttrValue


@dataclass(frozen=True)
class RoleSet:
    values: frozenset


@dataclass(frozen=True)
class TargetSet:
    pass


@dataclass(frozen=True)
class UniverseMinusTargetSet:
    pass


@dataclass(frozen=True)
class Universe:
    name: str  # "USERS", "P" or "ROLES"


Domain = Union[ScopeOf, BoundedScope, RoleSet, TargetSet, UniverseMinusTargetSet, Universe]


@dataclass(frozen=True)
class ConstTrue:
    pass


@dataclass(frozen=True)
class ConstFalse:
    pass


@dataclass(frozen=True)
class And:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Or:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Not:
    expr: "RuleExpr"


@dataclass(frozen=True)
class Quant:
    kind: str  # "exists" or "forall"
    var: str
    domain: Domain
    body: "RuleExpr"


@dataclass(frozen=True)
class Member:
    term: Term
    att: str
    subject: SubjectRef


@dataclass(frozen=True)
class NotMember:
    term: Term
    att: str
    subject: SubjectRef


@dataclass(frozen=True)
class HierPair:
    att: str
    left: Term
    right: Term


@dataclass(frozen=True)
class RoleIn:
    roles: frozenset


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


RuleExpr = Union[ConstTrue, ConstFalse, And, Or, Not, Quant, Member, NotMember, HierPair, RoleIn, Eq]

FREE_VARS = frozenset({"r", "au", "u", "p"})
KEYWORDS = frozenset({
    "and", "or", "not", "in", "not_in", "exists", "forall", "true", "false",
    "scope", "hpair", "chi", "P_minus_chi", "USERS", "P", "ROLES",
})
_UNIVERSES = ("USERS", "P", "ROLES")


def conj(parts) -> RuleExpr:
    """Left-nested conjunction; ``true`` for no parts."""
    parts = list(parts)
    if not parts:
        return ConstTrue()
    out = parts[0]
    for part in parts[1:]:
        out = And(out, part)
    return out


def disj(parts) -> RuleExpr:
    """Left-nested disjunction; ``false`` for no parts."""
    parts = list(parts)
    if not parts:
        return ConstFalse()
    out = parts[0]
    for part in parts[1:]:
        out = Or(out, part)
    return out


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>>=|<=|==|[(){},.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "string", "ident", "op", "eof"
    text: str
    pos: int
    value: str = ""


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleSyntaxError(pos, "a token", text[pos])
        kind = m.lastgroup
        if kind == "string":
            try:
                value = json.loads(m.group())
            except json.JSONDecodeError:
                raise RuleSyntaxError(pos, "a valid string literal", m.group()) from None
            toks.append(_Tok("string", m.group(), pos, value))
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), pos, m.group()))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.furthest: RuleSyntaxError | None = None

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str):
        err = RuleSyntaxError(self.tok.pos, expected, self.tok.text or "end of input")
        if self.furthest is None or err.position >= self.furthest.position:
            self.furthest = err
        raise err

    def at(self, text: str) -> bool:
        return self.tok.kind in ("ident", "op") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.fail(repr(text))

    def ident(self, what: str) -> str:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            self.fail(what)
        name = self.tok.text
        self.i += 1
        return name

    def parse(self) -> RuleExpr:
        expr = self.or_()
        if self.tok.kind != "eof":
            self.fail("end of input")
        return expr

    def or_(self) -> RuleExpr:
        expr = self.and_()
        while self.accept("or"):
            expr = Or(expr, self.and_())
        return expr

    def and_(self) -> RuleExpr:
        expr = self.unary()
        while self.accept("and"):
            expr = And(expr, self.unary())
        return expr

    def unary(self) -> RuleExpr:
        if self.accept("not"):
            return Not(self.unary())
        if self.accept("true"):
            return ConstTrue()
        if self.accept("false"):
            return ConstFalse()
        if self.at("exists") or self.at("forall"):
            return self.quant()
        if self.at("hpair"):
            return self.hpair()
        if self.at("("):
            # Either a parenthesised rule or a predicate whose left value is a pair.
            start = self.i
            try:
                return self.pred()
            except RuleSyntaxError:
                self.i = start
            self.expect("(")
            expr = self.or_()
            self.expect(")")
            return expr
        return self.pred()

    def quant(self) -> Quant:
        kind = self.tok.text
        self.i += 1
        var = self.ident("a quantifier variable")
        if var in FREE_VARS:
            self.i -= 1
            self.fail(f"a variable name other than {var!r}")
        cmp = bound = None
        if self.at(">=") or self.at("<="):
            cmp = self.tok.text
            self.i += 1
            bound = self.literal()
        self.expect("in")
        domain = self.domain()
        if cmp is not None:
            if not isinstance(domain, ScopeOf):
                self.fail("scope(...) after a bounded quantifier")
            domain = BoundedScope(domain.att, cmp, bound)
        self.expect(".")
        return Quant(kind, var, domain, self.or_())

    def domain(self) -> Domain:
        if self.accept("scope"):
            self.expect("(")
            att = self.ident("an attribute name")
            self.expect(")")
            return ScopeOf(att)
        if self.at("{"):
            return RoleSet(self.literal_set())
        if self.accept("chi"):
            return TargetSet()
        if self.accept("P_minus_chi"):
            return UniverseMinusTargetSet()
        for name in _UNIVERSES:
            if self.accept(name):
                return Universe(name)
        self.fail("a quantifier domain")

    def literal_set(self) -> frozenset:
        self.expect("{")
        values = [self.literal()]
        while self.accept(","):
            values.append(self.literal())
        self.expect("}")
        return frozenset(values)

    def literal(self) -> AttrValue:
        term = self.value()
        if not isinstance(term, Lit):
            self.fail("a literal value")
        return term.value

    def value(self, nested: bool = False) -> Term:
        tok = self.tok
        if tok.kind == "string":
            self.i += 1
            return Lit(tok.value)
        if tok.kind == "ident":
            return Var(self.ident("a value"))
        if self.at("(") and not nested:
            self.i += 1
            left = self.value(nested=True)
            self.expect(",")
            right = self.value(nested=True)
            self.expect(")")
            if isinstance(left, Lit) and isinstance(right, Lit):
                return Lit((left.value, right.value))
            return PairTerm(left, right)
        self.fail("a value")

    def subject(self) -> SubjectRef:
        name = self.ident("a subject")
        if name == "au":
            return AdminUser()
        if name == "u":
            return TargetUser()
        if name == "p":
            return TargetPermission()
        return BoundVar(name)

    def hpair(self) -> HierPair:
        self.expect("hpair")
        self.expect("(")
        att = self.ident("an attribute name")
        self.expect(",")
        left = self.value()
        self.expect(",")
        right = self.value()
        self.expect(")")
        return HierPair(att, left, right)

    def pred(self) -> RuleExpr:
        left = self.value()
        if self.accept("=="):
            return Eq(left, self.value())
        if self.accept("not_in"):
            att, subject = self.attref()
            return NotMember(left, att, subject)
        self.expect("in")
        if self.at("{"):
            if left != Var("r"):
                self.fail("an attribute reference")
            return RoleIn(self.literal_set())
        att, subject = self.attref()
        return Member(left, att, subject)

    def attref(self):
        att = self.ident("an attribute name")
        self.expect("(")
        subject = self.subject()
        self.expect(")")
        return att, subject


def _resolve(expr: RuleExpr, bound: frozenset = frozenset()):
    """Reject unbound and shadowed variables."""

    def term(t: Term):
        if isinstance(t, Var):
            if t.name not in bound and t.name not in FREE_VARS:
                raise UnboundVariable(f"variable {t.name!r} is not bound")
        elif isinstance(t, PairTerm):
            term(t.left)
            term(t.right)

    if isinstance(expr, (And, Or)):
        _resolve(expr.left, bound)
        _resolve(expr.right, bound)
    elif isinstance(expr, Not):
        _resolve(expr.expr, bound)
    elif isinstance(expr, Quant):
        if expr.var in bound:
            raise UnboundVariable(f"variable {expr.var!r} shadows an enclosing quantifier")
        _resolve(expr.body, bound | {expr.var})
    elif isinstance(expr, (Member, NotMember)):
        term(expr.term)
        if isinstance(expr.subject, BoundVar) and expr.subject.name not in bound:
            raise UnboundVariable(f"subject {expr.subject.name!r} is not bound")
    elif isinstance(expr, HierPair):
        term(expr.left)
        term(expr.right)
    elif isinstance(expr, Eq):
        term(expr.left)
        term(expr.right)


def parse_rule(text: str) -> RuleExpr:
    parser = _Parser(text)
    try:
        expr = parser.parse()
    except RuleSyntaxError:
        raise parser.furthest from None
    _resolve(expr)
    return expr


# ---------------------------------------------------------------- printer

def _fmt_atom(value: str) -> str:
    return json.dumps(value, ensure_ascii=False)


def format_value(value: AttrValue) -> str:
    if isinstance(value, tuple):
        return f"({_fmt_atom(value[0])},{_fmt_atom(value[1])})"
    return _fmt_atom(value)


def _fmt_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return format_value(t.value)
    return f"({_fmt_term(t.left)},{_fmt_term(t.right)})"


def _fmt_set(values) -> str:
    return "{" + ",".join(format_value(v) for v in sorted_values(values)) + "}"


def _fmt_subject(s: SubjectRef) -> str:
    if isinstance(s, AdminUser):
        return "au"
    if isinstance(s, TargetUser):
        return "u"
    if isinstance(s, TargetPermission):
        return "p"
    return s.name


def _fmt_domain(d: Domain) -> str:
    if isinstance(d, (ScopeOf, BoundedScope)):
        return f"scope({d.att})"
    if isinstance(d, RoleSet):
        return _fmt_set(d.values)
    if isinstance(d, TargetSet):
        return "chi"
    if isinstance(d, UniverseMinusTargetSet):
        return "P_minus_chi"
    return d.name


def format_rule(expr: RuleExpr) -> str:
    """Canonical, fully parenthesised text that parses back to ``expr``."""
    if isinstance(expr, ConstTrue):
        return "true"
    if isinstance(expr, ConstFalse):
        return "false"
    if isinstance(expr, And):
        return f"({format_rule(expr.left)} and {format_rule(expr.right)})"
    if isinstance(expr, Or):
        return f"({format_rule(expr.left)} or {format_rule(expr.right)})"
    if isinstance(expr, Not):
        return f"not {format_rule(expr.expr)}"
    if isinstance(expr, Quant):
        bound = ""
        if isinstance(expr.domain, BoundedScope):
            bound = f" {expr.domain.cmp} {format_value(expr.domain.bound)}"
        return f"({expr.kind} {expr.var}{bound} in {_fmt_domain(expr.domain)} . {format_rule(expr.body)})"
    if isinstance(expr, Member):
        return f"{_fmt_term(expr.term)} in {expr.att}({_fmt_subject(expr.subject)})"
    if isinstance(expr, NotMember):
        return f"{_fmt_term(expr.term)} not_in {expr.att}({_fmt_subject(expr.subject)})"
    if isinstance(expr, HierPair):
        return f"hpair({expr.att}, {_fmt_term(expr.left)}, {_fmt_term(expr.right)})"
    if isinstance(expr, RoleIn):
        return f"r in {_fmt_set(expr.roles)}"
    if isinstance(expr, Eq):
        return f"{_fmt_term(expr.left)} == {_fmt_term(expr.right)}"
    raise TypeError(f"not a rule expression: {expr!r}")


def walk(expr: RuleExpr) -> Iterator[RuleExpr]:
    """Pre-order traversal of the rule nodes (terms and domains are not visited)."""
    yield expr
    if isinstance(expr, (And, Or)):
        yield from walk(expr.left)
        yield from walk(expr.right)
    elif isinstance(expr, Not):
        yield from walk(expr.expr)
    elif isinstance(expr, Quant):
        yield from walk(expr.body)


# ---------------------------------------------------------------- binding checks

def check_rule(expr: RuleExpr, inst, *, set_rule: bool = False) -> list[tuple[str, str]]:
    """Every way ``expr`` fails to fit ``inst``, as ``(code, message)`` pairs."""
    problems: list[tuple[str, str]] = []
    target_subject = TargetUser if inst.kind == "aura" else TargetPermission
    target_name = inst.target_var

    def schema(att):
        try:
            return inst.schema(att)
        except UnknownAttribute:
            problems.append(("UNKNOWN_ATTRIBUTE", f"unknown attribute {att!r}"))
            return None

    def free_var(name):
        if name in ("u", "p"):
            if name != target_name:
                problems.append(("SUBJECT_MISMATCH", f"{name!r} is not available in a {inst.kind} rule"))
            elif set_rule:
                problems.append(("TARGET_IN_SET_RULE", f"set rules refer to chi, not {name!r}"))

    def term(t):
        if isinstance(t, Var):
            free_var(t.name)
        elif isinstance(t, PairTerm):
            term(t.left)
            term(t.right)

    def subject(att, s):
        sch = schema(att)
        if isinstance(s, AdminUser):
            want = Owner.ADMIN_USER
        elif isinstance(s, (TargetUser, TargetPermission)):
            if not isinstance(s, target_subject):
                problems.append(("SUBJECT_MISMATCH", f"{_fmt_subject(s)!r} is not available in a {inst.kind} rule"))
                return
            if set_rule:
                problems.append(("TARGET_IN_SET_RULE", f"set rules refer to chi, not {_fmt_subject(s)!r}"))
            want = inst.target_owner
        else:
            want = None
        if sch is None:
            return
        if att == RH:
            problems.append(("SUBJECT_MISMATCH", "RH is a hierarchy, not an attribute function"))
        elif want is not None and sch.owner is not want:
            problems.append(("SUBJECT_MISMATCH",
                             f"{att!r} belongs to {sch.owner.value}, applied to {_fmt_subject(s)!r}"))

    for node in walk(expr):
        if isinstance(node, Quant):
            d = node.domain
            if isinstance(d, (ScopeOf, BoundedScope)):
                sch = schema(d.att)
                if isinstance(d, BoundedScope) and sch is not None:
                    if not sch.ordered:
                        problems.append(("BOUND_ON_UNORDERED", f"{d.att!r} is not ordered"))
                    elif d.bound not in sch.scope or d.bound not in sch.hierarchy.elements:
                        problems.append(("BOUND_NOT_IN_SCOPE", f"{d.bound!r} is not in Scope({d.att})"))
            elif isinstance(d, (TargetSet, UniverseMinusTargetSet)) and not set_rule:
                problems.append(("CHI_IN_SINGLE_RULE", "chi is only bound in set rules"))
            elif isinstance(d, Universe) and d.name == "P" and inst.kind != "arpa":
                problems.append(("UNKNOWN_UNIVERSE", "P is only available in arpa rules"))
        elif isinstance(node, (Member, NotMember)):
            term(node.term)
            subject(node.att, node.subject)
        elif isinstance(node, HierPair):
            schema(node.att)
            term(node.left)
            term(node.right)
        elif isinstance(node, Eq):
            term(node.left)
            term(node.right)
    return problems


def bind_rule(expr: RuleExpr, inst, *, set_rule: bool = False) -> RuleExpr:
    """Return ``expr`` unchanged if it fits ``inst``; raise for the first problem otherwise."""
    problems = check_rule(expr, inst, set_rule=set_rule)
    if problems:
        code, message = problems[0]
        if code == "UNKNOWN_ATTRIBUTE":
            raise UnknownAttribute(message)
        raise BindingError(code, message)
    return expr


# ---------------------------------------------------------------- evaluator

class _Evaluator:
    def __init__(self, inst, env, rng, trace):
        self.inst = inst
        self.env = env
        self.rng = rng
        self.trace = trace

    def free(self, name):
        try:
            return self.env[name]
        except KeyError:
            raise MissingBinding(f"no binding for {name!r}") from None

    def term(self, t, scope):
        if isinstance(t, Lit):
            return t.value
        if isinstance(t, Var):
            if t.name in scope:
                return scope[t.name]
            return self.free(t.name)
        left, right = self.term(t.left, scope), self.term(t.right, scope)
        if isinstance(left, tuple) or isinstance(right, tuple):
            raise BindingError("NESTED_PAIR", "pair components must be atoms")
        return (left, right)

    def subject(self, s, scope):
        if isinstance(s, AdminUser):
            return self.free("au")
        if isinstance(s, TargetUser):
            return self.free("u")
        if isinstance(s, TargetPermission):
            return self.free("p")
        return scope[s.name]

    def domain(self, d, scope) -> list:
        inst = self.inst
        if isinstance(d, ScopeOf):
            items = inst.schema(d.att).scope
        elif isinstance(d, BoundedScope):
            sch = inst.schema(d.att)
            if d.bound not in sch.scope or d.bound not in sch.hierarchy.elements:
                raise BindingError("BOUND_NOT_IN_SCOPE", f"{d.bound!r} is not in Scope({d.att})")
            if d.cmp == ">=":
                items = sch.hierarchy.seniors(d.bound) & sch.scope
            else:
                items = sch.hierarchy.juniors(d.bound) & sch.scope
        elif isinstance(d, RoleSet):
            items = d.values
        elif isinstance(d, TargetSet):
            items = self.free("chi")
        elif isinstance(d, UniverseMinusTargetSet):
            items = inst.targets - frozenset(self.free("chi"))
        else:
            items = inst.universe(d.name)
        ordered = sorted_values(items)
        if self.rng is not None:
            self.rng.shuffle(ordered)
        return ordered

    def eval(self, e, scope, depth) -> bool:
        result = self._eval(e, scope, depth)
        if self.trace is not None and depth == 0:
            self.trace.append((format_rule(e), result))
        return result

    def _eval(self, e, scope, depth) -> bool:
        if isinstance(e, ConstTrue):
            return True
        if isinstance(e, ConstFalse):
            return False
        if isinstance(e, And):
            return self.eval(e.left, scope, depth) and self.eval(e.right, scope, depth)
        if isinstance(e, Or):
            return self.eval(e.left, scope, depth) or self.eval(e.right, scope, depth)
        if isinstance(e, Not):
            return not self.eval(e.expr, scope, depth)
        if isinstance(e, Quant):
            items = self.domain(e.domain, scope)
            inner = dict(scope)
            test = any if e.kind == "exists" else all
            def body(x):
                inner[e.var] = x
                return self.eval(e.body, inner, depth + 1)
            return test(body(x) for x in items)
        if isinstance(e, (Member, NotMember)):
            value = self.term(e.term, scope)
            held = value in self.inst.values_of(e.att, self.subject(e.subject, scope))
            return held if isinstance(e, Member) else not held
        if isinstance(e, HierPair):
            h = self.inst.schema(e.att).hierarchy
            return (self.term(e.left, scope), self.term(e.right, scope)) in h.closure
        if isinstance(e, RoleIn):
            return self.free("r") in e.roles
        if isinstance(e, Eq):
            return self.term(e.left, scope) == self.term(e.right, scope)
        raise TypeError(f"not a rule expression: {e!r}")


def eval_rule(expr: RuleExpr, env: dict, inst, *, rng: random.Random | None = None,
              trace: list | None = None) -> bool:
    """Evaluate ``expr`` against ``inst``.

    ``env`` maps the free names ``au``, ``u``/``p``, ``r`` and ``chi`` to their
    values. With ``rng`` every quantifier domain is visited in shuffled order,
    which must never change the outcome. When ``trace`` is a list, each node
    evaluated outside any quantifier is appended as ``(text, outcome)``.
    """
    return _Evaluator(inst, env, rng, trace).eval(expr, {}, 0)


__all__ = [
    "RuleSyntaxError", "UnboundVariable", "MissingBinding", "BindingError",
    "Var", "Lit", "PairTerm", "Term",
    "AdminUser", "TargetUser", "TargetPermission", "BoundVar", "SubjectRef",
    "ScopeOf", "BoundedScope", "RoleSet", "TargetSet", "UniverseMinusTargetSet", "Universe", "Domain",
    "ConstTrue", "ConstFalse", "And", "Or", "Not", "Quant", "Member", "NotMember", "HierPair",
    "RoleIn", "Eq", "RuleExpr", "FREE_VARS", "KEYWORDS",
    "conj", "disj", "parse_rule", "format_rule", "format_value", "walk",
    "check_rule", "bind_rule", "eval_rule",
]
