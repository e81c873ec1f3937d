"""Command-line front end: ``aarbac <subcommand> ...``.

Exit codes: 0 success / ALLOW, 1 DENY (or mismatches found), 2 usage, I/O
or validation errors.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from . import io as aio
from . import legacy as L
from .authz import Selector, authorize_perm, authorize_perm_set, authorize_user, authorize_user_set, eval_selector
from .core import AarbacError, ArpaInstance, AuraInstance, sorted_values
from .ruleexpr import parse_rule
from .translate import decide_legacy, diff_decisions, translate

EXIT_OK, EXIT_DENY, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aarbac", description="Attribute-based administration of RBAC.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance document")
    p.add_argument("file")

    p = sub.add_parser("check", help="authorize an assign/revoke request")
    p.add_argument("--file", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--admin", required=True)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--user")
    target.add_argument("--perm")
    target.add_argument("--selector", help="set-builder predicate over u (AURA) or p (ARPA)")
    p.add_argument("--role", required=True)
    p.add_argument("--explain", action="store_true")

    p = sub.add_parser("select", help="evaluate a selector")
    p.add_argument("--file", required=True)
    p.add_argument("--universe", required=True, choices=("users", "perms"))
    p.add_argument("--where", required=True)

    p = sub.add_parser("translate", help="translate a legacy instance to AURA/ARPA")
    p.add_argument("--from", dest="kind", required=True, choices=sorted(aio.LEGACY_LAYOUTS))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)

    p = sub.add_parser("decide-legacy", help="decide with a legacy model's native semantics")
    p.add_argument("--kind", required=True, choices=sorted(aio.LEGACY_LAYOUTS))
    p.add_argument("--file", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--admin", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--role", required=True)

    p = sub.add_parser("diff-decisions", help="compare native and translated decisions exhaustively")
    p.add_argument("--kind", required=True, choices=sorted(aio.LEGACY_LAYOUTS))
    p.add_argument("--legacy", required=True)

    p = sub.add_parser("closure", help="print the reflexive-transitive closure of a hierarchy")
    p.add_argument("--file", required=True)
    p.add_argument("--att", required=True)
    return parser


def _load(path, kinds=None):
    kind, inst = aio.load_file(path)
    if kinds is not None and kind not in kinds:
        raise CliError(f"{path}: expected a document of kind {' or '.join(kinds)}, found {kind!r}")
    return kind, inst


def _cmd_validate(args, out):
    kind, inst = aio.decode_document(aio.parse_document(Path(args.file).read_bytes()))
    problems = aio.semantic_problems(kind, inst)
    for code, path, message in problems:
        print(f"{code}\t{path}\t{message}", file=out)
    if problems:
        print(f"{len(problems)} violation(s)", file=out)
        return EXIT_ERROR
    print(f"OK {kind}", file=out)
    return EXIT_OK


def _print_decision(decision, explain, out):
    print("ALLOW" if decision.allowed else "DENY", file=out)
    if explain:
        for node, outcome in decision.trace:
            print(f"  {'T' if outcome else 'F'}  {node}", file=out)
    return EXIT_OK if decision.allowed else EXIT_DENY


def _cmd_check(args, out):
    _, inst = _load(args.file, ("aura", "arpa"))
    if args.selector is not None:
        universe = "users" if isinstance(inst, AuraInstance) else "permissions"
        chi = Selector(universe, parse_rule(args.selector))
        decide = authorize_user_set if isinstance(inst, AuraInstance) else authorize_perm_set
        return _print_decision(decide(inst, args.op, args.admin, chi, args.role), args.explain, out)
    if isinstance(inst, AuraInstance):
        if args.user is None:
            raise CliError("an AURA instance needs --user (or --selector)")
        decision = authorize_user(inst, args.op, args.admin, args.user, args.role)
    else:
        if args.perm is None:
            raise CliError("an ARPA instance needs --perm (or --selector)")
        decision = authorize_perm(inst, args.op, args.admin, args.perm, args.role)
    return _print_decision(decision, args.explain, out)


def _cmd_select(args, out):
    expected = {"users": "aura", "perms": "arpa"}[args.universe]
    _, inst = _load(args.file, (expected,))
    universe = "users" if expected == "aura" else "permissions"
    for member in eval_selector(inst, Selector(universe, parse_rule(args.where))):
        print(member, file=out)
    return EXIT_OK


def _cmd_translate(args, out):
    _, inst = _load(args.infile, (args.kind,))
    aio.save_file(translate(args.kind, inst), args.outfile)
    print(f"wrote {args.outfile}", file=out)
    return EXIT_OK


def _cmd_decide_legacy(args, out):
    _, inst = _load(args.file, (args.kind,))
    allowed = decide_legacy(args.kind, inst, args.op, args.admin, args.target, args.role)
    print("ALLOW" if allowed else "DENY", file=out)
    return EXIT_OK if allowed else EXIT_DENY


def _cmd_diff(args, out):
    _, inst = _load(args.legacy, (args.kind,))
    report = diff_decisions(args.kind, inst)
    print(report.summary, file=out)
    for m in report.mismatches:
        t = m.tuple
        print(f"MISMATCH op={t.op} admin={t.admin} target={t.target} role={t.role} "
              f"legacy={'ALLOW' if m.legacy else 'DENY'} translated={'ALLOW' if m.translated else 'DENY'}",
              file=out)
    return EXIT_OK if not report.mismatches else EXIT_DENY


_LEGACY_HIERARCHIES = {
    "RH": "role_hierarchy", "ARH": "admin_role_hierarchy", "OUH": "org_unit_hierarchy",
    "UPH": "user_pool_hierarchy", "AUH": "admin_unit_hierarchy", "TH": "task_hierarchy",
}


def _hierarchy(kind, inst, att):
    if isinstance(inst, (AuraInstance, ArpaInstance)):
        return inst.schema(att).hierarchy
    attr = _LEGACY_HIERARCHIES.get(att)
    if attr is None:
        for json_name, name, codec in aio.LEGACY_LAYOUTS[kind][1]:
            if json_name == att and codec[0] == "hierarchy":
                attr = name
    if attr is None or not hasattr(inst, attr):
        raise CliError(f"{kind} instances have no hierarchy named {att!r}")
    return getattr(inst, attr)


def _show(value) -> str:
    return f"({value[0]},{value[1]})" if isinstance(value, tuple) else value


def _cmd_closure(args, out):
    kind, inst = _load(args.file)
    h = _hierarchy(kind, inst, args.att)
    for senior in sorted_values(h.elements):
        for junior in sorted_values(h.juniors(senior)):
            print(f"{_show(senior)} >= {_show(junior)}", file=out)
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "check": _cmd_check,
    "select": _cmd_select,
    "translate": _cmd_translate,
    "decide-legacy": _cmd_decide_legacy,
    "diff-decisions": _cmd_diff,
    "closure": _cmd_closure,
}


def run(args: list[str], stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    with contextlib.redirect_stderr(stderr):
        try:
            ns = _parser().parse_args(args)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return _COMMANDS[ns.command](ns, stdout)
    except (AarbacError, CliError, OSError, L.LegacyValidationError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
