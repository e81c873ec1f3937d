"""Attribute-based administration of RBAC: the AURA and ARPA models.

AURA governs user-role assignment and ARPA permission-role assignment with
authorization rules written over user, admin-user and permission attributes.
The package also encodes ten legacy administrative models with their native
decision procedures, and translates each into an equivalent AURA/ARPA
instance.
"""

from .authz import (
    Decision,
    NotAuthorized,
    Selector,
    apply_user_op,
    authorize_perm,
    authorize_perm_set,
    authorize_user,
    authorize_user_set,
    eval_selector,
)
from .core import (
    AarbacError,
    ArpaInstance,
    AttributeSchema,
    AuraInstance,
    CycleError,
    Form,
    Hierarchy,
    Owner,
    UnknownAttribute,
    UnknownElement,
    UnknownOperation,
    UnknownSubject,
    Violation,
    build_hierarchy,
    dominates,
    set_dominates,
    validate_instance,
)
from .io import ParseError, SchemaError, SemanticError, load_fixture, load_instance, save_instance
from .legacy import LegacyValidationError, UnknownKind, UnknownLiteral, decide_pra, decide_ura
from .ruleexpr import (
    BindingError,
    MissingBinding,
    RuleSyntaxError,
    UnboundVariable,
    eval_rule,
    format_rule,
    parse_rule,
)
from .translate import diff_decisions, map_pra, map_ura, translate_prereq_pra, translate_prereq_ura

__all__ = [name for name, value in list(globals().items())
           if not name.startswith("_") and not isinstance(value, type(authz))]
