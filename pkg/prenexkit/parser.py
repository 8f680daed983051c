"""
Parser module - textual grammar and pretty-printer for formulas.

Responsible for:
- The lark grammar: forall/exists, ~, &, |, right-associative ->, false, =
- Converting parse trees into the immutable AST
- Printing formulas back in the same grammar, parenthesized minimally

A quantifier binds as far right as possible, so it may stand bare only as
the last operand: `~forall x. P(x)` and `A & exists y. Q(y) | B` are fine,
the latter reading as `A & exists y. (Q(y) | B)`. The printer parenthesizes
quantifiers in operand position unless asked not to; both forms reparse.
"""

import logging
from typing import Optional

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from prenexkit.errors import FormulaSyntaxError
from prenexkit.formula import (
    App,
    And,
    Atom,
    Bottom,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Term,
    Var,
    free_vars,
    substitute_many,
    well_formed,
)

logger = logging.getLogger(__name__)


FORMULA_GRAMMAR = r"""
    ?start: formula

    ?formula: disjunction
            | disj_closed "->" formula -> implies

    // *_closed rules never end in an unparenthesized quantifier; a
    // quantifier may only close off the rightmost operand.
    ?disjunction: disj_closed
                | disj_open

    ?disj_open: conj_open
              | disj_closed "|" conj_open -> or_

    ?disj_closed: conj_closed
                | disj_closed "|" conj_closed -> or_

    ?conj_open: open_unary
              | conj_closed "&" open_unary -> and_

    ?conj_closed: unary
                | conj_closed "&" unary -> and_

    ?open_unary: "~" open_unary -> not_
               | quantified

    quantified: QUANTIFIER NAME "." formula

    ?unary: "~" unary -> not_
          | primary

    ?primary: "false" -> bottom
            | NAME "(" args ")" -> predicate
            | NAME -> proposition
            | term "=" term -> equality
            | "(" formula ")"

    args: term ("," term)*

    ?term: NAME "(" args ")" -> application
         | NUMERAL -> numeral
         | NAME -> variable

    QUANTIFIER: "forall" | "exists"
    NAME: /(?!(forall|exists|false)(?![A-Za-z0-9_']))[A-Za-z_][A-Za-z0-9_]*'*/
    NUMERAL: /[0-9]+/

    %import common.WS
    %ignore WS
"""


@v_args(inline=True)
class _FormulaBuilder(Transformer):
    """Builds AST nodes; equality atoms use the configured predicate name."""

    def __init__(self, equality: str = "eq"):
        super().__init__()
        self._equality = equality

    def quantified(self, quantifier, name, body):
        node = Forall if str(quantifier) == "forall" else Exists
        return node(str(name), body)

    def implies(self, left, right):
        return Implies(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def and_(self, left, right):
        return And(left, right)

    def not_(self, body):
        return Not(body)

    def bottom(self):
        return Bottom()

    def predicate(self, name, args):
        return Atom(str(name), args)

    def proposition(self, name):
        return Atom(str(name))

    def equality(self, left, right):
        return Atom(self._equality, (left, right))

    def args(self, *terms):
        return tuple(terms)

    def application(self, name, args):
        return App(str(name), args)

    def numeral(self, token):
        return App(str(token))

    def variable(self, name):
        return Var(str(name))


_formula_parser = Lark(FORMULA_GRAMMAR, parser="earley")


def parse_formula(text: str, signature=None) -> Formula:
    """
    Parse formula text.

    Args:
        text: Formula in the textual grammar.
        signature: Optional Signature. When given, free names declared as
                   constants become constants and the result is checked
                   with well_formed.

    Returns:
        The parsed Formula.

    Raises:
        FormulaSyntaxError: With line/column of the offending input.
        UnknownSymbolError / ArityMismatchError: From well_formed.
    """
    equality = signature.equality if signature is not None else "eq"
    try:
        tree = _formula_parser.parse(text)
        phi = _FormulaBuilder(equality).transform(tree)
    except UnexpectedInput as e:
        line = getattr(e, "line", 0) or 0
        column = getattr(e, "column", 0) or 0
        raise FormulaSyntaxError(f"Cannot parse formula {text!r}", max(line, 0), max(column, 0)) from e
    except VisitError as e:
        raise FormulaSyntaxError(f"Cannot build formula {text!r}: {e.orig_exc}") from e

    if signature is not None:
        constants = free_vars(phi) & signature.constants()
        if constants:
            phi = substitute_many(phi, {name: App(name) for name in constants})
        well_formed(phi, signature)
    return phi


def parse_formulas(text: str, signature=None) -> list:
    """One formula per non-empty line; '#' starts a comment line."""
    formulas = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        formulas.append(parse_formula(stripped, signature))
    return formulas


def parse_with_signature(texts, base=None, strict: bool = False) -> tuple:
    """
    Parse several formulas against one signature.

    Args:
        texts: Formula texts.
        base: Base Signature (default_signature() when None).
        strict: Check against base as is; otherwise base is first extended
                with opaque predicates for every undeclared predicate used.

    Returns:
        (formulas, signature) with the signature actually used.

    Raises:
        FormulaSyntaxError, UnknownSymbolError, ArityMismatchError.
    """
    from prenexkit.signature import default_signature, infer_signature

    base = base or default_signature()
    if strict:
        signature = base
    else:
        signature = infer_signature([parse_formula(t) for t in texts], base)
    return [parse_formula(t, signature) for t in texts], signature


# --- Printing ---

_QUANTIFIER, _IMPLIES, _OR, _AND, _NOT, _ATOM = range(6)


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if not term.args:
        return term.symbol
    return f"{term.symbol}({','.join(format_term(a) for a in term.args)})"


def _precedence(phi: Formula) -> int:
    if isinstance(phi, (Forall, Exists)):
        return _QUANTIFIER
    if isinstance(phi, Implies):
        return _IMPLIES
    if isinstance(phi, Or):
        return _OR
    if isinstance(phi, And):
        return _AND
    if isinstance(phi, Not):
        return _NOT
    return _ATOM


def format_formula(phi: Formula, equality: str = "eq", bare_quantifiers: bool = False) -> str:
    """
    Print a formula in the textual grammar.

    Args:
        phi: Formula to print.
        equality: Name of the equality predicate, printed infix.
        bare_quantifiers: Leave a quantifier unparenthesized when it is the
                          last operand, as in `A & forall x. P(x)`.

    Returns:
        Text that parses back to phi.
    """

    def wrap(sub: Formula, minimum: int, last: bool) -> str:
        if isinstance(sub, (Forall, Exists)) and bare_quantifiers and last:
            return render(sub, True)
        if _precedence(sub) < minimum:
            return f"({render(sub, True)})"
        return render(sub, last)

    def render(f: Formula, last: bool) -> str:
        # `last`: nothing follows f up to the enclosing parenthesis
        if isinstance(f, Bottom):
            return "false"
        if isinstance(f, Atom):
            if f.pred == equality and len(f.args) == 2:
                return f"{format_term(f.args[0])} = {format_term(f.args[1])}"
            if not f.args:
                return f.pred
            return f"{f.pred}({','.join(format_term(a) for a in f.args)})"
        if isinstance(f, Not):
            body = f.body
            if isinstance(body, Atom) and body.pred == equality and len(body.args) == 2:
                return f"~({render(body, True)})"
            return f"~{wrap(body, _NOT, last)}"
        if isinstance(f, And):
            return f"{wrap(f.left, _AND, False)} & {wrap(f.right, _NOT, last)}"
        if isinstance(f, Or):
            return f"{wrap(f.left, _OR, False)} | {wrap(f.right, _AND, last)}"
        if isinstance(f, Implies):
            return f"{wrap(f.left, _OR, False)} -> {wrap(f.right, _QUANTIFIER, last)}"
        keyword = "forall" if isinstance(f, Forall) else "exists"
        return f"{keyword} {f.var}. {render(f.body, last)}"

    return render(phi, True)
