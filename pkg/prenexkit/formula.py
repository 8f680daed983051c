"""
Formula module - immutable terms and formulas of first-order arithmetic.

Responsible for:
- The term and formula AST (frozen dataclasses, hashable, shareable)
- Free/bound variable bookkeeping and deterministic fresh names
- Capture-avoiding substitution and alpha-equivalence
- Well-formedness against a Signature
- Prefix helpers used by the classifier and the prenex engine
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Union

from prenexkit.errors import ArityMismatchError


# --- Terms ---

@dataclass(frozen=True)
class Var:
    """A variable occurrence."""
    name: str


@dataclass(frozen=True)
class App:
    """A function symbol applied to arguments (constants have no arguments)."""
    symbol: str
    args: tuple = ()


Term = Union[Var, App]


# --- Formulas ---

@dataclass(frozen=True)
class Bottom:
    """Falsum."""


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms; 0-ary atoms are propositional letters."""
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Bottom, Atom, Not, And, Or, Implies, Forall, Exists]
Binary = (And, Or, Implies)
Quantifier = (Forall, Exists)

# Placeholder predicate of the A-translation, printed as `star`.
STAR_NAME = "star"
STAR = Atom(STAR_NAME)

# Truth, encoded without a dedicated node.
TOP = Implies(Bottom(), Bottom())


def nn(phi: Formula) -> Formula:
    """Double negation ¬¬φ."""
    return Not(Not(phi))


def equals(left: Term, right: Term, predicate: str = "eq") -> Atom:
    """The equality atom t = s."""
    return Atom(predicate, (left, right))


# --- Variables ---

def term_vars(term: Term) -> frozenset:
    """Variables occurring in a term."""
    if isinstance(term, Var):
        return frozenset({term.name})
    out: set = set()
    for arg in term.args:
        out |= term_vars(arg)
    return frozenset(out)


@lru_cache(maxsize=65536)
def free_vars(phi: Formula) -> frozenset:
    """
    Exact set of free variables of a formula.

    Args:
        phi: Any formula.

    Returns:
        Frozenset of variable names.
    """
    if isinstance(phi, Bottom):
        return frozenset()
    if isinstance(phi, Atom):
        out: set = set()
        for arg in phi.args:
            out |= term_vars(arg)
        return frozenset(out)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, Binary):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


@lru_cache(maxsize=65536)
def bound_vars(phi: Formula) -> frozenset:
    """Names bound by some quantifier of the formula."""
    if isinstance(phi, (Bottom, Atom)):
        return frozenset()
    if isinstance(phi, Not):
        return bound_vars(phi.body)
    if isinstance(phi, Binary):
        return bound_vars(phi.left) | bound_vars(phi.right)
    return bound_vars(phi.body) | {phi.var}


def all_vars(phi: Formula) -> frozenset:
    """Every variable name mentioned, free or bound."""
    return free_vars(phi) | bound_vars(phi)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """
    Deterministic fresh variable name: base, base', base'', ...

    Trailing primes on base are stripped first so repeated renaming
    does not grow names without need.
    """
    avoid = set(avoid)
    stem = base.rstrip("'") or "v"
    candidate = stem
    while candidate in avoid:
        candidate += "'"
    return candidate


# --- Substitution ---

def substitute_term(term: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace variables of a term simultaneously."""
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    return App(term.symbol, tuple(substitute_term(a, mapping) for a in term.args))


def substitute_many(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """
    Simultaneous capture-avoiding substitution of terms for free variables.

    Binders whose variable occurs in an incoming term are renamed with
    fresh_name, so the operation is total.
    """
    if not mapping:
        return phi
    if isinstance(phi, Bottom):
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(substitute_term(a, mapping) for a in phi.args))
    if isinstance(phi, Not):
        return Not(substitute_many(phi.body, mapping))
    if isinstance(phi, Binary):
        return type(phi)(
            substitute_many(phi.left, mapping),
            substitute_many(phi.right, mapping),
        )

    body_free = free_vars(phi.body)
    live = {
        name: term for name, term in mapping.items()
        if name != phi.var and name in body_free
    }
    if not live:
        return phi
    incoming: set = set()
    for term in live.values():
        incoming |= term_vars(term)
    var = phi.var
    body = phi.body
    if var in incoming:
        var = fresh_name(var, incoming | all_vars(body) | set(live))
        body = substitute_many(body, {phi.var: Var(var)})
    return type(phi)(var, substitute_many(body, live))


def substitute(phi: Formula, var: str, term: Term) -> Formula:
    """
    Capture-avoiding replacement of the free occurrences of var by term.

    Args:
        phi: Formula to substitute into.
        var: Variable name to replace.
        term: Replacement term.

    Returns:
        The substituted formula; binders are renamed where needed.
    """
    return substitute_many(phi, {var: term})


def rename_bound(phi: Formula, avoid: Iterable[str]) -> Formula:
    """
    Rename binders so that every bound name is distinct and outside avoid.

    Free variables of phi are always avoided. Binders that already satisfy
    the condition keep their names.
    """
    used = set(avoid) | set(free_vars(phi))

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Bottom, Atom)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, Binary):
            left = walk(f.left)
            return type(f)(left, walk(f.right))
        var = f.var
        body = f.body
        if var in used:
            var = fresh_name(var, used | all_vars(body))
            body = substitute_many(body, {f.var: Var(var)})
        used.add(var)
        return type(f)(var, walk(body))

    return walk(phi)


# --- Alpha-equivalence ---

def _nameless_term(term: Term, scope: tuple):
    if isinstance(term, Var):
        for depth, name in enumerate(reversed(scope)):
            if name == term.name:
                return ("bound", depth)
        return ("free", term.name)
    return ("app", term.symbol, tuple(_nameless_term(a, scope) for a in term.args))


def _nameless(phi: Formula, scope: tuple):
    if isinstance(phi, Bottom):
        return ("bottom",)
    if isinstance(phi, Atom):
        return ("atom", phi.pred, tuple(_nameless_term(a, scope) for a in phi.args))
    if isinstance(phi, Not):
        return ("not", _nameless(phi.body, scope))
    if isinstance(phi, Binary):
        return (type(phi).__name__, _nameless(phi.left, scope), _nameless(phi.right, scope))
    return (type(phi).__name__, _nameless(phi.body, scope + (phi.var,)))


def alpha_eq(phi: Formula, psi: Formula) -> bool:
    """True iff phi and psi differ only in the names of bound variables."""
    return phi == psi or _nameless(phi, ()) == _nameless(psi, ())


# --- Structure ---

def well_formed(phi: Formula, signature) -> Formula:
    """
    Check every symbol of phi against the signature.

    Args:
        phi: Formula to check.
        signature: Signature declaring the admissible symbols.

    Returns:
        phi itself, unchanged.

    Raises:
        UnknownSymbolError: If a symbol is not declared.
        ArityMismatchError: If a symbol is applied to the wrong number of arguments.
    """
    def check_term(term: Term) -> None:
        if isinstance(term, Var):
            return
        symbol = signature.function(term.symbol)
        if symbol.arity != len(term.args):
            raise ArityMismatchError(term.symbol, symbol.arity, len(term.args))
        for arg in term.args:
            check_term(arg)

    def check(f: Formula) -> None:
        if isinstance(f, Bottom):
            return
        if isinstance(f, Atom):
            predicate = signature.predicate(f.pred)
            if predicate.arity != len(f.args):
                raise ArityMismatchError(f.pred, predicate.arity, len(f.args))
            for arg in f.args:
                check_term(arg)
        elif isinstance(f, Not):
            check(f.body)
        elif isinstance(f, Binary):
            check(f.left)
            check(f.right)
        else:
            check(f.body)

    check(phi)
    return phi


def quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Bottom, Atom)):
        return True
    if isinstance(phi, Not):
        return quantifier_free(phi.body)
    if isinstance(phi, Binary):
        return quantifier_free(phi.left) and quantifier_free(phi.right)
    return False


def size(phi: Formula) -> int:
    """Number of AST nodes (terms not counted)."""
    if isinstance(phi, (Bottom, Atom)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, Binary):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)


def predicates_used(phi: Formula) -> dict:
    """Map predicate name to arity, first occurrence wins."""
    out: dict = {}

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            out.setdefault(f.pred, len(f.args))
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, Binary):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quantifier):
            walk(f.body)

    walk(phi)
    return out


def function_symbols_used(phi: Formula) -> frozenset:
    out: set = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, App):
            out.add(t.symbol)
            for arg in t.args:
                walk_term(arg)

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            for arg in f.args:
                walk_term(arg)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, Binary):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quantifier):
            walk(f.body)

    walk(phi)
    return frozenset(out)


def contains_or(phi: Formula) -> bool:
    if isinstance(phi, Or):
        return True
    if isinstance(phi, (Bottom, Atom)):
        return False
    if isinstance(phi, Not):
        return contains_or(phi.body)
    if isinstance(phi, Binary):
        return contains_or(phi.left) or contains_or(phi.right)
    return contains_or(phi.body)


def normalize_negation(phi: Formula) -> Formula:
    """Rewrite every ¬φ as φ → ⊥."""
    if isinstance(phi, (Bottom, Atom)):
        return phi
    if isinstance(phi, Not):
        return Implies(normalize_negation(phi.body), Bottom())
    if isinstance(phi, Binary):
        return type(phi)(normalize_negation(phi.left), normalize_negation(phi.right))
    return type(phi)(phi.var, normalize_negation(phi.body))


def map_subformulas(phi: Formula, fn) -> Formula:
    """Apply fn bottom-up to every subformula."""
    if isinstance(phi, (Bottom, Atom)):
        return fn(phi)
    if isinstance(phi, Not):
        return fn(Not(map_subformulas(phi.body, fn)))
    if isinstance(phi, Binary):
        return fn(type(phi)(map_subformulas(phi.left, fn), map_subformulas(phi.right, fn)))
    return fn(type(phi)(phi.var, map_subformulas(phi.body, fn)))


# --- Prefixes ---

def split_prefix(phi: Formula) -> tuple:
    """
    Split off the leading quantifiers.

    Returns:
        (prefix, matrix) where prefix is a tuple of (quantifier class, var).
    """
    prefix = []
    while isinstance(phi, Quantifier):
        prefix.append((type(phi), phi.var))
        phi = phi.body
    return tuple(prefix), phi


def build_prefix(prefix: Iterable, matrix: Formula) -> Formula:
    """Inverse of split_prefix."""
    for quantifier, var in reversed(tuple(prefix)):
        matrix = quantifier(var, matrix)
    return matrix


def split_block(phi: Formula, quantifier) -> tuple:
    """
    Split the leading block of one quantifier kind (possibly empty).

    Returns:
        (variables, rest).
    """
    variables = []
    while isinstance(phi, quantifier):
        variables.append(phi.var)
        phi = phi.body
    return tuple(variables), phi


def close_block(quantifier, variables: Iterable[str], body: Formula) -> Formula:
    for var in reversed(tuple(variables)):
        body = quantifier(var, body)
    return body


def is_prenex(phi: Formula) -> bool:
    _, matrix = split_prefix(phi)
    return quantifier_free(matrix)


def blocks(phi: Formula) -> list:
    """Maximal like-quantifier blocks of the prefix as (class, [vars])."""
    prefix, _ = split_prefix(phi)
    out: list = []
    for quantifier, var in prefix:
        if out and out[-1][0] is quantifier:
            out[-1][1].append(var)
        else:
            out.append((quantifier, [var]))
    return out


def dual(quantifier):
    return Exists if quantifier is Forall else Forall
