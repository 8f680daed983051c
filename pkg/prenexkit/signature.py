"""
Signature module - declared function and predicate symbols.

Responsible for:
- FunctionSymbol / PredicateSymbol records with finite-model rules
- Signature validation (unique names, arities, distinct 0 and 1)
- The shipped default signature and its extension by inferred predicates
- Loading declarative signature files (lark grammar)
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from lark import Lark, Transformer, v_args
from lark.exceptions import LarkError, VisitError

from prenexkit.errors import ArityMismatchError, SignatureError, UnknownSymbolError
from prenexkit.formula import STAR_NAME, predicates_used

logger = logging.getLogger(__name__)


# Interpretation rules understood by the oracle, with their arities.
FUNCTION_RULES = {
    "zero": 0,
    "one": 0,
    "succ": 1,
    "add": 2,
    "mul": 2,
    "pair": 2,
    "proj1": 1,
    "proj2": 1,
}
PREDICATE_RULES = {"eq": 2, "le": 2, "lt": 2}


@dataclass(frozen=True)
class FunctionSymbol:
    """A function symbol; rule None means 'table' (missing entries are 0)."""
    name: str
    arity: int
    rule: Optional[str] = None
    table: tuple = ()  # ((args tuple, value), ...)


@dataclass(frozen=True)
class PredicateSymbol:
    """A predicate symbol; rule None means opaque (enumerated by the oracle)."""
    name: str
    arity: int
    rule: Optional[str] = None

    @property
    def opaque(self) -> bool:
        return self.rule is None


@dataclass(frozen=True)
class Signature:
    """A finite first-order signature with distinguished symbols."""
    functions: tuple = ()
    predicates: tuple = ()
    zero: str = "0"
    one: str = "1"
    equality: str = "eq"
    pairing: Optional[tuple] = ("pair", "proj1", "proj2")
    _functions: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)
    _predicates: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for symbol in self.functions:
            if symbol.name in self._functions:
                raise SignatureError(f"Duplicate function symbol: {symbol.name}")
            if symbol.arity < 0:
                raise SignatureError(f"Negative arity for {symbol.name}")
            if symbol.rule is not None:
                expected = FUNCTION_RULES.get(symbol.rule)
                if expected is None:
                    raise SignatureError(f"Unknown function rule: {symbol.rule}")
                if expected != symbol.arity:
                    raise SignatureError(
                        f"Rule {symbol.rule} needs arity {expected}, {symbol.name} has {symbol.arity}"
                    )
            self._functions[symbol.name] = symbol
        for symbol in self.predicates:
            if symbol.name in self._predicates:
                raise SignatureError(f"Duplicate predicate symbol: {symbol.name}")
            if symbol.arity < 0:
                raise SignatureError(f"Negative arity for {symbol.name}")
            if symbol.rule is not None:
                expected = PREDICATE_RULES.get(symbol.rule)
                if expected is None:
                    raise SignatureError(f"Unknown predicate rule: {symbol.rule}")
                if expected != symbol.arity:
                    raise SignatureError(
                        f"Rule {symbol.rule} needs arity {expected}, {symbol.name} has {symbol.arity}"
                    )
            self._predicates[symbol.name] = symbol

        if self.zero == self.one:
            raise SignatureError("The constants 0 and 1 must be distinct symbols")
        for name in (self.zero, self.one):
            if name not in self._functions or self._functions[name].arity != 0:
                raise SignatureError(f"Distinguished constant {name} must be declared with arity 0")
        if self.equality not in self._predicates or self._predicates[self.equality].arity != 2:
            raise SignatureError(f"Equality {self.equality} must be a binary predicate")
        if self.pairing is not None:
            for name, arity in zip(self.pairing, (2, 1, 1)):
                if name not in self._functions or self._functions[name].arity != arity:
                    raise SignatureError(f"Pairing symbol {name} must be declared with arity {arity}")

    def function(self, name: str) -> FunctionSymbol:
        """
        Look up a function symbol.

        Raises:
            UnknownSymbolError: If the name is not declared.
        """
        try:
            return self._functions[name]
        except KeyError:
            raise UnknownSymbolError(name, "function symbol") from None

    def predicate(self, name: str) -> PredicateSymbol:
        """
        Look up a predicate symbol.

        Raises:
            UnknownSymbolError: If the name is not declared.
        """
        try:
            return self._predicates[name]
        except KeyError:
            raise UnknownSymbolError(name, "predicate symbol") from None

    def has_function(self, name: str) -> bool:
        return name in self._functions

    def has_predicate(self, name: str) -> bool:
        return name in self._predicates

    @property
    def has_pairing(self) -> bool:
        return self.pairing is not None

    def constants(self) -> frozenset:
        return frozenset(s.name for s in self.functions if s.arity == 0)

    def opaque_predicates(self) -> list:
        return [p for p in self.predicates if p.opaque]

    def with_predicates(self, extra: Iterable[PredicateSymbol]) -> "Signature":
        """Return a copy extended with extra predicates (existing names kept)."""
        added = []
        for symbol in extra:
            if symbol.name in self._predicates:
                known = self._predicates[symbol.name]
                if known.arity != symbol.arity:
                    raise ArityMismatchError(symbol.name, known.arity, symbol.arity)
                continue
            if symbol.name in {a.name for a in added}:
                continue
            added.append(symbol)
        if not added:
            return self
        return replace(self, predicates=self.predicates + tuple(added))

    def with_star(self) -> "Signature":
        """The signature extended with the 0-ary placeholder predicate."""
        return self.with_predicates([PredicateSymbol(STAR_NAME, 0)])

    def without_pairing(self) -> "Signature":
        return replace(self, pairing=None)


def default_signature() -> Signature:
    """0, 1, S, add, mul, Cantor pairing, =, <=, <."""
    return Signature(
        functions=(
            FunctionSymbol("0", 0, "zero"),
            FunctionSymbol("1", 0, "one"),
            FunctionSymbol("S", 1, "succ"),
            FunctionSymbol("add", 2, "add"),
            FunctionSymbol("mul", 2, "mul"),
            FunctionSymbol("pair", 2, "pair"),
            FunctionSymbol("proj1", 1, "proj1"),
            FunctionSymbol("proj2", 1, "proj2"),
        ),
        predicates=(
            PredicateSymbol("eq", 2, "eq"),
            PredicateSymbol("le", 2, "le"),
            PredicateSymbol("lt", 2, "lt"),
        ),
    )


def infer_signature(formulas: Iterable, base: Optional[Signature] = None) -> Signature:
    """
    Extend base with opaque predicates for every undeclared predicate used.

    Raises:
        ArityMismatchError: If a predicate is used with two arities.
    """
    signature = base or default_signature()
    seen: dict = {}
    for phi in formulas:
        for name, arity in predicates_used(phi).items():
            if name in seen and seen[name] != arity:
                raise ArityMismatchError(name, seen[name], arity)
            seen[name] = arity
    extra = [PredicateSymbol(name, arity) for name, arity in seen.items()]
    return signature.with_predicates(extra)


# --- Signature files ---

SIGNATURE_GRAMMAR = r"""
    start: decl*

    ?decl: function_decl
         | predicate_decl
         | zero_decl
         | one_decl
         | equality_decl
         | pairing_decl

    function_decl: "function" SYMBOL "/" INT ("=" function_rule)?
    predicate_decl: "predicate" SYMBOL "/" INT ("=" SYMBOL)?
    zero_decl: "zero" SYMBOL
    one_decl: "one" SYMBOL
    equality_decl: "equality" SYMBOL
    pairing_decl: "pairing" SYMBOL SYMBOL SYMBOL

    ?function_rule: SYMBOL
                  | "table" entry (";" entry)* -> table

    entry: (INT ("," INT)*)? "->" INT

    SYMBOL: /[A-Za-z0-9_][A-Za-z0-9_']*/
    COMMENT: /#[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


@v_args(inline=True)
class _SignatureBuilder(Transformer):
    """Turns the parse tree into keyword arguments for Signature."""

    def start(self, *decls):
        functions, predicates = [], []
        options: dict = {}
        for kind, value in decls:
            if kind == "function":
                functions.append(value)
            elif kind == "predicate":
                predicates.append(value)
            else:
                options[kind] = value
        return functions, predicates, options

    def function_decl(self, name, arity, rule=None):
        if isinstance(rule, tuple):
            return "function", FunctionSymbol(str(name), int(arity), None, rule)
        return "function", FunctionSymbol(str(name), int(arity), str(rule) if rule else None)

    def predicate_decl(self, name, arity, rule=None):
        return "predicate", PredicateSymbol(str(name), int(arity), str(rule) if rule else None)

    def zero_decl(self, name):
        return "zero", str(name)

    def one_decl(self, name):
        return "one", str(name)

    def equality_decl(self, name):
        return "equality", str(name)

    def pairing_decl(self, pair, proj1, proj2):
        return "pairing", (str(pair), str(proj1), str(proj2))

    def table(self, *entries):
        return tuple(entries)

    def entry(self, *values):
        *args, result = (int(v) for v in values)
        return tuple(args), result


_signature_parser = Lark(SIGNATURE_GRAMMAR, parser="lalr")


def parse_signature(text: str) -> Signature:
    """
    Parse a signature declaration.

    Declarations omitted from the text fall back to the default
    signature's distinguished symbols, which must then be declared.

    Raises:
        SignatureError: On syntax errors or inconsistent declarations.
    """
    try:
        tree = _signature_parser.parse(text)
        functions, predicates, options = _SignatureBuilder().transform(tree)
    except VisitError as e:
        raise SignatureError(str(e.orig_exc)) from e
    except LarkError as e:
        raise SignatureError(f"Malformed signature: {e}") from e

    for symbol in functions:
        if symbol.rule is None and symbol.table:
            for args, _ in symbol.table:
                if len(args) != symbol.arity:
                    raise SignatureError(f"Table row arity mismatch for {symbol.name}")
    if "pairing" not in options:
        names = {s.name for s in functions}
        if not {"pair", "proj1", "proj2"} <= names:
            options["pairing"] = None
    signature = Signature(functions=tuple(functions), predicates=tuple(predicates), **options)
    logger.debug(
        f"Parsed signature with {len(functions)} functions and {len(predicates)} predicates"
    )
    return signature


def load_signature(path: str) -> Signature:
    """
    Load a signature file.

    Raises:
        FileNotFoundError: If the file does not exist.
        SignatureError: If the file is malformed.
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise FileNotFoundError(f"Signature file not found: {file_path}")
    return parse_signature(file_path.read_text(encoding="utf-8"))
