"""
Errors module - exception hierarchy shared by every prenexkit component.

Responsible for:
- A single root (PrenexKitError) so callers can catch all input errors
- Named errors for each precondition the engine checks
- Carrying positional detail (line/column, chain step index) where useful

Verification failures are not errors: the oracle reports them as
CheckReport records with passed=False.
"""

from typing import Optional


class PrenexKitError(ValueError):
    """Base class for all prenexkit input and precondition errors."""


# --- Formulas and signatures ---

class SignatureError(PrenexKitError):
    """A signature declaration is inconsistent (duplicate names, 0 = 1, ...)."""


class UnknownSymbolError(PrenexKitError):
    """A formula uses a function or predicate symbol the signature lacks."""

    def __init__(self, symbol: str, kind: str = "symbol"):
        self.symbol = symbol
        self.kind = kind
        super().__init__(f"Unknown {kind}: {symbol}")


class ArityMismatchError(PrenexKitError):
    """A symbol is applied to the wrong number of arguments."""

    def __init__(self, symbol: str, expected: int, actual: int):
        self.symbol = symbol
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Arity mismatch for {symbol}: expected {expected}, got {actual}"
        )


class FormulaSyntaxError(PrenexKitError):
    """Formula text does not match the grammar."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


# --- Engine preconditions ---

class NotInClassError(PrenexKitError):
    """The input formula is outside the class the operation requires."""


class ShapeMismatchError(PrenexKitError):
    """A prenex input does not have the requested shape or level."""


class NotPrenexError(PrenexKitError):
    """A prenex formula was required."""


class ContainsOrError(PrenexKitError):
    """The disjunction-free pipeline received a formula containing a disjunction."""


class TargetBelowCurrentLevelError(PrenexKitError):
    """Padding was asked to reach a level below the formula's own."""


class PairingSymbolsMissingError(PrenexKitError):
    """Quantifier contraction needs pair/proj1/proj2 in the signature."""


class ChainError(PrenexKitError):
    """Two chain fragments do not fit together."""


class UnknownRowError(PrenexKitError):
    """No budget row exists for the requested (source, target) pair."""


# --- Translations ---

class VariableCaptureError(PrenexKitError):
    """A substitution would capture a free variable."""


# --- Oracle ---

class UnboundVariableError(PrenexKitError):
    """Evaluation met a free variable missing from the environment."""


class ScopeUnsupportedError(PrenexKitError):
    """The oracle cannot check the requested validity scope."""


class ChainReplayError(PrenexKitError):
    """Replaying a chain step raised an error."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"Chain step {index}: {cause}")


# --- Corpus ---

class MalformedGoldenFileError(PrenexKitError):
    """A golden file cannot be parsed."""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")
