"""
Tests for signatures and signature files.
"""

import tempfile
from pathlib import Path

import pytest

from prenexkit.errors import ArityMismatchError, SignatureError, UnknownSymbolError
from prenexkit.formula import STAR_NAME
from prenexkit.parser import parse_formula
from prenexkit.signature import (
    PredicateSymbol,
    default_signature,
    infer_signature,
    load_signature,
    parse_signature,
)


MINIMAL = """
# two constants and equality
function 0/0 = zero
function 1/0 = one
predicate eq/2 = eq
"""


class TestDefaultSignature:
    """The built-in signature."""

    def test_distinguished_symbols(self):
        """0, 1, equality and pairing are declared."""
        signature = default_signature()
        assert signature.zero == "0" and signature.one == "1"
        assert signature.equality == "eq"
        assert signature.has_pairing
        assert signature.function("pair").arity == 2

    def test_unknown_lookup(self):
        """Looking up an undeclared symbol raises UnknownSymbolError."""
        with pytest.raises(UnknownSymbolError):
            default_signature().predicate("P")

    def test_with_star(self):
        """with_star adds the 0-ary placeholder as an opaque predicate."""
        signature = default_signature().with_star()
        assert signature.predicate(STAR_NAME).arity == 0
        assert signature.predicate(STAR_NAME).opaque

    def test_with_predicates_conflict(self):
        """Re-declaring a predicate with another arity fails."""
        with pytest.raises(ArityMismatchError):
            default_signature().with_predicates([PredicateSymbol("eq", 3)])

    def test_infer(self):
        """infer_signature adds every undeclared predicate once."""
        formulas = [parse_formula("P(x) & A"), parse_formula("P(y) -> R(x, y)")]
        signature = infer_signature(formulas)
        assert [p.name for p in signature.opaque_predicates()] == ["P", "A", "R"]


class TestSignatureFile:
    """The signature file grammar."""

    def test_minimal(self):
        """A file with only constants and equality has no pairing."""
        signature = parse_signature(MINIMAL)
        assert not signature.has_pairing
        assert signature.constants() == {"0", "1"}

    def test_table_function(self):
        """Table functions keep their rows."""
        signature = parse_signature(MINIMAL + "function f/1 = table 0 -> 1; 1 -> 0\n")
        assert signature.function("f").table == (((0,), 1), ((1,), 0))
        assert signature.function("f").rule is None

    def test_opaque_predicate(self):
        """A predicate without a rule is opaque."""
        signature = parse_signature(MINIMAL + "predicate P/2\n")
        assert signature.predicate("P").opaque

    def test_renamed_equality(self):
        """The equality symbol can be renamed."""
        text = "function z/0 = zero\nfunction o/0 = one\npredicate E/2 = eq\nzero z\none o\nequality E\n"
        signature = parse_signature(text)
        assert signature.equality == "E"
        assert parse_formula("x = z", signature).pred == "E"

    def test_same_constants_rejected(self):
        """0 and 1 must be distinct symbols."""
        with pytest.raises(SignatureError):
            parse_signature(MINIMAL + "one 0\n")

    def test_wrong_rule_arity(self):
        """A rule applied at the wrong arity is rejected."""
        with pytest.raises(SignatureError):
            parse_signature(MINIMAL + "function g/1 = add\n")

    def test_duplicate(self):
        """Duplicate declarations are rejected."""
        with pytest.raises(SignatureError):
            parse_signature(MINIMAL + "predicate eq/2 = eq\n")

    def test_syntax_error(self):
        """Malformed text raises SignatureError."""
        with pytest.raises(SignatureError):
            parse_signature("function f")

    def test_shipped_corpus_signature(self, shipped_corpus):
        """The corpus default.sig matches the built-in signature."""
        assert load_signature(str(shipped_corpus / "default.sig")) == default_signature()

    def test_missing_file(self):
        """A missing file raises FileNotFoundError."""
        with tempfile.TemporaryDirectory() as tmpdir:
            with pytest.raises(FileNotFoundError):
                load_signature(str(Path(tmpdir) / "absent.sig"))
