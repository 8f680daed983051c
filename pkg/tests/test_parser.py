"""
Tests for the formula grammar and printer.
"""

import pytest
from hypothesis import given

from prenexkit.errors import ArityMismatchError, FormulaSyntaxError, UnknownSymbolError
from prenexkit.formula import (
    App,
    And,
    Atom,
    Bottom,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Var,
    alpha_eq,
)
from prenexkit.parser import (
    format_formula,
    parse_formula,
    parse_formulas,
    parse_with_signature,
)
from prenexkit.signature import default_signature, parse_signature

from tests.strategies import formulas, prenex


class TestParse:
    """Text to AST."""

    def test_precedence(self):
        """~ binds tighter than &, & tighter than |, | tighter than ->."""
        phi = parse_formula("~A & B | C -> D")
        assert phi == Implies(Or(And(Not(Atom("A")), Atom("B")), Atom("C")), Atom("D"))

    def test_implication_right_associative(self):
        """A -> B -> C parses as A -> (B -> C)."""
        assert parse_formula("A -> B -> C") == Implies(Atom("A"), Implies(Atom("B"), Atom("C")))

    def test_quantifier_extends_right(self):
        """The body of a quantifier extends as far right as possible."""
        phi = parse_formula("forall x. P(x) -> Q(x)")
        assert phi == Forall("x", Implies(Atom("P", (Var("x"),)), Atom("Q", (Var("x"),))))

    def test_quantifier_after_implication(self):
        """A quantified formula may appear right of ->."""
        phi = parse_formula("A -> exists y. P(y)")
        assert phi == Implies(Atom("A"), Exists("y", Atom("P", (Var("y"),))))

    def test_quantifier_after_negation(self):
        """~ may be followed directly by a quantifier."""
        assert parse_formula("~forall x. P(x)") == Not(Forall("x", Atom("P", (Var("x"),))))
        assert parse_formula("~~exists x. P(x)") == Not(Not(Exists("x", Atom("P", (Var("x"),)))))

    def test_quantifier_as_last_operand(self):
        """A quantifier right of & or | swallows the rest of the formula."""
        p, q = Atom("P", (Var("x"),)), Atom("Q", (Var("y"),))
        assert parse_formula("A & forall x. P(x)") == And(Atom("A"), Forall("x", p))
        assert parse_formula("A | exists x. P(x)") == Or(Atom("A"), Exists("x", p))
        assert parse_formula("A & exists y. Q(y) | B") == And(Atom("A"), Exists("y", Or(q, Atom("B"))))
        assert parse_formula("A | ~forall x. P(x) -> B") == Or(
            Atom("A"), Not(Forall("x", Implies(p, Atom("B"))))
        )

    def test_nested_bare_quantifiers(self):
        """A bare quantifier inside another quantifier's body."""
        phi = parse_formula("exists x. P(x) & forall y. Q(y)")
        assert phi == Exists("x", And(Atom("P", (Var("x"),)), Forall("y", Atom("Q", (Var("y"),)))))

    def test_bare_matches_parenthesized(self):
        """Parentheses around a trailing quantifier change nothing."""
        for bare, wrapped in [
            ("~forall x. P(x)", "~(forall x. P(x))"),
            ("A & forall x. P(x)", "A & (forall x. P(x))"),
            ("A | exists x. P(x)", "A | (exists x. P(x))"),
            ("A -> ~exists x. P(x)", "A -> ~(exists x. P(x))"),
        ]:
            assert parse_formula(bare) == parse_formula(wrapped)

    def test_leading_quantifier_scope(self):
        """A leading quantifier takes the whole formula unless parenthesized."""
        assert parse_formula("(forall x. P(x)) & A") == And(Forall("x", Atom("P", (Var("x"),))), Atom("A"))
        assert parse_formula("forall x. P(x) & A") == Forall("x", And(Atom("P", (Var("x"),)), Atom("A")))

    def test_bottom_and_equality(self):
        """false is ⊥; = builds the equality atom."""
        assert parse_formula("false") == Bottom()
        assert parse_formula("x = S(0)") == Atom("eq", (Var("x"), App("S", (App("0"),))))

    def test_primed_names(self):
        """Variables may carry trailing primes."""
        assert parse_formula("P(x'')") == Atom("P", (Var("x''"),))

    def test_signature_constants(self):
        """Free names declared as constants become constants, not variables."""
        signature = parse_signature(
            "function 0/0 = zero\nfunction 1/0 = one\nfunction c/0\n"
            "predicate eq/2 = eq\npredicate P/2\n"
        )
        phi = parse_formula("P(x, c) & (forall c. P(c, c))", signature)
        assert phi == And(
            Atom("P", (Var("x"), App("c"))),
            Forall("c", Atom("P", (Var("c"), Var("c")))),
        )

    def test_many_lines(self):
        """parse_formulas skips blank and comment lines."""
        text = "# header\nP(x)\n\n  Q(y) | A\n"
        assert parse_formulas(text) == [
            Atom("P", (Var("x"),)),
            Or(Atom("Q", (Var("y"),)), Atom("A")),
        ]


class TestSyntaxErrors:
    """FormulaSyntaxError carries the position."""

    def test_unexpected_character(self):
        """A stray character reports line 1 and a positive column."""
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("P(x) $ Q(x)")
        assert exc.value.line == 1
        assert exc.value.column >= 1

    def test_truncated(self):
        """A truncated formula is a syntax error."""
        with pytest.raises(FormulaSyntaxError):
            parse_formula("P(x) &")

    def test_second_line(self):
        """Errors on later lines report that line."""
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("P(x) &\n & Q(x)")
        assert exc.value.line == 2

    def test_is_value_error(self):
        """Syntax errors are ValueErrors."""
        with pytest.raises(ValueError):
            parse_formula("forall . P")


class TestFormat:
    """AST to text."""

    def test_minimal_parentheses(self):
        """Only necessary parentheses are printed."""
        phi = Implies(And(Atom("A"), Or(Atom("B"), Atom("C"))), Atom("D"))
        assert format_formula(phi) == "A & (B | C) -> D"

    def test_negated_quantifier(self):
        """~ before a quantifier is printed with parentheses."""
        phi = Not(Exists("u", Atom("A", (Var("x"), Var("u")))))
        assert format_formula(phi) == "~(exists u. A(x,u))"

    def test_equality_infix(self):
        """The equality predicate prints infix."""
        assert format_formula(Atom("eq", (Var("x"), App("0")))) == "x = 0"

    @given(formulas())
    def test_round_trip(self, phi):
        """parse(format(φ)) = φ."""
        assert parse_formula(format_formula(phi)) == phi

    def test_bare_quantifiers(self):
        """Trailing quantifiers lose their parentheses; others keep them."""
        phi = And(Not(Exists("u", Atom("A"))), Not(Forall("x", Atom("B"))))
        assert format_formula(phi, bare_quantifiers=True) == "~(exists u. A) & ~forall x. B"
        assert format_formula(phi) == "~(exists u. A) & ~(forall x. B)"

    @given(formulas())
    def test_round_trip_bare(self, phi):
        """parse(format(φ)) = φ with trailing quantifiers unparenthesized."""
        assert parse_formula(format_formula(phi, bare_quantifiers=True)) == phi

    @given(prenex())
    def test_round_trip_prenex(self, phi):
        """Prenex formulas round-trip up to α-equivalence."""
        assert alpha_eq(parse_formula(format_formula(phi)), phi)


class TestParseWithSignature:
    """Parsing a batch of formulas against one signature."""

    def test_inferred_predicates(self):
        """Undeclared predicates are added as opaque symbols."""
        parsed, signature = parse_with_signature(["P(x) -> Q(x, y)", "P(0)"])
        assert len(parsed) == 2
        assert signature.predicate("P").arity == 1
        assert signature.predicate("Q").arity == 2
        assert signature.predicate("P").opaque
        assert parsed[1] == Atom("P", (App("0"),))

    def test_conflicting_arities(self):
        """One predicate used at two arities is rejected."""
        with pytest.raises(ArityMismatchError):
            parse_with_signature(["P(x)", "P(x, y)"])

    def test_strict_rejects_undeclared(self):
        """In strict mode only declared symbols are accepted."""
        with pytest.raises(UnknownSymbolError):
            parse_with_signature(["P(x)"], strict=True)

    def test_strict_accepts_declared(self):
        """Declared symbols parse in strict mode."""
        parsed, signature = parse_with_signature(["le(x, S(x))"], strict=True)
        assert signature == default_signature()
        assert parsed == [Atom("le", (Var("x"), App("S", (Var("x"),))))]
