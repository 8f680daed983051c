"""
Tests for the formula AST: free variables, substitution, alpha-equivalence
and well-formedness.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prenexkit.classify import alt_paths, class_membership, degree
from prenexkit.errors import ArityMismatchError, UnknownSymbolError
from prenexkit.formula import (
    App,
    Atom,
    Bottom,
    Exists,
    Forall,
    Implies,
    Not,
    Var,
    alpha_eq,
    bound_vars,
    free_vars,
    fresh_name,
    normalize_negation,
    rename_bound,
    substitute,
    term_vars,
    well_formed,
)
from prenexkit.parser import parse_formula
from prenexkit.signature import PredicateSymbol, default_signature

from tests.strategies import formulas


def P(*args):
    return Atom("P", tuple(Var(a) if isinstance(a, str) else a for a in args))


class TestFreeVars:
    """free_vars on hand-built formulas."""

    def test_bound_variable_excluded(self):
        """P(x) ∧ ∀y.Q(y) has only x free."""
        assert free_vars(parse_formula("P(x) & (forall y. Q(y))")) == {"x"}

    def test_bottom(self):
        """⊥ has no free variables."""
        assert free_vars(Bottom()) == frozenset()

    def test_nested_quantifiers(self):
        """∀x.∃y.P(x,y,z) has only z free."""
        assert free_vars(parse_formula("forall x. exists y. P(x,y,z)")) == {"z"}

    @given(formulas())
    def test_invariant_under_renaming(self, phi):
        """Renaming bound variables never changes the free variables."""
        assert free_vars(rename_bound(phi, ("x", "y", "z"))) == free_vars(phi)


class TestSubstitute:
    """Capture-avoiding substitution."""

    def test_simple(self):
        """P(x)[S(0)/x] = P(S(0))."""
        term = App("S", (App("0"),))
        assert substitute(P("x"), "x", term) == P(term)

    def test_bound_variable_untouched(self):
        """x is not free in ∀x.P(x), so nothing changes."""
        phi = Forall("x", P("x"))
        assert substitute(phi, "x", Var("z")) == phi

    def test_capture_renames_binder(self):
        """(∀y.P(x,y))[y/x] = ∀y'.P(y,y')."""
        result = substitute(Forall("y", P("x", "y")), "x", Var("y"))
        assert result == Forall("y'", P("y", "y'"))

    @given(formulas(), st.sampled_from(["x", "y", "z"]), st.sampled_from(["x", "y", "w"]))
    def test_free_vars_law(self, phi, var, target):
        """FV(φ[t/x]) = (FV(φ) ∖ {x}) ∪ (FV(t) if x ∈ FV(φ))."""
        term = App("add", (Var(target), App("0")))
        expected = (free_vars(phi) - {var}) | (term_vars(term) if var in free_vars(phi) else frozenset())
        assert free_vars(substitute(phi, var, term)) == expected

    @given(formulas(), st.sampled_from(["x", "y"]))
    def test_respects_alpha_equivalence(self, phi, var):
        """Substituting into α-equal formulas gives α-equal results."""
        renamed = rename_bound(phi, ("x", "y", "w"))
        term = Var("w")
        assert alpha_eq(substitute(phi, var, term), substitute(renamed, var, term))


class TestAlphaEq:
    """α-equivalence."""

    def test_renamed_binder(self):
        """∀x.P(x) and ∀y.P(y) are α-equal."""
        assert alpha_eq(Forall("x", P("x")), Forall("y", P("y")))

    def test_different_quantifier(self):
        """∀x.P(x) and ∃x.P(x) are not α-equal."""
        assert not alpha_eq(Forall("x", P("x")), Exists("x", P("x")))

    def test_swapped_binders(self):
        """∀x.∀y.P(x,y) and ∀y.∀x.P(y,x) are α-equal."""
        assert alpha_eq(
            Forall("x", Forall("y", P("x", "y"))),
            Forall("y", Forall("x", P("y", "x"))),
        )

    def test_free_names_matter(self):
        """P(x) and P(y) differ: free variables are not renamed."""
        assert not alpha_eq(P("x"), P("y"))

    @given(formulas(), formulas())
    def test_symmetric(self, phi, psi):
        """α-equivalence is symmetric."""
        assert alpha_eq(phi, psi) == alpha_eq(psi, phi)

    @given(formulas())
    def test_renaming_is_alpha_equal(self, phi):
        """rename_bound produces an α-equal formula with fresh binders."""
        renamed = rename_bound(phi, ("x", "y"))
        assert alpha_eq(phi, renamed)
        assert not bound_vars(renamed) & {"x", "y"}


class TestWellFormed:
    """Symbol and arity checks against a signature."""

    @pytest.fixture
    def signature(self):
        return default_signature().with_predicates([PredicateSymbol("P", 1)])

    def test_declared(self, signature):
        """P(x) with P/1 declared is accepted and returned."""
        phi = P("x")
        assert well_formed(phi, signature) is phi

    def test_arity_mismatch(self, signature):
        """P(x,y) with P/1 declared is rejected."""
        with pytest.raises(ArityMismatchError):
            well_formed(P("x", "y"), signature)

    def test_unknown_predicate(self, signature):
        """An undeclared predicate is rejected."""
        with pytest.raises(UnknownSymbolError):
            well_formed(Atom("Q", (Var("x"),)), signature)

    def test_unknown_function(self, signature):
        """An undeclared function symbol is rejected."""
        with pytest.raises(UnknownSymbolError):
            well_formed(P(App("f", (Var("x"),))), signature)


class TestFreshNames:
    """Deterministic fresh names."""

    def test_primes(self):
        """Fresh names append primes: x, x', x''."""
        assert fresh_name("x", []) == "x"
        assert fresh_name("x", ["x"]) == "x'"
        assert fresh_name("x", ["x", "x'"]) == "x''"

    def test_strips_existing_primes(self):
        """Primes on the base are stripped before searching."""
        assert fresh_name("x''", ["x"]) == "x'"


class TestNegationEncoding:
    """¬φ versus φ → ⊥."""

    def test_normalize(self):
        """¬P becomes P → ⊥."""
        assert normalize_negation(Not(P("x"))) == Implies(P("x"), Bottom())

    @given(formulas())
    def test_free_vars_unchanged(self, phi):
        """The encoding changes no free variables."""
        assert free_vars(normalize_negation(phi)) == free_vars(phi)

    @given(formulas(), st.integers(min_value=0, max_value=3))
    def test_class_preserving(self, phi, k):
        """Degree and all E/U flags agree for the two encodings."""
        encoded = normalize_negation(phi)
        assert degree(encoded) == degree(phi)
        a, b = class_membership(phi, k), class_membership(encoded, k)
        assert (a.in_e, a.in_u, a.in_e_plus, a.in_u_plus) == (b.in_e, b.in_u, b.in_e_plus, b.in_u_plus)
        assert {s for s in alt_paths(phi) if s.length} == {s for s in alt_paths(encoded) if s.length}
