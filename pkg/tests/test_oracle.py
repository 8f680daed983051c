"""
Tests for the finite-model oracle.
"""

import pytest
from hypothesis import given

from prenexkit.certificates import Certificate
from prenexkit.chain import ChainStep, EquivalenceChain, StepRelation, ValidityScope
from prenexkit.errors import PrenexKitError, ScopeUnsupportedError, UnboundVariableError
from prenexkit.formula import STAR, Atom, Bottom, Forall, Implies
from prenexkit.oracle import (
    FiniteStructure,
    Oracle,
    cantor_pair,
    cantor_unpair,
    evaluate,
    inflated_bound,
    replace_star,
    truth_table_equiv,
)
from prenexkit.parser import parse_formula
from prenexkit.signature import default_signature, infer_signature

from tests.strategies import propositional


def f(text: str):
    return parse_formula(text)


def structure(bound: int, tables=None, *formulas):
    signature = infer_signature(formulas, default_signature())
    return FiniteStructure(bound, signature, tables or {})


class TestPairing:
    """Cantor pairing helpers."""

    def test_pair_values(self):
        assert [cantor_pair(0, 0), cantor_pair(0, 1), cantor_pair(1, 0), cantor_pair(1, 1)] == [0, 1, 2, 4]

    def test_unpair_inverts(self):
        """unpair(pair(x, y)) = (x, y) on a small grid."""
        for x in range(6):
            for y in range(6):
                assert cantor_unpair(cantor_pair(x, y)) == (x, y)

    def test_inflated_bound(self):
        """Width 1 leaves the bound alone; width 2 covers pair(B-1, B-1)."""
        assert inflated_bound(3, 1) == 3
        assert inflated_bound(2, 2) == cantor_pair(1, 1) + 1


class TestEvaluate:
    """Tarski semantics on one structure."""

    def test_opaque_tables(self):
        """Opaque predicates hold exactly on their table rows."""
        phi = f("exists x. P(x)")
        assert evaluate(phi, structure(2, {"P": frozenset({(1,)})}, phi))
        assert not evaluate(phi, structure(2, {"P": frozenset()}, phi))

    def test_zero_ary(self):
        """A letter holds iff () is in its table."""
        phi = f("A")
        assert evaluate(phi, structure(2, {"A": frozenset({()})}, phi))
        assert not evaluate(phi, structure(2, {}, phi))

    def test_saturating_arithmetic(self):
        """S and add saturate at B-1."""
        s = structure(3)
        assert evaluate(f("S(S(S(0))) = add(1, 1)"), s)
        assert evaluate(f("forall x. le(x, S(S(0)))"), s)

    def test_zero_one_distinct(self):
        """0 ≠ 1 when B ≥ 2 and 0 = 1 when B = 1."""
        assert evaluate(f("~(0 = 1)"), structure(2))
        assert evaluate(f("0 = 1"), structure(1))

    def test_free_variable_env(self):
        """Free variables take their values from env."""
        assert evaluate(f("x = 1"), structure(3), {"x": 1})
        assert not evaluate(f("x = 1"), structure(3), {"x": 2})

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError):
            evaluate(f("x = 1"), structure(3))

    def test_pairing_projections(self):
        """Under an inflated quantifier bound every pair has a code."""
        signature = default_signature()
        s = FiniteStructure(2, signature, {}, quantifier_bound=inflated_bound(2, 2))
        phi = f("forall x. forall y. exists z. proj1(z) = x & proj2(z) = y")
        assert evaluate(phi, s)

    def test_bad_bound(self):
        with pytest.raises(PrenexKitError):
            FiniteStructure(0, default_signature())


class TestOracleChecks:
    """check_equiv and check_valid."""

    def test_commuted_disjunction(self, oracle):
        """P ∨ Q ≡ Q ∨ P on every structure."""
        report = oracle.check_equiv(f("P(x) | Q(x)"), f("Q(x) | P(x)"))
        assert report.passed
        assert report.exhaustive
        assert report.structures_examined > 0

    def test_counterexample(self, oracle):
        """∀x∃y.P(x,y) and ∃y∀x.P(x,y) differ; the counterexample shows both values."""
        report = oracle.check_equiv(f("forall x. exists y. P(x,y)"), f("exists y. forall x. P(x,y)"))
        assert not report.passed
        ce = report.counterexample
        assert ce is not None
        assert ce.values == (True, False)
        assert "B=" in ce.describe()

    def test_valid_excluded_middle(self, oracle):
        """Classical validity of P ∨ ¬P."""
        assert oracle.check_valid(f("P(x) | ~P(x)")).passed

    def test_invalid(self, oracle):
        assert not oracle.check_valid(f("forall x. P(x)")).passed

    def test_zero_one_scope(self, oracle):
        """The selector form of a disjunction needs 0 ≠ 1; B=1 is skipped with a note."""
        left = f("A | B")
        right = f("exists k. (k = 0 -> A) & (~(k = 0) -> B)")
        report = oracle.check_equiv(left, right, ValidityScope.NEEDS_ZERO_ONE, sizes=(1, 2))
        assert report.passed
        assert any("B=1" in note for note in report.notes)
        assert not oracle.check_equiv(left, right, sizes=(1,)).passed

    def test_pairing_scope(self, oracle):
        """Contracting two quantifiers is an equivalence under the pairing scope."""
        left = f("exists x. exists y. P(x,y)")
        right = f("exists z. P(proj1(z), proj2(z))")
        assert oracle.check_equiv(left, right, ValidityScope.NEEDS_PAIRING).passed

    def test_pairing_scope_without_symbols(self):
        """needs-pairing without pairing symbols is unsupported."""
        oracle = Oracle(default_signature().without_pairing())
        with pytest.raises(ScopeUnsupportedError):
            oracle.check_valid(f("A | ~A"), ValidityScope.NEEDS_PAIRING)

    def test_unknown_scope(self, oracle):
        with pytest.raises(ScopeUnsupportedError):
            oracle.check_valid(f("A"), "everywhere")

    def test_sampling(self):
        """Too many opaque predicates switch to seeded sampling."""
        oracle = Oracle(sizes=(2,), atom_budget=1, samples=16)
        report = oracle.check_equiv(f("P(x) & Q(x)"), f("Q(x) & P(x)"))
        assert report.passed
        assert not report.exhaustive
        assert report.notes

    def test_interpretation_limit(self):
        """Three binary predicates at B=2 are swept; two at B=3 are sampled."""
        left, right = f("P(x,y) & Q(x,y) & R(x,y)"), f("R(x,y) & Q(x,y) & P(x,y)")
        report = Oracle(sizes=(2,)).check_equiv(left, right)
        assert report.passed
        assert report.exhaustive
        assert report.structures_examined == 4096

        report = Oracle(sizes=(3,), samples=16).check_equiv(f("P(x,y) & Q(x,y)"), f("Q(x,y) & P(x,y)"))
        assert report.passed
        assert not report.exhaustive
        assert report.structures_examined == 16

    def test_bad_sizes(self):
        with pytest.raises(PrenexKitError):
            Oracle(sizes=())


class TestReplay:
    """Replaying chains step by step."""

    def test_failing_step_index(self, oracle):
        """A wrong step is reported with its index."""
        a, b = f("P(x) & Q(x)"), f("Q(x) & P(x)")
        wrong = f("P(x) | Q(x)")
        chain = EquivalenceChain(a, (ChainStep(a, b, "comm"), ChainStep(b, wrong, "oops")))
        report = oracle.replay_chain(chain)
        assert not report.passed
        assert report.failed_step == 1

    def test_implies_step(self, oracle):
        """An implies step is checked as a one-way validity."""
        a, b = f("P(x) & Q(x)"), f("P(x)")
        chain = EquivalenceChain(a, (ChainStep(a, b, "weaken", relation=StepRelation.IMPLIES),))
        assert oracle.replay_chain(chain).passed

    def test_generalize_step(self, oracle):
        """A generalize step checks ∀v.before → after."""
        before = f("P(x)")
        after = f("P(0)")
        step = ChainStep(before, after, "instance", relation=StepRelation.GENERALIZE, variable="x")
        assert oracle.check_step(step).passed

    def test_star_instance(self, oracle):
        """A star-instance step holds when both ⊤ and ⊥ instances imply after."""
        before = Implies(STAR, Atom("A"))
        step = ChainStep(before, Atom("A"), "cases", relation=StepRelation.STAR_INSTANCE,
                         certificate=Certificate())
        assert oracle.check_step(step).passed

    def test_replace_star(self):
        assert replace_star(Implies(STAR, STAR), Bottom()) == Implies(Bottom(), Bottom())


class TestTruthTable:
    """The independent propositional oracle."""

    def test_de_morgan(self):
        assert truth_table_equiv(f("~(p & q)"), f("~p | ~q"))
        assert not truth_table_equiv(f("p -> q"), f("q -> p"))

    def test_rejects_quantifiers(self):
        with pytest.raises(PrenexKitError):
            truth_table_equiv(f("forall x. P(x)"), f("A"))

    def test_rejects_predicates(self):
        with pytest.raises(PrenexKitError):
            truth_table_equiv(f("P(x)"), f("A"))

    @given(propositional(), propositional())
    def test_agrees_with_oracle(self, phi, psi):
        """On 0-ary formulas the two oracles agree."""
        oracle = Oracle(sizes=(1,))
        assert oracle.check_equiv(phi, psi).passed == truth_table_equiv(phi, psi)

    def test_forall_over_letter(self):
        """A quantifier over a closed body changes nothing."""
        assert Oracle().check_equiv(Forall("x", Atom("A")), Atom("A")).passed
