"""
Tests for chain steps, chains and the chain builder.
"""

import pytest

from prenexkit.certificates import EMPTY, Certificate, sigma_dne, u_plus_dns
from prenexkit.chain import (
    ChainBuilder,
    ChainStep,
    EquivalenceChain,
    ValidityScope,
    nn_lift,
)
from prenexkit.errors import ChainError
from prenexkit.formula import Atom, Exists, Forall, Not, Var, nn
from prenexkit.parser import parse_formula


A, B, C = Atom("A"), Atom("B"), Atom("C")


class TestEquivalenceChain:
    """Chain value objects."""

    def test_empty_chain(self):
        """A chain with no steps ends at its source."""
        chain = EquivalenceChain(A)
        assert chain.final == A
        assert len(chain) == 0
        assert chain.certificate == EMPTY
        assert chain.scope == ValidityScope.PURE_LOGIC

    def test_not_contiguous(self):
        """Steps must continue where the previous one ended."""
        with pytest.raises(ChainError):
            EquivalenceChain(A, (ChainStep(A, B, "one"), ChainStep(C, A, "two")))

    def test_certificate_is_normalized_union(self):
        """The chain certificate joins the steps' tags, minus HA-provable ones."""
        chain = EquivalenceChain(A, (
            ChainStep(A, B, "one", certificate=Certificate.of(sigma_dne(1), sigma_dne(0))),
            ChainStep(B, C, "two", certificate=Certificate.of(u_plus_dns(1), sigma_dne(1))),
        ))
        assert chain.certificate == Certificate.of(sigma_dne(1), u_plus_dns(1))

    def test_widest_scope(self):
        """The chain scope is the widest step scope."""
        chain = EquivalenceChain(A, (
            ChainStep(A, B, "one", scope=ValidityScope.NEEDS_ZERO_ONE),
            ChainStep(B, C, "two"),
        ))
        assert chain.scope == ValidityScope.NEEDS_ZERO_ONE

    def test_nn_lift(self):
        """Lifting double-negates every formula and every tag."""
        chain = EquivalenceChain(A, (ChainStep(A, B, "one", certificate=Certificate.of(sigma_dne(1))),))
        lifted = nn_lift(chain)
        assert lifted.source == nn(A)
        assert lifted.final == nn(B)
        assert lifted.certificate == Certificate.of(sigma_dne(1).lifted())

    def test_within_context(self):
        """within applies a one-hole context to both ends of every step."""
        chain = EquivalenceChain(A, (ChainStep(A, B, "one"),))
        wrapped = chain.within(Not)
        assert wrapped.source == Not(A)
        assert wrapped.steps[0].after == Not(B)

    def test_then(self):
        """Concatenation keeps every step in order."""
        first = EquivalenceChain(A, (ChainStep(A, B, "one"),))
        second = EquivalenceChain(B, (ChainStep(B, C, "two"),))
        joined = first.then(second)
        assert [s.justification for s in joined.steps] == ["one", "two"]
        assert joined.final == C

    def test_then_rejects_gap(self):
        """Concatenating chains that do not meet fails."""
        first = EquivalenceChain(A, (ChainStep(A, B, "one"),))
        with pytest.raises(ChainError):
            first.then(EquivalenceChain(C))


class TestChainBuilder:
    """Recording steps."""

    def test_drops_no_op(self):
        """A step that changes nothing is not recorded."""
        builder = ChainBuilder(A)
        builder.step(A, "noop")
        builder.step(B, "real")
        chain = builder.build()
        assert len(chain) == 1
        assert chain.steps[0].justification == "real"

    def test_tags_normalized(self):
        """Step tags are normalized when recorded."""
        builder = ChainBuilder(A)
        builder.step(B, "r", tags=(sigma_dne(0), sigma_dne(2)))
        assert builder.build().steps[0].certificate == Certificate.of(sigma_dne(2))

    def test_splice_alpha(self):
        """Splicing a chain whose source is α-equal inserts a renaming step."""
        source = parse_formula("forall x. P(x)")
        builder = ChainBuilder(source)
        renamed = Forall("y", Atom("P", (Var("y"),)))
        sub = EquivalenceChain(renamed, (ChainStep(renamed, Exists("y", Atom("P", (Var("y"),))), "swap"),))
        builder.splice(sub)
        chain = builder.build()
        assert [s.justification for s in chain.steps] == ["alpha", "swap"]

    def test_splice_under_context(self):
        """A spliced sub-chain may sit inside a context."""
        builder = ChainBuilder(Not(A))
        builder.splice(EquivalenceChain(A, (ChainStep(A, B, "inner"),)), context=Not)
        assert builder.current == Not(B)

    def test_splice_mismatch(self):
        """A sub-chain starting elsewhere is rejected."""
        builder = ChainBuilder(A)
        with pytest.raises(ChainError):
            builder.splice(EquivalenceChain(C, (ChainStep(C, B, "x"),)))
