"""
Chain module - replayable sequences of rewrite steps.

Responsible for:
- ValidityScope and StepRelation of a step
- ChainStep / EquivalenceChain value objects
- Lifting a chain under a context or under double negation
- ChainBuilder, which the engine uses to record steps and splice
  sub-chains into a surrounding formula
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

from prenexkit.certificates import Certificate, PrincipleTag
from prenexkit.errors import ChainError
from prenexkit.formula import Formula, alpha_eq, nn


class ValidityScope(str, Enum):
    """Finite structures on which a step is classically valid."""
    PURE_LOGIC = "pure-logic"
    NEEDS_ZERO_ONE = "needs-zero-one"
    NEEDS_PAIRING = "needs-pairing"


class StepRelation(str, Enum):
    """How after relates to before."""
    EQUIV = "equiv"
    IMPLIES = "implies"
    STAR_INSTANCE = "star-instance"
    GENERALIZE = "generalize"


_SCOPE_ORDER = {
    ValidityScope.PURE_LOGIC: 0,
    ValidityScope.NEEDS_ZERO_ONE: 1,
    ValidityScope.NEEDS_PAIRING: 2,
}


def widest_scope(scopes: Iterable[ValidityScope]) -> ValidityScope:
    return max(scopes, key=_SCOPE_ORDER.__getitem__, default=ValidityScope.PURE_LOGIC)


@dataclass(frozen=True)
class ChainStep:
    """One rewrite: before -> after, named after the rule that licenses it."""
    before: Formula
    after: Formula
    justification: str
    scope: ValidityScope = ValidityScope.PURE_LOGIC
    certificate: Certificate = field(default_factory=Certificate)
    relation: StepRelation = StepRelation.EQUIV
    variable: Optional[str] = None

    def mapped(self, context: Callable[[Formula], Formula], lift: bool = False) -> "ChainStep":
        certificate = self.certificate.lifted() if lift else self.certificate
        return ChainStep(
            before=context(self.before),
            after=context(self.after),
            justification=self.justification,
            scope=self.scope,
            certificate=certificate.normalized(),
            relation=self.relation,
            variable=self.variable,
        )


@dataclass(frozen=True)
class EquivalenceChain:
    """
    Ordered steps from source to final.

    steps[0].before is source, each step's after is the next step's before,
    and the chain certificate is the union of the step certificates.
    """
    source: Formula
    steps: tuple = ()

    def __post_init__(self):
        current = self.source
        for index, step in enumerate(self.steps):
            if step.before != current:
                raise ChainError(f"Step {index} does not start where the previous step ended")
            current = step.after

    @property
    def final(self) -> Formula:
        return self.steps[-1].after if self.steps else self.source

    @property
    def certificate(self) -> Certificate:
        return Certificate.union_all(s.certificate for s in self.steps).normalized()

    @property
    def scope(self) -> ValidityScope:
        return widest_scope(s.scope for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def within(self, context: Callable[[Formula], Formula], lift: bool = False) -> "EquivalenceChain":
        """Apply a one-hole context to every formula of the chain."""
        return EquivalenceChain(
            context(self.source),
            tuple(s.mapped(context, lift) for s in self.steps),
        )

    def nn_lift(self) -> "EquivalenceChain":
        """Chain from ¬¬source to ¬¬final whose tags are all double-negated."""
        return self.within(nn, lift=True)

    def then(self, other: "EquivalenceChain") -> "EquivalenceChain":
        """
        Concatenate two chains.

        Raises:
            ChainError: If other does not start at this chain's final
                        formula (up to renaming of bound variables).
        """
        builder = ChainBuilder(self.source)
        builder.splice(self)
        builder.splice(other)
        return builder.build()


def nn_lift(chain: EquivalenceChain) -> EquivalenceChain:
    return chain.nn_lift()


class ChainBuilder:
    """Accumulates steps from a fixed source formula."""

    def __init__(self, source: Formula):
        self.source = source
        self.current = source
        self._steps: list = []

    def step(
        self,
        after: Formula,
        justification: str,
        tags: Iterable[PrincipleTag] = (),
        scope: ValidityScope = ValidityScope.PURE_LOGIC,
        relation: StepRelation = StepRelation.EQUIV,
        variable: Optional[str] = None,
    ) -> Formula:
        """Record current -> after; a step that changes nothing is dropped."""
        if after == self.current:
            return after
        self._steps.append(ChainStep(
            before=self.current,
            after=after,
            justification=justification,
            scope=scope,
            certificate=Certificate.of(*tags).normalized(),
            relation=relation,
            variable=variable,
        ))
        self.current = after
        return after

    def splice(
        self,
        chain: EquivalenceChain,
        context: Optional[Callable[[Formula], Formula]] = None,
        lift: bool = False,
    ) -> Formula:
        """
        Append a sub-chain, optionally under a context.

        Args:
            chain: Chain whose source (in context) is the current formula.
            context: One-hole context; identity when None.
            lift: Double-negate the sub-chain's tags (context under ¬¬).

        Returns:
            The new current formula.

        Raises:
            ChainError: If the sub-chain starts elsewhere.
        """
        if context is not None or lift:
            chain = chain.within(context or (lambda f: f), lift)
        if chain.source != self.current:
            if not alpha_eq(chain.source, self.current):
                raise ChainError("Sub-chain does not start at the current formula")
            self.step(chain.source, "alpha")
        self._steps.extend(chain.steps)
        self.current = chain.final
        return self.current

    def build(self) -> EquivalenceChain:
        return EquivalenceChain(self.source, tuple(self._steps))
