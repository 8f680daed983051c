"""
Translations module - negative translation and the A-translation.

Responsible for:
- Kuroda's negative translation (kuroda_inner, kuroda)
- The A-translation over the signature extended with the placeholder
  atom `star`, and substitution for the placeholder
- kuroda_equivalence_chain: φ^N -> φ for prenex φ with its DNE tags
- conservation_chain: the derivation of ψ → ∀x∃y φ1 over HA + Sigma_k-LEM
  from its classical validity, as a replayable chain

Placeholder conventions: ¬_*φ is φ → star, and ⊥ translates to ⊥ ∨ star,
which simplify_star_bottom rewrites to star.
"""

import logging
from typing import Sequence, Union

from prenexkit.certificates import PrincipleTag, pi_dne, sigma_dne, sigma_lem
from prenexkit.chain import ChainBuilder, EquivalenceChain, StepRelation
from prenexkit.classify import ShapeKind, in_pi, in_sigma, prenex_shape
from prenexkit.errors import NotPrenexError, ShapeMismatchError, VariableCaptureError
from prenexkit.formula import (
    STAR,
    STAR_NAME,
    And,
    Atom,
    Bottom,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    build_prefix,
    close_block,
    free_vars,
    is_prenex,
    map_subformulas,
    nn,
    rename_bound,
    split_prefix,
)

logger = logging.getLogger(__name__)


# --- Negative translation ---

def kuroda_inner(phi: Formula) -> Formula:
    """φ_*: insert ¬¬ directly under every universal quantifier."""
    if isinstance(phi, (Bottom, Atom)):
        return phi
    if isinstance(phi, Not):
        return Not(kuroda_inner(phi.body))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(kuroda_inner(phi.left), kuroda_inner(phi.right))
    if isinstance(phi, Exists):
        return Exists(phi.var, kuroda_inner(phi.body))
    return Forall(phi.var, nn(kuroda_inner(phi.body)))


def kuroda(phi: Formula) -> Formula:
    """φ^N = ¬¬φ_*."""
    return nn(kuroda_inner(phi))


def _dne_tag(phi: Formula) -> PrincipleTag:
    """DNE instance needed to drop ¬¬ in front of a prenex formula."""
    shape = prenex_shape(phi)
    if shape.level == 0 or shape.kind == ShapeKind.SIGMA:
        return sigma_dne(shape.level)
    return pi_dne(shape.level)


def kuroda_equivalence_chain(phi: Formula, k: int) -> EquivalenceChain:
    """
    Chain φ^N -> φ for prenex φ.

    The double negations are removed innermost first. For φ in Sigma_k the
    certificate lies within Sigma_k-DNE, for φ in Pi_k within
    Sigma_{k-1}-DNE.

    Raises:
        NotPrenexError: If phi is not prenex.
        ShapeMismatchError: If phi is neither Sigma_k nor Pi_k.
    """
    if not is_prenex(phi):
        raise NotPrenexError("The Kuroda equivalence chain needs a prenex formula")
    if not (in_sigma(phi, k) or in_pi(phi, k)):
        raise ShapeMismatchError(f"Formula is neither Sigma_{k} nor Pi_{k}")
    prefix, matrix = split_prefix(phi)
    flagged = [quantifier is Forall for quantifier, _ in prefix]

    def render() -> Formula:
        body = matrix
        for (quantifier, var), double in zip(reversed(prefix), reversed(flagged)):
            body = quantifier(var, nn(body) if double else body)
        return body

    builder = ChainBuilder(kuroda(phi))
    for index in reversed(range(len(prefix))):
        if not flagged[index]:
            continue
        flagged[index] = False
        rest = build_prefix(prefix[index + 1:], matrix)
        builder.step(nn(render()), "kuroda-forall", [_dne_tag(rest)])
    builder.step(phi, "dne", [_dne_tag(phi)])
    return builder.build()


# --- A-translation ---

def _is_star(phi: Formula) -> bool:
    return isinstance(phi, Atom) and phi.pred == STAR_NAME and not phi.args


def a_translate(phi: Formula) -> Formula:
    """φ^*: every prime p becomes p ∨ star, ⊥ included; ¬θ is read as θ → ⊥."""
    if isinstance(phi, (Bottom, Atom)):
        return Or(phi, STAR)
    if isinstance(phi, Not):
        return Implies(a_translate(phi.body), Or(Bottom(), STAR))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(a_translate(phi.left), a_translate(phi.right))
    return type(phi)(phi.var, a_translate(phi.body))


def neg_star(phi: Formula) -> Formula:
    """¬_*φ = φ → star."""
    return Implies(phi, STAR)


def simplify_star_bottom(phi: Formula) -> Formula:
    """Rewrite every ⊥ ∨ star to star."""
    return map_subformulas(
        phi,
        lambda f: STAR if isinstance(f, Or) and isinstance(f.left, Bottom) and _is_star(f.right) else f,
    )


def substitute_star(phi: Formula, psi: Formula) -> Formula:
    """
    Replace every occurrence of the placeholder in φ by ψ.

    Args:
        phi: Formula over the signature with star.
        psi: Replacement formula.

    Returns:
        φ[ψ/star].

    Raises:
        VariableCaptureError: If a free variable of ψ is bound at an
                              occurrence of star in φ.
    """
    incoming = free_vars(psi)

    def check(f: Formula, bound: frozenset) -> None:
        if _is_star(f):
            captured = bound & incoming
            if captured:
                raise VariableCaptureError(
                    f"Substituting for star would capture {', '.join(sorted(captured))}"
                )
        elif isinstance(f, Not):
            check(f.body, bound)
        elif isinstance(f, (And, Or, Implies)):
            check(f.left, bound)
            check(f.right, bound)
        elif isinstance(f, (Forall, Exists)):
            check(f.body, bound | {f.var})

    check(phi, frozenset())
    return map_subformulas(phi, lambda f: psi if _is_star(f) else f)


def star_facts(phi: Formula, var: str) -> dict:
    """
    The placeholder laws that hold over HA with star, as formulas.

    Returns:
        Mapping of law name to formula: double-negation introduction,
        the quantifier exchange, triple negation and the ∃-shift.
    """
    return {
        "nn-intro": Implies(phi, neg_star(neg_star(phi))),
        "forall-exists": And(
            Implies(Forall(var, neg_star(phi)), neg_star(Exists(var, phi))),
            Implies(neg_star(Exists(var, phi)), Forall(var, neg_star(phi))),
        ),
        "triple-negation": Implies(neg_star(neg_star(neg_star(phi))), neg_star(phi)),
        "exists-shift": Implies(
            Exists(var, neg_star(neg_star(phi))),
            neg_star(neg_star(Exists(var, phi))),
        ),
    }


# --- Conservation ---

def _names(variables: Union[str, Sequence[str]]) -> tuple:
    return (variables,) if isinstance(variables, str) else tuple(variables)


def conservation_chain(
    psi: Formula,
    phi1: Formula,
    k: int,
    x: Union[str, Sequence[str]] = "x",
    y: Union[str, Sequence[str]] = "y",
) -> EquivalenceChain:
    """
    Derivation of ψ → ∀x∃y φ1 in HA + Sigma_k-LEM from its classical validity.

    The chain starts at the classical implication, passes through its
    negative translation and its A-translation, substitutes ∃y φ1 for the
    placeholder and ends at the same implication. Steps are related by
    equivalence, implication, placeholder instantiation or generalization.

    Args:
        psi: Prenex hypothesis.
        phi1: Pi_k matrix of the conclusion.
        k: Level of phi1.
        x: Universally bound variable(s) of the conclusion.
        y: Existentially bound variable(s) of the conclusion.

    Returns:
        The chain; its final formula is syntactically ψ → ∀x∃y φ1.

    Raises:
        NotPrenexError: If psi is not prenex.
        ShapeMismatchError: If phi1 is not Pi_k (the conclusion would lie
                            above Pi_{k+2}).
        VariableCaptureError: If a variable of x occurs free in psi.
    """
    xs, ys = _names(x), _names(y)
    if not is_prenex(psi):
        raise NotPrenexError("The hypothesis of the conservation chain must be prenex")
    if not in_pi(phi1, k):
        raise ShapeMismatchError(f"Conclusion matrix is not Pi_{k}; the conclusion is not Pi_{k + 2}")
    captured = set(xs) & free_vars(psi)
    if captured:
        raise VariableCaptureError(
            f"{', '.join(sorted(captured))} occurs free in the hypothesis"
        )

    witness = close_block(Exists, ys, phi1)
    target = close_block(Forall, xs, witness)
    hygienic = rename_bound(psi, free_vars(witness) | set(xs))
    inner = kuroda_inner(phi1)
    witness_inner = close_block(Exists, ys, inner)
    lem = [sigma_lem(k)]
    logger.debug(f"Conservation chain at level {k} for {len(xs)} universal variable(s)")

    builder = ChainBuilder(Implies(psi, target))
    builder.step(Implies(hygienic, target), "alpha")
    builder.step(kuroda(Implies(hygienic, target)), "negative-translation")
    builder.step(
        Implies(kuroda(hygienic), close_block(Forall, xs, nn(witness_inner))),
        "negative-translation",
    )
    builder.step(
        Implies(kuroda(hygienic), nn(witness_inner)),
        "instantiate", relation=StepRelation.IMPLIES,
    )
    translated = a_translate(builder.current)
    builder.step(translated, "a-translation", relation=StepRelation.IMPLIES)
    starred = simplify_star_bottom(translated)
    builder.step(starred, "star-bottom")
    starred_goal = simplify_star_bottom(a_translate(nn(witness_inner)))
    builder.step(Implies(hygienic, starred_goal), "hypothesis-a-translation", relation=StepRelation.IMPLIES)
    builder.step(
        Implies(hygienic, neg_star(neg_star(close_block(Exists, ys, Or(inner, STAR))))),
        "star-distribution", lem,
    )
    builder.step(
        Implies(hygienic, neg_star(neg_star(witness_inner))),
        "star-absorb",
    )
    builder.step(
        substitute_star(builder.current, witness),
        "substitution", relation=StepRelation.STAR_INSTANCE,
    )
    builder.step(
        Implies(hygienic, witness),
        "kuroda-elimination", lem, relation=StepRelation.IMPLIES,
    )
    for index in reversed(range(len(xs))):
        builder.step(
            Implies(hygienic, close_block(Forall, xs[index:], witness)),
            "generalize", relation=StepRelation.GENERALIZE, variable=xs[index],
        )
    builder.step(Implies(psi, target), "alpha")
    return builder.build()
