"""
Prenex module - prenexation of arithmetic formulas with certificates.

Responsible for:
- The prenex combinators (padding, contraction, conjunction, selector
  disjunction, double-negated disjunction, negation pushing)
- The structural inductions that turn E_k^+ / U_k^+ formulas into
  Sigma_k / Pi_k formulas, with and without double negation
- The disjunction-free pipeline
- Recording every rewrite as an EquivalenceChain whose union of tags is
  the returned Certificate

Every public operation returns a PrenexResult. The induction visits
subformulas left to right, so outputs are reproducible.
"""

import logging
from collections import defaultdict
from typing import Callable, NamedTuple, Optional, Union

from prenexkit.certificates import (
    Certificate,
    pi_dne,
    pi_or_pi_dne,
    sigma_dne,
    u_plus_dns,
)
from prenexkit.chain import ChainBuilder, EquivalenceChain, ValidityScope
from prenexkit.classify import (
    ShapeKind,
    in_e_plus,
    in_pi,
    in_shape,
    in_sigma,
    in_u_plus,
    least_e_plus,
    least_u_plus,
    pi_level,
    sigma_level,
)
from prenexkit.errors import (
    ContainsOrError,
    NotInClassError,
    NotPrenexError,
    PairingSymbolsMissingError,
    ShapeMismatchError,
    TargetBelowCurrentLevelError,
)
from prenexkit.formula import (
    And,
    App,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Var,
    all_vars,
    blocks,
    build_prefix,
    close_block,
    contains_or,
    dual,
    equals,
    fresh_name,
    free_vars,
    is_prenex,
    map_subformulas,
    nn,
    quantifier_free,
    rename_bound,
    split_block,
    split_prefix,
    substitute_many,
)
from prenexkit.signature import Signature, default_signature

logger = logging.getLogger(__name__)

MODES = ("e", "u", "df-e", "df-u")


class PrenexResult(NamedTuple):
    """Output formula, the principles it consumed, and the chain that proves it."""
    formula: Formula
    certificate: Certificate
    chain: EquivalenceChain


def _identity(phi: Formula) -> Formula:
    return phi


def _unwrap_nn(phi: Formula) -> Formula:
    return phi.body.body


def _kind_quantifier(kind: Union[ShapeKind, str]):
    return Exists if ShapeKind(kind) == ShapeKind.SIGMA else Forall


def tidy(phi: Formula) -> Formula:
    """Remove double negations in front of quantifier-free subformulas."""
    def strip(f: Formula) -> Formula:
        if isinstance(f, Not) and isinstance(f.body, Not) and quantifier_free(f.body.body):
            return f.body.body
        return f

    return map_subformulas(phi, strip)


class _Run:
    """
    State of one top-level transformation.

    All bound variables of the input are distinct and differ from its free
    variables, so quantifiers can be pulled out without renaming. Fresh
    names (selector and dummy variables) are drawn from `used`.
    """

    def __init__(self, signature: Signature, *formulas: Formula):
        self.signature = signature
        self.used: set = set()
        for phi in formulas:
            self.used |= all_vars(phi)

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.used)
        self.used.add(name)
        return name

    # --- Combinators ---

    def merge(
        self,
        a: Formula,
        c: Formula,
        kind,
        combine: Callable[[Formula, Formula], Formula] = And,
        lead: tuple = (),
    ) -> Formula:
        """
        Pull the prefixes of two prenex formulas in front of combine(ma, mc).

        Blocks are interleaved so that the result starts with `kind` and
        alternates no more often than the longer of the two prefixes.
        """
        positions: dict = defaultdict(list)
        positions[0].extend(lead)
        for bl in (blocks(a), blocks(c)):
            offset = 0 if not bl or bl[0][0] is kind else 1
            for index, (_, variables) in enumerate(bl):
                positions[offset + index].extend(variables)
        prefix = []
        for j in range(max(positions) + 1 if positions else 0):
            quantifier = kind if j % 2 == 0 else dual(kind)
            prefix.extend((quantifier, var) for var in positions[j])
        _, ma = split_prefix(a)
        _, mc = split_prefix(c)
        return build_prefix(prefix, combine(ma, mc))

    def neg_push(self, phi: Formula) -> EquivalenceChain:
        """Chain ¬φ -> ψ pushing the negation through the prefix of a prenex φ."""
        builder = ChainBuilder(Not(phi))
        bl = blocks(phi)
        done: list = []
        rest = phi
        for index, (quantifier, variables) in enumerate(bl):
            remaining = len(bl) - index
            for _ in variables:
                rest = rest.body
            done.extend((dual(quantifier), var) for var in variables)
            tags = [sigma_dne(remaining)] if quantifier is Forall else []
            builder.step(build_prefix(done, Not(rest)), "negation-prenex", tags)
        return builder.build()

    def selector(self, phi1: Formula, phi2: Formula) -> EquivalenceChain:
        """Chain φ1 ∨ φ2 -> ∃s((s=0 → φ1) ∧ (¬s=0 → φ2)) with the prefixes pulled out."""
        sig = self.signature
        s = self.fresh("k")
        is_zero = equals(Var(s), App(sig.zero), sig.equality)

        def guarded(m1: Formula, m2: Formula) -> Formula:
            return And(Implies(is_zero, m1), Implies(Not(is_zero), m2))

        builder = ChainBuilder(Or(phi1, phi2))
        builder.step(
            Exists(s, guarded(phi1, phi2)), "selector",
            scope=ValidityScope.NEEDS_ZERO_ONE,
        )
        builder.step(
            self.merge(phi1, phi2, Exists, combine=guarded, lead=(s,)),
            "pull-quantifiers",
        )
        return builder.build()

    def sigma_disj(self, phi1: Formula, phi2: Formula) -> EquivalenceChain:
        level = max(sigma_level(phi1), sigma_level(phi2))
        if level == 0:
            return EquivalenceChain(Or(phi1, phi2))
        return self.selector(phi1, phi2)

    def dn_disj(self, a: Formula, c: Formula) -> EquivalenceChain:
        """Chain ¬¬(a ∨ c) -> ¬¬d for Pi formulas a, c and Pi formula d."""
        k = max(pi_level(a), pi_level(c))
        x1, rho1 = split_block(a, Forall)
        x2, rho2 = split_block(c, Forall)
        builder = ChainBuilder(nn(Or(a, c)))
        prefix = x1 + x2
        if prefix:
            builder.step(
                nn(close_block(Forall, prefix, Or(rho1, rho2))),
                "forall-disjunction",
                [sigma_dne(k - 1).lifted()],
            )
        builder.splice(
            self.sigma_disj(rho1, rho2),
            lambda h: nn(close_block(Forall, prefix, h)),
        )
        return builder.build()

    # --- Pi_k from U_k^+ ---

    def pu(self, phi: Formula, df: bool = False) -> EquivalenceChain:
        """Chain φ -> φ' with φ' in Pi_k for φ in U_k^+."""
        if is_prenex(phi):
            return EquivalenceChain(phi)
        k = least_u_plus(phi)
        logger.debug(f"pu[{type(phi).__name__}] k={k} df={df}")
        builder = ChainBuilder(phi)

        if isinstance(phi, And):
            a = builder.splice(self.pu(phi.left, df), lambda h: And(h, phi.right)).left
            c = builder.splice(self.pu(phi.right, df), lambda h: And(a, h)).right
            builder.step(self.merge(a, c, Forall), "conj-prenex")

        elif isinstance(phi, Or):
            a = builder.splice(self.pu(phi.left, df), lambda h: Or(h, phi.right)).left
            c = builder.splice(self.pu(phi.right, df), lambda h: Or(a, h)).right
            x1, rho1 = split_block(a, Forall)
            x2, rho2 = split_block(c, Forall)
            prefix = x1 + x2
            builder.step(
                close_block(Forall, prefix, Or(rho1, rho2)),
                "forall-disjunction",
                [pi_or_pi_dne(k)] if prefix else [],
            )
            builder.splice(self.sigma_disj(rho1, rho2), lambda h: close_block(Forall, prefix, h))

        elif isinstance(phi, Implies):
            left = phi.left
            r = builder.splice(self.pu(phi.right, df), lambda h: Implies(left, h)).right
            x2, rho2 = split_block(r, Forall)
            if is_prenex(left):
                x1, rho1 = split_block(left, Exists)
                inner = Implies(rho1, rho2)
                builder.step(close_block(Forall, x1 + x2, inner), "pull-quantifiers")
            else:
                builder.step(Implies(nn(left), r), "dne-consequent", [pi_dne(k)])
                l = builder.splice(self.ne(left, df), lambda h: Implies(Not(h), r))
                l = _unwrap_nn(l.left.body)
                x1, rho1 = split_block(l, Forall)
                inner = Implies(Not(rho1), rho2)
                builder.step(
                    close_block(Forall, x1 + x2, inner),
                    "pull-quantifiers",
                    [sigma_dne(k - 1), pi_dne(k)],
                )
            prefix = x1 + x2
            builder.splice(self.pe(inner, df), lambda h: close_block(Forall, prefix, h))

        elif isinstance(phi, Not):
            l = _unwrap_nn(builder.splice(self.ne(phi.body, df)))
            builder.step(l, "dne", [pi_dne(k)])

        elif isinstance(phi, Forall):
            builder.splice(self.pu(phi.body, df), lambda h: Forall(phi.var, h))

        else:
            return self.pe(phi, df)
        return builder.build()

    # --- Sigma_k from E_k^+ ---

    def pe(self, phi: Formula, df: bool = False) -> EquivalenceChain:
        """Chain φ -> φ' with φ' in Sigma_k for φ in E_k^+."""
        if is_prenex(phi):
            return EquivalenceChain(phi)
        k = least_e_plus(phi)
        logger.debug(f"pe[{type(phi).__name__}] k={k} df={df}")
        builder = ChainBuilder(phi)

        if isinstance(phi, And):
            a = builder.splice(self.pe(phi.left, df), lambda h: And(h, phi.right)).left
            c = builder.splice(self.pe(phi.right, df), lambda h: And(a, h)).right
            builder.step(self.merge(a, c, Exists), "conj-prenex")

        elif isinstance(phi, Or):
            a = builder.splice(self.pe(phi.left, df), lambda h: Or(h, phi.right)).left
            c = builder.splice(self.pe(phi.right, df), lambda h: Or(a, h)).right
            x1, rho1 = split_block(a, Exists)
            x2, rho2 = split_block(c, Exists)
            prefix = x1 + x2
            builder.step(close_block(Exists, prefix, Or(rho1, rho2)), "exists-disjunction")
            builder.splice(self.pu(Or(rho1, rho2), df), lambda h: close_block(Exists, prefix, h))

        elif isinstance(phi, Implies):
            left = phi.left
            r = builder.splice(self.pe(phi.right, df), lambda h: Implies(left, h)).right
            x2, rho2 = split_block(r, Exists)
            if quantifier_free(left):
                builder.step(close_block(Exists, x2, Implies(left, rho2)), "pull-quantifiers")
                builder.splice(self.pu(Implies(left, rho2), df), lambda h: close_block(Exists, x2, h))
                return builder.build()
            if df:
                l = builder.splice(self.pu(left, True), lambda h: Implies(h, r)).left
                tags = [sigma_dne(k), pi_dne(k - 1), sigma_dne(k - 1)]
            else:
                builder.step(Implies(nn(left), nn(r)), "dne-sandwich", [sigma_dne(k)])
                l = builder.splice(self.nnu(left), lambda h: Implies(h, nn(r))).left
                l = _unwrap_nn(l)
                tags = [pi_dne(k - 1), sigma_dne(k - 1)]
            x1, rho1 = split_block(l, Forall)
            prefix = x1 + x2
            builder.step(nn(close_block(Exists, prefix, Implies(rho1, rho2))), "pull-quantifiers", tags)
            xi = builder.splice(
                self.pu(Implies(rho1, rho2), df),
                lambda h: nn(close_block(Exists, prefix, h)),
                lift=True,
            )
            builder.step(_unwrap_nn(xi), "dne", [sigma_dne(k)])

        elif isinstance(phi, Forall):
            return self.pu(phi, df)

        elif isinstance(phi, Exists):
            builder.splice(self.pe(phi.body, df), lambda h: Exists(phi.var, h))

        else:
            body = phi.body
            if df:
                l = builder.splice(self.pu(body, True), Not).body
            else:
                inner = self.nnu(body)
                if len(inner):
                    builder.step(Not(nn(body)), "triple-negation")
                    builder.splice(inner, Not)
                    l = _unwrap_nn(inner.final)
                    builder.step(Not(l), "triple-negation")
                else:
                    l = body
            builder.splice(self.neg_push(l))
        return builder.build()

    # --- ¬φ ↔ ¬¬φ' with Pi_k φ' ---

    def ne(self, phi: Formula, df: bool = False) -> EquivalenceChain:
        """Chain ¬φ -> ¬¬φ' with φ' in Pi_k for φ in E_k^+."""
        if is_prenex(phi):
            return self._negated_prenex(phi)
        k = least_e_plus(phi)
        logger.debug(f"ne[{type(phi).__name__}] k={k} df={df}")
        builder = ChainBuilder(Not(phi))

        if isinstance(phi, And) and df:
            l0, r0 = phi.left, phi.right
            builder.step(nn(Implies(nn(l0), Not(r0))), "de-morgan")
            a = _unwrap_nn(builder.splice(
                self.ne(l0, True), lambda h: nn(Implies(Not(h), Not(r0))), lift=True,
            ).body.body.left.body)
            c = _unwrap_nn(builder.splice(
                self.ne(r0, True), lambda h: nn(Implies(Not(nn(a)), h)), lift=True,
            ).body.body.right)
            builder.step(nn(Implies(Not(a), c)), "double-negation")
            x1, rho1 = split_block(a, Forall)
            x2, rho2 = split_block(c, Forall)
            prefix = x1 + x2
            inner = Implies(Not(rho1), rho2)
            builder.step(
                nn(close_block(Forall, prefix, inner)),
                "pull-quantifiers",
                [sigma_dne(k - 1).lifted()],
            )
            builder.splice(
                self.pe(inner, True),
                lambda h: nn(close_block(Forall, prefix, h)),
                lift=True,
            )

        elif isinstance(phi, And):
            l0, r0 = phi.left, phi.right
            builder.step(nn(Or(Not(l0), Not(r0))), "de-morgan")
            a = _unwrap_nn(builder.splice(
                self.ne(l0), lambda h: nn(Or(h, Not(r0))), lift=True,
            ).body.body.left)
            c = _unwrap_nn(builder.splice(
                self.ne(r0), lambda h: nn(Or(nn(a), h)), lift=True,
            ).body.body.right)
            builder.step(nn(Or(a, c)), "double-negation")
            builder.splice(self.dn_disj(a, c))

        elif isinstance(phi, Or):
            self._negated_disjunction(builder, phi, self.ne)

        elif isinstance(phi, Implies):
            l0, r0 = phi.left, phi.right
            builder.step(And(nn(l0), Not(r0)), "negated-implication")
            a = _unwrap_nn(builder.splice(
                self.pu(l0, df), lambda h: And(nn(h), Not(r0)), lift=True,
            ).left)
            c = _unwrap_nn(builder.splice(self.ne(r0, df), lambda h: And(nn(a), h)).right)
            builder.step(nn(And(a, c)), "double-negation")
            builder.step(nn(self.merge(a, c, Forall)), "conj-prenex")

        elif isinstance(phi, Not):
            builder.splice(self.pu(phi.body, df), nn, lift=True)

        elif isinstance(phi, Forall):
            builder.step(Not(nn(phi)), "triple-negation")
            xi = _unwrap_nn(builder.splice(self.pu(phi, df), lambda h: Not(nn(h)), lift=True).body)
            builder.splice(self.neg_push(xi).nn_lift())

        else:
            builder.step(Forall(phi.var, Not(phi.body)), "negated-exists")
            a = _unwrap_nn(builder.splice(self.ne(phi.body, df), lambda h: Forall(phi.var, h)).body)
            builder.step(nn(Forall(phi.var, a)), "dns", [sigma_dne(k - 1).lifted()])
        return builder.build()

    def nne(self, phi: Formula) -> EquivalenceChain:
        """Chain ¬φ -> ¬¬φ' with φ' in Pi_k for φ in E_k^+, using only U_k^+-DNS."""
        if is_prenex(phi):
            return self._negated_prenex(phi)
        k = least_e_plus(phi)
        logger.debug(f"nne[{type(phi).__name__}] k={k}")
        builder = ChainBuilder(Not(phi))

        if isinstance(phi, And):
            l0, r0 = phi.left, phi.right
            builder.step(nn(Or(Not(l0), Not(r0))), "de-morgan")
            a = _unwrap_nn(builder.splice(self.nne(l0), lambda h: nn(Or(h, Not(r0)))).body.body.left)
            c = _unwrap_nn(builder.splice(self.nne(r0), lambda h: nn(Or(nn(a), h))).body.body.right)
            builder.step(nn(Or(a, c)), "double-negation")
            builder.splice(self.dn_disj(a, c))

        elif isinstance(phi, Or):
            self._negated_disjunction(builder, phi, self.nne)

        elif isinstance(phi, Implies):
            l0, r0 = phi.left, phi.right
            builder.step(And(nn(l0), Not(r0)), "negated-implication")
            a = _unwrap_nn(builder.splice(self.nnu(l0), lambda h: And(h, Not(r0))).left)
            c = _unwrap_nn(builder.splice(self.nne(r0), lambda h: And(nn(a), h)).right)
            builder.step(nn(And(a, c)), "double-negation")
            builder.step(nn(self.merge(a, c, Forall)), "conj-prenex")

        elif isinstance(phi, Not):
            builder.splice(self.nnu(phi.body))

        elif isinstance(phi, Forall):
            builder.step(Not(nn(phi)), "triple-negation")
            xi = _unwrap_nn(builder.splice(self.nnu(phi), Not).body)
            builder.splice(self.neg_push(xi).nn_lift())

        else:
            builder.step(Forall(phi.var, Not(phi.body)), "negated-exists")
            a = _unwrap_nn(builder.splice(self.nne(phi.body), lambda h: Forall(phi.var, h)).body)
            builder.step(nn(Forall(phi.var, a)), "dns", [u_plus_dns(k)])
        return builder.build()

    def nnu(self, phi: Formula) -> EquivalenceChain:
        """Chain ¬¬φ -> ¬¬φ' with φ' in Pi_k for φ in U_k^+, using only U_k^+-DNS."""
        if is_prenex(phi):
            return EquivalenceChain(nn(phi))
        k = least_u_plus(phi)
        logger.debug(f"nnu[{type(phi).__name__}] k={k}")
        builder = ChainBuilder(nn(phi))

        if isinstance(phi, And):
            builder.step(And(nn(phi.left), nn(phi.right)), "double-negation")
            a = _unwrap_nn(builder.splice(self.nnu(phi.left), lambda h: And(h, nn(phi.right))).left)
            c = _unwrap_nn(builder.splice(self.nnu(phi.right), lambda h: And(nn(a), h)).right)
            builder.step(nn(And(a, c)), "double-negation")
            builder.step(nn(self.merge(a, c, Forall)), "conj-prenex")

        elif isinstance(phi, Or):
            builder.step(nn(Or(nn(phi.left), nn(phi.right))), "double-negation")
            a = _unwrap_nn(builder.splice(
                self.nnu(phi.left), lambda h: nn(Or(h, nn(phi.right))),
            ).body.body.left)
            c = _unwrap_nn(builder.splice(
                self.nnu(phi.right), lambda h: nn(Or(nn(a), h)),
            ).body.body.right)
            builder.step(nn(Or(a, c)), "double-negation")
            builder.splice(self.dn_disj(a, c))

        elif isinstance(phi, Implies):
            l0, r0 = phi.left, phi.right
            builder.step(Not(And(nn(l0), Not(nn(r0)))), "double-negation")
            a = _unwrap_nn(builder.splice(
                self.nne(l0), lambda h: Not(And(Not(h), Not(nn(r0)))),
            ).body.left.body)
            c = _unwrap_nn(builder.splice(
                self.nnu(r0), lambda h: Not(And(Not(nn(a)), Not(h))),
            ).body.right.body)
            builder.step(nn(Or(a, c)), "double-negation")
            builder.splice(self.dn_disj(a, c))

        elif isinstance(phi, Not):
            body = phi.body
            if is_prenex(body):
                builder.splice(self.neg_push(body).nn_lift())
            else:
                builder.step(Not(body), "triple-negation")
                builder.splice(self.nne(body))

        elif isinstance(phi, Forall):
            builder.step(Forall(phi.var, nn(phi.body)), "dns", [u_plus_dns(k)])
            a = _unwrap_nn(builder.splice(self.nnu(phi.body), lambda h: Forall(phi.var, h)).body)
            builder.step(nn(Forall(phi.var, a)), "dns", [u_plus_dns(k)])

        else:
            a = _unwrap_nn(builder.splice(self.nne(phi), Not).body)
            builder.splice(self.neg_push(a).nn_lift())
        return builder.build()

    # --- Shared cases ---

    def _negated_prenex(self, phi: Formula) -> EquivalenceChain:
        """Chain ¬φ -> ¬¬¬φ -> ¬¬ψ for prenex φ, ψ the pushed negation."""
        builder = ChainBuilder(Not(phi))
        builder.step(Not(nn(phi)), "triple-negation")
        builder.splice(self.neg_push(phi).nn_lift())
        return builder.build()

    def _negated_disjunction(self, builder: ChainBuilder, phi: Or, recurse) -> None:
        left, right = phi.left, phi.right
        builder.step(And(Not(left), Not(right)), "de-morgan")
        a = _unwrap_nn(builder.splice(recurse(left), lambda h: And(h, Not(right))).left)
        c = _unwrap_nn(builder.splice(recurse(right), lambda h: And(nn(a), h)).right)
        builder.step(nn(And(a, c)), "double-negation")
        builder.step(nn(self.merge(a, c, Forall)), "conj-prenex")

    # --- Prenex utilities ---

    def contract(self, phi: Formula) -> Formula:
        """Collapse every block of two or more like quantifiers into one paired variable."""
        pairing = self.signature.pairing
        if pairing is None:
            raise PairingSymbolsMissingError("Contraction needs pair, proj1 and proj2 in the signature")
        if not is_prenex(phi):
            raise NotPrenexError("Only prenex formulas can be contracted")
        _, proj1, proj2 = pairing
        _, matrix = split_prefix(phi)
        prefix = []
        mapping = {}
        for quantifier, variables in blocks(phi):
            if len(variables) == 1:
                prefix.append((quantifier, variables[0]))
                continue
            z = self.fresh("z")
            prefix.append((quantifier, z))
            tail = Var(z)
            for index, var in enumerate(variables):
                if index == len(variables) - 1:
                    mapping[var] = tail
                else:
                    mapping[var] = App(proj1, (tail,))
                    tail = App(proj2, (tail,))
        return build_prefix(prefix, substitute_many(matrix, mapping))


class PrenexEngine:
    """
    Service object for every prenexation operation.

    Args:
        signature: Signature providing 0, equality and the pairing symbols
                   (default_signature() when None).
        contract: Append a contraction step to every prenex_* result.
    """

    def __init__(self, signature: Optional[Signature] = None, contract: bool = False):
        self.signature = signature or default_signature()
        self.contract_output = contract

    def _run(self, *formulas: Formula) -> _Run:
        return _Run(self.signature, *formulas)

    # --- Prenex combinators ---

    def pad(self, phi: Formula, kind: Union[ShapeKind, str], level: int) -> Formula:
        """
        Add dummy quantifier layers so that φ has exactly the target shape.

        Args:
            phi: Prenex formula.
            kind: Target ShapeKind (or "Sigma" / "Pi").
            level: Target level k'.

        Returns:
            A formula whose non-cumulative shape is (kind, level).

        Raises:
            NotPrenexError: If phi is not prenex.
            TargetBelowCurrentLevelError: If phi's shape does not fit below the target.
        """
        if not is_prenex(phi):
            raise NotPrenexError("Padding needs a prenex formula")
        head = _kind_quantifier(kind)
        bl = blocks(phi)
        if len(bl) > level:
            raise TargetBelowCurrentLevelError(
                f"Formula has {len(bl)} quantifier blocks, target level is {level}"
            )

        def target(j: int):
            return head if j % 2 == 0 else dual(head)

        for offset in range(level - len(bl), -1, -1):
            if all(q is target(offset + i) for i, (q, _) in enumerate(bl)):
                break
        else:
            raise TargetBelowCurrentLevelError(
                f"No {ShapeKind(kind).value}_{level} shape extends the prefix of the formula"
            )

        run = self._run(phi)
        _, matrix = split_prefix(phi)
        prefix = []
        for j in range(level):
            index = j - offset
            if 0 <= index < len(bl):
                prefix.extend((target(j), var) for var in bl[index][1])
            else:
                prefix.append((target(j), run.fresh("z")))
        logger.debug(f"Padded {len(bl)} blocks to {ShapeKind(kind).value}_{level}")
        return build_prefix(prefix, matrix)

    def contract(self, phi: Formula) -> Formula:
        """
        Contract each block of like quantifiers into one variable.

        Variables v1..vn of a block become proj1(z), proj1(proj2(z)), ...,
        proj2^(n-1)(z) for a fresh z.

        Raises:
            PairingSymbolsMissingError: If the signature has no pairing symbols.
            NotPrenexError: If phi is not prenex.
        """
        return self._run(phi).contract(phi)

    def _pair(self, phi1: Formula, phi2: Formula) -> tuple:
        """Rename bound variables so that the two formulas can share a prefix."""
        a = rename_bound(phi1, free_vars(phi2))
        c = rename_bound(phi2, all_vars(a))
        return a, c

    def conj_prenex(self, phi1: Formula, phi2: Formula, kind: Union[ShapeKind, str], k: int) -> PrenexResult:
        """
        Prenex form of φ1 ∧ φ2 for two formulas of the same shape.

        Raises:
            ShapeMismatchError: If either input is not in the shape at level k.
        """
        for phi in (phi1, phi2):
            if not in_shape(phi, ShapeKind(kind), k):
                raise ShapeMismatchError(f"Conjunct is not {ShapeKind(kind).value}_{k}")
        a, c = self._pair(phi1, phi2)
        run = self._run(a, c)
        builder = ChainBuilder(And(phi1, phi2))
        builder.step(And(a, c), "alpha")
        builder.step(run.merge(a, c, _kind_quantifier(kind)), "conj-prenex")
        return self._finish("conj_prenex", run, builder, _identity, contract=self.contract_output)

    def disj_sigma(self, phi1: Formula, phi2: Formula, k: int) -> PrenexResult:
        """
        Sigma_k form of φ1 ∨ φ2 through the selector ∃s((s=0 → φ1) ∧ (¬s=0 → φ2)).

        Raises:
            ShapeMismatchError: If either input is not Sigma_k.
        """
        for phi in (phi1, phi2):
            if not in_sigma(phi, k):
                raise ShapeMismatchError(f"Disjunct is not Sigma_{k}")
        a, c = self._pair(phi1, phi2)
        run = self._run(a, c)
        builder = ChainBuilder(Or(phi1, phi2))
        builder.step(Or(a, c), "alpha")
        if k > 0:
            builder.splice(run.selector(a, c))
        return self._finish("disj_sigma", run, builder, _identity, contract=self.contract_output)

    def dn_disj_pi(self, phi1: Formula, phi2: Formula, k: int) -> PrenexResult:
        """
        Pi_k formula φ with ¬¬(φ1 ∨ φ2) ↔ ¬¬φ.

        Raises:
            ShapeMismatchError: If either input is not Pi_k.
        """
        for phi in (phi1, phi2):
            if not in_pi(phi, k):
                raise ShapeMismatchError(f"Disjunct is not Pi_{k}")
        a, c = self._pair(phi1, phi2)
        run = self._run(a, c)
        builder = ChainBuilder(nn(Or(phi1, phi2)))
        builder.step(nn(Or(a, c)), "alpha")
        builder.splice(run.dn_disj(a, c))
        return self._finish("dn_disj_pi", run, builder, nn, contract=self.contract_output)

    def neg_prenex(self, phi: Formula, k: int) -> PrenexResult:
        """
        Prenex form of ¬φ: Sigma_k for φ in Pi_k, Pi_k for φ in Sigma_k.

        Raises:
            NotPrenexError: If phi is not prenex.
            ShapeMismatchError: If phi is neither Sigma_k nor Pi_k.
        """
        if not is_prenex(phi):
            raise NotPrenexError("Negation pushing needs a prenex formula")
        if not (in_pi(phi, k) or in_sigma(phi, k)):
            raise ShapeMismatchError(f"Formula is neither Sigma_{k} nor Pi_{k}")
        run = self._run(phi)
        builder = ChainBuilder(Not(phi))
        builder.splice(run.neg_push(phi))
        return self._finish("neg_prenex", run, builder, _identity, tidy_output=False)

    def neg_pi_nn(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Sigma_k formula ψ with ¬φ ↔ ¬¬ψ for φ in Pi_k.

        Raises:
            NotPrenexError: If phi is not prenex.
            ShapeMismatchError: If k is given and phi is not Pi_k.
        """
        if not is_prenex(phi):
            raise NotPrenexError("Negation pushing needs a prenex formula")
        if k is not None and not in_pi(phi, k):
            raise ShapeMismatchError(f"Formula is not Pi_{k}")
        run = self._run(phi)
        builder = ChainBuilder(Not(phi))
        builder.splice(run._negated_prenex(phi))
        return self._finish("neg_pi_nn", run, builder, nn, tidy_output=False)

    # --- Structural inductions ---

    def nn_u_prenex(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Pi_k formula φ' with ¬¬φ ↔ ¬¬φ', certificate within U_k^+-DNS.

        Raises:
            NotInClassError: If phi is not in U_k^+.
        """
        self._require(phi, k, in_u_plus, "U")
        return self._induct("nn_u_prenex", phi, lambda run, f: run.nnu(f), nn, nn, is_prenex)

    def nn_e_prenex(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Pi_k formula φ' with ¬φ ↔ ¬¬φ' for φ in E_k^+, certificate within U_k^+-DNS.

        Raises:
            NotInClassError: If phi is not in E_k^+.
        """
        self._require(phi, k, in_e_plus, "E")
        return self._induct("nn_e_prenex", phi, lambda run, f: run.nne(f), Not, nn)

    def prenex_e(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Sigma_k formula equivalent to φ in E_k^+.

        The certificate lies within Sigma_k-DNE + U_k^+-DNS.

        Raises:
            NotInClassError: If phi is not in E_k^+.
        """
        self._require(phi, k, in_e_plus, "E")
        return self._induct(
            "prenex_e", phi, lambda run, f: run.pe(f), _identity, _identity,
            is_prenex,
        )

    def prenex_u(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Pi_k formula equivalent to φ in U_k^+.

        The certificate lies within (Pi_k v Pi_k)-DNE.

        Raises:
            NotInClassError: If phi is not in U_k^+.
        """
        self._require(phi, k, in_u_plus, "U")
        return self._induct(
            "prenex_u", phi, lambda run, f: run.pu(f), _identity, _identity,
            is_prenex,
        )

    def neg_e_nn_pi(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Pi_k formula φ' with ¬φ ↔ ¬¬φ' for φ in E_k^+.

        The certificate lies within ¬¬(Pi_k v Pi_k)-DNE.

        Raises:
            NotInClassError: If phi is not in E_k^+.
        """
        self._require(phi, k, in_e_plus, "E")
        return self._induct("neg_e_nn_pi", phi, lambda run, f: run.ne(f), Not, nn)

    def neg_e_nn_pi_df(self, phi: Formula, k: Optional[int] = None) -> PrenexResult:
        """
        Disjunction-free variant of neg_e_nn_pi, within ¬¬Sigma_{k-1}-DNE.

        Raises:
            ContainsOrError: If phi contains a disjunction.
            NotInClassError: If phi is not in E_k^+.
        """
        self._require_or_free(phi)
        self._require(phi, k, in_e_plus, "E")
        return self._induct("neg_e_nn_pi_df", phi, lambda run, f: run.ne(f, True), Not, nn)

    def prenex_df(self, phi: Formula, mode: str, k: Optional[int] = None) -> PrenexResult:
        """
        Disjunction-free prenexation.

        Args:
            phi: Formula without ∨.
            mode: "e" (E_k^+ to Sigma_k, within Sigma_k-DNE) or
                  "u" (U_k^+ to Pi_k, within Sigma_{k-1}-DNE).
            k: Level; the least admissible level when None.

        Raises:
            ContainsOrError: If phi contains a disjunction.
            NotInClassError: If phi is not in the class of the mode.
            ValueError: If mode is unknown.
        """
        self._require_or_free(phi)
        mode = mode.lower()
        if mode == "e":
            self._require(phi, k, in_e_plus, "E")
            return self._induct(
                "prenex_df_e", phi, lambda run, f: run.pe(f, True), _identity, _identity,
                is_prenex,
            )
        if mode == "u":
            self._require(phi, k, in_u_plus, "U")
            return self._induct(
                "prenex_df_u", phi, lambda run, f: run.pu(f, True), _identity, _identity,
                is_prenex,
            )
        raise ValueError(f"Unknown prenexation mode: {mode!r}")

    def run_mode(self, phi: Formula, mode: str, k: Optional[int] = None) -> PrenexResult:
        """Dispatch one of MODES ("e", "u", "df-e", "df-u")."""
        if mode == "e":
            return self.prenex_e(phi, k)
        if mode == "u":
            return self.prenex_u(phi, k)
        if mode in ("df-e", "df-u"):
            return self.prenex_df(phi, mode[-1], k)
        raise ValueError(f"Unknown prenexation mode: {mode!r} (expected one of {', '.join(MODES)})")

    # --- Internals ---

    @staticmethod
    def _require(phi: Formula, k: Optional[int], member, name: str) -> None:
        if k is not None and k < 0:
            raise NotInClassError(f"Level must be non-negative, got {k}")
        if k is not None and not member(phi, k):
            raise NotInClassError(f"Formula is not in {name}_{k}^+")

    @staticmethod
    def _require_or_free(phi: Formula) -> None:
        if contains_or(phi):
            raise ContainsOrError("The disjunction-free pipeline does not accept ∨")

    def _induct(self, operation: str, phi: Formula, procedure, wrap_in, wrap_out, done=None) -> PrenexResult:
        logger.debug(f"{operation}: start")
        shortcut = done is not None and done(phi)
        renamed = phi if shortcut else rename_bound(phi, ())
        run = self._run(phi, renamed)
        builder = ChainBuilder(wrap_in(phi))
        if not shortcut:
            builder.step(wrap_in(renamed), "alpha")
            builder.splice(procedure(run, renamed))
        return self._finish(operation, run, builder, wrap_out, contract=self.contract_output)

    def _finish(
        self,
        operation: str,
        run: _Run,
        builder: ChainBuilder,
        wrap_out,
        contract: bool = False,
        tidy_output: bool = True,
    ) -> PrenexResult:
        """Tidy and optionally contract the result, then package it."""
        result = builder.current if wrap_out is _identity else _unwrap_nn(builder.current)
        if tidy_output:
            tidied = tidy(result)
            if tidied != result:
                builder.step(wrap_out(tidied), "tidy", [sigma_dne(0)])
                result = tidied
        if contract:
            contracted = run.contract(result)
            if contracted != result:
                builder.step(wrap_out(contracted), "contract", scope=ValidityScope.NEEDS_PAIRING)
                result = contracted
        chain = builder.build()
        certificate = chain.certificate
        logger.debug(f"{operation}: {len(chain)} steps, certificate {certificate}")
        return PrenexResult(result, certificate, chain)
