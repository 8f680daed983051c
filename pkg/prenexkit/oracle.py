"""
Oracle module - brute-force classical semantics over finite structures.

Responsible for:
- FiniteStructure: domain [0,B), rule-based functions/predicates and
  opaque predicate tables
- evaluate: Tarski semantics
- Oracle: check_equiv / check_valid / replay_chain sweeps over domain
  sizes and predicate interpretations
- truth_table_equiv: an independent propositional oracle

Arithmetic saturates at B-1. Every function and predicate clips its
arguments to B-1 before applying its rule, except the pairing symbols:
pair is Cantor pairing clipped to the quantifier bound and the projections
are exact. Under the needs-pairing scope, variables that reach a pairing
symbol range over an inflated bound so every contraction witness exists;
all other variables still range over [0,B), which changes no truth value
because values past B-1 are indistinguishable from B-1.

Opaque predicate tables are swept exhaustively only while the whole
interpretation space has at most INTERPRETATION_LIMIT members: three unary
predicates at B=3 (2^9) or three binary ones at B=2 (2^12) fit, but two
binary predicates at B=3 (2^18) already fall back to seeded sampling even
though they are within the atom and bound limits. Reports say which mode
ran.
"""

import itertools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from prenexkit.chain import EquivalenceChain, StepRelation, ValidityScope
from prenexkit.errors import (
    ChainReplayError,
    PrenexKitError,
    ScopeUnsupportedError,
    UnboundVariableError,
)
from prenexkit.formula import (
    STAR_NAME,
    TOP,
    And,
    Atom,
    Bottom,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Term,
    Var,
    free_vars,
    map_subformulas,
    predicates_used,
    quantifier_free,
)
from prenexkit.signature import Signature, infer_signature

logger = logging.getLogger(__name__)


# --- Configuration ---

DEFAULT_SIZES = (2, 3)
DEFAULT_ATOM_BUDGET = 3
DEFAULT_SAMPLES = 256
DEFAULT_SEED = 20200527
EXHAUSTIVE_MAX_BOUND = 3
INTERPRETATION_LIMIT = 4096

_PAIRING_RULES = ("pair", "proj1", "proj2")


# --- Pairing ---

def cantor_pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + x


def cantor_unpair(z: int) -> tuple:
    """Exact inverse of cantor_pair."""
    w = (math.isqrt(8 * z + 1) - 1) // 2
    x = z - w * (w + 1) // 2
    return x, w - x


def inflated_bound(bound: int, width: int) -> int:
    """One past the code of the right-nested tuple of `width` copies of B-1."""
    top = bound - 1
    code = top
    for _ in range(max(width, 1) - 1):
        code = cantor_pair(top, code)
    return code + 1


# --- Structures ---

@dataclass(frozen=True)
class FiniteStructure:
    """
    A finite structure for a signature.

    tables maps each opaque predicate to the frozenset of argument tuples
    where it holds; a 0-ary predicate holds iff () is in its table.
    """
    bound: int
    signature: Signature
    tables: Mapping = field(default_factory=dict)
    quantifier_bound: Optional[int] = None

    def __post_init__(self):
        if self.bound < 1:
            raise PrenexKitError(f"Domain bound must be positive, got {self.bound}")
        if self.quantifier_bound is None:
            object.__setattr__(self, "quantifier_bound", self.bound)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return min(1, self.bound - 1)


def _clip(value: int, top: int) -> int:
    return value if value < top else top


def _compile_term(term: Term, structure: FiniteStructure) -> Callable:
    if isinstance(term, Var):
        name = term.name

        def lookup(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariableError(f"Unbound variable: {name}") from None

        return lookup

    symbol = structure.signature.function(term.symbol)
    args = [_compile_term(a, structure) for a in term.args]
    top = structure.bound - 1
    qtop = structure.quantifier_bound - 1
    rule = symbol.rule

    if rule == "zero":
        return lambda env: 0
    if rule == "one":
        value = structure.one
        return lambda env: value
    if rule == "succ":
        (a,) = args
        return lambda env: _clip(_clip(a(env), top) + 1, top)
    if rule == "add":
        a, b = args
        return lambda env: _clip(_clip(a(env), top) + _clip(b(env), top), top)
    if rule == "mul":
        a, b = args
        return lambda env: _clip(_clip(a(env), top) * _clip(b(env), top), top)
    if rule == "pair":
        a, b = args
        return lambda env: _clip(cantor_pair(a(env), b(env)), qtop)
    if rule == "proj1":
        (a,) = args
        return lambda env: cantor_unpair(a(env))[0]
    if rule == "proj2":
        (a,) = args
        return lambda env: cantor_unpair(a(env))[1]

    table = dict(symbol.table)

    def lookup_table(env):
        key = tuple(_clip(a(env), top) for a in args)
        return _clip(table.get(key, 0), top)

    return lookup_table


def _wide_vars(phi: Formula, pairing: frozenset) -> frozenset:
    """Variables occurring free inside an argument of a pairing symbol."""

    def in_term(term: Term, under: bool) -> set:
        if isinstance(term, Var):
            return {term.name} if under else set()
        out: set = set()
        inner = under or term.symbol in pairing
        for arg in term.args:
            out |= in_term(arg, inner)
        return out

    def walk(f: Formula) -> frozenset:
        if isinstance(f, Bottom):
            return frozenset()
        if isinstance(f, Atom):
            out: set = set()
            for arg in f.args:
                out |= in_term(arg, False)
            return frozenset(out)
        if isinstance(f, Not):
            return walk(f.body)
        if isinstance(f, (And, Or, Implies)):
            return walk(f.left) | walk(f.right)
        return walk(f.body) - {f.var}

    return walk(phi)


def compile_formula(phi: Formula, structure: FiniteStructure) -> Callable:
    """
    Compile a formula into a predicate over environments.

    Raises:
        UnknownSymbolError: If phi uses a symbol the structure lacks.
    """
    signature = structure.signature
    top = structure.bound - 1
    pairing = frozenset(
        s.name for s in signature.functions if s.rule in _PAIRING_RULES
    )

    def build(f: Formula) -> Callable:
        if isinstance(f, Bottom):
            return lambda env: False
        if isinstance(f, Atom):
            predicate = signature.predicate(f.pred)
            args = [_compile_term(a, structure) for a in f.args]
            if predicate.rule == "eq":
                a, b = args
                return lambda env: _clip(a(env), top) == _clip(b(env), top)
            if predicate.rule == "le":
                a, b = args
                return lambda env: _clip(a(env), top) <= _clip(b(env), top)
            if predicate.rule == "lt":
                a, b = args
                return lambda env: _clip(a(env), top) < _clip(b(env), top)
            table = structure.tables.get(f.pred, frozenset())
            return lambda env: tuple(_clip(a(env), top) for a in args) in table
        if isinstance(f, Not):
            body = build(f.body)
            return lambda env: not body(env)
        if isinstance(f, And):
            left, right = build(f.left), build(f.right)
            return lambda env: left(env) and right(env)
        if isinstance(f, Or):
            left, right = build(f.left), build(f.right)
            return lambda env: left(env) or right(env)
        if isinstance(f, Implies):
            left, right = build(f.left), build(f.right)
            return lambda env: (not left(env)) or right(env)

        var = f.var
        body = build(f.body)
        wide = pairing and var in _wide_vars(f.body, pairing)
        domain = range(structure.quantifier_bound if wide else structure.bound)
        if isinstance(f, Forall):
            return lambda env: all(body({**env, var: v}) for v in domain)
        return lambda env: any(body({**env, var: v}) for v in domain)

    return build(phi)


def evaluate(phi: Formula, structure: FiniteStructure, env: Optional[Mapping] = None) -> bool:
    """
    Classical truth value of phi in a finite structure.

    Args:
        phi: Formula to evaluate.
        structure: The structure.
        env: Values of the free variables; extra entries are ignored.

    Returns:
        The truth value.

    Raises:
        UnboundVariableError: If a free variable has no value.
        UnknownSymbolError: If a symbol is missing from the signature.
    """
    return compile_formula(phi, structure)(dict(env or {}))


# --- Reports ---

@dataclass(frozen=True)
class Counterexample:
    """A structure and environment on which a check failed."""
    bound: int
    quantifier_bound: int
    tables: Mapping
    env: Mapping
    values: tuple

    def structure(self, signature: Signature) -> FiniteStructure:
        return FiniteStructure(self.bound, signature, dict(self.tables), self.quantifier_bound)

    def describe(self) -> str:
        tables = "; ".join(
            f"{name}={sorted(rows)}" for name, rows in sorted(self.tables.items())
        )
        env = ", ".join(f"{k}={v}" for k, v in sorted(self.env.items()))
        return f"B={self.bound} Q={self.quantifier_bound} [{tables}] env({env}) values={self.values}"


@dataclass(frozen=True)
class CheckReport:
    """Verdict of an oracle run; failures carry a counterexample."""
    passed: bool
    counterexample: Optional[Counterexample] = None
    structures_examined: int = 0
    exhaustive: bool = True
    notes: tuple = ()
    failed_step: Optional[int] = None

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Associative combination; the earlier counterexample wins."""
        notes = self.notes + tuple(n for n in other.notes if n not in self.notes)
        return CheckReport(
            passed=self.passed and other.passed,
            counterexample=self.counterexample or other.counterexample,
            structures_examined=self.structures_examined + other.structures_examined,
            exhaustive=self.exhaustive and other.exhaustive,
            notes=notes,
            failed_step=self.failed_step if self.failed_step is not None else other.failed_step,
        )

    @classmethod
    def empty(cls) -> "CheckReport":
        return cls(passed=True)


# --- Sweeps ---

@dataclass(frozen=True)
class _SweepTask:
    signature: Signature
    formulas: tuple
    mode: str  # "equiv" or "valid"
    bound: int
    quantifier_bound: int
    atom_budget: int
    samples: int
    seed: int
    interpretation_limit: int


def _interpretations(opaque: list, bound: int, task: _SweepTask):
    """Yield (tables, exhaustive) pairs for the opaque predicates."""
    rows = {p.name: list(itertools.product(range(bound), repeat=p.arity)) for p in opaque}
    total = 1
    for p in opaque:
        total *= 2 ** len(rows[p.name])
    exhaustive = (
        len(opaque) <= task.atom_budget
        and bound <= EXHAUSTIVE_MAX_BOUND
        and total <= task.interpretation_limit
    )
    if exhaustive:
        choices = [
            [
                frozenset(r for r, bit in zip(rows[p.name], bits) if bit)
                for bits in itertools.product((False, True), repeat=len(rows[p.name]))
            ]
            for p in opaque
        ]
        for combo in itertools.product(*choices):
            yield dict(zip((p.name for p in opaque), combo)), True
        return

    rng = random.Random(task.seed * 1000 + bound)
    for _ in range(task.samples):
        tables = {
            p.name: frozenset(r for r in rows[p.name] if rng.random() < 0.5)
            for p in opaque
        }
        yield tables, False


def _sweep_size(task: _SweepTask) -> CheckReport:
    """Check every interpretation and environment at one domain size."""
    used: dict = {}
    for phi in task.formulas:
        used.update(predicates_used(phi))
    opaque = [
        task.signature.predicate(name) for name in sorted(used)
        if task.signature.predicate(name).opaque
    ]
    variables = sorted(set().union(*(free_vars(phi) for phi in task.formulas)))

    examined = 0
    exhaustive = True
    for tables, complete in _interpretations(opaque, task.bound, task):
        exhaustive = exhaustive and complete
        structure = FiniteStructure(task.bound, task.signature, tables, task.quantifier_bound)
        compiled = [compile_formula(phi, structure) for phi in task.formulas]
        examined += 1
        for values in itertools.product(range(task.bound), repeat=len(variables)):
            env = dict(zip(variables, values))
            results = tuple(c(env) for c in compiled)
            failed = results[0] != results[1] if task.mode == "equiv" else not results[0]
            if failed:
                counterexample = Counterexample(
                    bound=task.bound,
                    quantifier_bound=task.quantifier_bound,
                    tables=tables,
                    env=env,
                    values=results,
                )
                return CheckReport(False, counterexample, examined, exhaustive)

    notes = () if exhaustive else (f"B={task.bound}: sampled {examined} interpretations",)
    return CheckReport(True, None, examined, exhaustive, notes)


def _proj_depth(phi: Formula, pairing: frozenset) -> int:
    """Longest chain of nested pairing applications in phi's terms."""

    def term_depth(term: Term) -> int:
        if isinstance(term, Var):
            return 0
        inner = max((term_depth(a) for a in term.args), default=0)
        return inner + 1 if term.symbol in pairing else inner

    def walk(f: Formula) -> int:
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, Atom):
            return max((term_depth(a) for a in f.args), default=0)
        if isinstance(f, Not):
            return walk(f.body)
        if isinstance(f, (And, Or, Implies)):
            return max(walk(f.left), walk(f.right))
        return walk(f.body)

    return walk(phi)


def replace_star(phi: Formula, replacement: Formula) -> Formula:
    """Replace the placeholder atom without any capture check."""
    return map_subformulas(
        phi, lambda f: replacement if isinstance(f, Atom) and f.pred == STAR_NAME and not f.args else f
    )


class Oracle:
    """
    Brute-force verifier over small finite structures.

    The signature is always extended with the placeholder predicate. When
    no signature is given, one is inferred from the formulas under check.
    """

    def __init__(
        self,
        signature: Optional[Signature] = None,
        sizes: Iterable[int] = DEFAULT_SIZES,
        atom_budget: int = DEFAULT_ATOM_BUDGET,
        samples: int = DEFAULT_SAMPLES,
        seed: int = DEFAULT_SEED,
        workers: int = 1,
        interpretation_limit: int = INTERPRETATION_LIMIT,
    ):
        self.signature = signature.with_star() if signature is not None else None
        self.sizes = tuple(sizes)
        if not self.sizes or any(b < 1 for b in self.sizes):
            raise PrenexKitError(f"Domain sizes must be nonempty and positive: {self.sizes}")
        self.atom_budget = atom_budget
        self.samples = samples
        self.seed = seed
        self.workers = workers
        self.interpretation_limit = interpretation_limit

    def _signature_for(self, formulas: tuple) -> Signature:
        if self.signature is not None:
            return self.signature
        return infer_signature(formulas).with_star()

    def _run(
        self,
        formulas: tuple,
        mode: str,
        scope,
        sizes: Optional[Iterable[int]],
        atom_budget: Optional[int],
    ) -> CheckReport:
        try:
            scope = ValidityScope(scope)
        except ValueError:
            raise ScopeUnsupportedError(f"Unknown validity scope: {scope}") from None
        signature = self._signature_for(formulas)
        sizes = tuple(sizes) if sizes is not None else self.sizes
        budget = self.atom_budget if atom_budget is None else atom_budget

        width = 1
        if scope == ValidityScope.NEEDS_PAIRING:
            if not signature.has_pairing:
                raise ScopeUnsupportedError("needs-pairing scope requires pair/proj1/proj2")
            pairing = frozenset(
                s.name for s in signature.functions if s.rule in _PAIRING_RULES
            )
            width = 1 + max(_proj_depth(phi, pairing) for phi in formulas)

        tasks = []
        notes = []
        for bound in sizes:
            if scope == ValidityScope.NEEDS_ZERO_ONE and bound < 2:
                notes.append(f"B={bound}: skipped, 0 and 1 coincide")
                continue
            quantifier_bound = bound
            if scope == ValidityScope.NEEDS_PAIRING:
                quantifier_bound = inflated_bound(bound, width)
            tasks.append(_SweepTask(
                signature=signature,
                formulas=formulas,
                mode=mode,
                bound=bound,
                quantifier_bound=quantifier_bound,
                atom_budget=budget,
                samples=self.samples,
                seed=self.seed,
                interpretation_limit=self.interpretation_limit,
            ))

        if self.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(_sweep_size, tasks))
        else:
            results = []
            for task in tasks:
                result = _sweep_size(task)
                results.append(result)
                if not result.passed:
                    break

        report = CheckReport(True, notes=tuple(notes))
        for result in results:
            report = report.merge(result)
            if not result.passed:
                break
        if not report.exhaustive:
            logger.warning(f"Oracle sampled interpretations ({self.samples} per size, seed {self.seed})")
        logger.info(
            f"Oracle {mode} check: {'pass' if report.passed else 'FAIL'} "
            f"after {report.structures_examined} structures"
        )
        return report

    def check_equiv(
        self,
        phi1: Formula,
        phi2: Formula,
        scope=ValidityScope.PURE_LOGIC,
        sizes: Optional[Iterable[int]] = None,
        atom_budget: Optional[int] = None,
    ) -> CheckReport:
        """
        Check that phi1 and phi2 agree on every admissible structure.

        Args:
            phi1, phi2: Formulas to compare.
            scope: Validity scope selecting the admissible structures.
            sizes: Domain sizes (defaults to the oracle's).
            atom_budget: Most opaque predicates swept exhaustively.

        Returns:
            CheckReport; on failure the counterexample holds both values.

        Raises:
            ScopeUnsupportedError: For an unknown scope, or needs-pairing
                                   without pairing symbols.
        """
        return self._run((phi1, phi2), "equiv", scope, sizes, atom_budget)

    def check_valid(
        self,
        phi: Formula,
        scope=ValidityScope.PURE_LOGIC,
        sizes: Optional[Iterable[int]] = None,
        atom_budget: Optional[int] = None,
    ) -> CheckReport:
        """Check that phi is true in every admissible structure and environment."""
        return self._run((phi,), "valid", scope, sizes, atom_budget)

    def check_step(self, step, sizes=None, atom_budget=None) -> CheckReport:
        """Check one chain step according to its relation."""
        before, after = step.before, step.after
        if step.relation == StepRelation.EQUIV:
            return self.check_equiv(before, after, step.scope, sizes, atom_budget)
        if step.relation == StepRelation.IMPLIES:
            return self.check_valid(Implies(before, after), step.scope, sizes, atom_budget)
        if step.relation == StepRelation.STAR_INSTANCE:
            both = And(replace_star(before, TOP), replace_star(before, Bottom()))
            return self.check_valid(Implies(both, after), step.scope, sizes, atom_budget)
        if step.relation == StepRelation.GENERALIZE:
            return self.check_valid(
                Implies(Forall(step.variable, before), after), step.scope, sizes, atom_budget
            )
        raise ScopeUnsupportedError(f"Unknown step relation: {step.relation}")

    def replay_chain(
        self,
        chain: EquivalenceChain,
        sizes: Optional[Iterable[int]] = None,
        atom_budget: Optional[int] = None,
    ) -> CheckReport:
        """
        Check every step of a chain; stops at the first failing step.

        Raises:
            ChainReplayError: If a step raises, with the step index.
        """
        report = CheckReport.empty()
        for index, step in enumerate(chain.steps):
            try:
                result = self.check_step(step, sizes, atom_budget)
            except PrenexKitError as e:
                raise ChainReplayError(index, e) from e
            report = report.merge(result)
            if not result.passed:
                logger.info(f"Chain replay failed at step {index} ({step.justification})")
                return CheckReport(
                    passed=False,
                    counterexample=report.counterexample,
                    structures_examined=report.structures_examined,
                    exhaustive=report.exhaustive,
                    notes=report.notes + (f"step {index}: {step.justification}",),
                    failed_step=index,
                )
        return report


# --- Propositional oracle ---

def truth_table_equiv(phi1: Formula, phi2: Formula) -> bool:
    """
    Compare two quantifier-free formulas over 0-ary atoms by truth tables.

    Raises:
        PrenexKitError: If either formula has quantifiers or non-0-ary atoms.
    """
    letters: set = set()
    for phi in (phi1, phi2):
        if not quantifier_free(phi):
            raise PrenexKitError("truth_table_equiv needs quantifier-free formulas")
        for name, arity in predicates_used(phi).items():
            if arity:
                raise PrenexKitError(f"truth_table_equiv needs 0-ary atoms, got {name}/{arity}")
            letters.add(name)
    names = sorted(letters)

    def value(f: Formula, row: dict) -> bool:
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            return row[f.pred]
        if isinstance(f, Not):
            return not value(f.body, row)
        if isinstance(f, And):
            return value(f.left, row) and value(f.right, row)
        if isinstance(f, Or):
            return value(f.left, row) or value(f.right, row)
        return (not value(f.left, row)) or value(f.right, row)

    for bits in itertools.product((False, True), repeat=len(names)):
        row = dict(zip(names, bits))
        if value(phi1, row) != value(phi2, row):
            return False
    return True
