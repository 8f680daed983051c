"""
Serialization module - pydantic models for reports and stored chains.

Responsible for:
- JSON documents for every CLI subcommand
- Converting EquivalenceChain to and from an ordered step array
- Converting oracle CheckReports (with counterexamples) to plain data

Formulas are stored as text in the formula grammar, so a stored chain is
readable and reparses to the same formulas.
"""

import json
from typing import Optional, Sequence, Union

from pydantic import BaseModel, Field

from prenexkit.certificates import Certificate
from prenexkit.chain import ChainStep, EquivalenceChain, StepRelation, ValidityScope
from prenexkit.oracle import CheckReport
from prenexkit.parser import format_formula, parse_formula


# --- Chains ---

class StepModel(BaseModel):
    """One chain step."""
    before: str
    after: str
    justification: str
    relation: StepRelation = StepRelation.EQUIV
    scope: ValidityScope = ValidityScope.PURE_LOGIC
    tags: list[str] = []
    variable: Optional[str] = None


class ChainModel(BaseModel):
    """A chain as an ordered step array."""
    source: str
    final: str
    certificate: list[str] = []
    scope: ValidityScope = ValidityScope.PURE_LOGIC
    steps: list[StepModel] = []

    @classmethod
    def from_chain(cls, chain: EquivalenceChain, equality: str = "eq") -> "ChainModel":
        def text(phi) -> str:
            return format_formula(phi, equality)

        return cls(
            source=text(chain.source),
            final=text(chain.final),
            certificate=[t.render(ascii=True) for t in chain.certificate],
            scope=chain.scope,
            steps=[
                StepModel(
                    before=text(step.before),
                    after=text(step.after),
                    justification=step.justification,
                    relation=step.relation,
                    scope=step.scope,
                    tags=[t.render(ascii=True) for t in step.certificate],
                    variable=step.variable,
                )
                for step in chain.steps
            ],
        )

    def to_chain(self, signature=None) -> EquivalenceChain:
        """
        Rebuild the chain.

        Raises:
            FormulaSyntaxError: If a stored formula does not parse.
            ChainError: If the steps are not contiguous.
        """
        def formula(text: str):
            return parse_formula(text, signature)

        steps = tuple(
            ChainStep(
                before=formula(step.before),
                after=formula(step.after),
                justification=step.justification,
                scope=step.scope,
                certificate=Certificate.parse(", ".join(step.tags)) if step.tags else Certificate(),
                relation=step.relation,
                variable=step.variable,
            )
            for step in self.steps
        )
        return EquivalenceChain(formula(self.source), steps)


# --- Oracle ---

class CounterexampleModel(BaseModel):
    bound: int
    quantifier_bound: int
    tables: dict[str, list[list[int]]]
    env: dict[str, int]
    values: list[bool]
    description: str


class CheckReportModel(BaseModel):
    """Oracle verdict."""
    passed: bool
    structures_examined: int = 0
    exhaustive: bool = True
    notes: list[str] = []
    failed_step: Optional[int] = None
    counterexample: Optional[CounterexampleModel] = None

    @classmethod
    def from_report(cls, report: CheckReport) -> "CheckReportModel":
        counterexample = None
        if report.counterexample is not None:
            ce = report.counterexample
            counterexample = CounterexampleModel(
                bound=ce.bound,
                quantifier_bound=ce.quantifier_bound,
                tables={name: sorted(list(row) for row in rows) for name, rows in sorted(ce.tables.items())},
                env=dict(sorted(ce.env.items())),
                values=list(ce.values),
                description=ce.describe(),
            )
        return cls(
            passed=report.passed,
            structures_examined=report.structures_examined,
            exhaustive=report.exhaustive,
            notes=list(report.notes),
            failed_step=report.failed_step,
            counterexample=counterexample,
        )


# --- Subcommand reports ---

class ClassifyReport(BaseModel):
    formula: str
    level: int
    degree: int
    alt: list[str]
    classes: list[str]
    least_class: str
    least_e_plus: int
    least_u_plus: int
    shape: Optional[str] = None
    or_free: bool


class BudgetVerdict(BaseModel):
    row: str
    required: list[str]
    side: list[str]
    within: bool


class PrenexReport(BaseModel):
    formula: str
    mode: str
    level: int
    output: str
    certificate: list[str]
    budget: Optional[BudgetVerdict] = None
    chain: ChainModel
    oracle: Optional[CheckReportModel] = None


class TranslateReport(BaseModel):
    formula: str
    kind: str
    output: str
    chain: Optional[ChainModel] = None
    oracle: Optional[CheckReportModel] = None


class VerifyReport(BaseModel):
    left: str
    right: Optional[str] = None
    check: str
    scope: ValidityScope
    oracle: CheckReportModel


class ChainReplayReport(BaseModel):
    path: str
    steps: int
    certificate: list[str]
    oracle: CheckReportModel


class CorpusCaseModel(BaseModel):
    path: str
    passed: bool
    checks: int = 0
    failures: list[str] = []


class CorpusReport(BaseModel):
    directory: str
    passed: bool
    total: int
    failed: int
    cases: list[CorpusCaseModel] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


def dump(report: Union[BaseModel, Sequence[BaseModel]]) -> str:
    """Stable JSON text (sorted keys, two-space indent) for one report or a list."""
    if isinstance(report, BaseModel):
        data = report.model_dump(mode="json")
    else:
        data = [r.model_dump(mode="json") for r in report]
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
