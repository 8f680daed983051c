"""
Main command-line application - batch front-end for prenexkit.

This is the entry point that:
- Parses formulas (literal text, formula files or golden files)
- Runs classification, prenexation, translations and oracle checks
- Replays stored chains and checks golden-file corpora
- Prints line-oriented text or a JSON document per job

Exit status: 0 on success, 1 on a verification failure, 2 on an input error.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import click
from pydantic import BaseModel, Field, field_validator

from prenexkit import __version__
from prenexkit.certificates import budget_leq, pnft_budget
from prenexkit.chain import EquivalenceChain, ValidityScope
from prenexkit.classify import (
    alt_paths,
    class_membership,
    degree,
    is_or_free,
    least_e_plus,
    least_u_plus,
    pi_level,
    prenex_shape,
)
from prenexkit.corpus import GOLDEN_EXTENSION, CorpusRunner, parse_golden
from prenexkit.errors import PrenexKitError, ShapeMismatchError
from prenexkit.formula import Bottom, Formula, is_prenex
from prenexkit.oracle import (
    DEFAULT_ATOM_BUDGET,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_SIZES,
    CheckReport,
    Oracle,
)
from prenexkit.parser import format_formula, parse_with_signature
from prenexkit.prenex import MODES, PrenexEngine
from prenexkit.serialization import (
    BudgetVerdict,
    ChainModel,
    ChainReplayReport,
    CheckReportModel,
    ClassifyReport,
    CorpusCaseModel,
    CorpusReport,
    PrenexReport,
    TranslateReport,
    VerifyReport,
    dump,
)
from prenexkit.signature import Signature, default_signature, load_signature
from prenexkit.translations import (
    a_translate,
    conservation_chain,
    kuroda,
    kuroda_equivalence_chain,
    kuroda_inner,
    substitute_star,
)

logger = logging.getLogger(__name__)


# --- Configuration ---

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

ENV_LOG_LEVEL = "PRENEXKIT_LOG_LEVEL"
ENV_SEED = "PRENEXKIT_SEED"
ENV_SAMPLES = "PRENEXKIT_SAMPLES"

SUBCOMMANDS = ("classify", "prenex", "translate", "verify", "chain", "corpus")

# Characterization-table row checked for each prenexation mode
BUDGET_ROW_FOR_MODE = {
    "e": ("E_k", "Sigma_k"),
    "u": ("U_k", "Pi_k"),
    "df-e": ("df(E_k)", "Sigma_k"),
    "df-u": ("df(U_k)", "Pi_k"),
}


# --- Pydantic models ---

class JobConfig(BaseModel):
    """One CLI job."""
    subcommand: Literal["classify", "prenex", "translate", "verify", "chain", "corpus"]
    inputs: list[str] = []
    signature: Optional[str] = None
    level: Optional[int] = Field(default=None, ge=0)
    cumulative: bool = True
    mode: Literal["e", "u", "df-e", "df-u"] = "e"
    contract: bool = False
    translation: Literal["kuroda", "kuroda-inner", "atrans", "subst", "conservation"] = "kuroda"
    subst: Optional[str] = None
    forall_vars: list[str] = ["x"]
    exists_vars: list[str] = ["y"]
    scope: ValidityScope = ValidityScope.PURE_LOGIC
    check: bool = False
    save_chain: Optional[str] = None
    sizes: list[int] = Field(default_factory=lambda: list(DEFAULT_SIZES), min_length=1)
    atom_budget: int = Field(default=DEFAULT_ATOM_BUDGET, ge=0)
    samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    seed: int = DEFAULT_SEED
    workers: int = Field(default=1, ge=1)
    output: Literal["text", "json"] = "text"

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes: list[int]) -> list[int]:
        if any(b < 1 for b in sizes):
            raise ValueError(f"domain sizes must be at least 1: {sizes}")
        return sizes


@dataclass
class JobOutcome:
    """Exit status, report document and human-readable lines of a job."""
    status: int
    report: object = None
    lines: list[str] = field(default_factory=list)
    error: Optional[str] = None


# --- Jobs ---

def read_formula_texts(inputs: list[str]) -> list[str]:
    """
    Expand formula arguments.

    Each argument is formula text, a golden file (its formula entry) or a
    file holding one formula per non-comment line.
    """
    texts = []
    for item in inputs:
        path = Path(item)
        if not path.is_file():
            texts.append(item)
        elif path.suffix == GOLDEN_EXTENSION:
            texts.append(parse_golden(path).formula)
        else:
            for line in path.read_text(encoding="utf-8").splitlines():
                stripped = line.strip()
                if stripped and not stripped.startswith("#"):
                    texts.append(stripped)
    if not texts:
        raise PrenexKitError("No formulas given")
    return texts


def _base_signature(cfg: JobConfig) -> Optional[Signature]:
    return load_signature(cfg.signature) if cfg.signature else None


def _parse(cfg: JobConfig, texts: list[str], star: bool = False) -> tuple:
    base = _base_signature(cfg)
    if star:
        base = (base or default_signature()).with_star()
    return parse_with_signature(texts, base, strict=cfg.signature is not None)


def _oracle(cfg: JobConfig, signature: Optional[Signature]) -> Oracle:
    return Oracle(
        signature,
        sizes=cfg.sizes,
        atom_budget=cfg.atom_budget,
        samples=cfg.samples,
        seed=cfg.seed,
        workers=cfg.workers,
    )


def _text(phi: Formula, signature: Signature) -> str:
    return format_formula(phi, signature.equality)


def _chain_lines(chain: EquivalenceChain, signature: Signature) -> list[str]:
    lines = [f"  source: {_text(chain.source, signature)}"]
    for index, step in enumerate(chain.steps):
        tags = f" {{{step.certificate}}}" if step.certificate else ""
        relation = "" if step.relation.value == "equiv" else f" ({step.relation.value})"
        lines.append(
            f"  {index:>3}. {step.justification}{relation} [{step.scope.value}]{tags}: "
            f"{_text(step.after, signature)}"
        )
    return lines


def _verdict_lines(report: CheckReport) -> list[str]:
    mode = "exhaustive" if report.exhaustive else "sampled"
    if report.passed:
        lines = [f"oracle:      pass ({report.structures_examined} structures, {mode})"]
    else:
        where = f" at step {report.failed_step}" if report.failed_step is not None else ""
        lines = [f"oracle:      FAIL{where} ({report.structures_examined} structures, {mode})"]
        if report.counterexample is not None:
            lines.append(f"  counterexample: {report.counterexample.describe()}")
    lines.extend(f"  note: {note}" for note in report.notes)
    return lines


def _classify(cfg: JobConfig) -> JobOutcome:
    formulas, signature = _parse(cfg, read_formula_texts(cfg.inputs))
    reports, lines = [], []
    for phi in formulas:
        d = degree(phi)
        k = d if cfg.level is None else cfg.level
        label = class_membership(phi, k, cfg.cumulative)
        paths = sorted(str(p) for p in alt_paths(phi))
        shape = prenex_shape(phi, cfg.cumulative)
        reports.append(ClassifyReport(
            formula=_text(phi, signature),
            level=k,
            degree=d,
            alt=paths,
            classes=label.names(),
            least_class=label.least_class,
            least_e_plus=label.least_e_plus,
            least_u_plus=label.least_u_plus,
            shape=str(shape) if shape else None,
            or_free=is_or_free(phi),
        ))
        lines += [
            f"formula:     {_text(phi, signature)}",
            f"alt:         {{{', '.join(paths)}}}",
            f"degree:      {d}",
            f"class:       {label.least_class}",
            f"at level {k}:  {', '.join(label.names()) or '-'}",
            f"shape:       {shape if shape else 'not prenex'}",
            f"or-free:     {'yes' if is_or_free(phi) else 'no'}",
            "",
        ]
    return JobOutcome(EXIT_OK, reports, lines[:-1])


def _prenex(cfg: JobConfig) -> JobOutcome:
    formulas, signature = _parse(cfg, read_formula_texts(cfg.inputs))
    if cfg.save_chain and len(formulas) != 1:
        raise PrenexKitError("--save-chain needs exactly one formula")
    engine = PrenexEngine(signature, contract=cfg.contract)
    oracle = _oracle(cfg, signature) if cfg.check else None
    status, reports, lines = EXIT_OK, [], []
    existential = cfg.mode.endswith("e")

    for phi in formulas:
        k = cfg.level
        if k is None:
            k = least_e_plus(phi) if existential else least_u_plus(phi)
        result = engine.run_mode(phi, cfg.mode, k)
        source, target = BUDGET_ROW_FOR_MODE[cfg.mode]
        required, side = pnft_budget(source, target, k)
        within = budget_leq(result.certificate, required)
        verdict = BudgetVerdict(
            row=f"({source}, {target}) at k={k}",
            required=[t.render(ascii=True) for t in required],
            side=[t.render(ascii=True) for t in side],
            within=within,
        )
        chain_model = ChainModel.from_chain(result.chain, signature.equality)
        if cfg.save_chain:
            Path(cfg.save_chain).write_text(chain_model.model_dump_json(indent=2), encoding="utf-8")
            logger.info(f"Chain saved to {cfg.save_chain}")
        check = oracle.replay_chain(result.chain) if oracle else None
        if not within or (check is not None and not check.passed):
            status = EXIT_FAILED

        reports.append(PrenexReport(
            formula=_text(phi, signature),
            mode=cfg.mode,
            level=k,
            output=_text(result.formula, signature),
            certificate=[t.render(ascii=True) for t in result.certificate],
            budget=verdict,
            chain=chain_model,
            oracle=CheckReportModel.from_report(check) if check else None,
        ))
        lines += [
            f"input:       {_text(phi, signature)}",
            f"output:      {_text(result.formula, signature)}",
            f"certificate: {result.certificate}",
            f"budget:      {verdict.row}: required {{{required}}}, side {{{side}}}: "
            f"{'pass' if within else 'EXCEEDED'}",
        ]
        if check is not None:
            lines += _verdict_lines(check)
        lines += ["chain:"] + _chain_lines(result.chain, signature) + [""]
    return JobOutcome(status, reports, lines[:-1])


def _translate(cfg: JobConfig) -> JobOutcome:
    texts = read_formula_texts(cfg.inputs)
    kind = "subst" if cfg.subst is not None else cfg.translation
    if kind == "subst":
        texts = texts + [cfg.subst]
    formulas, signature = _parse(cfg, texts, star=True)
    oracle = _oracle(cfg, signature) if cfg.check else None

    if kind == "conservation":
        if len(formulas) != 2:
            raise PrenexKitError("--conservation takes a hypothesis and a conclusion matrix")
        psi, matrix = formulas
        k = cfg.level if cfg.level is not None else pi_level(matrix)
        if k is None:
            raise ShapeMismatchError("The conclusion matrix is not prenex")
        chain = conservation_chain(psi, matrix, k, tuple(cfg.forall_vars), tuple(cfg.exists_vars))
        check = oracle.replay_chain(chain) if oracle else None
        report = TranslateReport(
            formula=f"{_text(psi, signature)} ; {_text(matrix, signature)}",
            kind=kind,
            output=_text(chain.final, signature),
            chain=ChainModel.from_chain(chain, signature.equality),
            oracle=CheckReportModel.from_report(check) if check else None,
        )
        lines = [f"conclusion:  {_text(chain.final, signature)}", f"level:       {k}"]
        if check is not None:
            lines += _verdict_lines(check)
        lines += ["chain:"] + _chain_lines(chain, signature)
        return JobOutcome(_status(check), report, lines)

    replacement = None
    if kind == "subst":
        *formulas, replacement = formulas

    status, reports, lines = EXIT_OK, [], []
    for phi in formulas:
        chain, check = None, None
        if kind == "kuroda":
            output = kuroda(phi)
            if is_prenex(phi):
                level = cfg.level if cfg.level is not None else prenex_shape(phi).level
                chain = kuroda_equivalence_chain(phi, level)
                check = oracle.replay_chain(chain) if oracle else None
            elif oracle:
                check = oracle.check_equiv(phi, output)
        elif kind == "kuroda-inner":
            output = kuroda_inner(phi)
        elif kind == "atrans":
            output = a_translate(phi)
            if oracle:
                check = oracle.check_equiv(substitute_star(output, Bottom()), phi)
        else:
            output = substitute_star(phi, replacement)
        if _status(check) != EXIT_OK:
            status = EXIT_FAILED

        reports.append(TranslateReport(
            formula=_text(phi, signature),
            kind=kind,
            output=_text(output, signature),
            chain=ChainModel.from_chain(chain, signature.equality) if chain else None,
            oracle=CheckReportModel.from_report(check) if check else None,
        ))
        lines += [f"input:       {_text(phi, signature)}", f"{kind + ':':<13}{_text(output, signature)}"]
        if check is not None:
            lines += _verdict_lines(check)
        if chain is not None:
            lines += ["chain:"] + _chain_lines(chain, signature)
        lines.append("")
    return JobOutcome(status, reports, lines[:-1])


def _verify(cfg: JobConfig) -> JobOutcome:
    texts = read_formula_texts(cfg.inputs)
    if len(texts) not in (1, 2):
        raise PrenexKitError(f"verify takes one or two formulas, got {len(texts)}")
    formulas, signature = _parse(cfg, texts)
    oracle = _oracle(cfg, signature)
    if len(formulas) == 2:
        check = oracle.check_equiv(formulas[0], formulas[1], cfg.scope)
        name = "equiv"
    else:
        check = oracle.check_valid(formulas[0], cfg.scope)
        name = "valid"
    report = VerifyReport(
        left=_text(formulas[0], signature),
        right=_text(formulas[1], signature) if len(formulas) == 2 else None,
        check=name,
        scope=cfg.scope,
        oracle=CheckReportModel.from_report(check),
    )
    lines = [f"check:       {name} [{cfg.scope.value}]"] + _verdict_lines(check)
    return JobOutcome(_status(check), report, lines)


def _chain(cfg: JobConfig) -> JobOutcome:
    if len(cfg.inputs) != 1:
        raise PrenexKitError("chain takes one stored chain file")
    path = Path(cfg.inputs[0])
    if not path.is_file():
        raise FileNotFoundError(f"Chain file not found: {path}")
    model = ChainModel.model_validate_json(path.read_text(encoding="utf-8"))
    base = _base_signature(cfg)
    signature = base.with_star() if base is not None else None
    chain = model.to_chain(signature)
    check = _oracle(cfg, signature).replay_chain(chain)
    report = ChainReplayReport(
        path=str(path),
        steps=len(chain),
        certificate=[t.render(ascii=True) for t in chain.certificate],
        oracle=CheckReportModel.from_report(check),
    )
    lines = [f"chain:       {path} ({len(chain)} steps)", f"certificate: {chain.certificate}"]
    return JobOutcome(_status(check), report, lines + _verdict_lines(check))


def _corpus(cfg: JobConfig) -> JobOutcome:
    if len(cfg.inputs) != 1:
        raise PrenexKitError("corpus takes one directory")
    runner = CorpusRunner(
        signature=_base_signature(cfg),
        sizes=cfg.sizes,
        atom_budget=cfg.atom_budget,
        samples=cfg.samples,
        seed=cfg.seed,
        workers=cfg.workers,
        contract=cfg.contract,
    )
    result = runner.corpus_run(cfg.inputs[0])
    root = Path(result.directory)
    cases = [
        CorpusCaseModel(
            path=Path(c.path).relative_to(root).as_posix() if Path(c.path).is_relative_to(root) else c.path,
            passed=c.passed,
            checks=c.checks,
            failures=c.failures,
        )
        for c in result.cases
    ]
    report = CorpusReport(
        directory=result.directory,
        passed=result.passed,
        total=len(result.cases),
        failed=result.failed,
        cases=cases,
        warnings=result.warnings,
    )
    lines = [f"warning: {w}" for w in result.warnings]
    for case in cases:
        lines.append(f"{'PASS' if case.passed else 'FAIL'} {case.path} ({case.checks} checks)")
        lines.extend(f"  {failure}" for failure in case.failures)
    lines.append(f"{report.total - report.failed}/{report.total} passed")
    return JobOutcome(EXIT_OK if result.passed else EXIT_FAILED, report, lines)


def _status(check: Optional[CheckReport]) -> int:
    return EXIT_FAILED if check is not None and not check.passed else EXIT_OK


_HANDLERS = {
    "classify": _classify,
    "prenex": _prenex,
    "translate": _translate,
    "verify": _verify,
    "chain": _chain,
    "corpus": _corpus,
}


def run(cfg: JobConfig) -> JobOutcome:
    """
    Run one job.

    Args:
        cfg: Validated job configuration.

    Returns:
        JobOutcome with exit status 0 (success), 1 (verification failure)
        or 2 (input error, with the message in `error`).
    """
    logger.debug(f"Running {cfg.subcommand} on {len(cfg.inputs)} input(s)")
    try:
        return _HANDLERS[cfg.subcommand](cfg)
    except (ValueError, OSError) as e:
        # PrenexKitError is a ValueError, as are pydantic validation errors
        logger.debug(f"{cfg.subcommand} failed: {e!r}")
        return JobOutcome(EXIT_INPUT, error=str(e))


def emit(outcome: JobOutcome, output: str = "text") -> None:
    """Print an outcome and exit with its status."""
    if outcome.error is not None:
        click.echo(f"error: {outcome.error}", err=True)
    elif output == "json":
        click.echo(dump(outcome.report))
    else:
        for line in outcome.lines:
            click.echo(line)
    if outcome.status != EXIT_OK:
        raise SystemExit(outcome.status)


def _job(subcommand: str, **options) -> None:
    as_json = options.pop("as_json", False)
    try:
        cfg = JobConfig(subcommand=subcommand, output="json" if as_json else "text", **options)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    emit(run(cfg), cfg.output)


# --- Command line ---

def _sizes(ctx, param, value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return list(value)
    try:
        return [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from None


def signature_option(fn):
    return click.option(
        "-s", "--signature", type=click.Path(dir_okay=False),
        help="Signature file; without it the default signature plus inferred predicates is used.",
    )(fn)


def oracle_options(fn):
    fn = click.option("--workers", default=1, type=int, help="Processes for the oracle sweep.")(fn)
    fn = click.option("--seed", default=DEFAULT_SEED, type=int, help="Seed for sampled interpretations.")(fn)
    fn = click.option("--samples", default=DEFAULT_SAMPLES, type=int,
                      help="Interpretations sampled per domain size beyond the exhaustive limits.")(fn)
    fn = click.option("--atoms", "atom_budget", default=DEFAULT_ATOM_BUDGET, type=int,
                      help="Most opaque predicates swept exhaustively.")(fn)
    fn = click.option("--sizes", default=",".join(str(b) for b in DEFAULT_SIZES), callback=_sizes,
                      help="Comma-separated domain sizes.")(fn)
    return fn


def json_option(fn):
    return click.option("--json", "as_json", is_flag=True, help="Print the JSON report.")(fn)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.version_option(__version__, prog_name="prenexkit")
def cli(verbose: bool):
    """Classify, prenex, translate and verify arithmetic formulas."""
    level = "DEBUG" if verbose else os.environ.get(ENV_LOG_LEVEL, "WARNING").upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


@cli.command()
@click.argument("formulas", nargs=-1, required=True)
@signature_option
@click.option("-k", "--level", type=int, default=None, help="Level for the class flags (default: the degree).")
@click.option("--strict", is_flag=True, help="Non-cumulative prenex shapes.")
@json_option
def classify(formulas, signature, level, strict, as_json):
    """Alternation paths, degree, classes and prenex shape."""
    _job("classify", inputs=list(formulas), signature=signature, level=level,
         cumulative=not strict, as_json=as_json)


@cli.command()
@click.argument("formulas", nargs=-1, required=True)
@signature_option
@click.option("-m", "--mode", type=click.Choice(MODES), default="e", help="Target of the prenexation.")
@click.option("-k", "--level", type=int, default=None, help="Level k (default: the least admissible).")
@click.option("--contract", is_flag=True, help="Contract quantifier blocks with pairing.")
@click.option("--save-chain", type=click.Path(dir_okay=False), default=None, help="Store the chain as JSON.")
@click.option("--check", is_flag=True, help="Replay the chain through the oracle.")
@oracle_options
@json_option
def prenex(formulas, **options):
    """Prenex normal form with certificate, budget verdict and chain."""
    _job("prenex", inputs=list(formulas), **options)


@cli.command()
@click.argument("formulas", nargs=-1, required=True)
@signature_option
@click.option("--kuroda", "translation", flag_value="kuroda", default=True, help="Negative translation (default).")
@click.option("--inner", "translation", flag_value="kuroda-inner", help="Negative translation without the outer ~~.")
@click.option("--atrans", "translation", flag_value="atrans", help="A-translation with the placeholder star.")
@click.option("--conservation", "translation", flag_value="conservation",
              help="Conservation chain for HYPOTHESIS and conclusion MATRIX.")
@click.option("--subst", default=None, metavar="PSI", help="Substitute PSI for star.")
@click.option("-x", "--forall-var", "forall_vars", multiple=True, default=("x",),
              help="Universal variable of the conclusion (repeatable).")
@click.option("-y", "--exists-var", "exists_vars", multiple=True, default=("y",),
              help="Existential variable of the conclusion (repeatable).")
@click.option("-k", "--level", type=int, default=None, help="Level of the formula or the conclusion matrix.")
@click.option("--check", is_flag=True, help="Check the result with the oracle.")
@oracle_options
@json_option
def translate(formulas, forall_vars, exists_vars, **options):
    """Kuroda and A-translations, star substitution, conservation chains."""
    _job("translate", inputs=list(formulas), forall_vars=list(forall_vars),
         exists_vars=list(exists_vars), **options)


@cli.command()
@click.argument("formulas", nargs=-1, required=True)
@signature_option
@click.option("--scope", type=click.Choice([s.value for s in ValidityScope]),
              default=ValidityScope.PURE_LOGIC.value, help="Admissible structures.")
@oracle_options
@json_option
def verify(formulas, **options):
    """Equivalence of two formulas, or validity of one."""
    _job("verify", inputs=list(formulas), **options)


@cli.command()
@click.argument("path", type=click.Path())
@signature_option
@oracle_options
@json_option
def chain(path, **options):
    """Replay a stored chain."""
    _job("chain", inputs=[path], **options)


@cli.command()
@click.argument("directory", type=click.Path())
@signature_option
@click.option("--contract", is_flag=True, help="Contract quantifier blocks in prenex outputs.")
@oracle_options
@json_option
def corpus(directory, **options):
    """Check a directory of golden files."""
    _job("corpus", inputs=[directory], **options)


def _env_defaults() -> dict:
    """Oracle defaults from the environment, for every subcommand."""
    overrides = {}
    if os.environ.get(ENV_SEED):
        overrides["seed"] = int(os.environ[ENV_SEED])
    if os.environ.get(ENV_SAMPLES):
        overrides["samples"] = int(os.environ[ENV_SAMPLES])
    return {name: dict(overrides) for name in SUBCOMMANDS if name != "classify"}


def main():
    """Entry point for the prenexkit command."""
    cli(default_map=_env_defaults())


if __name__ == "__main__":
    main()
