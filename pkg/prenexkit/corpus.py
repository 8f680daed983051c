"""
Corpus module - golden-file discovery and checking.

Responsible for:
- Finding golden files (*.fol) under a corpus directory
- Parsing their `key: value` lines into GoldenCase records
- Checking each case against classify, the prenex engine, the
  translations and the oracle, and aggregating the verdicts

A directory may carry a `default.sig` signature file; predicates the
goldens use without declaring them are added as opaque predicates.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from prenexkit.certificates import Certificate, budget_leq, operation_budget
from prenexkit.chain import ValidityScope
from prenexkit.classify import (
    AlternationPath,
    alt_paths,
    class_membership,
    degree,
    in_pi,
    in_sigma,
    least_e_plus,
    least_u_plus,
    prenex_shape,
)
from prenexkit.errors import MalformedGoldenFileError, PrenexKitError
from prenexkit.formula import alpha_eq, free_vars
from prenexkit.oracle import (
    DEFAULT_ATOM_BUDGET,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_SIZES,
    Oracle,
)
from prenexkit.parser import format_formula, parse_with_signature
from prenexkit.prenex import MODES, PrenexEngine
from prenexkit.signature import Signature, load_signature
from prenexkit.translations import kuroda, kuroda_inner

logger = logging.getLogger(__name__)


# --- Configuration ---

GOLDEN_EXTENSION = ".fol"
SIGNATURE_FILE = "default.sig"

GOLDEN_KEYS = {
    "formula", "level", "class", "degree", "alt", "shape", "prenex",
    "budget", "certificate", "kuroda", "kuroda-inner", "equiv", "scope", "note",
}

# Keys whose value is another formula over the same signature
FORMULA_KEYS = ("kuroda", "kuroda-inner", "equiv")

OPERATION_FOR_MODE = {
    "e": "prenex_e",
    "u": "prenex_u",
    "df-e": "prenex_df_e",
    "df-u": "prenex_df_u",
}

_PATH_PATTERN = re.compile(r"<[^>]*>|⟨[^⟩]*⟩")


# --- Golden files ---

@dataclass
class GoldenCase:
    """One parsed golden file."""
    path: str
    entries: dict
    lines: dict  # key -> line number

    @property
    def formula(self) -> str:
        return self.entries["formula"]

    def get(self, key: str) -> Optional[str]:
        return self.entries.get(key)

    def malformed(self, key: str, message: str) -> MalformedGoldenFileError:
        return MalformedGoldenFileError(self.path, message, self.lines.get(key))


def parse_golden(path) -> GoldenCase:
    """
    Read a golden file.

    Args:
        path: Path to a `key: value` file; `#` starts a comment line.

    Returns:
        GoldenCase with the raw values.

    Raises:
        MalformedGoldenFileError: On a line without a colon, an unknown or
                                  repeated key, or a missing formula.
    """
    path = Path(path)
    entries: dict = {}
    lines: dict = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise MalformedGoldenFileError(str(path), f"expected 'key: value', got {line!r}", number)
        if key not in GOLDEN_KEYS:
            raise MalformedGoldenFileError(str(path), f"unknown key {key!r}", number)
        if key in entries:
            raise MalformedGoldenFileError(str(path), f"repeated key {key!r}", number)
        entries[key] = value.strip()
        lines[key] = number
    if "formula" not in entries:
        raise MalformedGoldenFileError(str(path), "missing 'formula' entry")
    return GoldenCase(str(path), entries, lines)


def discover(directory) -> list:
    """Golden files under directory, sorted, hidden entries skipped."""
    root = Path(directory)
    if not root.exists():
        raise FileNotFoundError(f"Corpus directory not found: {root}")
    if not root.is_dir():
        raise ValueError(f"Not a directory: {root}")
    return sorted(
        p for p in root.rglob(f"*{GOLDEN_EXTENSION}")
        if p.is_file() and not any(part.startswith(".") for part in p.relative_to(root).parts)
    )


# --- Results ---

@dataclass
class CaseResult:
    """Verdict for one golden file."""
    path: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks += 1
        if not ok:
            self.failures.append(f"{name}: {detail}" if detail else name)


@dataclass
class CorpusResult:
    """Aggregate over a corpus directory."""
    directory: str
    cases: list[CaseResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.cases if not c.passed)

    @property
    def passed(self) -> bool:
        return self.failed == 0


# --- Runner ---

class CorpusRunner:
    """
    Checks golden files.

    Args:
        signature: Base signature; the directory's default.sig, or the
                   default signature, when None.
        sizes, atom_budget, samples, seed, workers: Oracle parameters.
        contract: Contract quantifier blocks in prenex outputs.
    """

    def __init__(
        self,
        signature: Optional[Signature] = None,
        sizes: Iterable[int] = DEFAULT_SIZES,
        atom_budget: int = DEFAULT_ATOM_BUDGET,
        samples: int = DEFAULT_SAMPLES,
        seed: int = DEFAULT_SEED,
        workers: int = 1,
        contract: bool = False,
    ):
        self.signature = signature
        self.sizes = tuple(sizes)
        self.atom_budget = atom_budget
        self.samples = samples
        self.seed = seed
        self.workers = workers
        self.contract = contract

    def corpus_run(self, directory) -> CorpusResult:
        """
        Check every golden file under directory.

        Returns:
            CorpusResult; an empty corpus passes with a warning.

        Raises:
            FileNotFoundError: If directory does not exist.
            MalformedGoldenFileError: If a golden file cannot be parsed.
        """
        paths = discover(directory)
        result = CorpusResult(directory=str(directory))
        if not paths:
            message = f"No golden files in {directory}"
            logger.warning(message)
            result.warnings.append(message)
            return result

        base = self.signature
        signature_file = Path(directory) / SIGNATURE_FILE
        if base is None and signature_file.exists():
            base = load_signature(str(signature_file))

        for index, path in enumerate(paths, start=1):
            try:
                case = parse_golden(path)
                outcome = self.check_case(case, base)
            except MalformedGoldenFileError as e:
                logger.error(f"Malformed golden file: {e}")
                raise
            result.cases.append(outcome)
            logger.info(
                f"[{index}/{len(paths)}] {path.name}: "
                f"{'pass' if outcome.passed else 'FAIL'} ({outcome.checks} checks)"
            )
        logger.info(f"Corpus {directory}: {len(paths) - result.failed}/{len(paths)} passed")
        return result

    def check_case(self, case: GoldenCase, base: Optional[Signature] = None) -> CaseResult:
        """
        Check one golden case.

        Raises:
            MalformedGoldenFileError: If a value cannot be interpreted.
        """
        keys = ["formula"] + [k for k in FORMULA_KEYS if case.get(k) is not None]
        try:
            parsed, signature = parse_with_signature([case.entries[k] for k in keys], base)
        except PrenexKitError as e:
            raise case.malformed(keys[0], str(e)) from e
        formulas = dict(zip(keys, parsed))
        phi = formulas["formula"]

        outcome = CaseResult(case.path)
        oracle = Oracle(
            signature,
            sizes=self.sizes,
            atom_budget=self.atom_budget,
            samples=self.samples,
            seed=self.seed,
            workers=self.workers,
        )
        level = self._int(case, "level")
        d = degree(phi)

        if case.get("degree") is not None:
            expected = self._int(case, "degree")
            outcome.check("degree", d == expected, f"expected {expected}, got {d}")

        if case.get("alt") is not None:
            expected_paths = self._paths(case)
            actual = alt_paths(phi)
            outcome.check(
                "alt", actual == expected_paths,
                f"expected {_render_paths(expected_paths)}, got {_render_paths(actual)}",
            )

        if case.get("class") is not None:
            label = class_membership(phi, d if level is None else level)
            expected_class = case.get("class").replace(" ", "")
            outcome.check(
                "class", label.least_class == expected_class,
                f"expected {expected_class}, got {label.least_class}",
            )

        if case.get("shape") is not None:
            shape = prenex_shape(phi)
            actual_shape = "none" if shape is None else str(shape)
            expected_shape = case.get("shape").replace("Σ", "Sigma").replace("Π", "Pi").strip()
            outcome.check(
                "shape", actual_shape.lower() == expected_shape.lower(),
                f"expected {expected_shape}, got {actual_shape}",
            )

        if case.get("prenex") is not None:
            self._check_prenex(case, phi, level, signature, oracle, outcome)

        if "kuroda" in formulas:
            translated = kuroda(phi)
            outcome.check(
                "kuroda", alpha_eq(translated, formulas["kuroda"]),
                f"got {format_formula(translated, signature.equality)}",
            )
            report = oracle.check_equiv(phi, translated)
            outcome.check("kuroda-equivalence", report.passed, _counterexample(report))

        if "kuroda-inner" in formulas:
            translated = kuroda_inner(phi)
            outcome.check(
                "kuroda-inner", alpha_eq(translated, formulas["kuroda-inner"]),
                f"got {format_formula(translated, signature.equality)}",
            )

        if "equiv" in formulas:
            scope = self._scope(case)
            report = oracle.check_equiv(phi, formulas["equiv"], scope)
            outcome.check("equiv", report.passed, _counterexample(report))

        return outcome

    def _check_prenex(self, case, phi, level, signature, oracle, outcome) -> None:
        mode = case.get("prenex").lower()
        if mode not in MODES:
            raise case.malformed("prenex", f"unknown mode {mode!r} (expected one of {', '.join(MODES)})")
        existential = mode.endswith("e")
        k = level
        if k is None:
            k = least_e_plus(phi) if existential else least_u_plus(phi)

        engine = PrenexEngine(signature, contract=self.contract)
        try:
            result = engine.run_mode(phi, mode, k)
        except PrenexKitError as e:
            outcome.check("prenex", False, str(e))
            return

        output = result.formula
        shaped = in_sigma(output, k) if existential else in_pi(output, k)
        target = "Sigma" if existential else "Pi"
        outcome.check(
            "prenex-shape", shaped,
            f"{format_formula(output, signature.equality)} is not {target}_{k}",
        )
        outcome.check(
            "free-variables", free_vars(output) == free_vars(phi),
            f"{sorted(free_vars(output))} != {sorted(free_vars(phi))}",
        )
        declared = operation_budget(OPERATION_FOR_MODE[mode], k)
        outcome.check(
            "operation-budget", budget_leq(result.certificate, declared),
            f"{result.certificate} exceeds {declared}",
        )
        if case.get("budget") is not None:
            budget = self._certificate(case, "budget")
            outcome.check(
                "budget", budget_leq(result.certificate, budget),
                f"{result.certificate} exceeds {budget}",
            )
        if case.get("certificate") is not None:
            expected = self._certificate(case, "certificate").normalized()
            actual = result.certificate.normalized()
            outcome.check(
                "certificate", set(actual) == set(expected),
                f"expected {expected}, got {actual}",
            )
        report = oracle.replay_chain(result.chain)
        outcome.check("chain-replay", report.passed, _counterexample(report))

    # --- Value parsing ---

    @staticmethod
    def _int(case: GoldenCase, key: str) -> Optional[int]:
        value = case.get(key)
        if value is None:
            return None
        try:
            number = int(value)
        except ValueError:
            raise case.malformed(key, f"{key} must be an integer, got {value!r}") from None
        if number < 0:
            raise case.malformed(key, f"{key} must be non-negative")
        return number

    @staticmethod
    def _paths(case: GoldenCase) -> frozenset:
        value = case.get("alt")
        found = _PATH_PATTERN.findall(value)
        if not found:
            raise case.malformed("alt", f"no alternation paths in {value!r}")
        try:
            return frozenset(AlternationPath.parse(p) for p in found)
        except ValueError as e:
            raise case.malformed("alt", str(e)) from e

    @staticmethod
    def _certificate(case: GoldenCase, key: str) -> Certificate:
        try:
            return Certificate.parse(case.get(key))
        except PrenexKitError as e:
            raise case.malformed(key, str(e)) from e

    @staticmethod
    def _scope(case: GoldenCase) -> ValidityScope:
        value = case.get("scope") or ValidityScope.PURE_LOGIC.value
        try:
            return ValidityScope(value)
        except ValueError:
            raise case.malformed("scope", f"unknown scope {value!r}") from None


def _render_paths(paths) -> str:
    return "{" + ", ".join(str(p) for p in sorted(paths)) + "}"


def _counterexample(report) -> str:
    if report.counterexample is None:
        return "; ".join(report.notes)
    return report.counterexample.describe()
