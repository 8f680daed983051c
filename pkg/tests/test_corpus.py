"""
Tests for golden-file parsing and the corpus runner.
"""

import pytest

from prenexkit.corpus import CorpusRunner, GoldenCase, discover, parse_golden
from prenexkit.errors import MalformedGoldenFileError


@pytest.fixture
def runner():
    return CorpusRunner(sizes=(2,))


class TestParseGolden:
    """`key: value` golden files."""

    def test_entries_and_lines(self, temp_corpus):
        """Comments are skipped and every key remembers its line."""
        case = parse_golden(temp_corpus / "nested" / "shift.fol")
        assert case.formula == "forall x. (exists y. P(x,y)) -> Q(x)"
        assert case.get("prenex") == "u"
        assert case.get("certificate") == "{}"
        assert case.lines["formula"] == 2

    def test_missing_colon(self, tmp_path):
        path = tmp_path / "bad.fol"
        path.write_text("formula: A\nclass E_1\n")
        with pytest.raises(MalformedGoldenFileError) as excinfo:
            parse_golden(path)
        assert excinfo.value.line == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.fol"
        path.write_text("formula: A\nflavour: sweet\n")
        with pytest.raises(MalformedGoldenFileError, match="unknown key"):
            parse_golden(path)

    def test_repeated_key(self, tmp_path):
        path = tmp_path / "bad.fol"
        path.write_text("formula: A\nformula: B\n")
        with pytest.raises(MalformedGoldenFileError, match="repeated key"):
            parse_golden(path)

    def test_missing_formula(self, tmp_path):
        path = tmp_path / "bad.fol"
        path.write_text("class: E_1\n")
        with pytest.raises(MalformedGoldenFileError):
            parse_golden(path)


class TestDiscover:
    def test_recursive_and_sorted(self, temp_corpus):
        """Golden files are found in subdirectories; other files are ignored."""
        names = [p.relative_to(temp_corpus).as_posix() for p in discover(temp_corpus)]
        assert names == ["nested/shift.fol", "pi2.fol"]

    def test_hidden_skipped(self, temp_corpus):
        hidden = temp_corpus / ".drafts"
        hidden.mkdir()
        (hidden / "draft.fol").write_text("formula: A\n")
        assert len(discover(temp_corpus)) == 2

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            discover(tmp_path / "nowhere")


class TestCorpusRunner:
    """Checking golden cases."""

    def test_shipped_corpus(self, shipped_corpus):
        """Every shipped golden file passes."""
        result = CorpusRunner().corpus_run(shipped_corpus)
        failures = {c.path: c.failures for c in result.cases if not c.passed}
        assert result.cases
        assert not failures

    def test_temp_corpus(self, runner, temp_corpus):
        result = runner.corpus_run(temp_corpus)
        assert result.passed
        assert len(result.cases) == 2
        assert all(c.checks > 0 for c in result.cases)

    def test_perturbed_expectation(self, runner, temp_corpus):
        """A wrong expected class fails that case and only that check."""
        (temp_corpus / "wrong.fol").write_text(
            "formula: forall x. exists y. P(x,y)\n"
            "class: E_2\n"
            "degree: 2\n"
        )
        result = runner.corpus_run(temp_corpus)
        assert not result.passed
        assert result.failed == 1
        wrong = next(c for c in result.cases if c.path.endswith("wrong.fol"))
        assert len(wrong.failures) == 1
        assert wrong.failures[0].startswith("class")

    def test_certificate_mismatch(self, runner, temp_corpus):
        """An exact certificate that the engine does not produce fails."""
        (temp_corpus / "cert.fol").write_text(
            "formula: forall x. (exists y. P(x,y)) -> Q(x)\n"
            "prenex: u\n"
            "certificate: Sigma_1-DNE\n"
        )
        result = runner.corpus_run(temp_corpus)
        cert = next(c for c in result.cases if c.path.endswith("cert.fol"))
        assert any(f.startswith("certificate") for f in cert.failures)

    def test_wrong_equivalence(self, runner, temp_corpus):
        """A claimed equivalence that fails reports a counterexample."""
        (temp_corpus / "swap.fol").write_text(
            "formula: forall x. exists y. P(x,y)\n"
            "equiv: exists y. forall x. P(x,y)\n"
        )
        result = runner.corpus_run(temp_corpus)
        swap = next(c for c in result.cases if c.path.endswith("swap.fol"))
        assert swap.failures and swap.failures[0].startswith("equiv")
        assert "B=" in swap.failures[0]

    def test_empty_corpus(self, runner, empty_corpus):
        """An empty corpus passes with a warning."""
        result = runner.corpus_run(empty_corpus)
        assert result.passed
        assert result.warnings

    def test_malformed_file(self, runner, temp_corpus):
        (temp_corpus / "broken.fol").write_text("formula: P(x) &\n")
        with pytest.raises(MalformedGoldenFileError):
            runner.corpus_run(temp_corpus)

    def test_bad_level(self, runner):
        case = GoldenCase("inline.fol", {"formula": "A", "level": "two", "class": "F_0"}, {"level": 2})
        with pytest.raises(MalformedGoldenFileError) as excinfo:
            runner.check_case(case)
        assert excinfo.value.line == 2

    def test_unknown_mode(self, runner):
        case = GoldenCase("inline.fol", {"formula": "A", "prenex": "sideways"}, {"prenex": 2})
        with pytest.raises(MalformedGoldenFileError, match="unknown mode"):
            runner.check_case(case)

    def test_signature_file(self, runner, temp_corpus):
        """A default.sig in the directory is the base signature."""
        (temp_corpus / "default.sig").write_text(
            "function 0/0 = zero\n"
            "function 1/0 = one\n"
            "predicate eq/2 = eq\n"
            "predicate P/2\n"
        )
        (temp_corpus / "arity.fol").write_text("formula: P(x)\n")
        with pytest.raises(MalformedGoldenFileError):
            runner.corpus_run(temp_corpus)
