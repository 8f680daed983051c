"""
Shared fixtures and hypothesis profiles.

PRENEXKIT_HYPOTHESIS_PROFILE selects `default` (fast, derandomized) or
`acceptance` (criterion-sized example counts). Tests marked `acceptance`
run only with PRENEXKIT_ACCEPTANCE=1.
"""

import os
import tempfile
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from prenexkit.oracle import Oracle
from prenexkit.prenex import PrenexEngine
from prenexkit.signature import default_signature


settings.register_profile(
    "default",
    max_examples=30,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile(
    "acceptance",
    max_examples=1000,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("PRENEXKIT_HYPOTHESIS_PROFILE", "default"))


CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


def pytest_collection_modifyitems(config, items):
    if os.environ.get("PRENEXKIT_ACCEPTANCE") == "1":
        return
    skip = pytest.mark.skip(reason="set PRENEXKIT_ACCEPTANCE=1 for full-size acceptance runs")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def signature():
    return default_signature()


@pytest.fixture
def engine():
    """Engine over the default signature, no contraction."""
    return PrenexEngine()


@pytest.fixture
def oracle():
    """Oracle with inferred signatures on domain sizes 2 and 3."""
    return Oracle(sizes=(2, 3))


@pytest.fixture
def shipped_corpus():
    return CORPUS_DIR


@pytest.fixture
def temp_corpus():
    """A small corpus directory with two passing golden files."""
    with tempfile.TemporaryDirectory(prefix="prenexkit_corpus_") as tmpdir:
        root = Path(tmpdir)
        (root / "pi2.fol").write_text(
            "formula: forall x. exists y. P(x,y)\n"
            "alt: <-,+>\n"
            "degree: 2\n"
            "class: U_2\n"
            "shape: Pi_2\n"
        )
        nested = root / "nested"
        nested.mkdir()
        (nested / "shift.fol").write_text(
            "# existential antecedent\n"
            "formula: forall x. (exists y. P(x,y)) -> Q(x)\n"
            "class: U_1\n"
            "prenex: u\n"
            "certificate: {}\n"
        )
        (root / "readme.txt").write_text("not a golden file")
        yield root


@pytest.fixture
def empty_corpus():
    with tempfile.TemporaryDirectory(prefix="prenexkit_empty_") as tmpdir:
        yield Path(tmpdir)
