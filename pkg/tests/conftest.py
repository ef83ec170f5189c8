import sys
from pathlib import Path

import pytest

from subtab import load_corpus

# Make sibling test helpers importable regardless of invocation directory.
sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent.parent / "src" / "subtab" / "fixtures"


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[{status}] {name}", flush=True)


@pytest.fixture(scope="session")
def dance_example():
    return load_corpus(FIXTURES / "dance_scores.jsonl")[0]


@pytest.fixture(scope="session")
def engine_example():
    return load_corpus(FIXTURES / "engine_models.jsonl")[0]


@pytest.fixture(scope="session")
def loss_example():
    return load_corpus(FIXTURES / "loss_totals.jsonl")[0]
