from __future__ import annotations

import os

import pytest

from fjrw.corpus import find_entry, load_corpus, run_corpus, verify_entry
from fjrw.poly import parse_polynomial

JOBS = max(1, min(8, os.cpu_count() or 1))


def poly(text: str, variables=None, params=None):
    return parse_polynomial(text, variables, params)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_results(corpus):
    """Every bundled entry, run once per session."""
    return {r.name: r for r in run_corpus(corpus, jobs=JOBS)}


@pytest.fixture(scope="session")
def runs(corpus):
    """Lazily computed mirror runs keyed by corpus name."""
    cache = {}

    def get(name: str, **params):
        key = (name, tuple(sorted(params.items())))
        if key not in cache:
            cache[key] = verify_entry(find_entry(corpus, name), params or None)
        return cache[key]

    return get


def corpus_poly(name: str, **params):
    """Potential of a bundled entry, with its variable order."""
    return find_entry(load_corpus(), name).potential(params or None)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    """Remember one PASS/FAIL line for the end-of-run summary and echo it."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
