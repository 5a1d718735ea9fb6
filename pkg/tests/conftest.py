"""Shared fixtures plus a terminal summary for the acceptance gate.

Each test in test_acceptance.py covers one numbered criterion; its first
docstring line is the criterion statement.  After a run that included any
of them, print one PASS/FAIL line per criterion so the gate is readable
at a glance.
"""

from __future__ import annotations

import pytest

_CRITERIA: dict[str, str] = {}
_OUTCOMES: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.module.__name__ != "test_acceptance":
            continue
        doc = (item.function.__doc__ or "").strip().splitlines()
        title = doc[0] if doc else item.name
        _CRITERIA[item.nodeid] = title


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    if report.when == "call":
        _OUTCOMES[report.nodeid] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _OUTCOMES[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_OUTCOMES):
        status = "PASS" if _OUTCOMES[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {_CRITERIA[nodeid]}")


@pytest.fixture(scope="session")
def samples_dir():
    from pathlib import Path

    return Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="session")
def corpus_100k(tmp_path_factory):
    """The synthetic 100 KLOC C corpus, generated once per session."""
    import importlib.util
    from pathlib import Path

    script = Path(__file__).resolve().parent.parent / "scripts" / "make_c_corpus.py"
    spec = importlib.util.spec_from_file_location("make_c_corpus", script)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    out = tmp_path_factory.mktemp("corpus-c")
    manifest = module.generate(out, lines_target=100_000, seed=1)
    return out, manifest
