from __future__ import annotations

from pathlib import Path

import pytest

from prologqq import default_registry
from prologqq.terms import Compound, Var

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def variant(a, b, mapping=None) -> bool:
    """Structural equality up to a consistent one-to-one renaming of variables."""
    if mapping is None:
        mapping = ({}, {})
    fwd, back = mapping
    if isinstance(a, Var) and isinstance(b, Var):
        if fwd.setdefault(a.id, b.id) != b.id or back.setdefault(b.id, a.id) != a.id:
            return False
        return True
    if isinstance(a, Compound) and isinstance(b, Compound):
        return (
            a.functor == b.functor
            and a.arity == b.arity
            and all(variant(x, y, mapping) for x, y in zip(a.args, b.args))
        )
    return type(a) is type(b) and a == b


@pytest.fixture
def registry():
    return default_registry()


# -- acceptance criterion report ---------------------------------------------

_criteria: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _criteria:
        terminalreporter.write_line(f"{status}  {label}")
