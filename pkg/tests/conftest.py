from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from entsent.gazetteer import load_entity_db
from entsent.synthetic import write_demo_fixtures

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_criteria: dict[int, tuple[bool | None, str]] = {}


def db_from(obj: dict):
    return load_entity_db(io.BytesIO(json.dumps(obj).encode()))


@pytest.fixture
def criterion():
    """Record one acceptance outcome; printed as a PASS/FAIL line at session end."""

    def record(number: int, passed: bool | None, detail: str) -> None:
        _criteria[number] = (passed, detail)

    return record


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("demo")
    write_demo_fixtures(out)
    return out


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        passed, detail = _criteria[number]
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}")
