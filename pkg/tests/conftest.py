import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from propsplit.ptb import parse_bracketed  # noqa: E402

DATA = HERE / "data"
EXAMPLES = HERE.parent / "src" / "propsplit" / "data" / "examples"


def quotes(text: str) -> str:
    return text.replace("``", '"').replace("''", '"')


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "rule_golden.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fluoroscopic():
    return parse_bracketed((EXAMPLES / "fluoroscopic.ptb").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def house():
    return parse_bracketed((EXAMPLES / "house.ptb").read_text(encoding="utf-8"))


# ------------------------------------------------------ acceptance report
ACCEPTANCE: dict = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
