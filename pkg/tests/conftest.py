import pytest

from helpers import ACCEPTANCE, tiny_db, tiny_instance


@pytest.fixture
def tiny():
    return tiny_db()


@pytest.fixture
def tiny_inst():
    return tiny_instance(theta=2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{verdict}] {name}" + (f": {detail}" if detail else ""))
