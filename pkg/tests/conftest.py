import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        ACCEPTANCE[number] = (title, bool(ok), detail)
        print(_line(number))
    return record


def _line(number):
    title, ok, detail = ACCEPTANCE[number]
    text = f"criterion {number:2d}  {'PASS' if ok else 'FAIL'}  {title}"
    return f"{text}: {detail}" if detail else text


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(_line(number))
