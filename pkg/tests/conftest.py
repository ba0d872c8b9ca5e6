import pytest

from fairfleet.generators import example1, example2, theorem1, theorem3

_CRITERIA = []


@pytest.fixture
def record_criterion():
    """Log one acceptance line; printed in the terminal summary."""

    def record(number, title, passed, detail=""):
        _CRITERIA.append((number, title, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_CRITERIA):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex2():
    return example2().instance


@pytest.fixture
def thm1():
    return theorem1().instance


@pytest.fixture
def thm3():
    return theorem3().instance
