import pytest

from evcsguard import fixtures


@pytest.fixture(scope="session")
def dos_tree():
    return fixtures.dos_tree()


@pytest.fixture(scope="session")
def dos_model():
    return fixtures.dos_model()


@pytest.fixture(scope="session")
def data_dir():
    from pathlib import Path

    return Path(fixtures.data_path("dos.adt")).parent


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line, print it, and fail the test when it is red."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
