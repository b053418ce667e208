import pytest

_RESULTS: list[tuple[str, bool, str]] = []


class Recorder:
    """Collects one pass/fail line per acceptance criterion."""

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        passed = bool(passed)
        _RESULTS.append((name, passed, detail))
        return passed


@pytest.fixture
def acceptance():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}".rstrip())
