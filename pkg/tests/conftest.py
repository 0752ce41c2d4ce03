import pytest

from photodetach.model import IonModel, SurfaceModel

_ACCEPTANCE = []


@pytest.fixture
def ion():
    return IonModel()


@pytest.fixture
def hard_wall():
    return SurfaceModel(1.0, 2.0, 100.0)


@pytest.fixture
def acceptance_log():
    """Record one pass/fail line per acceptance criterion."""

    def log(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
