import pytest
from hypothesis import HealthCheck, settings

from trapscatter import ScatteringContext, TrapGeometry

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion's verdict; the summary prints at the end of the run."""

    def record(key: str, passed: bool, detail: str) -> None:
        _CRITERIA[key] = (bool(passed), detail)
        assert passed, f"criterion {key} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int(k.rstrip("abc")), k)):
        passed, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {key}: {detail}")


@pytest.fixture
def unit_trap():
    return TrapGeometry()


@pytest.fixture
def ctx2():
    return ScatteringContext(2.0, 0.1)
