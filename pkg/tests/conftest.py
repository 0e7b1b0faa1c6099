import pytest

from icbargain import StandardChannel

_ACCEPTANCE_LINES = []


@pytest.fixture
def ref_channel():
    """20 dB / 15 dB, alpha=0.4, beta=0.7."""
    return StandardChannel.from_db(20.0, 15.0, 0.4, 0.7)


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def _report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
