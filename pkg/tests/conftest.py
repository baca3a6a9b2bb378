import numpy as np
import pytest
from hypothesis import settings

from lcmtools.sampling import rng_from_env

settings.register_profile("lcm", max_examples=200, deadline=None)
settings.load_profile("lcm")


@pytest.fixture
def rng():
    """Seeded generator; override the seed with ``LCM_SEED``."""
    return rng_from_env()


def pytest_report_header(config):
    import os
    return f"LCM_SEED={os.environ.get('LCM_SEED', 'default')}"


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report(capsys):
    """Record one pass/fail line per acceptance criterion.

    Lines are echoed immediately (bypassing capture) and repeated in the
    terminal summary.
    """
    def report(criterion, passed, detail):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n  {line}")
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
