from __future__ import annotations

import pytest

from friends20.eliminator import eliminate_omega


@pytest.fixture(scope="session")
def elimination():
    """Elimination results for omega = 3, 4, 5, computed once per session."""
    return {w: eliminate_omega(w) for w in (3, 4, 5)}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
