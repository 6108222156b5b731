from fractions import Fraction

import pytest

from vsl.measure import WeightSpec, normalize

ACCEPTANCE = {}


@pytest.fixture
def semicircle():
    return normalize(WeightSpec("semicircle", 2.0), 1)


@pytest.fixture
def arcsine():
    return normalize(WeightSpec("arcsine", 2.0), 1)


@pytest.fixture
def gaussian():
    return normalize(WeightSpec("gaussian"), 1)


@pytest.fixture
def mix():
    """Semicircle of mass 0.9 with a mirror pair at 2.5 of weight 0.05 each."""
    return normalize(WeightSpec("semicircle", 2.0), Fraction(9, 10), [(Fraction(5, 2), Fraction(1, 20))])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
