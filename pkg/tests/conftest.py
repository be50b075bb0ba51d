import math

import pytest

from pcband.profiles import TrigPolynomial1D

# The five 1D profiles used for oracle comparisons.
SUITE = {
    "cos": TrigPolynomial1D(2.0, (1.0,), (0.0,)),
    "cos_strong": TrigPolynomial1D(2.0, (1.5,), (0.0,)),
    "two_harmonics": TrigPolynomial1D(2.0, (0.5, 0.0), (0.0, 0.25)),
    "mixed": TrigPolynomial1D(1.5, (0.3, 0.2), (0.4, 0.0)),
    "third": TrigPolynomial1D(3.0, (0.0, 0.0, 1.0), (0.0, 0.0, 0.0)),
}

ALPHAS = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)


@pytest.fixture
def cos_profile():
    return SUITE["cos"]


@pytest.fixture
def free():
    return TrigPolynomial1D.constant(1.0)


# Acceptance criteria append "(id, ok, detail)" here; the summary hook prints them.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
