import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from elgfreq.model import ReturnModel  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def two_atom():
    """Cash (r=0) and a stock returning +20% or -10% with equal odds."""
    return ReturnModel.cash_and_risky([0.2, -0.1], [0.5, 0.5])


@pytest.fixture
def no_dominant():
    return ReturnModel.cash_and_risky([0.5, -0.3], [0.5, 0.5])


def random_model(rng, m_choices=(2, 3), s_choices=(2, 3), bound=0.8, cash=False):
    m = int(rng.choice(m_choices))
    s = int(rng.choice(s_choices))
    p = rng.dirichlet(np.ones(s))
    p /= p.sum()
    atoms = rng.uniform(-bound, bound, size=(s, m))
    riskless = None
    if cash:
        atoms[:, 0] = 0.0
        riskless = 0
    return ReturnModel([f"a{i}" for i in range(m)], atoms, p, riskless)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
