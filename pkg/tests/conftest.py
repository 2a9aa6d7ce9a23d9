import sys

import numpy as np
import pytest

from shiftlab.opcore import EnsembleConfig, random_operator


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def contraction_pair(dim, seed=0, stream=0, margin=0.1, rank=1, size=0.2):
    T0, T1 = random_operator(EnsembleConfig(dim, "strict-contraction", margin, seed, rank, size, stream))
    return T0.entries, T1.entries


def unitary_pair(dim, seed=0, stream=0, rank=1, size=0.3):
    U0, U1 = random_operator(EnsembleConfig(dim, "unitary", 0.1, seed, rank, size, stream))
    return U0.entries, U1.entries


def dissipative_pair(dim, seed=0, stream=0, margin=0.2, rank=1, size=0.2):
    L0, L1 = random_operator(EnsembleConfig(dim, "dissipative", margin, seed, rank, size, stream))
    return L0.entries, L1.entries


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
