import numpy as np
import pytest
from hypothesis import settings, strategies as st
from scipy.special import rel_entr

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


def binary_relative_entropy(a, b):
    """Classical sum of a ln(a/b) + (1-a) ln((1-a)/(1-b)) over paired eigenvalues."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.sum(rel_entr(a, b) + rel_entr(1 - a, 1 - b)))


def hermitian(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (G + G.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
