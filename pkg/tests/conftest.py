import numpy as np
import pytest

from asymrep import load_group_data


@pytest.fixture(scope="session")
def z2():
    return load_group_data("z2")


@pytest.fixture(scope="session")
def free2():
    return load_group_data("free2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_word(G, rng, max_len=4, max_exp=3):
    """Random normalised word with up to ``max_len`` syllables."""
    letters = []
    for _ in range(int(rng.integers(0, max_len + 1))):
        e = int(rng.integers(1, max_exp + 1)) * int(rng.choice([-1, 1]))
        letters.append((int(rng.integers(0, G.ngens)), e))
    return G.normalize(G.word_from_letters(letters))


def commuting_pair(n, rng):
    """Random genuine representation of Z^2: commuting diagonal phases, conjugated."""
    from asymrep.matrix_core import random_unitary

    Q = random_unitary(n, rng)
    A = (Q * np.exp(2j * np.pi * rng.random(n))) @ Q.conj().T
    B = (Q * np.exp(2j * np.pi * rng.random(n))) @ Q.conj().T
    return A, B


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
