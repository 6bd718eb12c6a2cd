import numpy as np
import pytest

from manakov.core import derive_c
from manakov.dynamics import integrate

A = np.array([1.0, 2.0, 3.0, 4.0])
B = A ** 2


def unit_state(seed):
    l = np.random.default_rng(seed).normal(size=6)
    return l / np.linalg.norm(l)


@pytest.fixture(scope="session")
def a():
    return A.copy()


@pytest.fixture(scope="session")
def c():
    return derive_c(A, B)


@pytest.fixture(scope="session")
def l0():
    return unit_state(0)


@pytest.fixture(scope="session")
def traj5(l0, c):
    return integrate(l0, c, 5.0, 1e-3)


@pytest.fixture(scope="session")
def samples50(traj5):
    idx = np.unique(np.linspace(0, len(traj5) - 1, 50).round().astype(int))
    return traj5.times[idx], traj5.states[idx]


@pytest.fixture(scope="session")
def pipeline(samples50, a):
    from manakov.abelian import uniformize

    times, states = samples50
    return uniformize(times, states, a)
