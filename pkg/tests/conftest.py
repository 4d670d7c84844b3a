"""Shared fixtures: the four named reference systems and small helpers."""

import numpy as np
import pytest

from fcstates import PopescuSystem


def eij(i: int, j: int, n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


@pytest.fixture(scope="session")
def averaging3() -> PopescuSystem:
    """d=4 on C^3; transfer map X -> diag(X11, X22, (X11+X22)/2).

    The standard example of a fixed-point set that is not an algebra.
    """
    return PopescuSystem.from_operators(
        [
            eij(0, 0, 3),
            eij(1, 1, 3),
            eij(2, 0, 3) / np.sqrt(2),
            eij(2, 1, 3) / np.sqrt(2),
        ]
    )


@pytest.fixture(scope="session")
def rank_one2() -> PopescuSystem:
    """d=2 on C^2 with V_i = e_{i1}; unique invariant state is pure (e11)."""
    return PopescuSystem.from_operators([eij(0, 0, 2), eij(1, 0, 2)])


@pytest.fixture(scope="session")
def swap2() -> PopescuSystem:
    """d=2 on C^2 with V_1 = e12, V_2 = e21; peripheral spectrum {1, -1}."""
    return PopescuSystem.from_operators([eij(0, 1, 2), eij(1, 0, 2)])


def scalar(alpha: complex, beta: complex) -> PopescuSystem:
    """d=2 on C^1 with V = (alpha, beta), |alpha|^2 + |beta|^2 = 1."""
    return PopescuSystem.from_operators(
        [np.array([[alpha]], dtype=complex), np.array([[beta]], dtype=complex)]
    )


@pytest.fixture(scope="session")
def scalar_half() -> PopescuSystem:
    return scalar(1 / np.sqrt(2), 1 / np.sqrt(2))


def random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return m / np.trace(m).real
