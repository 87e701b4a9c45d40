import numpy as np
import pytest

from photocoherence.core import RadialGrid
from photocoherence.operators import cayley_matrix, dense_hamiltonian, kinetic_symbol


def test_box_modes_match_symbol():
    # sine modes are exact eigenvectors of both stencil matrices with u = 0 outside
    grid = RadialGrid(0.1, 10.1, 201)
    mu = 918.0
    h = dense_hamiltonian(grid, mu, np.zeros(grid.n_points))
    assert np.allclose(h, h.T)
    energies = np.linalg.eigvalsh(h)[:20]
    k = np.pi * np.arange(1, 21) / ((grid.n_points + 1) * grid.dr)
    np.testing.assert_allclose(energies, kinetic_symbol(k, mu, grid.dr), rtol=1e-10)


def test_symbol_error_is_fourth_order():
    mu, dr = 918.0, 0.02
    for k in (2.0, 5.0, 10.0):
        rel = kinetic_symbol(k, mu, dr) / (k * k / (2 * mu)) - 1
        assert rel == pytest.approx(-(k * dr) ** 4 / 240, rel=0.05)


def test_cayley_bands_equal_dense_product():
    grid = RadialGrid(0.5, 3.5, 31)
    rng = np.random.default_rng(1)
    pot = rng.normal(size=31) - 0.2j * rng.random(31)
    mu, tau = 50.0, 0.37
    lower, diag, upper = cayley_matrix(grid, mu, pot, tau)
    m = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
    b = (np.diag(np.full(31, 10.0)) + np.diag(np.ones(30), 1) + np.diag(np.ones(30), -1)) / 12
    h = dense_hamiltonian(grid, mu, pot)
    np.testing.assert_allclose(m, b @ (np.eye(31) + 1j * tau * h), atol=1e-10)
