"""Radial Hamiltonian discretized with the compact (Numerov) stencil.

The second derivative is represented as ``B^-1 A`` with the tridiagonal
matrices ``A = [1, -2, 1] / dR**2`` and ``B = [1, 10, 1] / 12`` (Dirichlet
zeros just outside both grid ends).  Both are polynomials in the same
Toeplitz matrix, so ``B^-1 A`` is symmetric and the Hamiltonian

    H = -(1/2mu) B^-1 A + diag(W)

is Hermitian for real ``W``.  The kinetic error is ``(k dR)**4 / 240``
relative, which keeps the eigensolver and the propagator on exactly the same
operator while using only tridiagonal linear algebra in the time stepper.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .core import RadialGrid


def kinetic_symbol(k, mu: float, dr: float):
    """Kinetic energy the stencil assigns to a plane wave of wavenumber ``k``."""
    s = np.sin(0.5 * np.asarray(k) * dr) ** 2
    return (2.0 / (mu * dr * dr)) * s / (1.0 - s / 3.0)


def dense_hamiltonian(grid: RadialGrid, mu: float, potential: np.ndarray) -> np.ndarray:
    n = grid.n_points
    h2 = grid.dr ** 2
    a = (np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)) / h2
    b_band = np.empty((3, n))
    b_band[0] = 1.0 / 12.0
    b_band[1] = 10.0 / 12.0
    b_band[2] = 1.0 / 12.0
    lap = scipy.linalg.solve_banded((1, 1), b_band, a)
    lap = 0.5 * (lap + lap.T)
    h = (-0.5 / mu) * lap
    h = h.astype(np.result_type(h, potential))
    h[np.diag_indices(n)] += potential
    return h


def cayley_matrix(grid: RadialGrid, mu: float, potential: np.ndarray, tau: float):
    """Tridiagonal bands of ``M = B (1 + i tau H)``.

    Returns ``(lower, diag, upper)``; ``lower[0]`` and ``upper[-1]`` are unused.
    The Cayley step is then ``v -> 2 M^-1 B v - v``.
    """
    w = np.asarray(potential, dtype=complex)
    kin = 1.0 / (2.0 * mu * grid.dr ** 2)
    diag = 10.0 / 12.0 + 1j * tau * (2.0 * kin + 10.0 * w / 12.0)
    lower = np.empty_like(diag)
    upper = np.empty_like(diag)
    lower[1:] = 1.0 / 12.0 + 1j * tau * (-kin + w[:-1] / 12.0)
    upper[:-1] = 1.0 / 12.0 + 1j * tau * (-kin + w[1:] / 12.0)
    lower[0] = 0.0
    upper[-1] = 0.0
    return lower, diag, upper
