"""Bound vibrational states of one channel on a radial grid."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import RadialGrid
from .operators import dense_hamiltonian
from .potentials import ChannelSpec, effective_potential

# normalized amplitude allowed at a grid end before the grid is rejected
MAX_EDGE_AMPLITUDE = 1e-6


class GridLeakageError(ValueError):
    """A requested state is not contained by the grid."""


@dataclass(frozen=True)
class EigenState:
    v: int
    energy: float  # Hartree
    grid: RadialGrid
    u: np.ndarray  # real amplitudes, unit trapezoidal norm

    def embedded(self, grid: RadialGrid) -> np.ndarray:
        """Amplitudes on a longer grid with the same origin and spacing, zero beyond."""
        if abs(grid.r_min - self.grid.r_min) > 1e-12 or abs(grid.dr - self.grid.dr) > 1e-12 * grid.dr:
            raise ValueError("target grid must share r_min and spacing")
        if grid.n_points < self.grid.n_points:
            raise ValueError("target grid is shorter than the eigenstate grid")
        out = np.zeros(grid.n_points)
        out[: self.grid.n_points] = self.u
        return out


def count_nodes(u: np.ndarray, rel_threshold: float = 1e-4) -> int:
    """Sign changes of ``u`` ignoring the exponentially small tails."""
    big = u[np.abs(u) > rel_threshold * np.max(np.abs(u))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


def bound_states(channel: ChannelSpec, grid: RadialGrid, n_states: int) -> list[EigenState]:
    """Lowest ``n_states`` eigenpairs of the channel Hamiltonian.

    Uses dense diagonalization of the compact-stencil Hamiltonian with
    u = 0 just outside the grid.  States above the lower of the two edge
    potentials are not bound on this grid and are dropped with a warning.
    """
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    n_states = min(n_states, grid.n_points)
    pot = effective_potential(channel, grid.r)
    h = dense_hamiltonian(grid, channel.mu, pot)
    energies, vecs = scipy.linalg.eigh(h, subset_by_index=[0, n_states - 1])
    threshold = min(pot[0], pot[-1])

    states = []
    for v, (e, vec) in enumerate(zip(energies, vecs.T)):
        if e >= threshold:
            warnings.warn(
                f"only {v} bound states below the edge potential {threshold:.6g} Hartree "
                f"({n_states} requested)", stacklevel=2)
            break
        u = vec / np.sqrt(grid.integrate(vec * vec))
        edge = max(abs(u[0]), abs(u[-1]))
        if edge > MAX_EDGE_AMPLITUDE:
            raise GridLeakageError(
                f"state v={v} has amplitude {edge:.3g} at the grid edge; extend the grid")
        big = np.nonzero(np.abs(u) > 1e-3 * np.max(np.abs(u)))[0]
        if u[big[-1]] < 0:
            u = -u
        states.append(EigenState(v, float(e), grid, u))
    return states
