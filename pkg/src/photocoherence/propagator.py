"""Inhomogeneous radial Schrodinger equation for one excited channel.

    du/dt = -i [-(1/2mu) d2/dR2 + V_J(R)] u + D(R) E(t) exp(-i E_g t) u_g(R)

The excited packet starts at zero and is fed by the field-weighted
replica ``D u_g`` of the stationary ground state.  One step of length dt is

    u <- U(dt) u + dt E(t_mid) exp(-i E_g t_mid) U(dt/2) D u_g

i.e. half a step of free evolution, the source kick at the step midpoint,
and another half step, with the two half steps of consecutive kicks merged.
U is the Cayley (Crank-Nicolson) map of the compact-stencil Hamiltonian,
which is exactly unitary without an absorber.  Internally the state is
carried in a frame rotating at a reference energy so that the Cayley phase
error is evaluated close to zero energy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .core import RadialGrid, TimeGrid
from .eigensolver import EigenState
from .field import LightField
from .operators import cayley_matrix, dense_hamiltonian
from .potentials import ChannelSpec, DipoleSpec, effective_potential, eval_dipole

# final population above this triggers the weak-field warning
WEAK_FIELD_LIMIT = 0.1


class PropagationError(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class AbsorberSpec:
    """Absorbing potential -i strength ((R - start)/(r_max - start))**power for R > start."""

    start: float  # Bohr
    strength: float = 0.01  # Hartree
    power: float = 2.0

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("absorber strength must be >= 0")
        if not self.power > 0:
            raise ValueError("absorber power must be > 0")

    def gamma(self, grid: RadialGrid) -> np.ndarray:
        if not self.start < grid.r_max:
            raise ValueError(f"absorber start {self.start} must lie below r_max {grid.r_max}")
        x = np.clip((grid.r - self.start) / (grid.r_max - self.start), 0.0, None)
        return self.strength * x ** self.power


@dataclass(frozen=True)
class RadialWavepacket:
    grid: RadialGrid
    u: np.ndarray
    t: float  # a.u.

    @property
    def norm(self) -> float:
        return float(self.grid.integrate(np.abs(self.u) ** 2))


@dataclass
class WavepacketSeries:
    """Snapshots every ``stride`` steps plus per-step bookkeeping.

    ``population[n]`` is the on-grid norm after step ``n`` and ``absorbed[n]``
    the cumulative norm removed by the homogeneous part up to step ``n``.
    """

    grid: RadialGrid
    time_grid: TimeGrid
    stride: int
    times: np.ndarray
    amplitudes: np.ndarray
    population: np.ndarray
    absorbed: np.ndarray = field(repr=False)

    def __len__(self):
        return self.times.size

    def snapshot(self, k: int) -> RadialWavepacket:
        return RadialWavepacket(self.grid, self.amplitudes[k], float(self.times[k]))

    def density(self) -> np.ndarray:
        return self.amplitudes.real ** 2 + self.amplitudes.imag ** 2

    def index_of(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 0.5 * self.stride * self.time_grid.dt + 1e-9:
            raise ValueError(f"no snapshot near t={t}")
        return k


@dataclass(frozen=True)
class PropagationRun:
    grid: RadialGrid
    channel: ChannelSpec
    field: LightField
    source: EigenState
    dipole: DipoleSpec = DipoleSpec()
    stride: int = 100
    absorber: AbsorberSpec | None = None
    reference_energy: float | None = None  # defaults to E_g + carrier

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("snapshot stride must be >= 1")

    @property
    def time_grid(self) -> TimeGrid:
        return self.field.grid


def _potential(grid, channel, absorber, e_ref):
    w = effective_potential(channel, grid.r) - e_ref
    if absorber is not None:
        return w - 1j * absorber.gamma(grid)
    return w.astype(complex)


def _run(grid, channel, absorber, e_ref, tg, v0, w, coeffs, stride):
    pot = _potential(grid, channel, absorber, e_ref)
    lower, diag, upper = cayley_matrix(grid, channel.mu, pot, 0.5 * tg.dt)
    mult, inv = _kernels.thomas_factor(lower, diag, upper)
    n_steps = tg.n_steps
    snaps = np.empty((n_steps // stride + 1, grid.n_points), dtype=np.complex128)
    pop = np.empty(n_steps + 1)
    hom_pop = np.empty(n_steps)
    v = np.array(v0, dtype=np.complex128)
    bad = _kernels.run_steps(v, mult, inv, upper, w, coeffs, stride, snaps, pop, hom_pop, grid.dr)
    if bad >= 0:
        raise PropagationError(int(bad), "wave packet blew up or became non-finite")
    times = tg.t[::stride][: snaps.shape[0]]
    snaps *= np.exp(-1j * e_ref * times)[:, None]
    absorbed = np.zeros(n_steps + 1)
    absorbed[1:] = np.cumsum(pop[:-1] - hom_pop)
    return WavepacketSeries(grid, tg, stride, times, snaps, pop, absorbed)


def source_vector(run: PropagationRun) -> np.ndarray:
    """D(R) u_g(R) on the propagation grid."""
    return eval_dipole(run.dipole, run.grid.r) * run.source.embedded(run.grid)


def propagate(run: PropagationRun) -> WavepacketSeries:
    grid, tg = run.grid, run.time_grid
    e_g = run.source.energy
    carrier = run.field.carrier
    e_ref = e_g + carrier if run.reference_energy is None else run.reference_energy

    half_pot = _potential(grid, run.channel, run.absorber, e_ref)
    lower, diag, upper = cayley_matrix(grid, run.channel.mu, half_pot, 0.25 * tg.dt)
    hm, hi = _kernels.thomas_factor(lower, diag, upper)
    kick = tg.dt * _kernels.cayley_apply(source_vector(run).astype(complex), hm, hi, upper)

    t_mid = tg.t[:-1] + 0.5 * tg.dt
    coeffs = run.field.midpoints * np.exp(-1j * (e_g - e_ref) * t_mid)
    series = _run(grid, run.channel, run.absorber, e_ref, tg,
                  np.zeros(grid.n_points, complex), kick, coeffs.astype(np.complex128), run.stride)
    if series.population[-1] > WEAK_FIELD_LIMIT:
        warnings.warn(f"excited population {series.population[-1]:.3g} is not small; "
                      "first-order treatment may be invalid", stacklevel=2)
    return series


def propagate_homogeneous(u0: RadialWavepacket, channel: ChannelSpec, time_grid: TimeGrid,
                          absorber: AbsorberSpec | None = None, stride: int = 1,
                          reference_energy: float = 0.0) -> WavepacketSeries:
    """Source-free evolution of ``u0``, which should be normalized."""
    if abs(u0.norm - 1.0) > 1e-6:
        raise ValueError(f"initial packet has norm {u0.norm:.8g}, expected 1")
    n = u0.grid.n_points
    return _run(u0.grid, channel, absorber, reference_energy, time_grid,
                np.asarray(u0.u, complex) * np.exp(1j * reference_energy * time_grid.t_start),
                np.zeros(n, complex), np.zeros(time_grid.n_steps, complex), stride)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|**2 / (<a|a><b|b>); 1 by convention when both vanish."""
    na, nb = np.vdot(a, a).real, np.vdot(b, b).real
    if na == 0 and nb == 0:
        return 1.0
    if na == 0 or nb == 0:
        return 0.0
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb))


def replica_sum(run: PropagationRun, quadrature_step: float) -> np.ndarray:
    """Final-time packet as an explicit sum of homogeneously evolved replicas.

    Each replica D u_g E(tau) exp(-i E_g tau) is launched at a quadrature node
    tau and evolved to the end of the window with the exact exponential of the
    grid Hamiltonian; the nodes are combined with trapezoidal weights.
    """
    grid, tg = run.grid, run.time_grid
    pot = effective_potential(run.channel, grid.r)
    if run.absorber is not None:
        pot = pot - 1j * run.absorber.gamma(grid)
    h = dense_hamiltonian(grid, run.channel.mu, pot)
    src = source_vector(run)
    if run.absorber is None:
        lam, vecs = scipy.linalg.eigh(h)
        proj = vecs.T @ src
    else:
        lam, vecs = scipy.linalg.eig(h)
        proj = scipy.linalg.solve(vecs, src.astype(complex))

    n_nodes = max(int(round((tg.t_end - tg.t_start) / quadrature_step)), 1)
    tau = np.linspace(tg.t_start, tg.t_end, n_nodes + 1)
    weights = np.full(tau.size, tau[1] - tau[0])
    weights[[0, -1]] *= 0.5
    e_tau = np.interp(tau, tg.t, run.field.samples)
    amp = weights * e_tau * np.exp(-1j * run.source.energy * tau)
    # sum_k amp_k exp(-i lam (T - tau_k)) for every eigenvalue
    phase = np.exp(-1j * np.outer(lam, tg.t_end - tau)) @ amp
    return vecs @ (proj * phase)


def superposition_sum_check(run: PropagationRun, quadrature_step: float) -> float:
    """Fidelity between the stepped solution and the replica sum at the final time."""
    stepped = propagate(run)
    final = stepped.amplitudes[-1]
    if stepped.times[-1] != run.time_grid.t[-1]:
        raise ValueError("snapshot stride must divide the number of steps")
    return fidelity(final, replica_sum(run, quadrature_step))


def spatial_moments(grid: RadialGrid, u: np.ndarray) -> tuple[float, float]:
    """Mean and variance of R under the normalized density |u|**2."""
    rho = np.abs(u) ** 2
    norm = grid.integrate(rho)
    if norm == 0:
        return float("nan"), float("nan")
    r = grid.r
    mean = grid.integrate(r * rho) / norm
    return float(mean), float(grid.integrate((r - mean) ** 2 * rho) / norm)
