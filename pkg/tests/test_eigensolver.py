import numpy as np
import pytest

from photocoherence.core import RadialGrid
from photocoherence.eigensolver import GridLeakageError, bound_states, count_nodes
from photocoherence.potentials import ChannelSpec, PesSpec

from conftest import HEAVY_GROUND

MORSE = ChannelSpec(PesSpec("morse", 0.1, 5.0, 2.5, 0.0), 0, 4590.0)


def morse_levels(w0, a, mu, n):
    we = np.sqrt(2 * w0 / mu) / a
    v = np.arange(n) + 0.5
    return we * v - we ** 2 / (4 * w0) * v ** 2


@pytest.fixture(scope="module")
def morse_states():
    return bound_states(MORSE, RadialGrid.from_spacing(0.1, 30.0, 0.02), 6)


def test_morse_spectrum(morse_states):
    got = np.array([s.energy for s in morse_states])
    np.testing.assert_allclose(got, morse_levels(0.1, 2.5, 4590.0, 6), rtol=0, atol=1e-5)


def test_harmonic_spectrum():
    mu, omega = 918.0, 0.01
    ch = ChannelSpec(PesSpec.harmonic_oscillator(mu, omega, 5.0), 0, mu)
    states = bound_states(ch, RadialGrid.from_spacing(1.0, 9.0, 0.02), 6)
    got = np.array([s.energy for s in states])
    np.testing.assert_allclose(got, (np.arange(6) + 0.5) * omega, rtol=0, atol=1e-6)


def test_state_invariants(morse_states):
    grid = morse_states[0].grid
    energies = [s.energy for s in morse_states]
    assert np.all(np.diff(energies) > 0)
    for s in morse_states:
        assert grid.integrate(s.u ** 2) == pytest.approx(1.0, abs=1e-10)
        assert count_nodes(s.u) == s.v
        assert abs(s.u[0]) < 1e-8 and abs(s.u[-1]) < 1e-8
        big = np.nonzero(np.abs(s.u) > 1e-3 * np.abs(s.u).max())[0]
        assert s.u[big[-1]] > 0


def test_orthogonality(morse_states):
    grid = morse_states[0].grid
    for i, a in enumerate(morse_states):
        for b in morse_states[i + 1:]:
            assert abs(grid.integrate(a.u * b.u)) < 1e-8


def test_refinement_changes_e5_little():
    coarse = bound_states(MORSE, RadialGrid.from_spacing(0.1, 20.0, 0.02), 6)[5].energy
    fine = bound_states(MORSE, RadialGrid.from_spacing(0.1, 20.0, 0.01), 6)[5].energy
    assert abs(coarse - fine) < 1e-7


def test_reproducible(heavy_ground_state):
    again = bound_states(HEAVY_GROUND, heavy_ground_state.grid, 6)[5]
    assert again.u.tobytes() == heavy_ground_state.u.tobytes()


def test_scenario_ground_levels(heavy_ground_state, light_ground_state):
    # the shipped ground wells put v=5 where the resonance needs it
    assert heavy_ground_state.energy == pytest.approx(-0.04, abs=1e-6)
    assert light_ground_state.energy == pytest.approx(-0.05, abs=1e-6)
    assert heavy_ground_state.v == light_ground_state.v == 5


def test_too_few_bound_states_warns():
    shallow = ChannelSpec(PesSpec("morse", 0.002, 5.0, 1.0, 0.0), 0, 918.0)
    with pytest.warns(UserWarning, match="bound states"):
        states = bound_states(shallow, RadialGrid.from_spacing(0.5, 40.0, 0.05), 10)
    assert 0 < len(states) < 10


def test_leaky_grid_rejected():
    with pytest.raises(GridLeakageError):
        bound_states(MORSE, RadialGrid.from_spacing(0.1, 7.0, 0.02), 6)


def test_embedding(heavy_ground_state, bound_grid):
    u = heavy_ground_state.embedded(bound_grid)
    n = heavy_ground_state.grid.n_points
    np.testing.assert_array_equal(u[:n], heavy_ground_state.u)
    assert np.all(u[n:] == 0)
    with pytest.raises(ValueError):
        heavy_ground_state.embedded(RadialGrid.from_spacing(0.1, 30.0, 0.01))


def test_count_nodes():
    x = np.linspace(0, 1, 1001)
    assert count_nodes(np.sin(3 * np.pi * x)) == 2
