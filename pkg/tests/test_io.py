import numpy as np
import pytest

from photocoherence import io as pio
from photocoherence.core import RadialGrid, TimeGrid
from photocoherence.field import LightField
from photocoherence.propagator import WavepacketSeries


def small_series():
    grid = RadialGrid(1.0, 2.0, 11)
    tg = TimeGrid(0.0, 4.0, 1.0)
    rng = np.random.default_rng(0)
    amps = rng.normal(size=(3, 11)) + 1j * rng.normal(size=(3, 11))
    return WavepacketSeries(grid, tg, 2, tg.t[::2], amps, np.zeros(5), np.zeros(5))


@pytest.mark.parametrize("fmt", ["npy", "csv"])
def test_density_round_trip(tmp_path, fmt):
    series = small_series()
    m = pio.density_matrix(series, r_stride=2)
    assert np.isnan(m[0, 0])
    path = pio.write_density(tmp_path / "d", m, fmt)
    assert path.suffix == "." + fmt
    t_fs, r, dens = pio.read_density(path)
    np.testing.assert_allclose(r, series.grid.r[::2])
    np.testing.assert_allclose(dens, np.abs(series.amplitudes[:, ::2]) ** 2, rtol=1e-12)
    np.testing.assert_allclose(t_fs, series.times * 0.02418884254, rtol=1e-12)


def test_density_bad_format(tmp_path):
    with pytest.raises(ValueError):
        pio.write_density(tmp_path / "d", np.zeros((2, 2)), "hdf5")


def test_empty_jump_record(tmp_path):
    tg = TimeGrid(0.0, 2.0, 1.0)
    path = pio.write_jumps(tmp_path / "j.csv", LightField(tg, np.zeros(3)))
    data = pio.read_csv(path)
    assert list(data) == ["t_fs", "delta_omega_hartree", "phi_rad"]
    assert all(v.size == 0 for v in data.values())
    assert path.read_text().startswith("# initial delta_omega_hartree=0.0 phi_rad=0.0")


def test_field_csv_round_trip(tmp_path):
    tg = TimeGrid(0.0, 3.0, 1.0)
    light = LightField(tg, np.array([0.0, 1.5e-4, -2.25e-7, 3.0]))
    data = pio.read_csv(pio.write_field(tmp_path / "f.csv", light))
    np.testing.assert_allclose(data["E_au"], light.samples, rtol=1e-12)
    np.testing.assert_allclose(data["t_fs"], tg.t_fs, rtol=1e-12)
