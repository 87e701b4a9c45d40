"""CSV and binary writers for fields, states, densities and coherence traces."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .coherence import CoherenceTrace, EnsembleResult
from .core import au_to_fs
from .eigensolver import EigenState
from .field import LightField, SpectralDensity
from .propagator import WavepacketSeries

FLOAT_FMT = "%.12e"


def _write(path, header: str, columns, comments: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack(columns) if columns else np.empty((0, 0))
    with open(path, "w", newline="\n") as fh:
        if comments:
            fh.write(comments)
        fh.write(header + "\n")
        np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",")
    return path


def write_field(path, light: LightField) -> Path:
    return _write(path, "t_fs,E_au", [light.grid.t_fs, light.samples])


def write_jumps(path, light: LightField) -> Path:
    rec = light.jump_record
    initial = f"# initial delta_omega_hartree={light.initial[0]!r} phi_rad={light.initial[1]!r}\n"
    return _write(path, "t_fs,delta_omega_hartree,phi_rad",
                  [au_to_fs(rec[:, 0]), rec[:, 1], rec[:, 2]], initial)


def write_spectrum(path, spec: SpectralDensity, omega_max: float | None = None) -> Path:
    sel = slice(None) if omega_max is None else spec.omega <= omega_max
    return _write(path, "omega_hartree,power", [spec.omega[sel], spec.power[sel]])


def write_pes(path, r: np.ndarray, v: np.ndarray) -> Path:
    return _write(path, "R_bohr,V_hartree", [r, v])


def write_eigenstate(path, state: EigenState) -> Path:
    head = f"# v={state.v} energy_hartree={state.energy!r}\n"
    return _write(path, "R_bohr,u_real", [state.grid.r, state.u], head)


def read_eigenstate_header(path) -> tuple[int, float]:
    with open(path) as fh:
        line = fh.readline()
    fields = dict(item.split("=") for item in line.lstrip("# ").split())
    return int(fields["v"]), float(fields["energy_hartree"])


def density_matrix(series: WavepacketSeries, r_stride: int = 1) -> np.ndarray:
    """|u(R_i, t_j)|**2 with a header row of R (Bohr) and a first column of t (fs).

    The corner element is NaN.
    """
    dens = series.density()[:, ::r_stride]
    r = series.grid.r[::r_stride]
    out = np.empty((dens.shape[0] + 1, dens.shape[1] + 1))
    out[0, 0] = np.nan
    out[0, 1:] = r
    out[1:, 0] = au_to_fs(series.times)
    out[1:, 1:] = dens
    return out


def write_density(path, matrix: np.ndarray, fmt: str = "npy") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "npy":
        path = path.with_suffix(".npy")
        np.save(path, matrix)
    elif fmt == "csv":
        path = path.with_suffix(".csv")
        np.savetxt(path, matrix, fmt=FLOAT_FMT, delimiter=",")
    else:
        raise ValueError(f"unknown density format {fmt!r}")
    return path


def read_density(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns ``(t_fs, R_bohr, density)``."""
    path = Path(path)
    m = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, delimiter=",")
    return m[1:, 0], m[0, 1:], m[1:, 1:]


def trace_columns(trace: CoherenceTrace):
    return [au_to_fs(trace.times), trace.rho12.real, trace.rho12.imag,
            trace.rho11, trace.rho22, trace.abs_C]


TRACE_HEADER = "t_fs,re_rho12,im_rho12,rho11,rho22,abs_C"


def write_trace(path, trace: CoherenceTrace) -> Path:
    return _write(path, TRACE_HEADER, trace_columns(trace))


def write_ensemble(path, result: EnsembleResult) -> Path:
    cols = trace_columns(result.ensemble) + [result.abs_C_ens, result.mean_abs_C]
    return _write(path, TRACE_HEADER + ",abs_C_ens,mean_abs_C", cols)


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2) if len(lines) > 1 else np.empty((0, len(names)))
    return {name: data[:, i] for i, name in enumerate(names)}
