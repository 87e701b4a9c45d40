"""Pulsed coherent and incoherent electric fields.

A field is E(t) = env(t) cos([w_L + dw(t)] t + phi(t)).  For a coherent pulse
dw and phi vanish.  For incoherent light they are piecewise constant and get
reset at the arrivals of a homogeneous Poisson process; the new values are
drawn uniformly from their ranges.  The phase argument uses absolute time, so
the field is generally discontinuous at a jump.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
import scipy.fft

from .core import SeedPolicy, TimeGrid, make_rng

# a Gaussian envelope counts as "on" within this many widths of its centre
GAUSSIAN_SUPPORT_WIDTHS = 3.5


@dataclass(frozen=True)
class EnvelopeSpec:
    """Pulse envelope; times in atomic units.

    ``gaussian``: ``peak * exp(-(t - center)**2 / (2 width**2))``.
    ``sine_power``: ``peak * sin(pi (t - start) / duration)**exponent`` on
    ``start < t < start + duration`` and zero elsewhere.
    """

    kind: Literal["gaussian", "sine_power"]
    peak_amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0
    start: float = 0.0
    duration: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind == "gaussian":
            if not self.width > 0:
                raise ValueError("gaussian envelope needs width > 0")
        elif self.kind == "sine_power":
            if not self.duration > 0:
                raise ValueError("sine_power envelope needs duration > 0")
            if not self.exponent > 0:
                raise ValueError("sine_power envelope needs exponent > 0")
        else:
            raise ValueError(f"unknown envelope kind {self.kind!r}")

    @classmethod
    def gaussian(cls, center: float, width: float, peak_amplitude: float = 1.0) -> "EnvelopeSpec":
        return cls("gaussian", peak_amplitude, center=center, width=width)

    @classmethod
    def sine_power(cls, duration: float, exponent: float, peak_amplitude: float = 1.0,
                   start: float = 0.0) -> "EnvelopeSpec":
        return cls("sine_power", peak_amplitude, start=start, duration=duration, exponent=exponent)

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "gaussian":
            half = GAUSSIAN_SUPPORT_WIDTHS * self.width
            return self.center - half, self.center + half
        return self.start, self.start + self.duration

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            return self.peak_amplitude * np.exp(-0.5 * ((t - self.center) / self.width) ** 2)
        x = (t - self.start) / self.duration
        inside = (x > 0) & (x < 1)
        out = np.zeros_like(t)
        out[inside] = self.peak_amplitude * np.sin(np.pi * x[inside]) ** self.exponent
        return out


@dataclass(frozen=True)
class JumpProcessSpec:
    mean_interval: float  # a.u. time
    phase_range: float = np.pi  # jumps uniform in [-phase_range, phase_range]
    freq_shift_range: float = 0.0  # Hartree, uniform in [-range, range]

    def __post_init__(self):
        if not self.mean_interval > 0:
            raise ValueError("mean_interval must be > 0")
        if not 0 <= self.phase_range <= np.pi:
            raise ValueError("phase_range must lie in [0, pi]")
        if not self.freq_shift_range >= 0:
            raise ValueError("freq_shift_range must be >= 0")


@dataclass(frozen=True)
class FieldSpec:
    envelope: EnvelopeSpec
    omega_center: float  # Hartree
    jumps: JumpProcessSpec | None = None

    def __post_init__(self):
        if not self.omega_center > 0:
            raise ValueError("omega_center must be > 0")

    @property
    def coherent(self) -> bool:
        return self.jumps is None


@dataclass(frozen=True)
class LightField:
    """Sampled field on a time grid plus the realized jump history.

    ``jump_record`` has one row ``(time, delta_omega, phi)`` per jump; the
    values in force before the first jump are ``initial``.
    """

    grid: TimeGrid
    samples: np.ndarray
    jump_record: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    initial: tuple[float, float] = (0.0, 0.0)
    carrier: float = 0.0  # Hartree, nominal carrier frequency

    def __post_init__(self):
        if self.samples.shape != (self.grid.n_steps + 1,):
            raise ValueError("samples do not match the time grid")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("field samples must be finite")

    @property
    def flux(self) -> float:
        """Trapezoidal integral of E(t)**2 over the grid."""
        e2 = self.samples ** 2
        return float((e2.sum() - 0.5 * (e2[0] + e2[-1])) * self.grid.dt)

    @property
    def midpoints(self) -> np.ndarray:
        """Field at the centre of each time step (mean of the two end samples)."""
        return 0.5 * (self.samples[1:] + self.samples[:-1])

    def scaled(self, factor: float) -> "LightField":
        return replace(self, samples=self.samples * factor)


def draw_jumps(jumps: JumpProcessSpec, window: tuple[float, float], rng: np.random.Generator):
    """Poisson jump times inside ``window`` with uniform (dw, phi) resets.

    Returns ``(initial, record)`` where ``initial = (dw0, phi0)`` holds at
    the start of the window.
    """
    lo, hi = window
    dw0 = rng.uniform(-jumps.freq_shift_range, jumps.freq_shift_range)
    phi0 = rng.uniform(-jumps.phase_range, jumps.phase_range)
    rows = []
    t = lo
    while True:
        t += rng.exponential(jumps.mean_interval)
        if t >= hi:
            break
        dw = rng.uniform(-jumps.freq_shift_range, jumps.freq_shift_range)
        phi = rng.uniform(-jumps.phase_range, jumps.phase_range)
        rows.append((t, dw, phi))
    record = np.array(rows, dtype=float).reshape(-1, 3)
    return (float(dw0), float(phi0)), record


def evaluate(spec: FieldSpec, t, initial=(0.0, 0.0), jump_record=None) -> np.ndarray:
    """E(t) for a given jump history (no history means coherent)."""
    t = np.asarray(t, dtype=float)
    env = spec.envelope(t)
    if jump_record is None or len(jump_record) == 0:
        dw = np.full_like(t, initial[0])
        phi = np.full_like(t, initial[1])
    else:
        dws = np.concatenate(([initial[0]], jump_record[:, 1]))
        phis = np.concatenate(([initial[1]], jump_record[:, 2]))
        seg = np.searchsorted(jump_record[:, 0], t, side="right")
        dw, phi = dws[seg], phis[seg]
    return env * np.cos((spec.omega_center + dw) * t + phi)


def synthesize(spec: FieldSpec, grid: TimeGrid, seed: SeedPolicy | int | None = None) -> LightField:
    """Sample the field on ``grid``; identical inputs give bit-identical output."""
    lo, hi = spec.envelope.support
    tol = 1e-9 * grid.dt
    if lo < grid.t_start - tol or hi > grid.t_end + tol:
        raise ValueError(
            f"envelope support [{lo:.6g}, {hi:.6g}] a.u. exceeds the time grid "
            f"[{grid.t_start:.6g}, {grid.t_end:.6g}] a.u."
        )
    if spec.jumps is None:
        return LightField(grid, evaluate(spec, grid.t), carrier=spec.omega_center)
    if seed is None:
        raise ValueError("an incoherent field needs a seed")
    if not isinstance(seed, SeedPolicy):
        seed = SeedPolicy(int(seed))
    initial, record = draw_jumps(spec.jumps, (lo, hi), make_rng(seed))
    samples = evaluate(spec, grid.t, initial, record)
    return LightField(grid, samples, record, initial, spec.omega_center)


def normalize_flux(light: LightField, reference_flux: float) -> LightField:
    """Rescale so that the trapezoidal flux equals ``reference_flux``."""
    flux = light.flux
    if not flux > 0:
        raise ValueError("cannot normalize a field with zero flux")
    if not reference_flux > 0:
        raise ValueError("reference_flux must be > 0")
    return light.scaled(np.sqrt(reference_flux / flux))


@dataclass(frozen=True)
class SpectralDensity:
    omega: np.ndarray  # Hartree
    power: np.ndarray

    @property
    def center(self) -> float:
        """Power-weighted mean frequency."""
        return float(np.sum(self.omega * self.power) / np.sum(self.power))

    def center_in(self, lo: float, hi: float) -> float:
        """Power-weighted mean frequency restricted to ``lo <= omega <= hi``."""
        sel = (self.omega >= lo) & (self.omega <= hi)
        if not np.any(sel):
            raise ValueError("no spectral samples in the requested band")
        return float(np.sum(self.omega[sel] * self.power[sel]) / np.sum(self.power[sel]))

    @property
    def peak(self) -> float:
        return float(self.omega[np.argmax(self.power)])

    @property
    def fwhm(self) -> float:
        """Full width at half maximum around the highest peak (linear interpolation)."""
        p, w = self.power, self.omega
        i = int(np.argmax(p))
        half = 0.5 * p[i]
        lo = i
        while lo > 0 and p[lo - 1] >= half:
            lo -= 1
        hi = i
        while hi < len(p) - 1 and p[hi + 1] >= half:
            hi += 1
        left = w[lo] if lo == 0 else np.interp(half, [p[lo - 1], p[lo]], [w[lo - 1], w[lo]])
        right = w[hi] if hi == len(p) - 1 else np.interp(half, [p[hi + 1], p[hi]], [w[hi + 1], w[hi]])
        return float(right - left)


def power_spectrum(t: np.ndarray, samples: np.ndarray, pad_factor: int = 4) -> SpectralDensity:
    """Periodogram |dt * FFT(E)|**2 on positive angular frequencies."""
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise ValueError("need at least two samples")
    steps = np.diff(t)
    dt = steps[0]
    if not np.allclose(steps, dt, rtol=1e-9, atol=0):
        raise ValueError("spectrum needs a uniform time grid")
    n = scipy.fft.next_fast_len(pad_factor * t.size, real=True)
    amp = scipy.fft.rfft(samples, n=n) * dt
    omega = 2 * np.pi * scipy.fft.rfftfreq(n, d=dt)
    return SpectralDensity(omega, np.abs(amp) ** 2)


def spectrum(light: LightField, pad_factor: int = 4) -> SpectralDensity:
    return power_spectrum(light.grid.t, light.samples, pad_factor)


def mean_spectrum(spectra: list[SpectralDensity]) -> SpectralDensity:
    if not spectra:
        raise ValueError("no spectra to average")
    omega = spectra[0].omega
    for s in spectra[1:]:
        if s.omega.shape != omega.shape or not np.array_equal(s.omega, omega):
            raise ValueError("spectra live on different frequency grids")
    return SpectralDensity(omega, np.mean([s.power for s in spectra], axis=0))
