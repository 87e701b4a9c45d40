"""Electronic coherence between two excited-channel wave packets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import WavepacketSeries

# C(t) is reported as 0 while rho11 + rho22 is below this
DEFAULT_EPS = 1e-20


def _normalized(rho12, rho11, rho22, eps):
    total = rho11 + rho22
    out = np.zeros_like(rho12)
    ok = total >= eps
    out[ok] = rho12[ok] / total[ok]
    return out


@dataclass(frozen=True)
class CoherenceTrace:
    times: np.ndarray  # a.u.
    rho12: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    eps: float = DEFAULT_EPS

    @property
    def C(self) -> np.ndarray:
        """rho12 / (rho11 + rho22), zero where the populations vanish."""
        return _normalized(self.rho12, self.rho11, self.rho22, self.eps)

    @property
    def abs_C(self) -> np.ndarray:
        return np.abs(self.C)

    def window_mean_abs_C(self, t_from: float, t_to: float | None = None) -> float:
        sel = self.times >= t_from
        if t_to is not None:
            sel &= self.times <= t_to
        return float(np.mean(self.abs_C[sel]))


def coherence_trace(series1: WavepacketSeries, series2: WavepacketSeries,
                    eps: float = DEFAULT_EPS) -> CoherenceTrace:
    """Overlaps of the two packets at every common snapshot (trapezoidal rule)."""
    if series1.grid != series2.grid:
        raise ValueError("wave packet series live on different radial grids")
    if series1.times.shape != series2.times.shape or not np.array_equal(series1.times, series2.times):
        raise ValueError("wave packet series have different snapshot times")
    grid = series1.grid
    a, b = series1.amplitudes, series2.amplitudes
    rho12 = grid.integrate(a.conj() * b)
    rho11 = grid.integrate(a.real ** 2 + a.imag ** 2)
    rho22 = grid.integrate(b.real ** 2 + b.imag ** 2)
    return CoherenceTrace(series1.times.copy(), rho12, rho11, rho22, eps)


@dataclass(frozen=True)
class EnsembleResult:
    """Per-realization traces and their averages.

    ``ensemble`` averages the density-matrix elements first and normalizes
    afterwards; ``mean_abs_C`` is the plain average of the per-realization
    |C(t)|, kept for comparison.
    """

    traces: tuple[CoherenceTrace, ...]
    ensemble: CoherenceTrace
    mean_abs_C: np.ndarray

    @property
    def count(self) -> int:
        return len(self.traces)

    @property
    def abs_C_ens(self) -> np.ndarray:
        return self.ensemble.abs_C

    def window_means(self, t_from: float, t_to: float | None = None) -> tuple[float, float]:
        """Time averages of |C_ens| and mean(|C|) over a window."""
        times = self.ensemble.times
        sel = times >= t_from
        if t_to is not None:
            sel &= times <= t_to
        return float(np.mean(self.abs_C_ens[sel])), float(np.mean(self.mean_abs_C[sel]))


def ensemble_average(traces) -> EnsembleResult:
    traces = tuple(traces)
    if not traces:
        raise ValueError("need at least one trace to average")
    times = traces[0].times
    for tr in traces[1:]:
        if tr.times.shape != times.shape or not np.array_equal(tr.times, times):
            raise ValueError("traces have different time grids")
    rho12 = np.mean([tr.rho12 for tr in traces], axis=0)
    rho11 = np.mean([tr.rho11 for tr in traces], axis=0)
    rho22 = np.mean([tr.rho22 for tr in traces], axis=0)
    ens = CoherenceTrace(times.copy(), rho12, rho11, rho22, traces[0].eps)
    mean_abs = np.mean([tr.abs_C for tr in traces], axis=0)
    return EnsembleResult(traces, ens, mean_abs)
