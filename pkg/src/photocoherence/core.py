"""Units, grids and seeding shared by every other module.

Everything inside the package is in Hartree atomic units (hbar = 1, energy in
Hartree, length in Bohr, time in a.u.).  Femtoseconds, eV and nanometres only
show up when reading configuration files or writing output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AU_TIME_FS = 0.02418884254  # 1 a.u. of time in fs
HARTREE_EV = 27.211386245988
# hc in Hartree * nm, from hc = 1239.84198 eV nm
HC_HARTREE_NM = 1239.8419843320026 / HARTREE_EV

_LINEAR = {
    # unit -> (dimension, size of the unit in atomic units)
    "hartree": ("energy", 1.0),
    "ev": ("energy", 1.0 / HARTREE_EV),
    "au_time": ("time", 1.0),
    "fs": ("time", 1.0 / AU_TIME_FS),
    "bohr": ("length", 1.0),
}
_ALIASES = {"a.u. time": "au_time", "au": "au_time", "a.u.": "au_time", "nm(photon)": "nm"}


class UnitError(ValueError):
    pass


def _canon(unit: str) -> str:
    u = unit.strip().lower()
    return _ALIASES.get(u, u)


def convert(value, from_unit: str, to_unit: str):
    """Convert ``value`` between the supported units.

    Supported: ``hartree``, ``eV``, ``nm`` (photon wavelength), ``fs``,
    ``au_time`` and ``bohr``.  Photon wavelength converts reciprocally to
    and from the energy units.
    """
    src, dst = _canon(from_unit), _canon(to_unit)
    if src == dst and (src in _LINEAR or src == "nm"):
        return value
    if src == "nm" or dst == "nm":
        other = dst if src == "nm" else src
        if other not in _LINEAR or _LINEAR[other][0] != "energy":
            raise UnitError(f"cannot convert {from_unit!r} to {to_unit!r}")
        if src == "nm":
            hartree = HC_HARTREE_NM / value
            return hartree / _LINEAR[dst][1]
        hartree = value * _LINEAR[src][1]
        return HC_HARTREE_NM / hartree
    try:
        dim_a, scale_a = _LINEAR[src]
        dim_b, scale_b = _LINEAR[dst]
    except KeyError:
        raise UnitError(f"unsupported unit pair {from_unit!r} -> {to_unit!r}") from None
    if dim_a != dim_b:
        raise UnitError(f"cannot convert {dim_a} ({from_unit!r}) to {dim_b} ({to_unit!r})")
    return value * scale_a / scale_b


def fs_to_au(t):
    return t / AU_TIME_FS


def au_to_fs(t):
    return t * AU_TIME_FS


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid; ``r_min`` stays away from the origin."""

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        if not self.r_min > 0:
            raise ValueError(f"r_min must be > 0, got {self.r_min}")
        if not self.r_max > self.r_min:
            raise ValueError(f"r_max ({self.r_max}) must exceed r_min ({self.r_min})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")

    @classmethod
    def from_spacing(cls, r_min: float, r_max: float, dr: float) -> "RadialGrid":
        """Grid with spacing ``dr``; ``r_max`` is rounded to a whole number of steps."""
        n_steps = int(round((r_max - r_min) / dr))
        return cls(r_min, r_min + n_steps * dr, n_steps + 1)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @property
    def r(self) -> np.ndarray:
        r = self.r_min + self.dr * np.arange(self.n_points)
        r.flags.writeable = False
        return r

    def truncated(self, r_max: float) -> "RadialGrid":
        """Leading part of this grid (same spacing) ending at or below ``r_max``."""
        n = int(np.floor((r_max - self.r_min) / self.dr + 1e-9)) + 1
        n = min(max(n, 2), self.n_points)
        return RadialGrid(self.r_min, self.r_min + (n - 1) * self.dr, n)

    def integrate(self, values: np.ndarray) -> float | complex:
        """Trapezoidal quadrature of ``values`` sampled on the grid (last axis)."""
        values = np.asarray(values)
        total = values.sum(axis=-1) - 0.5 * (values[..., 0] + values[..., -1])
        return total * self.dr


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid in atomic units, ``n_steps + 1`` sample points."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        ratio = (self.t_end - self.t_start) / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(ratio, 1.0):
            raise ValueError(f"window {self.t_end - self.t_start} is not a whole number of dt={self.dt}")

    @classmethod
    def from_fs(cls, t_start: float, t_end: float, dt: float) -> "TimeGrid":
        return cls(fs_to_au(t_start), fs_to_au(t_end), fs_to_au(dt))

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    @property
    def t(self) -> np.ndarray:
        t = self.t_start + self.dt * np.arange(self.n_steps + 1)
        t.flags.writeable = False
        return t

    @property
    def t_fs(self) -> np.ndarray:
        return au_to_fs(self.t)


_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    # bijective finalizer on 64-bit integers
    x = (x + _GOLDEN64) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class SeedPolicy:
    master_seed: int
    realization_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if self.realization_index < 0:
            raise ValueError("realization_index must be >= 0")

    def for_realization(self, index: int) -> "SeedPolicy":
        return SeedPolicy(self.master_seed, index)


def derive_stream_seed(policy: SeedPolicy) -> int:
    """Counter-based 64-bit stream seed for one realization.

    ``index -> master + golden * (index + 1)`` is injective modulo 2**64 because
    the multiplier is odd, and splitmix64 is a bijection, so distinct
    realization indices never share a seed.  Only integer arithmetic is used,
    so the result is identical on every platform.
    """
    mixed = _splitmix64(_splitmix64(policy.master_seed))
    counter = (mixed + _GOLDEN64 * (policy.realization_index + 1)) & _MASK64
    return _splitmix64(counter)


def make_rng(policy: SeedPolicy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_stream_seed(policy)))
