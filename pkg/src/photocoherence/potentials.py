"""Potential energy surfaces, centrifugal term and transition dipole."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np


@dataclass(frozen=True)
class PesSpec:
    """One potential curve, energies in Hartree and lengths in Bohr.

    ``repulsive_exp``: ``W0 exp(-(R - R0)/a) + W_inf``
    ``morse``:         ``W0 (1 - exp(-(R - R0)/a))**2 + W_inf``
    ``harmonic``:      ``W0 ((R - R0)/a)**2 + W_inf`` (test surface)
    ``flat``:          ``W_inf`` (test surface)
    """

    kind: Literal["repulsive_exp", "morse", "harmonic", "flat"]
    W0: float = 0.0
    R0: float = 0.0
    a: float = 1.0
    W_inf: float = 0.0

    def __post_init__(self):
        if self.kind not in ("repulsive_exp", "morse", "harmonic", "flat"):
            raise ValueError(f"unknown PES kind {self.kind!r}")
        if not self.a > 0:
            raise ValueError("PES length scale a must be > 0")
        if self.kind == "morse" and not self.W0 > 0:
            raise ValueError("Morse well depth W0 must be > 0")
        if self.kind == "repulsive_exp" and not self.W0 > 0:
            raise ValueError("repulsive_exp needs W0 > 0 to be decreasing")

    @classmethod
    def harmonic_oscillator(cls, mu: float, omega: float, R0: float, offset: float = 0.0) -> "PesSpec":
        """``mu omega**2 (R - R0)**2 / 2`` expressed with ``W0 = 1/2``."""
        return cls("harmonic", W0=0.5, R0=R0, a=1.0 / (np.sqrt(mu) * omega), W_inf=offset)


def eval_pes(spec: PesSpec, R):
    R = np.asarray(R, dtype=float)
    x = (R - spec.R0) / spec.a
    if spec.kind == "repulsive_exp":
        w = spec.W0 * np.exp(-x)
    elif spec.kind == "morse":
        w = spec.W0 * (1.0 - np.exp(-x)) ** 2
    elif spec.kind == "harmonic":
        w = spec.W0 * x * x
    else:
        w = np.zeros_like(R)
    return w + spec.W_inf


@dataclass(frozen=True)
class ChannelSpec:
    pes: PesSpec
    J: int = 0
    mu: float = 918.0  # reduced mass, a.u.

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("reduced mass mu must be > 0")
        if int(self.J) != self.J or self.J < 0:
            raise ValueError("J must be a non-negative integer")


def effective_potential(channel: ChannelSpec, R):
    """PES plus the centrifugal term J(J+1)/(2 mu R**2)."""
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("effective potential needs R > 0")
    J = channel.J
    return J * (J + 1) / (2.0 * channel.mu * R * R) + eval_pes(channel.pes, R)


@dataclass(frozen=True)
class DipoleSpec:
    kind: Literal["linear"] = "linear"
    slope: float = 0.5  # a.u. per Bohr, |D(R)| ~ R/2 for H2+

    def __post_init__(self):
        if self.kind != "linear":
            raise ValueError(f"unknown dipole kind {self.kind!r}")
        if self.slope < 0:
            raise ValueError("dipole slope must be >= 0")


def eval_dipole(spec: DipoleSpec, R):
    return spec.slope * np.asarray(R, dtype=float)
