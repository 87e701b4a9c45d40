"""Vibronic wave packets and electronic coherence driven by pulsed or incoherent light."""

__version__ = "0.1.0"

from .coherence import CoherenceTrace, EnsembleResult, coherence_trace, ensemble_average
from .core import RadialGrid, SeedPolicy, TimeGrid, convert, fs_to_au, au_to_fs
from .eigensolver import EigenState, bound_states
from .field import EnvelopeSpec, FieldSpec, JumpProcessSpec, LightField, synthesize
from .potentials import ChannelSpec, DipoleSpec, PesSpec
from .propagator import AbsorberSpec, PropagationRun, propagate

__all__ = [
    "AbsorberSpec", "ChannelSpec", "CoherenceTrace", "DipoleSpec", "EigenState", "EnsembleResult",
    "EnvelopeSpec", "FieldSpec", "JumpProcessSpec", "LightField", "PesSpec", "PropagationRun",
    "RadialGrid", "SeedPolicy", "TimeGrid", "au_to_fs", "bound_states", "coherence_trace",
    "convert", "ensemble_average", "fs_to_au", "propagate", "synthesize",
]
