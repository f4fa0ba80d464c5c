"""Exact and numerical bound states of the 1+1 Klein-Gordon equation with
linear scalar and vector potentials under the deformed algebra
[x, p] = i hbar (1 + beta p^2)."""

from .closed_form import kg_energy, phi, psi, schrodinger_energy, spectrum
from .model import P1, ModelParams, minimal_length, uncertainty_bound, validate

__all__ = ["P1", "ModelParams", "kg_energy", "minimal_length", "phi", "psi",
           "schrodinger_energy", "spectrum", "uncertainty_bound", "validate"]
__version__ = "0.1.0"
