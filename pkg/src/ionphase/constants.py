"""CODATA constants used by the motion and temperature models."""
from dataclasses import dataclass

from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _codata.hbar
    boltzmann: float = _codata.k
    atomic_mass_unit: float = _codata.atomic_mass


CODATA = PhysicalConstants()

