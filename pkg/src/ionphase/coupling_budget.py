"""Effective coupling efficiency: focusing geometry, ion motion and saturation.

The motion model treats the ion as a thermal Gaussian wavepacket sampling a
Gaussian focal field.  Averaging the field amplitude over the wavepacket
gives a factor ``(1 + 2 sigma^2 / w^2) ** -0.5`` per axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .atomic_response import Transition, resonant_cross_section_two_level
from .constants import CODATA, PhysicalConstants
from .errors import DomainError, NoCoolingError

__all__ = [
    "BeamGeometry",
    "MotionState",
    "CouplingBudget",
    "coupling_from_mode_area",
    "coupling_from_overlap",
    "scattering_ratio",
    "doppler_temperature",
    "thermal_extent",
    "motion_averaged_coupling",
    "saturation_scaled_coupling",
    "radial_waist_from_mode_area",
    "build_budget",
]


def _unit_interval(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class BeamGeometry:
    mode_area: float
    overlap: float = 1.0
    solid_angle_weight: float = 1.0
    saturation: float = 0.0
    # focal field waist along the optical axis; transverse waists come from mode_area
    axial_waist: float = 369.5e-9

    def __post_init__(self):
        if not self.mode_area > 0:
            raise DomainError(f"mode_area must be positive, got {self.mode_area}")
        _unit_interval("overlap", self.overlap)
        _unit_interval("solid_angle_weight", self.solid_angle_weight)
        if not self.saturation >= 0:
            raise DomainError(f"saturation must be nonnegative, got {self.saturation}")
        if not self.axial_waist > 0:
            raise DomainError(f"axial_waist must be positive, got {self.axial_waist}")

    def focal_waists(self) -> tuple[float, float, float]:
        w = radial_waist_from_mode_area(self.mode_area)
        return (w, w, self.axial_waist)


@dataclass(frozen=True)
class MotionState:
    """Thermal state of the trapped ion.

    ``trap_frequencies`` are angular frequencies ordered to match the focal
    waists (two transverse axes, then the optical axis).  ``extents`` are
    derived in ``__post_init__`` and cannot be supplied inconsistently.
    """

    temperature: float
    trap_frequencies: tuple[float, float, float]
    mass: float
    constants: PhysicalConstants = CODATA
    extents: tuple[float, float, float] = field(init=False)

    def __post_init__(self):
        if not self.temperature >= 0:
            raise DomainError(f"temperature must be nonnegative, got {self.temperature}")
        if len(self.trap_frequencies) != 3:
            raise DomainError("exactly three trap frequencies are required")
        if any(not w > 0 for w in self.trap_frequencies):
            raise DomainError(f"trap frequencies must be positive, got {self.trap_frequencies}")
        if self.temperature == 0.0:
            extents = (0.0, 0.0, 0.0)
        else:
            extents = tuple(
                thermal_extent(self.temperature, self.mass, w, self.constants)
                for w in self.trap_frequencies
            )
        object.__setattr__(self, "trap_frequencies", tuple(self.trap_frequencies))
        object.__setattr__(self, "extents", extents)

    def at_temperature(self, temperature: float) -> "MotionState":
        return MotionState(temperature, self.trap_frequencies, self.mass, self.constants)


@dataclass(frozen=True)
class CouplingBudget:
    g_geometry: float
    motion_factor: float = 1.0
    saturation_factor: float = 1.0

    def __post_init__(self):
        _unit_interval("g_geometry", self.g_geometry)
        for name in ("motion_factor", "saturation_factor"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {value}")

    @property
    def g_effective(self) -> float:
        return self.g_geometry * self.motion_factor * self.saturation_factor

    @property
    def scattering_ratio(self) -> float:
        return scattering_ratio(self.g_effective)


def coupling_from_mode_area(sigma: float, mode_area: float) -> float:
    """G = sigma / (4 A); A below sigma/4 is not reachable in free space."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not mode_area >= sigma / 4.0:
        raise DomainError(
            f"mode area {mode_area} is below the free-space minimum sigma/4 = {sigma / 4.0}"
        )
    return sigma / (4.0 * mode_area)


def coupling_from_overlap(overlap: float, solid_angle_weight: float) -> float:
    """G from mode overlap eta and the dipole-weighted solid-angle fraction."""
    _unit_interval("overlap", overlap)
    _unit_interval("solid_angle_weight", solid_angle_weight)
    return overlap * overlap * solid_angle_weight


def scattering_ratio(g: float) -> float:
    _unit_interval("coupling", g)
    return 4.0 * g


def doppler_temperature(delta, gamma, constants: PhysicalConstants = CODATA):
    """Steady-state Doppler-cooling temperature at red detuning ``delta``.

    Minimal (hbar*Gamma / 2 k_B) at delta = -Gamma/2 and divergent towards
    resonance.  Works elementwise on arrays.
    """
    if not gamma > 0:
        raise DomainError(f"linewidth must be positive, got {gamma}")
    d = np.asarray(delta, dtype=float)
    if np.any(~(d < 0)):
        raise NoCoolingError(f"Doppler cooling requires red detuning, got {delta}")
    x = 2.0 * np.abs(d) / gamma
    t = constants.hbar * gamma / (4.0 * constants.boltzmann) * (1.0 / x + x)
    return float(t) if t.ndim == 0 else t


def thermal_extent(temperature, mass, trap_frequency, constants: PhysicalConstants = CODATA):
    """rms position spread sqrt(k_B T / (m w^2)) of a classical thermal oscillator."""
    for name, value in (("temperature", temperature), ("mass", mass), ("trap_frequency", trap_frequency)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    return math.sqrt(constants.boltzmann * temperature / mass) / trap_frequency


def motion_averaged_coupling(
    g_geometry: float, extents: Sequence[float], focal_waists: Sequence[float]
) -> float:
    """Multiplicative reduction of G from averaging the focal field over the wavepacket.

    ``g_geometry`` is accepted for symmetry with the other corrections; the
    returned factor does not depend on it.
    """
    _unit_interval("g_geometry", g_geometry)
    if len(extents) != len(focal_waists):
        raise DomainError("extents and focal_waists must have the same length")
    factor = 1.0
    for sigma, w in zip(extents, focal_waists):
        if not w > 0:
            raise DomainError(f"focal waists must be positive, got {w}")
        if not sigma >= 0:
            raise DomainError(f"extents must be nonnegative, got {sigma}")
        factor /= math.sqrt(1.0 + 2.0 * sigma * sigma / (w * w))
    return factor


def saturation_scaled_coupling(
    g: float,
    saturation: float,
    delta: float,
    gamma: float,
    reference: Literal["resonance", "probe"] = "resonance",
) -> float:
    """Coupling reduced by weak saturation, g / (1 + s_eff).

    With ``reference="resonance"`` the saturation parameter is quoted on
    resonance and is Lorentzian-reduced at the probe detuning.  With
    ``"probe"`` it is taken as already evaluated at the probe detuning.
    """
    if not saturation >= 0:
        raise DomainError(f"saturation must be nonnegative, got {saturation}")
    if reference == "resonance":
        s_eff = saturation / (1.0 + 4.0 * delta * delta / (gamma * gamma))
    elif reference == "probe":
        s_eff = saturation
    else:
        raise DomainError(f"unknown saturation reference {reference!r}")
    return g / (1.0 + s_eff)


def radial_waist_from_mode_area(mode_area: float) -> float:
    """Transverse waist w from A = pi w_x w_y / 2 with w_x = w_y."""
    if not mode_area > 0:
        raise DomainError(f"mode_area must be positive, got {mode_area}")
    return math.sqrt(2.0 * mode_area / math.pi)


def mode_area_for_coupling(g: float, wavelength: float) -> float:
    """Effective mode area that yields coupling ``g`` against the two-level cross section."""
    if not 0.0 < g <= 1.0:
        raise DomainError(f"coupling must lie in (0, 1], got {g}")
    return resonant_cross_section_two_level(wavelength) / (4.0 * g)


def build_budget(
    beam: BeamGeometry,
    transition: Transition,
    motion: MotionState | None,
    delta: float,
    *,
    source: Literal["overlap", "mode_area", "fixed"] = "overlap",
    g_fixed: float | None = None,
    motion_correction: bool = True,
    saturation_correction: bool = True,
    temperature_excess: float = 1.0,
    saturation_reference: Literal["resonance", "probe"] = "resonance",
) -> CouplingBudget:
    """Compose the coupling budget at probe detuning ``delta``.

    ``source`` picks the motion-free coupling: ``"overlap"`` uses eta^2 f_Omega,
    ``"mode_area"`` uses sigma/(4A) with the two-level cross section (the J=J'
    reduction is carried by the phase formula), and ``"fixed"`` takes
    ``g_fixed`` as measured.  With the motion correction on, the ion
    temperature is the Doppler temperature at ``delta`` times
    ``temperature_excess``; ``motion.temperature`` is ignored in that case.
    """
    if source == "overlap":
        g_geometry = coupling_from_overlap(beam.overlap, beam.solid_angle_weight)
    elif source == "mode_area":
        g_geometry = coupling_from_mode_area(
            resonant_cross_section_two_level(transition.wavelength), beam.mode_area
        )
    elif source == "fixed":
        if g_fixed is None:
            raise DomainError("source='fixed' needs g_fixed")
        _unit_interval("g_fixed", g_fixed)
        g_geometry = float(g_fixed)
    else:
        raise DomainError(f"unknown coupling source {source!r}")

    motion_factor = 1.0
    if motion_correction and motion is not None:
        if not temperature_excess > 0:
            raise DomainError(f"temperature_excess must be positive, got {temperature_excess}")
        temperature = temperature_excess * doppler_temperature(
            delta, transition.linewidth, motion.constants
        )
        state = motion.at_temperature(temperature)
        motion_factor = motion_averaged_coupling(g_geometry, state.extents, beam.focal_waists())

    saturation_factor = 1.0
    if saturation_correction and beam.saturation > 0:
        saturation_factor = saturation_scaled_coupling(
            1.0, beam.saturation, delta, transition.linewidth, saturation_reference
        )
    return CouplingBudget(g_geometry, motion_factor, saturation_factor)
