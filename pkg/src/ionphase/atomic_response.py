"""Resonant cross sections and coherent-forward-scattering phase shifts.

All detunings and linewidths are angular frequencies (rad/s).  A detuning is
laser minus atomic resonance, so negative values are red detuned.  Returned
phases lie in (-pi, pi]; the argument of a negative real number is +pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, SingularPointError

__all__ = [
    "Transition",
    "ComplexResponse",
    "detuning_from_gamma",
    "resonant_cross_section_two_level",
    "resonant_cross_section",
    "cross_section_ratio",
    "scattering_rate",
    "lorentzian_kernel",
    "phase_two_level",
    "phase_from_mode_area",
    "phase_j_equal",
    "max_phase_over_detuning",
]


@dataclass(frozen=True)
class Transition:
    """Atomic transition.  Angular momenta are stored as twice-J integers."""

    wavelength: float
    linewidth: float
    j_lower_x2: int
    j_upper_x2: int
    mass: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")
        if not self.linewidth > 0:
            raise DomainError(f"linewidth must be positive, got {self.linewidth}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        for name in ("j_lower_x2", "j_upper_x2"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")

    @classmethod
    def from_j(cls, wavelength, linewidth, j_lower, j_upper, mass):
        """Build from J values given as ints, floats or strings like ``"1/2"``."""
        return cls(
            wavelength=wavelength,
            linewidth=linewidth,
            j_lower_x2=_twice(j_lower),
            j_upper_x2=_twice(j_upper),
            mass=mass,
        )

    @property
    def j_lower(self) -> Fraction:
        return Fraction(self.j_lower_x2, 2)

    @property
    def j_upper(self) -> Fraction:
        return Fraction(self.j_upper_x2, 2)


def _twice(j) -> int:
    doubled = 2 * Fraction(j)
    if doubled.denominator != 1 or doubled < 0:
        raise DomainError(f"angular momentum must be a nonnegative multiple of 1/2, got {j!r}")
    return int(doubled)


@dataclass(frozen=True)
class ComplexResponse:
    re: float
    im: float

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def modulus_squared(self) -> float:
        return self.re * self.re + self.im * self.im


def detuning_from_gamma(multiple: float, gamma: float) -> float:
    """Detuning in rad/s from a multiple of the linewidth."""
    return multiple * gamma


def resonant_cross_section_two_level(wavelength: float) -> float:
    """3 lambda^2 / (2 pi), the ideal two-level value."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 3.0 * wavelength**2 / (2.0 * math.pi)


def cross_section_ratio(t: Transition) -> Fraction:
    """(2J'+1)/(2J+1) as an exact fraction."""
    return Fraction(t.j_upper_x2 + 1, t.j_lower_x2 + 1)


def resonant_cross_section(t: Transition) -> float:
    ratio = cross_section_ratio(t)
    return t.wavelength**2 / (2.0 * math.pi) * ratio.numerator / ratio.denominator


def scattering_rate(sigma: float, mode_area: float, incident_rate: float) -> float:
    """Scattered photon rate (sigma/A) * incident rate.

    The ratio sigma/A may exceed one for tight focusing, so the scattered rate
    can legitimately exceed the incident rate.
    """
    if not mode_area > 0:
        raise DomainError(f"mode_area must be positive, got {mode_area}")
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    if incident_rate < 0:
        raise DomainError(f"incident_rate must be nonnegative, got {incident_rate}")
    return sigma / mode_area * incident_rate


def _check_gamma(gamma):
    if not gamma > 0:
        raise DomainError(f"linewidth must be positive, got {gamma}")


def _kernel(delta, gamma):
    x = 2.0 * np.asarray(delta, dtype=float) / gamma
    denom = 1.0 + x * x
    return 1.0 / denom, x / denom


def lorentzian_kernel(delta: float, gamma: float) -> ComplexResponse:
    """(1 + i 2D/G) / (1 + 4 D^2/G^2), the shared complex line shape."""
    _check_gamma(gamma)
    re, im = _kernel(delta, gamma)
    return ComplexResponse(float(re), float(im))


def _check_coupling(g):
    g_arr = np.asarray(g, dtype=float)
    if np.any(~(g_arr >= 0.0)) or np.any(g_arr > 1.0):
        raise DomainError(f"coupling must lie in [0, 1], got {g}")


def _phase(strength, delta, gamma):
    """arg(1 - strength * kernel), elementwise, guarded against arg(0)."""
    re, im = _kernel(delta, gamma)
    strength = np.asarray(strength, dtype=float)
    field_re = 1.0 - strength * re
    field_im = -strength * im
    if np.any((field_re == 0.0) & (field_im == 0.0)):
        raise SingularPointError(
            "outgoing field amplitude is exactly zero; the phase is undefined"
        )
    # -0.0 imaginary parts would map arg(negative real) to -pi
    phase = np.arctan2(field_im + 0.0, field_re)
    return float(phase) if phase.ndim == 0 else phase


def phase_two_level(g, delta, gamma):
    """Phase imprinted by a two-level atom at coupling efficiency ``g``.

    Accepts scalars or numpy arrays for ``g`` and ``delta``.
    """
    _check_gamma(gamma)
    _check_coupling(g)
    return _phase(2.0 * np.asarray(g, dtype=float), delta, gamma)


def phase_from_mode_area(sigma, mode_area, delta, gamma):
    """Phase written in terms of the cross section and the effective mode area.

    Below sigma/4 no free-space focus exists and a DomainError is raised.
    """
    _check_gamma(gamma)
    sigma = float(sigma)
    mode_area = float(mode_area)
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    if not mode_area > 0 or mode_area < sigma / 4.0:
        raise DomainError(
            f"mode area {mode_area} is below the free-space minimum sigma/4 = {sigma / 4.0}"
        )
    return _phase(sigma / (2.0 * mode_area), delta, gamma)


def phase_j_equal(g, delta, gamma):
    """Phase for a J = J' transition; the cross section is a third of two-level."""
    _check_gamma(gamma)
    _check_coupling(g)
    # written as the two-level phase at g/3 so the two agree bit for bit
    return _phase(2.0 * (np.asarray(g, dtype=float) / 3.0), delta, gamma)


_STRENGTH = {"two_level": lambda g: 2.0 * g, "j_equal": lambda g: 2.0 * (g / 3.0)}


def max_phase_over_detuning(
    g: float, model: Literal["two_level", "j_equal"], gamma: float
) -> tuple[float, float]:
    """Largest |phase| reachable by tuning the laser, and where it occurs.

    Returns ``(detuning, phase)`` with ``detuning >= 0`` the detuning magnitude
    in rad/s.  The phase is odd in the detuning, so the same magnitude is
    reached at ``-detuning`` with opposite sign.  When the on-resonance field
    flips sign (two-level, g > 0.5) the maximum is pi at zero detuning; at
    exactly g = 0.5 the supremum pi/2 is approached as the detuning goes to
    zero and ``(0.0, pi/2)`` is reported.
    """
    _check_gamma(gamma)
    _check_coupling(g)
    try:
        strength = _STRENGTH[model](g)
    except KeyError:
        raise DomainError(f"unknown model {model!r}") from None
    if strength == 0.0:
        return 0.0, 0.0
    if strength > 1.0:
        return 0.0, math.pi
    if strength == 1.0:
        return 0.0, math.pi / 2.0

    # |phase| on the red side as a function of u = 2|D|/G; unimodal on (0, inf)
    def neg_abs_phase(u):
        return -abs(_phase(strength, -0.5 * u * gamma, gamma))

    # coarse log grid to bracket the peak, then Brent on the bracket
    grid = np.logspace(-4.0, 3.0, 281)
    values = np.abs(_phase(strength, -0.5 * grid * gamma, gamma))
    k = int(np.clip(np.argmax(values), 1, grid.size - 2))
    res = minimize_scalar(
        neg_abs_phase,
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        method="brent",
        options={"xtol": 1e-14, "maxiter": 500},
    )
    u_best = float(res.x)
    return 0.5 * u_best * gamma, -float(res.fun)
