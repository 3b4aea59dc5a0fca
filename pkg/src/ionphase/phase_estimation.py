"""Phase extraction from folded TDC histograms and bright/dark differencing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atomic_response import phase_j_equal
from .errors import InsufficientDataError
from .heterodyne import TdcHistogram

__all__ = [
    "CosineFit",
    "PhaseMeasurement",
    "LOW_VISIBILITY",
    "DEGRADED_CONFIDENCE",
    "wrap_phase",
    "fit_cosine",
    "differential_phase",
    "sideband_reference_correction",
    "format_fit_record",
    "parse_fit_record",
]

LOW_VISIBILITY = "low_visibility"
DEGRADED_CONFIDENCE = "degraded_confidence"


def wrap_phase(phi):
    """Map angles to (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2.0 * np.pi)
    return float(wrapped) if wrapped.ndim == 0 else wrapped


@dataclass(frozen=True)
class CosineFit:
    amplitude: float
    offset: float
    phase: float
    phase_stderr: float
    visibility_estimate: float
    residual_chi2: float
    amplitude_stderr: float = math.nan
    n_counts: float = 0.0
    flags: tuple[str, ...] = ()

    @property
    def low_visibility(self) -> bool:
        return LOW_VISIBILITY in self.flags


@dataclass(frozen=True)
class PhaseMeasurement:
    bright_phase: float
    dark_phase: float
    differential: float
    stderr: float
    flags: tuple[str, ...] = ()


_REWEIGHT_PASSES = 3


def fit_cosine(hist: TdcHistogram, beat_frequency: float) -> CosineFit:
    """Weighted linear least squares of counts on {cos, sin, 1} at a known frequency.

    The model ``a cos(w t) + b sin(w t) + c`` equals ``A cos(w t + phi) + c``
    with ``phi = atan2(-b, a)``.  The first pass weights bins by
    ``1 / max(count, 1)``; later passes replace the observed counts by the
    fitted model in the weights (Poisson IRLS), which removes the low-count
    bias of count-based weights.  The phase error is propagated from the
    parameter covariance; for N counts at small visibility V it tends to
    ``sqrt(2 / (N V^2))``.
    """
    counts = np.asarray(hist.counts, dtype=float)
    if hist.total <= 0:
        raise InsufficientDataError("histogram has no counts")
    wt = beat_frequency * hist.bin_centers
    design = np.column_stack([np.cos(wt), np.sin(wt), np.ones_like(wt)])

    variance = np.maximum(counts, 1.0)
    for _ in range(_REWEIGHT_PASSES + 1):
        weights = 1.0 / variance
        sw = np.sqrt(weights)
        # lstsq on the whitened system is better conditioned than the normal equations
        params, *_ = np.linalg.lstsq(design * sw[:, None], counts * sw, rcond=None)
        variance = np.maximum(design @ params, 1.0)
    a, b, c = (float(p) for p in params)
    cov = np.linalg.inv(design.T @ (design * weights[:, None]))

    residual = counts - design @ params
    chi2 = float(np.sum(weights * residual * residual))

    amp2 = a * a + b * b
    amplitude = math.sqrt(amp2)
    phase = wrap_phase(math.atan2(-b, a))
    if amp2 > 0:
        grad_phase = np.array([b / amp2, -a / amp2, 0.0])
        grad_amp = np.array([a / amplitude, b / amplitude, 0.0])
        phase_stderr = math.sqrt(grad_phase @ cov @ grad_phase)
        amplitude_stderr = math.sqrt(grad_amp @ cov @ grad_amp)
    else:
        phase_stderr = math.pi
        amplitude_stderr = math.sqrt(0.5 * (cov[0, 0] + cov[1, 1]))

    flags = ()
    if amplitude < 2.0 * amplitude_stderr:
        flags = (LOW_VISIBILITY,)
    visibility = amplitude / c if c > 0 else math.inf
    return CosineFit(
        amplitude=amplitude,
        offset=c,
        phase=phase,
        phase_stderr=phase_stderr,
        visibility_estimate=visibility,
        residual_chi2=chi2,
        amplitude_stderr=amplitude_stderr,
        n_counts=float(hist.total),
        flags=flags,
    )


def differential_phase(bright: CosineFit, dark: CosineFit) -> PhaseMeasurement:
    """Bright-run phase minus dark-reference phase, wrapped, errors in quadrature."""
    flags = ()
    if bright.low_visibility or dark.low_visibility:
        flags = (DEGRADED_CONFIDENCE,)
    return PhaseMeasurement(
        bright_phase=bright.phase,
        dark_phase=dark.phase,
        differential=wrap_phase(bright.phase - dark.phase),
        stderr=math.hypot(bright.phase_stderr, dark.phase_stderr),
        flags=flags,
    )


def sideband_reference_correction(g, delta_carrier, beat_frequency, gamma) -> float:
    """Phase the atom imprints on the red sideband that serves as the reference.

    The sideband sits ``beat_frequency`` below the carrier, so the atom sees
    it at ``delta_carrier - beat_frequency``.
    """
    return phase_j_equal(g, delta_carrier - beat_frequency, gamma)


_RECORD_KEYS = ("phase_rad", "phase_stderr_rad", "visibility", "offset", "chi2", "flags")


def format_fit_record(fit: CosineFit) -> str:
    values = {
        "phase_rad": repr(float(fit.phase)),
        "phase_stderr_rad": repr(float(fit.phase_stderr)),
        "visibility": repr(float(fit.visibility_estimate)),
        "offset": repr(float(fit.offset)),
        "chi2": repr(float(fit.residual_chi2)),
        "flags": ",".join(fit.flags),
    }
    return "".join(f"{key} = {values[key]}\n" for key in _RECORD_KEYS)


def parse_fit_record(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "flags":
            out[key] = tuple(f for f in value.split(",") if f)
        else:
            out[key] = float(value)
    return out
