"""Experiment configuration, detuning sweeps and CSV output.

Config files are flat ``key = value`` text with ``#`` comments.  Every key
is optional; omitted keys take the defaults listed in ``DEFAULTS`` (the
174Yb+ S1/2-P1/2 parameter set).
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .atomic_response import Transition, phase_j_equal
from .constants import CODATA
from .coupling_budget import BeamGeometry, MotionState, build_budget, mode_area_for_coupling
from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    IonPhaseError,
    NoCoolingError,
    ParseError,
    ValidationError,
)
from .heterodyne import HeterodyneConfig, simulate_histogram
from .phase_estimation import (
    differential_phase,
    fit_cosine,
    sideband_reference_correction,
    wrap_phase,
)

__all__ = [
    "CORRECTIONS",
    "DEFAULTS",
    "ExperimentConfig",
    "SweepRow",
    "CSV_HEADER",
    "parse_config",
    "parse_config_text",
    "build_config",
    "parse_corrections",
    "expand_grid",
    "theory_curve",
    "simulate_sweep",
    "emit_csv",
    "format_csv",
    "read_sweep_csv",
    "point_seed",
]

CORRECTIONS = ("motion", "saturation", "sideband_reference")

# key -> (default, kind); values are in the units named by the key
DEFAULTS = {
    "wavelength_nm": (369.5, "float"),
    "linewidth_mhz": (19.6, "float"),  # Gamma / 2pi
    "j_lower": ("1/2", "half_integer"),
    "j_upper": ("1/2", "half_integer"),
    "mass_u": (174.0, "float"),
    "coupling_central": (0.137, "float"),
    "coupling_uncertainty": (0.014, "float"),
    "mode_area_m2": (None, "float"),  # default: area matching coupling_central
    "axial_waist_nm": (369.5, "float"),
    "saturation": (0.1, "float"),
    "saturation_reference": ("resonance", "choice:resonance,probe"),
    "trap_radial_khz": (480.0, "float"),
    "trap_axial_khz": (1025.0, "float"),
    "temperature_excess": (1.5, "float"),
    "detuning_grid": ("-3:0.25:3", "grid"),  # units of Gamma
    "beat_mhz": (400.0, "float"),
    "trigger_mhz": (10.0, "float"),
    "bin_width_ps": (100.0, "float"),
    "duration_s": (10.0, "float"),
    "mean_rate": (5e4, "float"),
    "dark_rate": (None, "float"),  # default: mean_rate
    "visibility": (0.5, "float"),
    "instrumental_phase_rad": (0.0, "float"),
    "background_rate": (0.0, "float"),
    "seed": (2016, "int"),
    "corrections": ("none", "corrections"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    transition: Transition
    beam: BeamGeometry
    trap_frequencies: tuple[float, float, float]
    temperature_excess: float
    coupling_central: float
    coupling_uncertainty: float
    detuning_grid: tuple[float, ...]  # units of Gamma
    heterodyne: HeterodyneConfig
    dark_rate: float
    seed: int
    corrections: frozenset = frozenset()
    saturation_reference: str = "resonance"

    def __post_init__(self):
        grid = self.detuning_grid
        if len(grid) == 0:
            raise ValidationError("detuning_grid must not be empty")
        if any(not math.isfinite(x) for x in grid):
            raise ValidationError("detuning_grid must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("detuning_grid must be strictly increasing")
        lo = self.coupling_central - self.coupling_uncertainty
        hi = self.coupling_central + self.coupling_uncertainty
        if self.coupling_uncertainty < 0 or lo < 0 or hi > 1:
            raise ValidationError(
                f"coupling_central +- coupling_uncertainty = [{lo}, {hi}] must lie within [0, 1]"
            )
        unknown = set(self.corrections) - set(CORRECTIONS)
        if unknown:
            raise ValidationError(f"unknown corrections {sorted(unknown)}")
        if self.dark_rate < 0:
            raise ValidationError(f"dark_rate must be nonnegative, got {self.dark_rate}")
        if self.temperature_excess <= 0:
            raise ValidationError("temperature_excess must be positive")

    @property
    def gamma(self) -> float:
        return self.transition.linewidth

    @property
    def detunings(self) -> np.ndarray:
        """Grid in rad/s."""
        return np.asarray(self.detuning_grid) * self.gamma

    def motion(self) -> MotionState:
        return MotionState(0.0, self.trap_frequencies, self.transition.mass, CODATA)

    def with_corrections(self, corrections) -> "ExperimentConfig":
        return dataclasses.replace(self, corrections=frozenset(corrections))


@dataclass
class SweepRow:
    detuning_gamma: float
    detuning_rad_s: float
    theory_rad: float
    theory_lo_rad: float
    theory_hi_rad: float
    sim_rad: float | None = None
    sim_err_rad: float | None = None
    flags: tuple[str, ...] = ()
    g_effective: float = math.nan

    @property
    def theory_deg(self):
        return math.degrees(self.theory_rad)

    @property
    def theory_lo_deg(self):
        return math.degrees(self.theory_lo_rad)

    @property
    def theory_hi_deg(self):
        return math.degrees(self.theory_hi_rad)

    @property
    def sim_deg(self):
        return None if self.sim_rad is None else math.degrees(self.sim_rad)

    @property
    def sim_err_deg(self):
        return None if self.sim_err_rad is None else math.degrees(self.sim_err_rad)


# --- config parsing -----------------------------------------------------------


def expand_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("range needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        # integer multiples of the step keep symmetric grids exactly symmetric
        return tuple(start + i * step for i in range(n))
    return tuple(float(p) for p in text.split(",") if p.strip())


def parse_corrections(text: str) -> frozenset:
    text = text.strip().lower()
    if text in ("", "none", "off"):
        return frozenset()
    if text == "all":
        return frozenset(CORRECTIONS)
    names = frozenset(p.strip() for p in text.split(",") if p.strip())
    unknown = names - set(CORRECTIONS)
    if unknown:
        raise ValueError(f"unknown correction(s) {', '.join(sorted(unknown))}")
    return names


def _convert(kind, raw):
    if kind == "float":
        value = float(raw)
        if not math.isfinite(value):
            raise ValueError("value must be finite")
        return value
    if kind == "int":
        return int(raw)
    if kind == "half_integer":
        return Fraction(raw)
    if kind == "grid":
        return expand_grid(raw)
    if kind == "corrections":
        return parse_corrections(raw)
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split(",")
        if raw not in choices:
            raise ValueError(f"expected one of {choices}")
        return raw
    raise AssertionError(kind)


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep:
            raise ParseError("expected 'key = value'", line=lineno)
        if key not in DEFAULTS:
            raise ParseError("unknown key", key=key, line=lineno)
        if key in values:
            raise ParseError("duplicate key", key=key, line=lineno)
        try:
            values[key] = _convert(DEFAULTS[key][1], raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed value {raw!r} ({exc})", key=key, line=lineno) from None
    return build_config(**values)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def build_config(**overrides) -> ExperimentConfig:
    """ExperimentConfig from config-file keys; omitted keys take their defaults."""
    unknown = set(overrides) - set(DEFAULTS)
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}")
    v = {key: _convert(kind, default) if isinstance(default, str) else default
         for key, (default, kind) in DEFAULTS.items()}
    v.update(overrides)
    try:
        gamma = 2.0 * math.pi * v["linewidth_mhz"] * 1e6
        transition = Transition.from_j(
            wavelength=v["wavelength_nm"] * 1e-9,
            linewidth=gamma,
            j_lower=v["j_lower"],
            j_upper=v["j_upper"],
            mass=v["mass_u"] * CODATA.atomic_mass_unit,
        )
        if not 0.0 <= v["coupling_central"] <= 1.0:
            raise ValidationError(f"coupling_central must lie in [0, 1], got {v['coupling_central']}")
        mode_area = v["mode_area_m2"]
        if mode_area is None:
            mode_area = mode_area_for_coupling(max(v["coupling_central"], 1e-12), transition.wavelength)
        beam = BeamGeometry(
            mode_area=mode_area,
            saturation=v["saturation"],
            axial_waist=v["axial_waist_nm"] * 1e-9,
        )
        radial = 2.0 * math.pi * v["trap_radial_khz"] * 1e3
        axial = 2.0 * math.pi * v["trap_axial_khz"] * 1e3
        mean_rate = v["mean_rate"]
        heterodyne = HeterodyneConfig(
            beat_frequency=2.0 * math.pi * v["beat_mhz"] * 1e6,
            trigger_frequency=v["trigger_mhz"] * 1e6,
            bin_width=v["bin_width_ps"] * 1e-12,
            duration=v["duration_s"],
            mean_rate=mean_rate,
            visibility=v["visibility"],
            instrumental_phase=v["instrumental_phase_rad"],
            background_rate=v["background_rate"],
        )
        return ExperimentConfig(
            transition=transition,
            beam=beam,
            trap_frequencies=(radial, radial, axial),
            temperature_excess=v["temperature_excess"],
            coupling_central=v["coupling_central"],
            coupling_uncertainty=v["coupling_uncertainty"],
            detuning_grid=tuple(v["detuning_grid"]),
            heterodyne=heterodyne,
            dark_rate=mean_rate if v["dark_rate"] is None else v["dark_rate"],
            seed=int(v["seed"]),
            corrections=frozenset(v["corrections"]),
            saturation_reference=v["saturation_reference"],
        )
    except ValidationError:
        raise
    except (DomainError, ConfigurationError) as exc:
        raise ValidationError(str(exc)) from exc


# --- sweeps -------------------------------------------------------------------


def _effective_coupling(config: ExperimentConfig, g: float, delta: float):
    """(g_effective, flags) at one detuning with the enabled corrections."""
    motion_on = "motion" in config.corrections
    flags = ()
    if motion_on and delta >= 0:
        # the Doppler model has no steady state without red detuning
        motion_on = False
        flags = ("no_cooling",)
    budget = build_budget(
        config.beam,
        config.transition,
        config.motion(),
        delta,
        source="fixed",
        g_fixed=g,
        motion_correction=motion_on,
        saturation_correction="saturation" in config.corrections,
        temperature_excess=config.temperature_excess,
        saturation_reference=config.saturation_reference,
    )
    return budget.g_effective, flags


def _theory_row(config: ExperimentConfig, multiple: float, delta: float) -> SweepRow:
    gamma = config.gamma
    c, u = config.coupling_central, config.coupling_uncertainty
    try:
        g_c, flags = _effective_coupling(config, c, delta)
        g_lo, _ = _effective_coupling(config, c - u, delta)
        g_hi, _ = _effective_coupling(config, c + u, delta)
        central = phase_j_equal(g_c, delta, gamma)
        edges = (phase_j_equal(g_lo, delta, gamma), phase_j_equal(g_hi, delta, gamma))
    except (DomainError, NoCoolingError) as exc:
        raise type(exc)(f"at detuning {multiple:g} Gamma: {exc}") from exc
    return SweepRow(
        detuning_gamma=multiple,
        detuning_rad_s=delta,
        theory_rad=central,
        theory_lo_rad=min(edges),
        theory_hi_rad=max(edges),
        flags=flags,
        g_effective=g_c,
    )


def theory_curve(config: ExperimentConfig) -> list[SweepRow]:
    """Predicted J=J' phase at the central coupling and at the band edges."""
    return [
        _theory_row(config, m, d) for m, d in zip(config.detuning_grid, config.detunings)
    ]


BRIGHT, DARK = 0, 1


def point_seed(master: int, index: int, tag: int) -> np.random.SeedSequence:
    """Independent, reproducible stream for one grid point and run type."""
    return np.random.SeedSequence(entropy=master, spawn_key=(index, tag))


def _simulate_point(config: ExperimentConfig, index: int, row: SweepRow, backend=None) -> SweepRow:
    het = config.heterodyne
    gamma = config.gamma
    injected = row.theory_rad
    sideband = 0.0
    if "sideband_reference" in config.corrections:
        sideband = sideband_reference_correction(
            row.g_effective, row.detuning_rad_s, het.beat_frequency, gamma
        )
    # the beat phase follows carrier minus sideband; the dark run sees neither
    bright_phase = het.instrumental_phase + injected - sideband
    dark_config = dataclasses.replace(het, mean_rate=config.dark_rate)
    try:
        bright = fit_cosine(
            simulate_histogram(het, bright_phase, point_seed(config.seed, index, BRIGHT), backend),
            het.beat_frequency,
        )
        dark = fit_cosine(
            simulate_histogram(
                dark_config, het.instrumental_phase, point_seed(config.seed, index, DARK), backend
            ),
            het.beat_frequency,
        )
    except (InsufficientDataError, IonPhaseError, np.linalg.LinAlgError):
        return dataclasses.replace(row, flags=row.flags + ("fit_failed",))
    measurement = differential_phase(bright, dark)
    value = measurement.differential + sideband
    return dataclasses.replace(
        row,
        sim_rad=wrap_phase(value),
        sim_err_rad=measurement.stderr,
        flags=row.flags + measurement.flags,
    )


def simulate_sweep(config: ExperimentConfig, jobs: int = 1, backend=None) -> list[SweepRow]:
    """Theory plus a simulated bright/dark heterodyne measurement per grid point.

    Output is independent of ``jobs``: every point draws from its own seed
    stream and rows are returned in grid order.
    """
    rows = theory_curve(config)
    work = lambda item: _simulate_point(config, item[0], item[1], backend)  # noqa: E731
    if jobs <= 1:
        return [work(item) for item in enumerate(rows)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, enumerate(rows)))


# --- CSV output ---------------------------------------------------------------

CSV_HEADER = (
    "detuning_gamma,detuning_rad_s,theory_deg,theory_lo_deg,theory_hi_deg,sim_deg,sim_err_deg,flags"
)


def _fmt(x):
    return "" if x is None else f"{x:.10g}"


def format_csv(rows) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        fields = [
            r.detuning_gamma, r.detuning_rad_s, r.theory_deg, r.theory_lo_deg,
            r.theory_hi_deg, r.sim_deg, r.sim_err_deg,
        ]
        lines.append(",".join(_fmt(x) for x in fields) + "," + ";".join(r.flags))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(format_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc


def read_sweep_csv(path) -> list[dict]:
    """Parse a sweep CSV back into dicts; empty numeric fields become None."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        names = header.split(",")
        out = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rec = {}
            for name, value in zip(names, parts):
                if name == "flags":
                    rec[name] = tuple(f for f in value.split(";") if f)
                else:
                    rec[name] = float(value) if value else None
            out.append(rec)
    return out
