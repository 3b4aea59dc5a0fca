"""Monte Carlo model of the heterodyne photon-counting beat measurement.

Photon detections form an inhomogeneous Poisson process whose rate beats at
the carrier-sideband difference frequency.  Candidates are drawn from a
homogeneous process at the envelope rate and thinned; accepted times are
folded modulo the trigger period into a TDC histogram.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend, _kernels_py
from .errors import ConfigurationError

__all__ = [
    "HeterodyneConfig",
    "DetectionRecord",
    "TdcHistogram",
    "beat_rate",
    "sample_detections",
    "simulate_histogram",
    "fold_histogram",
    "write_record",
    "read_record",
    "write_histogram_csv",
    "read_histogram_csv",
]

# expected number of thinning candidates generated per chunk
_CHUNK_CANDIDATES = 1 << 20
_RATIO_TOL = 1e-9


def _integer_ratio(numerator, denominator, what):
    ratio = numerator / denominator
    n = round(ratio)
    if n < 1 or abs(ratio - n) > _RATIO_TOL * max(1.0, ratio):
        raise ConfigurationError(f"{what} (ratio {ratio!r} is not a positive integer)")
    return int(n)


@dataclass(frozen=True)
class HeterodyneConfig:
    beat_frequency: float = 2.0 * math.pi * 400e6
    trigger_frequency: float = 10e6
    bin_width: float = 100e-12
    duration: float = 10.0
    mean_rate: float = 5e4
    visibility: float = 0.5
    instrumental_phase: float = 0.0
    background_rate: float = 0.0

    def __post_init__(self):
        if not self.trigger_frequency > 0:
            raise ConfigurationError(f"trigger_frequency must be positive, got {self.trigger_frequency}")
        if not self.beat_frequency > 0:
            raise ConfigurationError(f"beat_frequency must be positive, got {self.beat_frequency}")
        if not self.duration > 0:
            raise ConfigurationError(f"duration must be positive, got {self.duration}")
        if not self.mean_rate >= 0:
            raise ConfigurationError(f"mean_rate must be nonnegative, got {self.mean_rate}")
        if not self.background_rate >= 0:
            raise ConfigurationError(f"background_rate must be nonnegative, got {self.background_rate}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ConfigurationError(f"visibility must lie in [0, 1], got {self.visibility}")
        if not self.bin_width > 0:
            raise ConfigurationError(f"bin_width must be positive, got {self.bin_width}")
        self.oscillations_per_period
        self.n_bins

    @property
    def trigger_period(self) -> float:
        return 1.0 / self.trigger_frequency

    @property
    def oscillations_per_period(self) -> int:
        return _integer_ratio(
            self.beat_frequency,
            2.0 * math.pi * self.trigger_frequency,
            "beat frequency must be an integer multiple of the trigger frequency",
        )

    @property
    def n_bins(self) -> int:
        return _integer_ratio(
            self.trigger_period, self.bin_width, "bin width must divide the trigger period"
        )

    @property
    def envelope_rate(self) -> float:
        return self.mean_rate * (1.0 + self.visibility) + self.background_rate


@dataclass(frozen=True)
class DetectionRecord:
    arrival_times: np.ndarray
    duration: float | None = None

    def __post_init__(self):
        times = np.ascontiguousarray(self.arrival_times, dtype=float)
        if times.ndim != 1:
            raise ValueError("arrival_times must be one-dimensional")
        if times.size:
            if np.any(np.diff(times) <= 0):
                raise ValueError("arrival_times must be strictly increasing")
            if times[0] < 0 or (self.duration is not None and times[-1] >= self.duration):
                raise ValueError("arrival_times must lie in [0, duration)")
        object.__setattr__(self, "arrival_times", times)

    def __len__(self):
        return self.arrival_times.size


@dataclass(frozen=True)
class TdcHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int | float = field(init=False)

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or counts.ndim != 1 or edges.size != counts.size + 1:
            raise ValueError("need len(bin_edges) == len(counts) + 1")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", counts.sum().item())

    @classmethod
    def empty(cls, config: HeterodyneConfig) -> "TdcHistogram":
        n = config.n_bins
        edges = np.arange(n + 1) * (config.trigger_period / n)
        return cls(edges, np.zeros(n, dtype=np.int64))

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def n_bins(self) -> int:
        return self.counts.size


def beat_rate(t, config: HeterodyneConfig, phase: float):
    """Detection rate R0 (1 + V cos(w_rf t + phase)) plus flat background."""
    tf = _kernels_py._fold(np.asarray(t, dtype=float), config.trigger_period)
    rate = (
        config.mean_rate * (1.0 + config.visibility * np.cos(config.beat_frequency * tf + phase))
        + config.background_rate
    )
    return float(rate) if rate.ndim == 0 else rate


def _candidate_chunks(config: HeterodyneConfig, seed):
    """Yield (times, uniforms) per chunk of the homogeneous candidate process."""
    rng = np.random.default_rng(seed)
    envelope = config.envelope_rate
    if envelope == 0.0:
        return
    expected = envelope * config.duration
    n_chunks = max(1, math.ceil(expected / _CHUNK_CANDIDATES))
    edges = np.linspace(0.0, config.duration, n_chunks + 1)
    for start, stop in zip(edges[:-1], edges[1:]):
        length = stop - start
        n = int(rng.poisson(envelope * length))
        times = start + rng.random(n) * length
        uniforms = rng.random(n)
        if stop == config.duration:
            keep = times < stop
            if not keep.all():
                times, uniforms = times[keep], uniforms[keep]
        yield times, uniforms


def _thinning_args(config: HeterodyneConfig, phase: float):
    background = config.background_rate / config.mean_rate if config.mean_rate > 0 else 0.0
    visibility = config.visibility if config.mean_rate > 0 else 0.0
    return (config.beat_frequency, float(phase), visibility, background)


def sample_detections(config: HeterodyneConfig, phase: float, seed, backend=None) -> DetectionRecord:
    """Draw one acquisition's detection times.  Deterministic in (config, phase, seed)."""
    k = _backend.get_kernels(backend)
    omega, phase, visibility, background = _thinning_args(config, phase)
    accepted = []
    for times, uniforms in _candidate_chunks(config, seed):
        mask = k.thin_mask(
            times, uniforms, omega, phase, visibility, background, config.trigger_period
        )
        kept = times[np.asarray(mask, dtype=bool)]
        kept.sort()
        accepted.append(kept)
    times = np.concatenate(accepted) if accepted else np.empty(0)
    return DetectionRecord(times, config.duration)


def simulate_histogram(config: HeterodyneConfig, phase: float, seed, backend=None) -> TdcHistogram:
    """Histogram of ``sample_detections(config, phase, seed)`` without storing the record.

    Bit-identical to folding the sampled record, at a fraction of the memory.
    """
    k = _backend.get_kernels(backend)
    omega, phase, visibility, background = _thinning_args(config, phase)
    hist = TdcHistogram.empty(config)
    counts = hist.counts
    for times, uniforms in _candidate_chunks(config, seed):
        k.thin_fold(
            times, uniforms, omega, phase, visibility, background,
            config.trigger_period, config.n_bins, counts,
        )
    return TdcHistogram(hist.bin_edges, counts)


def fold_histogram(record: DetectionRecord, config: HeterodyneConfig, backend=None) -> TdcHistogram:
    """Fold detection times modulo the trigger period into TDC bins.

    Bin ``k`` covers ``[k * bin_width, (k + 1) * bin_width)``.
    """
    k = _backend.get_kernels(backend)
    hist = TdcHistogram.empty(config)
    counts = hist.counts
    k.fold_counts(record.arrival_times, config.trigger_period, config.n_bins, counts)
    return TdcHistogram(hist.bin_edges, counts)


def write_record(record: DetectionRecord, path) -> None:
    """One arrival time per line, seconds, 12 significant digits."""
    path = Path(path)
    try:
        with path.open("w") as fh:
            for t in record.arrival_times:
                fh.write(f"{t:.12g}\n")
    except OSError as exc:
        raise OSError(f"cannot write detection record to {path}: {exc}") from exc


def read_record(path, duration=None) -> DetectionRecord:
    path = Path(path)
    with path.open() as fh:
        times = [float(line) for line in fh if line.strip()]
    return DetectionRecord(np.array(times, dtype=float), duration)


HISTOGRAM_HEADER = "bin_start_s,count"


def write_histogram_csv(hist: TdcHistogram, path) -> None:
    path = Path(path)
    integral = np.issubdtype(hist.counts.dtype, np.integer)
    try:
        with path.open("w") as fh:
            fh.write(HISTOGRAM_HEADER + "\n")
            for start, count in zip(hist.bin_edges[:-1], hist.counts):
                fh.write(f"{start:.12g},{int(count) if integral else repr(float(count))}\n")
    except OSError as exc:
        raise OSError(f"cannot write histogram to {path}: {exc}") from exc


def read_histogram_csv(path) -> TdcHistogram:
    """Read the ``bin_start_s,count`` CSV.  Bins must be uniform and ordered."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        if header != HISTOGRAM_HEADER:
            raise ValueError(f"{path}: expected header {HISTOGRAM_HEADER!r}, got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two bins")
    starts, counts = data[:, 0], data[:, 1]
    widths = np.diff(starts)
    width = widths.mean()
    if np.any(np.abs(widths - width) > 1e-6 * width):
        raise ValueError(f"{path}: bins are not uniform")
    edges = np.append(starts, starts[-1] + width)
    if np.all(counts == np.round(counts)):
        counts = counts.astype(np.int64)
    return TdcHistogram(edges, counts)
