"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def _fold(times, period):
    # same floor-based reduction as the compiled kernel, for bit-identical bins
    tf = times - np.floor(times * (1.0 / period)) * period
    tf = np.where(tf < 0.0, tf + period, tf)
    return np.where(tf >= period, tf - period, tf)


def _bins(tf, period, nbins):
    bin_width = period / nbins
    k = (tf / bin_width).astype(np.int64)
    np.minimum(k, nbins - 1, out=k)
    return k


def fold_counts(times, period, nbins, counts):
    counts += np.bincount(_bins(_fold(times, period), period, nbins), minlength=nbins)


def thin_mask(times, uniforms, omega, phase, visibility, background, period):
    envelope = 1.0 + visibility + background
    rate = 1.0 + visibility * np.cos(omega * _fold(times, period) + phase) + background
    return uniforms * envelope < rate


def thin_fold(times, uniforms, omega, phase, visibility, background, period, nbins, counts):
    envelope = 1.0 + visibility + background
    tf = _fold(times, period)
    rate = 1.0 + visibility * np.cos(omega * tf + phase) + background
    accepted = tf[uniforms * envelope < rate]
    counts += np.bincount(_bins(accepted, period, nbins), minlength=nbins)
    return int(accepted.size)
