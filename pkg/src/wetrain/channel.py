"""Frequency-domain MISO channel generators.

Realizations are complex arrays of shape ``(..., N, M)``: one row per
sub-band, one column per transmit antenna. Every entry is zero-mean with
second moment ``beta`` in both modes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .params import SystemParams

# truncate the delay profile once this fraction of its power is captured
PDP_POWER_FRACTION = 1.0 - 1e-4
# default tap spacing as a fraction of 1/B; 1/B aliases the band edges
TAP_OVERSAMPLING = 4
_PDP_BLOCK_ENTRIES = 1 << 21


def complex_normal(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """CN(0, variance) draws (real and imaginary parts each variance/2)."""
    out = rng.standard_normal(tuple(shape) + (2,)).view(np.complex128)[..., 0]
    out *= math.sqrt(variance / 2.0)
    return out


def gen_iid(p: SystemParams, rng: np.random.Generator, size=None) -> np.ndarray:
    """Independent CN(0, beta) gains on every sub-band and antenna."""
    lead = () if size is None else (size,)
    return complex_normal(rng, lead + (p.n_subbands, p.m), p.beta)


@dataclass(frozen=True)
class PdpProfile:
    """Exponential power delay profile sampled on a uniform tap grid.

    ``tap_spacing`` defaults to 1/(4B); ``num_taps`` defaults to the smallest
    count holding ``PDP_POWER_FRACTION`` of the untruncated power.
    """

    sigma_rms: float = 1e-6
    tap_spacing: Optional[float] = None
    num_taps: Optional[int] = None

    def __post_init__(self):
        if not self.sigma_rms > 0:
            raise ValueError("sigma_rms must be positive")
        if self.tap_spacing is not None and not self.tap_spacing > 0:
            raise ValueError("tap_spacing must be positive")
        if self.num_taps is not None and self.num_taps < 1:
            raise ValueError("num_taps must be >= 1")

    def spacing(self, p: SystemParams) -> float:
        if self.tap_spacing is not None:
            return self.tap_spacing
        return 1.0 / (TAP_OVERSAMPLING * p.bandwidth_hz)

    def taps(self, p: SystemParams) -> int:
        if self.num_taps is not None:
            return self.num_taps
        decay = math.exp(-self.spacing(p) / self.sigma_rms)
        return max(1, math.ceil(math.log(1.0 - PDP_POWER_FRACTION) / math.log(decay) - 1e-9))

    def delays(self, p: SystemParams) -> np.ndarray:
        return np.arange(self.taps(p)) * self.spacing(p)

    def powers(self, p: SystemParams) -> np.ndarray:
        """Tap powers proportional to exp(-tau/sigma_rms), summing to beta."""
        w = np.exp(-self.delays(p) / self.sigma_rms)
        return p.beta * w / w.sum()

    def frequency_correlation(self, delta_f, p: Optional[SystemParams] = None):
        """Complex correlation E[h(f) h*(f + df)] / beta.

        Without ``p`` this is the continuous-profile value 1/(1 - j 2 pi df
        sigma); with ``p`` it is that of the sampled, truncated taps.
        """
        delta_f = np.asarray(delta_f, dtype=float)
        if p is None:
            return 1.0 / (1.0 - 2j * np.pi * delta_f * self.sigma_rms)
        powers = self.powers(p) / p.beta
        phase = np.exp(2j * np.pi * np.multiply.outer(delta_f, self.delays(p)))
        return phase @ powers


def subband_frequencies(p: SystemParams) -> np.ndarray:
    """Sub-band centre frequencies on a baseband grid symmetric about 0."""
    n = np.arange(1, p.n_subbands + 1)
    return (n - (p.n_subbands + 1) / 2.0) * p.subband_width


def gen_pdp(p: SystemParams, pdp: PdpProfile, rng: np.random.Generator, size=None,
            frequencies=None) -> np.ndarray:
    """Frequency response of an independent tapped delay line per antenna.

    ``frequencies`` replaces the sub-band centre grid (same tap profile),
    e.g. to probe arbitrary frequency separations.
    """
    freqs = subband_frequencies(p) if frequencies is None else np.asarray(frequencies, float)
    amplitudes = np.sqrt(pdp.powers(p))
    steering = np.exp(-2j * np.pi * np.multiply.outer(pdp.delays(p), freqs))
    if size is None:
        taps = complex_normal(rng, (p.m, amplitudes.size)) * amplitudes
        return (taps @ steering).T
    out = np.empty((size, freqs.size, p.m), dtype=complex)
    # bounded-memory blocks of 2-D products
    block = max(1, _PDP_BLOCK_ENTRIES // (p.m * amplitudes.size))
    for start in range(0, size, block):
        stop = min(size, start + block)
        taps = complex_normal(rng, (stop - start, p.m, amplitudes.size)) * amplitudes
        response = taps.reshape(-1, amplitudes.size) @ steering
        out[start:stop] = response.reshape(stop - start, p.m, -1).transpose(0, 2, 1)
    return out


def amplitude_correlation(h: np.ndarray, i: int, j: int) -> float:
    """|sample complex correlation| between sub-bands i and j, pooled over antennas."""
    a = h[..., i, :].ravel()
    b = h[..., j, :].ravel()
    num = np.vdot(b, a)
    return float(abs(num) / math.sqrt(np.vdot(a, a).real * np.vdot(b, b).real))
