"""Monte Carlo simulation of two-phase training and the benchmark schemes.

Trials are simulated in fixed-size chunks. Chunk ``c`` of a run with master
seed ``s`` draws from ``SeedSequence([s, c])``, spawned into one stream for
the channel and one for receiver noise. The channel stream is consumed the
same way by every scheme and design, so runs sharing a seed see the same
channel realizations (common random numbers) and results do not depend on
how the chunks are scheduled.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analytic
from .channel import PdpProfile, complex_normal, gen_iid, gen_pdp
from .params import Scheme, SystemParams, TrainingDesign

CHUNK_SIZE = 2048


class ChannelMode(str, enum.Enum):
    IID = "iid"
    PDP = "pdp"


def select_subbands(n_total: int, n1: int) -> np.ndarray:
    """Evenly spread training sub-bands, 0-based.

    Index k (0-based) is round(k (N-1)/(n1-1)); with n1 = 2 this is the
    first and last sub-band. Rounding is half-up.
    """
    if not 1 <= n1 <= n_total:
        raise ValueError(f"need 1 <= n1 <= {n_total}, got {n1}")
    if n1 == 1:
        return np.array([0])
    k = np.arange(n1)
    return np.floor(k * (n_total - 1) / (n1 - 1) + 0.5).astype(int)


def phase1(h, indices, e1, p: SystemParams, rng, noise_scale=1.0):
    """Energy detection over the trained sub-bands.

    Returns the matched-filter outputs ``y`` with shape (..., n1, M) and the
    selected sub-band index into the full band (first maximum wins).
    """
    indices = np.asarray(indices)
    h_trained = h[..., indices, :]
    noise = complex_normal(rng, h_trained.shape, p.n0) * noise_scale
    y = math.sqrt(e1) * h_trained + noise
    local = np.argmax(np.sum(y.real**2 + y.imag**2, axis=-1), axis=-1)
    return y, indices[local]


def phase2(h_sel, e2, r_h_value, p: SystemParams, rng):
    """LMMSE estimate of the selected channel from one pilot of energy e2."""
    y = math.sqrt(e2) * h_sel + complex_normal(rng, h_sel.shape, p.n0)
    b = analytic.lmmse_moments(r_h_value, e2, p).b
    h_hat = b * y
    err = h_sel - h_hat
    return h_hat, np.sum(err.real**2 + err.imag**2, axis=-1)


def harvest(h_sel, h_hat, p: SystemParams):
    """Harvested energy for MRT along ``h_hat``.

    A zero estimate (no phase II) falls back to the first antenna alone.
    """
    h_sel = np.asarray(h_sel)
    h_hat = np.asarray(h_hat)
    norm2 = np.sum(h_hat.real**2 + h_hat.imag**2, axis=-1)
    inner = np.sum(np.conj(h_sel) * h_hat, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = np.where(norm2 > 0, np.abs(inner) ** 2 / norm2, np.abs(h_sel[..., 0]) ** 2)
    return p.energy_scale * gain


def harvest_expansion(h_sel, h_hat, p: SystemParams):
    """Same quantity as :func:`harvest` via the split h = h_hat + h_tilde."""
    h_tilde = h_sel - h_hat
    norm2 = np.sum(np.abs(h_hat) ** 2, axis=-1)
    cross = np.sum(np.conj(h_tilde) * h_hat, axis=-1)
    total = norm2 + np.abs(cross) ** 2 / norm2 + 2.0 * cross.real
    return p.energy_scale * total


@dataclass
class TrialBatch:
    """Per-trial results of a batch of independent blocks."""

    q_hat: np.ndarray
    q_net: np.ndarray
    n_star: np.ndarray
    h_tilde_power: np.ndarray
    selected_power: np.ndarray
    cross_term: np.ndarray

    @classmethod
    def concatenate(cls, batches):
        return cls(**{
            f: np.concatenate([getattr(b, f) for b in batches])
            for f in cls.__dataclass_fields__
        })


@dataclass(frozen=True)
class TrialOutcome:
    q_hat: float
    q_net: float
    selected_subband: int
    est_error_power: float


def _channel(mode, p, pdp, rng, size):
    if ChannelMode(mode) is ChannelMode.IID:
        return gen_iid(p, rng, size)
    return gen_pdp(p, pdp or PdpProfile(), rng, size)


def simulate_batch(scheme, d: TrainingDesign, mode, p: SystemParams, pdp: Optional[PdpProfile],
                   channel_rng, noise_rng, size: int) -> TrialBatch:
    scheme = Scheme(scheme)
    scheme.check_design(d)
    d.check(p)
    h = _channel(mode, p, pdp, channel_rng, size)
    rows = np.arange(size)
    m = p.m
    zeros = np.zeros(size)

    if scheme is Scheme.PERFECT_CSIT:
        power = np.sum(h.real**2 + h.imag**2, axis=-1)
        best = np.argmax(power, axis=-1)
        sel = power[rows, best]
        q_hat = p.energy_scale * sel
        return TrialBatch(q_hat, q_hat.copy(), best, zeros, sel, zeros.copy())
    if scheme is Scheme.NO_CSIT:
        h_sel = h[:, 0, :]
        q_hat = harvest(h_sel, np.zeros_like(h_sel), p)
        sel = np.sum(np.abs(h_sel) ** 2, axis=-1)
        n_star = np.zeros(size, dtype=int)
        return TrialBatch(q_hat, q_hat.copy(), n_star, sel, sel, zeros.copy())

    if scheme is Scheme.PHASE_II_ONLY or d.n1 == 1:
        n_star = np.zeros(size, dtype=int)
    else:
        _, n_star = phase1(h, select_subbands(p.n_subbands, d.n1), d.e1, p, noise_rng)
    h_sel = h[rows, n_star]
    if d.e2 > 0:
        h_hat, err_power = phase2(h_sel, d.e2, analytic.r_h(d.n1, d.e1, p), p, noise_rng)
    else:
        h_hat = np.zeros((size, m), dtype=complex)
        err_power = np.sum(np.abs(h_sel) ** 2, axis=-1)
    q_hat = harvest(h_sel, h_hat, p)
    cross = np.sum(np.conj(h_sel - h_hat) * h_hat, axis=-1).real
    return TrialBatch(
        q_hat=q_hat,
        q_net=q_hat - d.e1 * d.n1 - d.e2,
        n_star=n_star,
        h_tilde_power=err_power,
        selected_power=np.sum(np.abs(h_sel) ** 2, axis=-1),
        cross_term=cross,
    )


def _chunk_streams(seed, index):
    channel_ss, noise_ss = np.random.SeedSequence([seed, index]).spawn(2)
    return np.random.default_rng(channel_ss), np.random.default_rng(noise_ss)


def simulate(scheme, d: TrainingDesign, mode, p: SystemParams, pdp: Optional[PdpProfile],
             trials: int, seed: int) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    batches = []
    for index, start in enumerate(range(0, trials, CHUNK_SIZE)):
        size = min(CHUNK_SIZE, trials - start)
        ch_rng, noise_rng = _chunk_streams(seed, index)
        batches.append(simulate_batch(scheme, d, mode, p, pdp, ch_rng, noise_rng, size))
    return TrialBatch.concatenate(batches)


def run_trial(scheme, d: TrainingDesign, mode, p: SystemParams, pdp: Optional[PdpProfile],
              rng: np.random.Generator) -> TrialOutcome:
    """One block of the protocol, drawing channel and noise from ``rng``."""
    b = simulate_batch(scheme, d, mode, p, pdp, rng, rng, 1)
    return TrialOutcome(float(b.q_hat[0]), float(b.q_net[0]), int(b.n_star[0]),
                        float(b.h_tilde_power[0]))


@dataclass(frozen=True)
class McSummary:
    trials: int
    mean_q_net: float
    std_error: float
    mean_q_hat: float
    std_error_q_hat: float = 0.0


def mean_and_stderr(values) -> tuple:
    """Compensated mean and standard error (zero for a single sample)."""
    values = np.asarray(values, dtype=float)
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def summarize(batch: TrialBatch) -> McSummary:
    mean_net, se_net = mean_and_stderr(batch.q_net)
    mean_hat, se_hat = mean_and_stderr(batch.q_hat)
    return McSummary(batch.q_net.size, mean_net, se_net, mean_hat, se_hat)


def monte_carlo(scheme, d: TrainingDesign, mode, p: SystemParams, pdp: Optional[PdpProfile],
                trials: int, seed: int) -> McSummary:
    return summarize(simulate(scheme, d, mode, p, pdp, trials, seed))
