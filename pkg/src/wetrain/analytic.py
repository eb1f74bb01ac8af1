"""Closed-form energy accounting of two-phase training.

Functions accept NumPy arrays for the energy arguments (``e1``, ``e2``,
``r_h``) and broadcast, which the optimizer oracles rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCase
from .orderstats import g_value
from .params import SystemParams, TrainingDesign


def r_h(n1: int, e1, p: SystemParams):
    """Mean squared norm of the channel on the sub-band chosen in phase I.

    Lies between beta*M (no selection gain) and beta*G(n1, M) (noiseless
    selection).
    """
    e1 = np.asarray(e1, dtype=float)
    gain = g_value(n1, p.m)
    out = (p.beta**2 * e1 * gain + p.beta * p.n0 * p.m) / (p.beta * e1 + p.n0)
    return out if out.ndim else float(out)


def r_h_derivative(n1: int, e1, p: SystemParams):
    """d r_h / d e1 = beta^2 N0 (G - M) / (beta e1 + N0)^2."""
    e1 = np.asarray(e1, dtype=float)
    gain = g_value(n1, p.m)
    out = p.beta**2 * p.n0 * (gain - p.m) / (p.beta * e1 + p.n0) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LmmseMoments:
    b: float
    mse: float
    est_power: float


def lmmse_moments(r_h_value, e2, p: SystemParams) -> LmmseMoments:
    """Scalar LMMSE coefficient for the phase-II observation and its moments.

    The estimate is ``b * y`` with ``y = sqrt(e2) h + z``; ``mse`` and
    ``est_power`` are E||h - b y||^2 and E||b y||^2.
    """
    denom = e2 * r_h_value + p.n0 * p.m
    b = np.sqrt(e2) * r_h_value / denom
    mse = p.n0 * p.m * r_h_value / denom
    est_power = e2 * r_h_value**2 / denom
    return LmmseMoments(b, mse, est_power)


def _q_bar_from_rh(rh, e2, p):
    return p.energy_scale * rh * (1.0 - (p.m - 1) * p.n0 / (e2 * rh + p.n0 * p.m))


def q_bar(d: TrainingDesign, p: SystemParams) -> float:
    """Average harvested energy (J) with MRT on the LMMSE estimate."""
    return _q_bar_from_rh(r_h(d.n1, d.e1, p), d.e2, p)


@dataclass(frozen=True)
class EnergyReport:
    q_bar: float
    q_net: float
    r_h: float
    e2_term: float


def q_net(d: TrainingDesign, p: SystemParams) -> EnergyReport:
    rh = r_h(d.n1, d.e1, p)
    qb = _q_bar_from_rh(rh, d.e2, p)
    loss = p.energy_scale * rh * (p.m - 1) * p.n0 / (d.e2 * rh + p.n0 * p.m)
    return EnergyReport(q_bar=qb, q_net=qb - d.e1 * d.n1 - d.e2, r_h=rh, e2_term=loss)


def _phase2_scale(p):
    # sqrt(eta T P_f (M-1) N0), the unclamped part of the optimal e2
    return math.sqrt(p.energy_scale * (p.m - 1) * p.n0)


def e2_star(r_h_value, p: SystemParams):
    """Optimal phase-II energy for a given selected-channel power."""
    out = np.maximum(_phase2_scale(p) - p.n0 * p.m / np.asarray(r_h_value, dtype=float), 0.0)
    return out if out.ndim else float(out)


def alpha(p: SystemParams) -> float:
    """Selected-channel power below which phase-II training does not pay.

    Exact zero crossing of :func:`e2_star`: N0 M / sqrt(eta T P_f (M-1) N0).
    """
    if p.m == 1:
        raise DegenerateCase("alpha is infinite for a single antenna")
    return p.n0 * p.m / _phase2_scale(p)


def q_net_reduced_from_rh(rh, e1, n1: int, p: SystemParams):
    rh = np.asarray(rh, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    low = p.energy_scale * rh / p.m - e1 * n1
    if p.m == 1:
        out = low
    else:
        s = _phase2_scale(p)
        high = p.energy_scale * rh + p.n0 * p.m / rh - e1 * n1 - 2.0 * s
        out = np.where(rh > alpha(p), high, low)
    return out if out.ndim else float(out)


def q_net_reduced(n1: int, e1, p: SystemParams):
    """Net energy with the optimal phase-II energy substituted."""
    return q_net_reduced_from_rh(r_h(n1, e1, p), e1, n1, p)


def q_net_reduced_derivative(n1: int, e1, p: SystemParams):
    """d/d e1 of :func:`q_net_reduced` (continuous across the branch split)."""
    rh = np.asarray(r_h(n1, e1, p), dtype=float)
    drh = r_h_derivative(n1, e1, p)
    low = p.energy_scale / p.m * drh - n1
    if p.m == 1:
        out = low
    else:
        high = (p.energy_scale - p.n0 * p.m / rh**2) * drh - n1
        out = np.where(rh > alpha(p), high, low)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Baselines:
    perfect_csit: float
    no_csit: float


def baselines(p: SystemParams) -> Baselines:
    return Baselines(
        perfect_csit=p.energy_scale * p.beta * g_value(p.n_subbands, p.m),
        no_csit=p.energy_scale * p.beta,
    )
