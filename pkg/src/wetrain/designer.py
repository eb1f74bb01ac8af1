"""Optimal training design: phase-I energy per sub-band, phase-II energy and
number of trained sub-bands that maximize the net harvested energy.

For fixed ``n1`` the optimal phase-II energy has a closed form, which leaves
a one-dimensional problem in the phase-I energy ``e1``. Its objective has
two pieces split at the selected-channel power ``alpha`` (see
:func:`wetrain.analytic.alpha`); which pieces are reachable depends on how
``alpha`` compares with ``beta*M`` and ``beta*G(n1, M)`` and gives three
cases. Stationary points are computed from explicit polynomials in the
normalized variable

    w = 1 + beta * e1 / N0          (w >= 1)

with d = G - M and k = eta T P_f beta^2 / N0. In these units the selected
channel power is r_h = beta (G w - d) / w.

* low piece (no phase II):  N1 w^2 - (k/M) d = 0
* high piece (phase II on): k d (G w - d)^2 - M d w^2 - N1 w^2 (G w - d)^2 = 0

The quartic comes from multiplying d/de1 [eta T P_f r_h + N0 M / r_h - e1 N1]
= 0 by (beta e1 + N0)^2 (G w - d)^2 / N0^4.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .errors import RootFindingFailure
from .orderstats import g_value
from .params import Scheme, SystemParams, TrainingDesign

STATIONARITY_RTOL = 1e-8
# relative slack when comparing objective values across candidates / N1
_TIE_RTOL = 1e-12


class Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


class Branch(str, enum.Enum):
    CASE2 = "Case2"
    CASE3_LOW = "Case3Low"
    CASE3_HIGH = "Case3High"


@dataclass(frozen=True)
class E1Optimum:
    n1: int
    e1: float
    e2: float
    q_net: float
    case: Case
    candidates: tuple = ()


@dataclass(frozen=True)
class DesignSolution:
    n1_star: int
    e1_star: float
    e2_star: float
    q_net_star: float
    case: Case
    candidates_evaluated: int
    per_n1: tuple = field(default=(), repr=False)

    @property
    def design(self) -> TrainingDesign:
        return TrainingDesign(self.n1_star, self.e1_star, self.e2_star)

    def as_dict(self, t_block=None, include_per_n1=False) -> dict:
        out = {
            "n1_star": self.n1_star,
            "e1_star": self.e1_star,
            "e2_star": self.e2_star,
            "q_net_star": self.q_net_star,
            "case": self.case.value,
            "candidates_evaluated": self.candidates_evaluated,
        }
        if t_block is not None:
            out["net_power_w"] = self.q_net_star / t_block
        if include_per_n1:
            out["per_n1"] = [
                {"n1": o.n1, "e1": o.e1, "e2": o.e2, "q_net": o.q_net, "case": o.case.value}
                for o in self.per_n1
            ]
        return out


# ---------------------------------------------------------------------------
# Case analysis
# ---------------------------------------------------------------------------

def classify_case(n1: int, p: SystemParams) -> Case:
    if p.m == 1:
        return Case.CASE1
    a = analytic.alpha(p)
    if a >= p.beta * g_value(n1, p.m):
        return Case.CASE1
    if a <= p.beta * p.m:
        return Case.CASE2
    return Case.CASE3


def e0(n1: int, p: SystemParams) -> float:
    """Phase-I energy at which the selected-channel power reaches alpha."""
    a = analytic.alpha(p)
    gain = g_value(n1, p.m)
    return p.n0 * (a - p.beta * p.m) / (p.beta * (p.beta * gain - a))


def e1_star_case1(n1: int, p: SystemParams) -> float:
    """Maximizer of eta T P_f r_h / M - e1 n1 (concave in e1)."""
    gain = g_value(n1, p.m)
    radicand = p.energy_scale * p.n0 * (gain / p.m - 1.0) / n1
    return max(math.sqrt(max(radicand, 0.0)) - p.n0 / p.beta, 0.0)


def _w_to_e1(w, p):
    return p.n0 * (w - 1.0) / p.beta


def _branch_interval(n1, p, branch):
    """Admissible w interval (lo, hi) for the branch."""
    if branch is Branch.CASE2:
        return 1.0, math.inf
    gain = g_value(n1, p.m)
    w0 = p.beta * (gain - p.m) / (p.beta * gain - analytic.alpha(p))
    if branch is Branch.CASE3_LOW:
        return 1.0, w0
    return w0, math.inf


def stationary_polynomial(n1: int, p: SystemParams, high: bool) -> np.ndarray:
    """Coefficients (highest power first) of the stationarity polynomial in w."""
    gain = g_value(n1, p.m)
    d = gain - p.m
    k = p.energy_scale * p.beta**2 / p.n0
    if not high:
        return np.array([float(n1), 0.0, -k * d / p.m])
    return np.array([
        -n1 * gain**2,
        2.0 * n1 * gain * d,
        k * d * gain**2 - p.m * d - n1 * d**2,
        -2.0 * k * gain * d**2,
        k * d**3,
    ])


def _second_derivative(n1, e1, p, high):
    gain = g_value(n1, p.m)
    u = p.beta * e1 + p.n0
    rh = analytic.r_h(n1, e1, p)
    drh = p.beta**2 * p.n0 * (gain - p.m) / u**2
    d2rh = -2.0 * p.beta**3 * p.n0 * (gain - p.m) / u**3
    if not high:
        return p.energy_scale / p.m * d2rh
    return 2.0 * p.n0 * p.m * drh**2 / rh**3 + (p.energy_scale - p.n0 * p.m / rh**2) * d2rh


def _branch_derivative(n1, e1, p, high):
    rh = analytic.r_h(n1, e1, p)
    drh = analytic.r_h_derivative(n1, e1, p)
    if not high:
        return p.energy_scale / p.m * drh - n1
    return (p.energy_scale - p.n0 * p.m / rh**2) * drh - n1


def stationary_residual(n1: int, e1: float, p: SystemParams, high: bool) -> float:
    """|dQ/de1| / n1 for the chosen piece of the objective."""
    return abs(_branch_derivative(n1, e1, p, high)) / n1


def _polish(coeffs, w):
    dcoeffs = np.polyder(coeffs)
    for _ in range(8):
        val = np.polyval(coeffs, w)
        slope = np.polyval(dcoeffs, w)
        if slope == 0 or not math.isfinite(val):
            break
        step = val / slope
        w -= step
        if abs(step) <= 1e-15 * abs(w):
            break
    return w


def stationary_candidates(n1: int, p: SystemParams, branch: Branch) -> list:
    """Nonnegative stationary points of the net-energy objective on ``branch``.

    With one antenna there is no phase-II piece and the Case-1 closed form is
    returned for any branch.
    """
    if p.m == 1:
        e = e1_star_case1(n1, p)
        return [e] if e > 0 else []
    gain = g_value(n1, p.m)
    if gain - p.m <= 0:
        return []  # n1 == 1: r_h is flat in e1, objective strictly decreasing
    if branch is Branch.CASE3_LOW:
        high = False
    else:
        high = True
    lo, hi = _branch_interval(n1, p, branch)
    coeffs = stationary_polynomial(n1, p, high)
    scale = np.max(np.abs(coeffs))
    roots = np.roots(coeffs / scale)
    if not np.all(np.isfinite(roots)):
        raise RootFindingFailure("non-finite roots of stationarity polynomial", n1)

    out = []
    for root in roots:
        if abs(root.imag) > 1e-7 * max(1.0, abs(root.real)):
            continue
        w = _polish(coeffs, float(root.real))
        if not (lo <= w <= hi) or w < 1.0:
            continue
        e1 = _w_to_e1(w, p)
        # one Newton step on the rational derivative itself
        f1 = _branch_derivative(n1, e1, p, high)
        f2 = _second_derivative(n1, e1, p, high)
        if f2 != 0:
            trial = e1 - f1 / f2
            if trial >= 0 and abs(_branch_derivative(n1, trial, p, high)) < abs(f1):
                e1 = trial
        if stationary_residual(n1, e1, p, high) > STATIONARITY_RTOL:
            raise RootFindingFailure(
                f"root w={w!r} failed to polish (residual "
                f"{stationary_residual(n1, e1, p, high):.3g})", n1)
        out.append(float(e1))
    return sorted(out)


# ---------------------------------------------------------------------------
# Optimization
# ---------------------------------------------------------------------------

def candidate_set(n1: int, p: SystemParams) -> list:
    case = classify_case(n1, p)
    cands = [0.0]
    if case is Case.CASE1:
        cands.append(e1_star_case1(n1, p))
    elif case is Case.CASE2:
        cands += stationary_candidates(n1, p, Branch.CASE2)
    else:
        cands.append(e0(n1, p))
        cands += stationary_candidates(n1, p, Branch.CASE3_LOW)
        cands += stationary_candidates(n1, p, Branch.CASE3_HIGH)
    return sorted(set(cands))


def _argmax(values):
    best = 0
    for i, v in enumerate(values):
        if v > values[best] + _TIE_RTOL * abs(values[best]):
            best = i
    return best


def optimize_e1(n1: int, p: SystemParams) -> E1Optimum:
    """Best phase-I energy for a fixed number of trained sub-bands."""
    cands = candidate_set(n1, p)
    values = [analytic.q_net_reduced(n1, e, p) for e in cands]
    i = _argmax(values)
    e1 = cands[i]
    e2 = analytic.e2_star(analytic.r_h(n1, e1, p), p)
    return E1Optimum(n1, e1, e2, values[i], classify_case(n1, p), tuple(cands))


def optimize_curve(p: SystemParams, n1_values=None) -> list:
    n1_values = range(1, p.n_subbands + 1) if n1_values is None else n1_values
    out = []
    for n1 in n1_values:
        try:
            out.append(optimize_e1(n1, p))
        except RootFindingFailure as exc:
            if exc.n1 is None:
                raise RootFindingFailure(str(exc), n1) from exc
            raise
    return out


def optimize_design(p: SystemParams) -> DesignSolution:
    """Exhaustive search over n1; ties go to the smaller n1."""
    curve = optimize_curve(p)
    best = curve[_argmax([o.q_net for o in curve])]
    return DesignSolution(
        n1_star=best.n1,
        e1_star=best.e1,
        e2_star=best.e2,
        q_net_star=best.q_net,
        case=best.case,
        candidates_evaluated=sum(len(o.candidates) for o in curve),
        per_n1=tuple(curve),
    )


# ---------------------------------------------------------------------------
# Benchmark schemes
# ---------------------------------------------------------------------------

def phase1_only_design(p: SystemParams) -> tuple:
    """Best (design, predicted net energy) when phase II is skipped."""
    best = None
    for n1 in range(1, p.n_subbands + 1):
        e1 = e1_star_case1(n1, p)
        value = p.energy_scale * analytic.r_h(n1, e1, p) / p.m - e1 * n1
        if best is None or value > best[1] + _TIE_RTOL * abs(best[1]):
            best = (TrainingDesign(n1, e1, 0.0), value)
    return best


def scheme_design(scheme: Scheme, p: SystemParams) -> tuple:
    """Optimal design for ``scheme`` and its analytic net energy (J)."""
    scheme = Scheme(scheme)
    if scheme is Scheme.TWO_PHASE:
        sol = optimize_design(p)
        return sol.design, sol.q_net_star
    if scheme is Scheme.PHASE_I_ONLY:
        return phase1_only_design(p)
    if scheme is Scheme.PHASE_II_ONLY:
        e2 = analytic.e2_star(p.beta * p.m, p)
        return TrainingDesign(1, 0.0, e2), analytic.q_net_reduced(1, 0.0, p)
    base = analytic.baselines(p)
    value = base.perfect_csit if scheme is Scheme.PERFECT_CSIT else base.no_csit
    return TrainingDesign(1, 0.0, 0.0), value
