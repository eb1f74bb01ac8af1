"""Physical parameters, training designs and unit conversions.

All quantities are SI (watts, joules, seconds, hertz). dB/dBm values are
converted at the boundary with the helpers below.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_loss_to_gain(loss_db: float) -> float:
    """Path loss in dB to a linear power gain, e.g. 50 dB -> 1e-5."""
    return 10.0 ** (-loss_db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Link constants.

    Attributes
    ----------
    m : number of transmit antennas at the energy transmitter
    n_subbands : number of orthogonal sub-bands the bandwidth is split into
    bandwidth_hz : total bandwidth
    beta : large-scale power gain of the link
    p_f : forward transmit power (W)
    n0 : noise power spectral density at the transmitter (W/Hz)
    eta : energy harvesting efficiency
    t_block : channel block length (s)
    """

    m: int = 5
    n_subbands: int = 100
    bandwidth_hz: float = 10e6
    beta: float = 1e-5
    p_f: float = 1.0
    n0: float = 1e-15
    eta: float = 0.8
    t_block: float = 0.5e-3

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if int(self.n_subbands) != self.n_subbands or self.n_subbands < 1:
            raise ValueError(f"n_subbands must be a positive integer, got {self.n_subbands}")
        for name in ("bandwidth_hz", "beta", "p_f", "n0", "t_block"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")

    @property
    def energy_scale(self) -> float:
        """eta * T * P_f: joules harvested per unit channel power gain."""
        return self.eta * self.t_block * self.p_f

    @property
    def subband_width(self) -> float:
        return self.bandwidth_hz / self.n_subbands

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class TrainingDesign:
    """Two-phase training design.

    ``n1`` sub-bands are trained in phase I with ``e1`` joules each; the
    selected sub-band is trained again with ``e2`` joules in phase II.
    """

    n1: int
    e1: float
    e2: float

    def __post_init__(self):
        if int(self.n1) != self.n1 or self.n1 < 1:
            raise ValueError(f"n1 must be a positive integer, got {self.n1}")
        if not (self.e1 >= 0 and self.e2 >= 0):
            raise ValueError("training energies must be nonnegative")

    @property
    def training_energy(self) -> float:
        return self.e1 * self.n1 + self.e2

    def check(self, p: SystemParams) -> "TrainingDesign":
        if self.n1 > p.n_subbands:
            raise ValueError(f"n1={self.n1} exceeds n_subbands={p.n_subbands}")
        return self


class Scheme(str, enum.Enum):
    TWO_PHASE = "two_phase"
    PHASE_I_ONLY = "phase1_only"
    PHASE_II_ONLY = "phase2_only"
    PERFECT_CSIT = "perfect_csit"
    NO_CSIT = "no_csit"

    def check_design(self, d: TrainingDesign) -> None:
        if self is Scheme.PHASE_I_ONLY and d.e2 != 0:
            raise ValueError("phase-I-only design must have e2 = 0")
        if self is Scheme.PHASE_II_ONLY and (d.e1 != 0 or d.n1 != 1):
            raise ValueError("phase-II-only design must have e1 = 0 and n1 = 1")
