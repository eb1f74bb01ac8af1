"""Experiment configuration: INI file, ``WET_*`` environment overrides and
command-line overrides, resolved into SI-unit objects.

Schema (section / key; every key is optional):

[system]      m, n_subbands, bandwidth_hz, eta, t_block,
              beta | path_loss_db, p_f | p_f_dbm, n0 | n0_dbm_per_hz
[channel]     mode (iid|pdp), sigma_rms, tap_spacing, num_taps
[simulation]  scheme, trials, seed
[design]      n1, e1, e2            (fixed design for ``simulate``)
[sweep]       m_values, n1_values, t_values, sim_n1_max
[output]      path, format (csv|json)

Lists are comma separated; ``a:b`` is an inclusive integer range and
``logspace(lo, hi, n)`` a log-spaced float grid. Any key may be overridden
by an environment variable ``WET_<KEY>`` (e.g. ``WET_TRIALS=100``), and
command-line overrides take precedence over both.
"""
from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import PdpProfile
from .errors import ConfigError
from .params import Scheme, SystemParams, TrainingDesign, db_loss_to_gain, dbm_to_watts

SECTIONS = {
    "system": ("m", "n_subbands", "bandwidth_hz", "beta", "path_loss_db", "p_f", "p_f_dbm",
               "n0", "n0_dbm_per_hz", "eta", "t_block"),
    "channel": ("mode", "sigma_rms", "tap_spacing", "num_taps"),
    "simulation": ("scheme", "trials", "seed"),
    "design": ("n1", "e1", "e2"),
    "sweep": ("m_values", "n1_values", "t_values", "sim_n1_max"),
    "output": ("path", "format"),
}
KEY_SECTION = {key: sec for sec, keys in SECTIONS.items() for key in keys}
ENV_PREFIX = "WET_"

DEFAULT_T_VALUES = "logspace(1e-4, 2, 12)"


def _int(field_name, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(field_name, f"expected an integer, got {text!r}") from None
    if value != int(value):
        raise ConfigError(field_name, f"expected an integer, got {text!r}")
    return int(value)


def _float(field_name, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(field_name, f"expected a number, got {text!r}") from None


_LOGSPACE = re.compile(r"^logspace\(\s*([^,]+),\s*([^,]+),\s*([^,)]+)\)$")


def parse_int_list(field_name, text):
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            out.extend(range(_int(field_name, lo), _int(field_name, hi) + 1))
        else:
            out.append(_int(field_name, part))
    if not out:
        raise ConfigError(field_name, "empty list")
    return out


def parse_float_list(field_name, text):
    text = str(text).strip()
    match = _LOGSPACE.match(text)
    if match:
        lo, hi = (_float(field_name, g) for g in match.groups()[:2])
        n = _int(field_name, match.group(3))
        if lo <= 0 or hi <= 0 or n < 1:
            raise ConfigError(field_name, "logspace needs positive bounds and n >= 1")
        return [float(v) for v in np.logspace(np.log10(lo), np.log10(hi), n)]
    out = [_float(field_name, part) for part in text.split(",") if part.strip()]
    if not out:
        raise ConfigError(field_name, "empty list")
    return out


@dataclass
class ExperimentConfig:
    system: SystemParams = field(default_factory=SystemParams)
    pdp: PdpProfile = field(default_factory=PdpProfile)
    mode: str = "iid"
    scheme: Scheme = Scheme.TWO_PHASE
    trials: int = 10000
    seed: int = 0
    design: Optional[TrainingDesign] = None
    m_values: list = field(default_factory=list)
    n1_values: list = field(default_factory=list)
    t_values: list = field(default_factory=list)
    sim_n1_max: Optional[int] = None
    out: str = "-"
    format: str = "csv"
    raw: dict = field(default_factory=dict)

    def metadata(self) -> list:
        """Resolved key/value pairs, in schema order, for provenance headers."""
        items = []
        for sec, keys in SECTIONS.items():
            for key in keys:
                if key in self.raw:
                    items.append((f"{sec}.{key}", self.raw[key]))
        items += [
            ("resolved.beta", repr(self.system.beta)),
            ("resolved.p_f", repr(self.system.p_f)),
            ("resolved.n0", repr(self.system.n0)),
        ]
        return items


def read_raw(path=None, env=None, overrides=None) -> dict:
    """Merge file, environment and explicit overrides into one flat dict."""
    raw = {}
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        if not parser.read(path):
            raise ConfigError("config", f"cannot read {path}")
        for sec in parser.sections():
            if sec not in SECTIONS:
                raise ConfigError(sec, "unknown section")
            for key, value in parser.items(sec):
                if key not in SECTIONS[sec]:
                    raise ConfigError(f"{sec}.{key}", "unknown key")
                raw[key] = value.strip()
    env = os.environ if env is None else env
    for name, value in env.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            if key not in KEY_SECTION:
                raise ConfigError(name, "unknown configuration key")
            raw[key] = value.strip()
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KEY_SECTION:
            raise ConfigError(key, "unknown configuration key")
        raw[key] = str(value).strip()
    return raw


def _either(raw, linear, log_key, convert, default):
    if linear in raw and log_key in raw:
        raise ConfigError(linear, f"give either {linear} or {log_key}, not both")
    if linear in raw:
        return _float(linear, raw[linear])
    if log_key in raw:
        return convert(_float(log_key, raw[log_key]))
    return default


def resolve(raw: dict) -> ExperimentConfig:
    base = SystemParams()
    try:
        system = SystemParams(
            m=_int("m", raw.get("m", base.m)),
            n_subbands=_int("n_subbands", raw.get("n_subbands", base.n_subbands)),
            bandwidth_hz=_float("bandwidth_hz", raw.get("bandwidth_hz", base.bandwidth_hz)),
            beta=_either(raw, "beta", "path_loss_db", db_loss_to_gain, base.beta),
            p_f=_either(raw, "p_f", "p_f_dbm", dbm_to_watts, base.p_f),
            n0=_either(raw, "n0", "n0_dbm_per_hz", dbm_to_watts, base.n0),
            eta=_float("eta", raw.get("eta", base.eta)),
            t_block=_float("t_block", raw.get("t_block", base.t_block)),
        )
    except ValueError as exc:
        raise ConfigError("system", str(exc)) from None

    try:
        pdp = PdpProfile(
            sigma_rms=_float("sigma_rms", raw.get("sigma_rms", 1e-6)),
            tap_spacing=_float("tap_spacing", raw["tap_spacing"]) if "tap_spacing" in raw else None,
            num_taps=_int("num_taps", raw["num_taps"]) if "num_taps" in raw else None,
        )
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from None

    mode = raw.get("mode", "iid").lower()
    if mode not in ("iid", "pdp"):
        raise ConfigError("mode", f"expected iid or pdp, got {mode!r}")
    try:
        scheme = Scheme(raw.get("scheme", Scheme.TWO_PHASE.value))
    except ValueError:
        choices = ", ".join(s.value for s in Scheme)
        raise ConfigError("scheme", f"expected one of {choices}") from None

    trials = _int("trials", raw.get("trials", 10000))
    if trials < 0:
        raise ConfigError("trials", "must be >= 0")
    seed = _int("seed", raw.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", "must be an unsigned 64-bit integer")

    design = None
    if any(k in raw for k in ("n1", "e1", "e2")):
        try:
            design = TrainingDesign(
                _int("n1", raw.get("n1", 1)), _float("e1", raw.get("e1", 0)),
                _float("e2", raw.get("e2", 0)),
            ).check(system)
        except ValueError as exc:
            raise ConfigError("design", str(exc)) from None

    m_values = parse_int_list("m_values", raw.get("m_values", str(system.m)))
    n1_values = parse_int_list("n1_values", raw.get("n1_values", f"1:{system.n_subbands}"))
    if any(not 1 <= v <= system.n_subbands for v in n1_values):
        raise ConfigError("n1_values", f"values must lie in 1..{system.n_subbands}")
    if any(v < 1 for v in m_values):
        raise ConfigError("m_values", "antenna counts must be >= 1")
    t_values = parse_float_list("t_values", raw.get("t_values", DEFAULT_T_VALUES))
    if any(v <= 0 for v in t_values):
        raise ConfigError("t_values", "block lengths must be positive")
    sim_n1_max = _int("sim_n1_max", raw["sim_n1_max"]) if "sim_n1_max" in raw else None

    fmt = raw.get("format", "csv").lower()
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"expected csv or json, got {fmt!r}")

    return ExperimentConfig(
        system=system, pdp=pdp, mode=mode, scheme=scheme, trials=trials, seed=seed,
        design=design, m_values=m_values, n1_values=n1_values, t_values=t_values,
        sim_n1_max=sim_n1_max, out=raw.get("path", "-"), format=fmt, raw=dict(raw),
    )


def load(path=None, env=None, overrides=None) -> ExperimentConfig:
    return resolve(read_raw(path, env, overrides))
