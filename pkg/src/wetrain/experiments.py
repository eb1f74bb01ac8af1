"""Parameter sweeps behind the sweep subcommands, plus CSV output.

Energies in result rows are converted to net power (J / T = W). Every
simulated point reuses the master seed, so the same channel draws are seen
across sweep points and schemes.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import __version__, designer
from .params import Scheme, TrainingDesign
from .protocol import monte_carlo

N1_COLUMNS = ("m", "n1", "case", "e1", "e2", "analytic_w", "sim_w", "sim_stderr_w")
SCHEME_ORDER = (Scheme.TWO_PHASE, Scheme.PHASE_I_ONLY, Scheme.PHASE_II_ONLY,
                Scheme.PERFECT_CSIT, Scheme.NO_CSIT)
T_COLUMNS = ("t_block", "n1_star", "case", "e1_star", "e2_star") + tuple(
    f"{kind}_{s.value}" for s in SCHEME_ORDER
    for kind in ("analytic_w", "sim_w", "sim_stderr_w")
)


def sweep_n1(cfg) -> list:
    """Optimal net power versus number of trained sub-bands, per antenna count."""
    rows = []
    for m in cfg.m_values:
        p = cfg.system.replace(m=m)
        for opt in designer.optimize_curve(p, cfg.n1_values):
            row = {
                "m": m, "n1": opt.n1, "case": opt.case.value, "e1": opt.e1, "e2": opt.e2,
                "analytic_w": opt.q_net / p.t_block, "sim_w": "", "sim_stderr_w": "",
            }
            simulate = cfg.trials > 0 and (cfg.sim_n1_max is None or opt.n1 <= cfg.sim_n1_max)
            if simulate:
                d = TrainingDesign(opt.n1, opt.e1, opt.e2)
                mc = monte_carlo(Scheme.TWO_PHASE, d, cfg.mode, p, cfg.pdp, cfg.trials, cfg.seed)
                row["sim_w"] = mc.mean_q_net / p.t_block
                row["sim_stderr_w"] = mc.std_error / p.t_block
            rows.append(row)
    return rows


def sweep_t(cfg) -> list:
    """Optimal energies and per-scheme net power versus block length."""
    rows = []
    for t in cfg.t_values:
        p = cfg.system.replace(t_block=t)
        sol = designer.optimize_design(p)
        row = {"t_block": t, "n1_star": sol.n1_star, "case": sol.case.value,
               "e1_star": sol.e1_star, "e2_star": sol.e2_star}
        for scheme in SCHEME_ORDER:
            if scheme is Scheme.TWO_PHASE:
                d, value = sol.design, sol.q_net_star
            else:
                d, value = designer.scheme_design(scheme, p)
            row[f"analytic_w_{scheme.value}"] = value / t
            row[f"sim_w_{scheme.value}"] = ""
            row[f"sim_stderr_w_{scheme.value}"] = ""
            if cfg.trials > 0:
                mc = monte_carlo(scheme, d, cfg.mode, p, cfg.pdp, cfg.trials, cfg.seed)
                row[f"sim_w_{scheme.value}"] = mc.mean_q_net / t
                row[f"sim_stderr_w_{scheme.value}"] = mc.std_error / t
        rows.append(row)
    return rows


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


def render_csv(rows, columns, metadata=()) -> str:
    """CSV text with a '#'-prefixed provenance header."""
    buf = io.StringIO()
    buf.write(f"# wetrain {__version__}\n")
    for key, value in metadata:
        buf.write(f"# {key} = {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def csv_body(text: str) -> str:
    """The data part of a rendered CSV (header comments stripped)."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def read_csv(text: str) -> list:
    """Parse :func:`render_csv` output back into dicts of floats/ints/strings."""
    reader = csv.DictReader(io.StringIO(csv_body(text)))
    out = []
    for row in reader:
        parsed = {}
        for key, value in row.items():
            parsed[key] = _parse_cell(value)
        out.append(parsed)
    return out


def _parse_cell(value):
    if value == "":
        return ""
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def render_json(payload, metadata=()) -> str:
    doc = {"wetrain_version": __version__, "config": dict(metadata), "result": payload}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
