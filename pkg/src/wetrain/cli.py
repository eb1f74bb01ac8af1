"""``wetrain`` command line.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (quadrature, root finding, degenerate parameters).
"""
from __future__ import annotations

import argparse
import sys

from . import analytic, config, designer, experiments, orderstats
from .errors import ConfigError, WetrainError
from .protocol import monte_carlo

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _common(sub):
    sub.add_argument("--config", metavar="PATH", help="INI experiment file")
    sub.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per point (0 = analytic only)")
    sub.add_argument("--mode", choices=("iid", "pdp"), help="channel model")
    sub.add_argument("--out", metavar="PATH", help="output file, '-' for stdout")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any configuration key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wetrain",
        description="Two-phase channel training for multi-antenna wireless energy transfer.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    g = subs.add_parser("gfunc", help="expected maximum of i.i.d. Erlang variates G(n1, M)")
    g.add_argument("--n1", default="1,2,10,100", help="n1 values (list or a:b range)")
    g.add_argument("--m", default="1,2,5", help="antenna counts")
    g.add_argument("--tol", type=float, default=orderstats.DEFAULT_TOL,
                   help="relative tolerance for the quadrature route")
    g.add_argument("--out", metavar="PATH")
    g.add_argument("--format", choices=("csv", "json"), default="csv")

    d = subs.add_parser("design", help="solve for the optimal training design")
    _common(d)
    d.add_argument("--per-n1", action="store_true", help="include the optimum for every n1")

    for name, helptext in (("sweep-n1", "net power versus trained sub-bands (CSV)"),
                           ("sweep-t", "design and scheme comparison versus block length (CSV)"),
                           ("simulate", "Monte Carlo run of one scheme")):
        _common(subs.add_parser(name, help=helptext))
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value
    for key in ("seed", "trials", "mode", "format"):
        if getattr(args, key, None) is not None:
            out[key] = getattr(args, key)
    if getattr(args, "out", None) is not None:
        out["path"] = args.out
    return out


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_gfunc(args):
    n1_values = config.parse_int_list("--n1", args.n1)
    m_values = config.parse_int_list("--m", args.m)
    if not args.tol > 0:
        raise ConfigError("--tol", "must be positive")
    rows = []
    for m in m_values:
        for n1 in n1_values:
            if n1 < 1 or m < 1:
                raise ConfigError("--n1/--m", "values must be positive")
            if n1 <= orderstats.SERIES_LIMIT:
                res = orderstats.g(n1, m)
            else:
                res = orderstats.g_quadrature(n1, m, args.tol)
            rows.append({"n1": n1, "m": m, "value": res.value, "method": res.method.value,
                         "abs_error_bound": res.abs_error_bound})
    if args.format == "json":
        text = experiments.render_json(rows, [("tol", repr(args.tol))])
    else:
        text = experiments.render_csv(rows, ("n1", "m", "value", "method", "abs_error_bound"),
                                      [("tol", repr(args.tol))])
    _emit(text, args.out)


def _load(args):
    return config.load(args.config, overrides=_overrides(args))


def cmd_design(args):
    cfg = _load(args)
    p = cfg.system
    sol = designer.optimize_design(p)
    payload = sol.as_dict(t_block=p.t_block, include_per_n1=args.per_n1)
    if p.m > 1:
        payload["alpha"] = analytic.alpha(p)
    _emit(experiments.render_json(payload, cfg.metadata()), cfg.out)


def cmd_sweep_n1(args):
    cfg = _load(args)
    rows = experiments.sweep_n1(cfg)
    meta = cfg.metadata() + [("seed", cfg.seed), ("trials", cfg.trials), ("mode", cfg.mode)]
    if cfg.format == "json":
        text = experiments.render_json(rows, meta)
    else:
        text = experiments.render_csv(rows, experiments.N1_COLUMNS, meta)
    _emit(text, cfg.out)


def cmd_sweep_t(args):
    cfg = _load(args)
    rows = experiments.sweep_t(cfg)
    meta = cfg.metadata() + [("seed", cfg.seed), ("trials", cfg.trials), ("mode", cfg.mode)]
    if cfg.format == "json":
        text = experiments.render_json(rows, meta)
    else:
        text = experiments.render_csv(rows, experiments.T_COLUMNS, meta)
    _emit(text, cfg.out)


def cmd_simulate(args):
    cfg = _load(args)
    if cfg.trials < 1:
        raise ConfigError("trials", "simulate needs at least one trial")
    p = cfg.system
    if cfg.design is not None:
        d = cfg.design
        predicted = analytic.q_net(d, p).q_net
    else:
        d, predicted = designer.scheme_design(cfg.scheme, p)
    try:
        cfg.scheme.check_design(d)
    except ValueError as exc:
        raise ConfigError("design", str(exc)) from None
    mc = monte_carlo(cfg.scheme, d, cfg.mode, p, cfg.pdp, cfg.trials, cfg.seed)
    row = {
        "scheme": cfg.scheme.value, "mode": cfg.mode, "n1": d.n1, "e1": d.e1, "e2": d.e2,
        "trials": mc.trials, "analytic_q_net": predicted, "mean_q_net": mc.mean_q_net,
        "std_error": mc.std_error, "mean_q_hat": mc.mean_q_hat,
        "net_power_w": mc.mean_q_net / p.t_block,
    }
    meta = cfg.metadata() + [("seed", cfg.seed)]
    if cfg.format == "json":
        text = experiments.render_json(row, meta)
    else:
        text = experiments.render_csv([row], tuple(row), meta)
    _emit(text, cfg.out)


COMMANDS = {
    "gfunc": cmd_gfunc,
    "design": cmd_design,
    "sweep-n1": cmd_sweep_n1,
    "sweep-t": cmd_sweep_t,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"wetrain: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WetrainError, ArithmeticError) as exc:
        print(f"wetrain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
