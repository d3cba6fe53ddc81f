"""Command-line interface.

    regime-risk calibrate|simulate|risk|sweep|yield-sweep --config cfg.json
                [--seed N] [--paths N] [--mc] [--out DIR] [--workers N]

Every command is a pure function of (config, input files, seed): rerunning
with identical inputs produces byte-identical outputs, at any --workers
count.  Horizons are configured in days and converted at 252 trading days
per year; outputs record that convention in their provenance headers.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import (
    RunConfig,
    horizon_years,
    load_config,
    make_sweep_table,
    provenance,
    write_csv,
    write_json,
)
from .entropic_risk import (
    RiskQuery,
    claim_risk_mc,
    future_risk_closed,
    spot_risk_closed,
)
from .errors import ConfigError, RiskModelError
from .instruments import FutureClaim, GibsonSchwartzParams, SwapClaim, simulate_yield_path
from .ou_model import calibrate, conditional_law, load_price_csv, simulate_path
from .regime_chain import sample_path


def cmd_calibrate(cfg: RunConfig) -> int:
    """Fit OU parameters from the configured price CSV and write them as JSON."""
    cfg.require("ou_csv")
    series = load_price_csv(cfg.ou_csv, dt=cfg.ou_dt)
    result = calibrate(series)
    p = result.params
    print(f"fitted on {result.n_obs} transitions (dt={result.dt:.6g} years)")
    print(f"  alpha = {p.alpha:.6g}  (se {result.alpha_se:.3g})")
    print(f"  mu    = {p.mu:.6g}  (se {result.mu_se:.3g})")
    print(f"  sigma = {p.sigma:.6g}  (se {result.sigma_se:.3g})")
    print(f"  x0    = {p.x0:.6g}  (first observation)")
    data = {
        "params": {"alpha": p.alpha, "mu": p.mu, "sigma": p.sigma, "x0": p.x0},
        "std_errors": {
            "alpha": result.alpha_se,
            "mu": result.mu_se,
            "sigma": result.sigma_se,
        },
        "ar1": {"slope": result.ar1_slope, "intercept": result.ar1_intercept},
        "n_obs": result.n_obs,
        "dt": result.dt,
    }
    out = cfg.out_dir / "ou_params.json"
    write_json(out, provenance(cfg, "calibrate"), data)
    print(f"wrote {out}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    """Write spot, regime, and (for stochastic-yield swaps) yield paths on a daily grid."""
    cfg.require("chain", "ou", "horizons")
    n_days = max(1, int(round(cfg.horizons_days[0])))
    grid = np.arange(n_days + 1) * horizon_years(1.0)
    rng = np.random.default_rng(cfg.seed)
    spot = simulate_path(cfg.ou, grid, rng)
    regime_path = sample_path(cfg.chain, cfg.z0, float(grid[-1]), rng)
    regimes = [regime_path.state_at(t) for t in grid]
    gs = _configured_gs_yield(cfg)
    header = ["step", "t_years", "spot", "regime"]
    cols = [list(range(n_days + 1)), [float(t) for t in grid], [float(v) for v in spot], regimes]
    if gs is not None:
        yld = simulate_yield_path(gs, grid, rng)
        header.append("yield")
        cols.append([float(v) for v in yld])
    rows = [list(r) for r in zip(*cols)]
    prov = provenance(cfg, "simulate")
    write_csv(cfg.out_dir / "paths.csv", prov, header, rows)
    write_json(
        cfg.out_dir / "paths.json",
        prov,
        {name: col for name, col in zip(header, cols)},
    )
    print(f"wrote {cfg.out_dir / 'paths.csv'} ({n_days + 1} grid points)")
    return 0


def _configured_gs_yield(cfg: RunConfig) -> GibsonSchwartzParams | None:
    if cfg.claim is None or cfg.claim.get("type") != "swap":
        return None
    try:
        claim = cfg.build_claim(1.0)
    except ConfigError:
        return None
    spec = claim.yield_spec
    return spec if isinstance(spec, GibsonSchwartzParams) else None


def _scalar_oracle(cfg: RunConfig, claim, q: RiskQuery) -> float | None:
    """For a single-regime chain the closed form must reduce to
    d m - d^2 v / (2 gamma); printed alongside as an independent check."""
    if cfg.chain.n != 1:
        return None
    law = conditional_law(cfg.ou, q.x_s, q.s, q.T)
    d = float(claim.delta[0])
    if isinstance(claim, FutureClaim):
        d *= float(np.exp(-claim.carry * q.horizon))
    return d * law.mean - d * d * law.variance / (2.0 * q.gamma)


def cmd_risk(cfg: RunConfig, use_mc: bool, workers: int) -> int:
    """Per-state risk report for the configured claim at each configured gamma."""
    cfg.require("chain", "ou", "claim", "gammas", "horizons")
    T = horizon_years(cfg.horizons_days[0])
    claim = cfg.build_claim(T)
    is_swap = isinstance(claim, SwapClaim)
    if is_swap and not use_mc:
        raise ConfigError("swap risk has no closed form; rerun with --mc")

    header = ["gamma", "state", "closed", "oracle", "mc_value", "mc_std_error", "z_score"]
    rows: list[list] = []
    for gamma in cfg.gammas:
        if is_swap:
            q = RiskQuery(gamma=gamma, s=0.0, T=float(claim.n_periods), x_s=cfg.ou.x0)
            closed = [None] * cfg.chain.n
        else:
            q = RiskQuery(gamma=gamma, s=0.0, T=T, x_s=cfg.ou.x0)
            if isinstance(claim, FutureClaim):
                closed = list(future_risk_closed(cfg.ou, cfg.chain, claim, q).risks)
            else:
                closed = list(spot_risk_closed(cfg.ou, cfg.chain, claim.delta, q).risks)
        oracle = _scalar_oracle(cfg, claim, q) if not is_swap else None
        ests = (
            claim_risk_mc(cfg.ou, cfg.chain, claim, q, cfg.n_paths, cfg.seed, workers)
            if use_mc
            else None
        )
        for state in range(cfg.chain.n):
            row: list = [gamma, state, closed[state], oracle if state == 0 else None]
            if ests is not None:
                e = ests[state]
                z = e.z_score(closed[state]) if closed[state] is not None else None
                row += [e.value, e.std_error, z]
            else:
                row += [None, None, None]
            rows.append(row)

    prov = provenance(cfg, "risk")
    write_csv(cfg.out_dir / "risk.csv", prov, header, rows)
    write_json(
        cfg.out_dir / "risk.json",
        prov,
        {"columns": header, "rows": [[_num(v) for v in r] for r in rows]},
    )
    for r in rows:
        closed_s = "" if r[2] is None else f" closed={r[2]:.6g}"
        mc_s = "" if r[4] is None else f" mc={r[4]:.6g} se={r[5]:.3g}"
        z_s = "" if r[6] is None else f" z={r[6]:.2f}"
        print(f"gamma={r[0]:g} state={r[1]}{closed_s}{mc_s}{z_s}")
    print(f"wrote {cfg.out_dir / 'risk.csv'}")
    return 0


def _num(v):
    if v is None:
        return None
    return float(v) if isinstance(v, (float, np.floating)) else v


def cmd_sweep(cfg: RunConfig, use_mc: bool, workers: int) -> int:
    """Risk per (horizon, gamma) for the starting regime, with variation rows."""
    cfg.require("chain", "ou", "claim", "gammas", "horizons")
    if cfg.claim.get("type") == "swap":
        raise ConfigError("sweep supports linear and future claims (swaps fix their own schedule)")
    cells = np.empty((len(cfg.horizons_days), len(cfg.gammas)))
    mc_rows: list[list] = []
    for i, hd in enumerate(cfg.horizons_days):
        T = horizon_years(hd)
        claim = cfg.build_claim(T)
        for j, gamma in enumerate(cfg.gammas):
            q = RiskQuery(gamma=gamma, s=0.0, T=T, x_s=cfg.ou.x0)
            if isinstance(claim, FutureClaim):
                rv = future_risk_closed(cfg.ou, cfg.chain, claim, q)
            else:
                rv = spot_risk_closed(cfg.ou, cfg.chain, claim.delta, q)
            cells[i, j] = rv.risk_given_state(cfg.z0)
            if use_mc:
                est = claim_risk_mc(
                    cfg.ou, cfg.chain, claim, q, cfg.n_paths, cfg.seed, workers
                )[cfg.z0]
                z = est.z_score(cells[i, j])
                mc_rows.append(
                    [hd, gamma, cells[i, j], est.value, est.std_error, z, abs(z) > 3.0]
                )

    table = make_sweep_table(cfg.horizons_days, cfg.gammas, cells)
    prov = provenance(cfg, "sweep")
    header = ["horizon"] + table.col_labels
    rows: list[list] = [
        [label] + list(table.cells[i]) for i, label in enumerate(table.row_labels)
    ]
    rows.append(["variation_abs (last-first)"] + list(table.variation_abs))
    rows.append(["variation_pct (%)"] + list(table.variation_pct))
    write_csv(cfg.out_dir / "sweep.csv", prov, header, rows)
    write_json(
        cfg.out_dir / "sweep.json",
        prov,
        {
            "row_labels": table.row_labels,
            "col_labels": table.col_labels,
            "cells": table.cells.tolist(),
            "variation_abs": table.variation_abs,
            "variation_pct": table.variation_pct,
        },
    )
    if use_mc:
        mc_header = ["horizon_days", "gamma", "closed", "mc_value", "mc_std_error", "z_score", "flagged"]
        write_csv(cfg.out_dir / "sweep_mc.csv", prov, mc_header, mc_rows)
        flagged = [r for r in mc_rows if r[-1]]
        print(f"mc cross-check: {len(flagged)} of {len(mc_rows)} cells flagged (|z| > 3)")
    for r in rows:
        print(",".join("" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v)) for v in r))
    print(f"wrote {cfg.out_dir / 'sweep.csv'}")
    return 0


def cmd_yield_sweep(cfg: RunConfig, workers: int) -> int:
    """Future-claim risk over evaluation time for each configured yield level."""
    cfg.require("chain", "ou", "claim", "gammas", "horizons", "yields")
    if cfg.claim.get("type") != "future":
        raise ConfigError("yield-sweep requires a future claim")
    T = horizon_years(cfg.horizons_days[0])
    gamma = cfg.gammas[0]
    times = [k * T / cfg.n_times for k in range(cfg.n_times)]
    delta = np.asarray(cfg.claim["delta"], dtype=float)
    r = float(cfg.claim["r"])

    rows: list[list] = []
    by_time: dict[float, list[float]] = {t: [] for t in times}
    for y in cfg.yields:
        fc = FutureClaim(delta=delta, r=r, y=y, maturity=T)
        for t in times:
            q = RiskQuery(gamma=gamma, s=t, T=T, x_s=cfg.ou.x0)
            risk = future_risk_closed(cfg.ou, cfg.chain, fc, q).risk_given_state(cfg.z0)
            rows.append([t, y, risk])
            by_time[t].append(risk)
    summary = [[t, max(v) - min(v)] for t, v in by_time.items()]

    prov = provenance(cfg, "yield-sweep")
    write_csv(cfg.out_dir / "yield_sweep.csv", prov, ["t_years", "yield", "risk"], rows)
    write_json(
        cfg.out_dir / "yield_sweep.json",
        prov,
        {"columns": ["t_years", "yield", "risk"], "rows": [[float(v) for v in r] for r in rows]},
    )
    write_csv(
        cfg.out_dir / "yield_sweep_summary.csv",
        prov,
        ["t_years", "cross_yield_spread"],
        summary,
    )
    write_json(
        cfg.out_dir / "yield_sweep_summary.json",
        prov,
        {"columns": ["t_years", "cross_yield_spread"], "rows": [[float(v) for v in r] for r in summary]},
    )
    print(
        f"spread at t={summary[0][0]:.6g}: {summary[0][1]:.6g}; "
        f"at t={summary[-1][0]:.6g}: {summary[-1][1]:.6g}"
    )
    print(f"wrote {cfg.out_dir / 'yield_sweep.csv'}")
    return 0


_COMMAND_HELP = {
    "calibrate": "fit spot-model parameters from a date,price CSV",
    "simulate": "write spot/regime (and yield) paths on a daily grid",
    "risk": "per-regime risk report; --mc adds the simulation cross-check",
    "sweep": "risk per (horizon, gamma) with variation rows",
    "yield-sweep": "future risk over time for each yield level",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regime-risk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _COMMAND_HELP.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration JSON")
        p.add_argument("--seed", type=int, default=None, help="override mc.seed")
        p.add_argument("--paths", type=int, default=None, help="override mc.n_paths")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument(
            "--workers", type=int, default=1,
            help="MC evaluation blocks; never changes results",
        )
        if name in ("risk", "sweep"):
            p.add_argument("--mc", action="store_true", help="add the Monte-Carlo cross-check")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            seed_override=args.seed,
            paths_override=args.paths,
            out_override=args.out,
        )
        if args.command == "calibrate":
            return cmd_calibrate(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "risk":
            return cmd_risk(cfg, args.mc, args.workers)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.mc, args.workers)
        if args.command == "yield-sweep":
            return cmd_yield_sweep(cfg, args.workers)
    except RiskModelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    raise SystemExit(main())
