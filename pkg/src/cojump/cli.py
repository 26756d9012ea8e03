"""Command-line front end.

Subcommands: estimate (spot-volatility path from a tick CSV), test (jump
detection plus co-jump test), simulate (scenario path export) and mc
(Monte Carlo campaign).  Every report embeds the resolved configuration;
figures are rendered next to the delimited output.  Exit codes: 0 success
(including "no jumps"), 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .cotest import TestConfig, run_test
from .io import (
    DataError,
    read_ticks,
    write_plot_csv,
    write_report_json,
    write_sim_csv,
    write_spot_csv,
    write_truth_json,
)
from .jumps import detect, group
from .montecarlo import kde_curve, run_scenario, size_power_table
from .obs import from_ticks
from .report import save_size_power_figure, save_spot_figure, save_statistic_hist
from .simulate import simulate, table1_scenario
from .spectral import BinGrid, SpectralConfig
from .spotvol import SpotConfig, spot_path


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the CLI contract wants 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def read_config_file(path: str | Path) -> dict[str, object]:
    """Flat key=value file (TOML-compatible subset); '#' starts a comment."""
    values: dict[str, object] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{line_no}: expected key = value")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = _coerce(val.strip().strip("\"'"))
    return values


def _coerce(raw: str):
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def _build_parser() -> _Parser:
    parser = _Parser(prog="cojump", description=__doc__)
    parser.add_argument("--config", help="key=value file with defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tuning(p: _Parser) -> None:
        p.add_argument("--bins", "-b", type=int, default=39, help="number of bins h^-1")
        p.add_argument("--freqs", "-J", type=int, default=30, help="spectral cut-off J")
        p.add_argument("--pilot-freqs", type=int, default=15, help="pilot cut-off")
        p.add_argument("--window", "-r", type=int, default=6, help="window r^-1 in bins")
        p.add_argument(
            "--threshold", choices=("global", "adaptive"), default="adaptive"
        )
        p.add_argument("--min-jump", type=float, default=0.0, help="minimum jump size a")
        p.add_argument("--exclude-edges", action="store_true",
                       help="ignore jumps in the first/last r^-1 bins")

    p_est = sub.add_parser("estimate", help="spot volatility path from tick CSV")
    p_est.add_argument("input")
    p_est.add_argument("--out", default=".", help="output directory")
    p_est.add_argument("--level", type=float, default=0.95)
    add_tuning(p_est)

    p_test = sub.add_parser("test", help="detect jumps and test for co-jumps")
    p_test.add_argument("input")
    p_test.add_argument("--out", default=".", help="output directory")
    p_test.add_argument("--level", type=float, default=0.05)
    p_test.add_argument("--variant", choices=("chi2", "naive", "multiple"),
                        default="chi2")
    p_test.add_argument("--normalization", choices=("fisher", "rate"),
                        default="fisher")
    p_test.add_argument("--time-range", nargs=2, type=float, metavar=("LO", "HI"))
    add_tuning(p_test)

    p_sim = sub.add_parser("simulate", help="export one simulated scenario path")
    p_sim.add_argument("--scenario", required=True, help="Table-style id I..IX")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=".", help="output directory")

    p_mc = sub.add_parser("mc", help="Monte Carlo campaign for one scenario")
    p_mc.add_argument("--scenario", required=True)
    p_mc.add_argument("--runs", type=int, default=100)
    p_mc.add_argument("--seed", type=int, default=0)
    p_mc.add_argument("--threads", type=int, default=1)
    p_mc.add_argument("--level", type=float, default=0.05)
    p_mc.add_argument("--variant", choices=("chi2", "naive", "multiple"),
                      default="chi2")
    p_mc.add_argument("--normalization", choices=("fisher", "rate"),
                      default="fisher")
    p_mc.add_argument(
        "--filter",
        choices=("realized_detected_one", "detected", "none"),
        default="realized_detected_one",
    )
    p_mc.add_argument("--out", default=".", help="output directory")
    return parser


def _apply_config_defaults(parser: _Parser, values: dict) -> None:
    """Install config-file values as defaults on the parser and subcommands.

    Defaults set on the top-level parser do not reach subparsers (each
    subcommand re-applies its own argument defaults), so the values are
    pushed into every subparser that knows the key.  Keys matching no flag
    anywhere are rejected.
    """
    subparsers = [
        sp
        for action in parser._subparsers._group_actions
        for sp in action.choices.values()
    ]
    consumed = set()
    for p in [parser] + subparsers:
        known = {a.dest for a in p._actions}
        matching = {k: v for k, v in values.items() if k in known}
        p.set_defaults(**matching)
        consumed |= matching.keys()
    unknown = sorted(set(values) - consumed)
    if unknown:
        raise DataError(f"unknown config key(s): {', '.join(unknown)}")


def _resolved_config(args: argparse.Namespace) -> dict:
    return {
        k: v for k, v in sorted(vars(args).items()) if k not in ("config",)
    }


def _estimation_pipeline(args: argparse.Namespace):
    ticks = read_ticks(args.input)
    path = from_ticks(ticks)
    grid = BinGrid(args.bins, path.n)
    if grid.min_bin_size < 2 * args.freqs:
        raise DataError(
            f"only {grid.min_bin_size} observations in the smallest bin; "
            f"need at least 2J = {2 * args.freqs} (reduce --bins or --freqs)"
        )
    spot_cfg = SpotConfig(
        r_inv=args.window,
        adaptive_trunc=args.threshold == "adaptive",
        a_min_jump=args.min_jump,
    )
    spec_cfg = SpectralConfig(j_max=args.freqs, j_max_pilot=args.pilot_freqs)
    return spot_path(path, grid, spot_cfg, spec_cfg)


def _cmd_estimate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spot = _estimation_pipeline(args)
    write_spot_csv(out / "spot.csv", spot, level=args.level)
    save_spot_figure(spot, out / "spot.png", level=args.level)
    write_report_json(
        out / "summary.json",
        {
            "n": spot.grid.n,
            "eta_hat": spot.eta_hat,
            "integrated_vol": spot.integrated_vol,
            "n_truncated_bins": int(np.sum(spot.truncated)),
            "config": _resolved_config(args),
        },
    )
    print(f"n={spot.grid.n} eta_hat={spot.eta_hat:.6g} "
          f"IV={spot.integrated_vol:.6g} -> {out}")
    return 0


def _cmd_test(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spot = _estimation_pipeline(args)
    events = group(detect(spot, exclude_edges=args.exclude_edges), args.window)
    cfg = TestConfig(
        level=args.level,
        variant=args.variant,
        a_min_jump=args.min_jump,
        normalization=args.normalization,
        time_range=tuple(args.time_range) if args.time_range else None,
    )
    report = run_test(spot, events, cfg)
    payload = report.to_dict()
    payload["config"] = _resolved_config(args)
    write_report_json(out / "report.json", payload)
    write_spot_csv(out / "spot.csv", spot)
    save_spot_figure(spot, out / "spot.png", events=events)
    if report.n_jumps == 0:
        print("no price jumps detected")
    else:
        print(
            f"jumps={report.n_jumps} statistic={report.statistic:.4f} "
            f"dof={report.dof} p={report.p_value:.4g} "
            f"{'REJECT' if report.reject else 'no rejection'} at {report.level:.0%}"
        )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = table1_scenario(args.scenario, seed=args.seed)
    sim = simulate(cfg)
    write_sim_csv(out / "path.csv", sim)
    write_truth_json(out / "truth.json", sim, cfg)
    print(f"scenario {cfg.n} observations, {len(sim.price_jumps)} price jumps -> {out}")
    return 0


def _cmd_mc(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    test_cfg = TestConfig(
        level=args.level, variant=args.variant, normalization=args.normalization
    )
    report = run_scenario(
        args.scenario,
        n_runs=args.runs,
        base_seed=args.seed,
        test_cfg=test_cfg,
        filter_mode=args.filter,
        threads=args.threads,
    )
    payload = report.to_dict()
    payload["config"] = _resolved_config(args)
    write_report_json(out / "mc_report.json", payload)
    table = size_power_table(report)
    write_plot_csv(out / "size_power.csv", [r[0] for r in table],
                   [r[1] for r in table], header=("nominal_level", "reject_rate"))
    save_size_power_figure(table, out / "size_power.png")
    stats = np.array(
        [r.statistic for r in report.records if not math.isnan(r.statistic)]
    )
    if stats.size >= 2:
        xs, ys = kde_curve(stats)
        write_plot_csv(out / "statistic_density.csv", xs, ys,
                       header=("statistic", "density"))
        save_statistic_hist(
            stats, "normal" if args.variant == "naive" else "chi2",
            out / "statistic_hist.png",
        )
    agg = report.aggregates
    print(
        f"{report.scenario}: runs={report.n_runs} filtered={agg['n_filtered']} "
        f"reject@5%={agg['reject_rate_05']:.3f} ks={agg['ks_distance']:.3f} "
        f"({report.runtime_seconds:.1f}s)"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)

    # Two-pass parse so a --config file can supply defaults for any flag.
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config_defaults(parser, read_config_file(known.config))
        args = parser.parse_args(argv)
        handler = {
            "estimate": _cmd_estimate,
            "test": _cmd_test,
            "simulate": _cmd_simulate,
            "mc": _cmd_mc,
        }[args.command]
        return handler(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
