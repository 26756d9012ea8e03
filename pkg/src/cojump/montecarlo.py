"""Monte Carlo harness: replicate the simulation study end to end.

Each run simulates a scenario path, runs the two-stage spot-volatility
pipeline, detects and groups price jumps and applies the chosen test.
Run r uses the seed splitmix64(base_seed, r), so partial reruns reproduce
the corresponding runs of a full campaign exactly, and aggregation is a
deterministic fold in run order regardless of worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cotest import TestConfig, run_test
from .dists import chi2_cdf, normal_cdf
from .jumps import detect, group
from .simulate import ScenarioConfig, SimulatedPath, simulate, table1_scenario
from .spectral import BinGrid, SpectralConfig
from .spotvol import SpotConfig, spot_path

_FILTERS = ("realized_detected_one", "detected", "none")


def splitmix64(base_seed: int, index: int) -> int:
    """Derived 64-bit seed for run `index`; standard splitmix64 scramble."""
    z = (base_seed + 0x9E3779B97F4A7C15 * (index + 1)) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RunRecord:
    """Per-run outcome of simulate -> estimate -> detect -> test."""

    index: int
    realized_n1: int
    detected_n1: int
    statistic: float
    p_value: float
    dof: int
    n_jumps_detected_true: int
    n_false_detections: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "realized_n1": self.realized_n1,
            "detected_n1": self.detected_n1,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "dof": self.dof,
            "n_jumps_detected_true": self.n_jumps_detected_true,
            "n_false_detections": self.n_false_detections,
        }


@dataclass(frozen=True)
class MCReport:
    """Aggregated Monte Carlo results.

    runtime_seconds is informational and deliberately excluded from
    to_dict() so that serialized reports are byte-identical across repeated
    runs and worker counts.
    """

    scenario: str
    variant: str
    normalization: str
    n_runs: int
    base_seed: int
    filter_mode: str
    records: list[RunRecord]
    aggregates: dict
    runtime_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "scenario": self.scenario,
            "variant": self.variant,
            "normalization": self.normalization,
            "n_runs": self.n_runs,
            "base_seed": self.base_seed,
            "filter_mode": self.filter_mode,
            "aggregates": self.aggregates,
            "records": [r.to_dict() for r in self.records],
        }


def estimator_settings(cfg: ScenarioConfig) -> tuple[BinGrid, SpotConfig, SpectralConfig]:
    """Build grid/window/cut-off configuration from a scenario's settings."""
    if None in (cfg.h_inv, cfg.j_max, cfg.j_max_pilot, cfg.r_inv):
        raise ValueError("scenario lacks estimator settings (h_inv, j_max, ...)")
    grid = BinGrid(cfg.h_inv, cfg.n)
    spot_cfg = SpotConfig(r_inv=cfg.r_inv, r_inv_pilot=cfg.r_inv_pilot)
    spec_cfg = SpectralConfig(j_max=cfg.j_max, j_max_pilot=cfg.j_max_pilot)
    return grid, spot_cfg, spec_cfg


def _jump_bin(t: float, grid: BinGrid) -> int:
    """Bin holding the first return affected by a jump at time t."""
    i = min(max(int(math.ceil(t * grid.n - 1e-12)), 1), grid.n)
    return int(np.searchsorted(grid.edges, i, side="left")) - 1


def run_one(cfg: ScenarioConfig, test_cfg: TestConfig, index: int = 0) -> RunRecord:
    sim = simulate(cfg)
    grid, spot_cfg, spec_cfg = estimator_settings(cfg)
    spot = spot_path(sim.path, grid, spot_cfg, spec_cfg)
    events = group(detect(spot), spot_cfg.r_inv)
    report = run_test(spot, events, test_cfg)

    jump_bins = {_jump_bin(t, grid) for t, _ in sim.price_jumps}
    hit = sum(
        1
        for b in jump_bins
        if any(e.bin_start <= b <= e.bin_end for e in events)
    )
    false_det = sum(
        1
        for e in events
        if not any(e.bin_start <= b <= e.bin_end for b in jump_bins)
    )
    return RunRecord(
        index=index,
        realized_n1=len(sim.price_jumps),
        detected_n1=len(events),
        statistic=report.statistic if report.n_jumps else math.nan,
        p_value=report.p_value if report.n_jumps else math.nan,
        dof=report.dof,
        n_jumps_detected_true=hit,
        n_false_detections=false_det,
    )


def _worker(args: tuple) -> RunRecord:
    cfg_kwargs, test_cfg, index = args
    return run_one(ScenarioConfig(**cfg_kwargs), test_cfg, index)


def _filtered(records: list[RunRecord], mode: str) -> list[RunRecord]:
    if mode == "realized_detected_one":
        return [r for r in records if r.realized_n1 == 1 and r.detected_n1 == 1]
    if mode == "detected":
        return [r for r in records if r.detected_n1 >= 1]
    return [r for r in records if not math.isnan(r.statistic)]


def ks_distance(values: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and cdf."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        return math.nan
    ref = np.array([cdf(v) for v in x])
    upper = np.arange(1, x.size + 1) / x.size
    lower = np.arange(0, x.size) / x.size
    return float(np.max(np.maximum(np.abs(upper - ref), np.abs(ref - lower))))


def run_scenario(
    scenario: str | ScenarioConfig,
    n_runs: int,
    base_seed: int,
    test_cfg: TestConfig | None = None,
    filter_mode: str = "realized_detected_one",
    threads: int = 1,
) -> MCReport:
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if filter_mode not in _FILTERS:
        raise ValueError(f"unknown filter_mode {filter_mode!r}")
    if test_cfg is None:
        test_cfg = TestConfig()
    if isinstance(scenario, str):
        scenario_id = scenario.strip().upper()
        cfg = table1_scenario(scenario_id)
    else:
        scenario_id = "custom"
        cfg = scenario

    t_start = time.perf_counter()
    kwargs = {**cfg.__dict__}
    tasks = [
        ({**kwargs, "seed": splitmix64(base_seed, r)}, test_cfg, r)
        for r in range(n_runs)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_worker, tasks, chunksize=16))
    else:
        records = [_worker(t) for t in tasks]
    records.sort(key=lambda r: r.index)
    runtime = time.perf_counter() - t_start

    kept = _filtered(records, filter_mode)
    stats = np.array([r.statistic for r in kept if not math.isnan(r.statistic)])
    pvals = np.array([r.p_value for r in kept if not math.isnan(r.p_value)])
    if test_cfg.variant == "naive":
        ks = ks_distance(stats, normal_cdf)
    else:
        ks = ks_distance(stats, lambda x: chi2_cdf(x, 1)) if stats.size else math.nan

    n_jumps_total = sum(r.realized_n1 for r in records)
    n_hits_total = sum(r.n_jumps_detected_true for r in records)
    aggregates = {
        "n_filtered": len(kept),
        "reject_rate_05": float(np.mean(pvals < 0.05)) if pvals.size else math.nan,
        "reject_rate_10": float(np.mean(pvals < 0.10)) if pvals.size else math.nan,
        "ks_distance": ks,
        "quantiles": {
            q: float(np.quantile(stats, float(q))) if stats.size else math.nan
            for q in ("0.90", "0.95", "0.99")
        },
        "detection_rate": (n_hits_total / n_jumps_total) if n_jumps_total else math.nan,
        "mean_false_detections": float(
            np.mean([r.n_false_detections for r in records])
        ),
    }
    return MCReport(
        scenario=scenario_id,
        variant=test_cfg.variant,
        normalization=test_cfg.normalization,
        n_runs=n_runs,
        base_seed=base_seed,
        filter_mode=filter_mode,
        records=records,
        aggregates=aggregates,
        runtime_seconds=runtime,
    )


def size_power_table(
    report: MCReport, levels: tuple[float, ...] = (0.01, 0.05, 0.10, 0.25, 0.50)
) -> list[tuple[float, float]]:
    """Nominal level vs empirical rejection frequency over filtered records."""
    kept = _filtered(report.records, report.filter_mode)
    pvals = np.array([r.p_value for r in kept if not math.isnan(r.p_value)])
    out = []
    for lvl in levels:
        rate = float(np.mean(pvals < lvl)) if pvals.size else math.nan
        out.append((float(lvl), rate))
    return out


def kde_curve(values: np.ndarray, n_points: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian KDE with Silverman's rule of thumb, for plot-data export."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 values for a density estimate")
    sd = float(np.std(x, ddof=1))
    iqr = float(np.subtract(*np.percentile(x, [75, 25])))
    scale = min(sd, iqr / 1.349) if iqr > 0 else sd
    bw = 0.9 * scale * x.size ** (-0.2)
    if bw <= 0:
        raise ValueError("degenerate sample: zero bandwidth")
    grid = np.linspace(x.min() - 3 * bw, x.max() + 3 * bw, n_points)
    dens = np.exp(-0.5 * ((grid[:, None] - x[None, :]) / bw) ** 2).sum(axis=1)
    dens /= x.size * bw * math.sqrt(2.0 * math.pi)
    return grid, dens
