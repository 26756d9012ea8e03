"""Figure rendering for the CLI report path (matplotlib, Agg backend)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .jumps import JumpEvent
from .spotvol import SpotVolPath, confidence_interval


def save_spot_figure(
    spot: SpotVolPath,
    out: str | Path,
    level: float = 0.95,
    events: list[JumpEvent] | None = None,
) -> None:
    """Spot squared-volatility path with confidence band and jump markers."""
    h = spot.grid.h
    times = np.arange(spot.grid.h_inv) * h
    combined = spot.combined[: spot.grid.h_inv]
    lo = np.full_like(combined, np.nan)
    hi = np.full_like(combined, np.nan)
    for k in range(spot.grid.h_inv):
        fisher = spot.fisher_right[k]
        if math.isnan(fisher):
            fisher = spot.fisher_left[k]
        if not (math.isnan(combined[k]) or math.isnan(fisher)):
            lo[k], hi[k] = confidence_interval(
                float(combined[k]), float(fisher), spot.config.r_inv, level
            )
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.fill_between(times, lo, hi, alpha=0.25, label=f"{level:.0%} CI")
    ax.plot(times, combined, lw=1.2, label="spot squared volatility")
    for ev in events or []:
        ax.axvspan(ev.bin_start * h, (ev.bin_end + 1) * h, color="tab:red", alpha=0.2)
    ax.set_xlabel("time")
    ax.set_ylabel("c(t)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)


def _chi2_1_pdf(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-x[pos] / 2.0) / np.sqrt(2.0 * np.pi * x[pos])
    return out


def _normal_pdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x**2) / math.sqrt(2.0 * math.pi)


def save_statistic_hist(
    stats: np.ndarray, reference: str, out: str | Path, bins: int = 40
) -> None:
    """Histogram of test statistics against the asymptotic reference density."""
    stats = np.asarray(stats, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(stats, bins=bins, density=True, alpha=0.5, label="empirical")
    grid = np.linspace(min(0.0, stats.min()), max(stats.max(), 1.0), 400)
    if reference == "chi2":
        ax.plot(grid, _chi2_1_pdf(grid), "k--", label="chi2(1)")
    elif reference == "normal":
        ax.plot(grid, _normal_pdf(grid), "k--", label="N(0,1)")
    else:
        raise ValueError(f"unknown reference {reference!r}")
    ax.legend()
    ax.set_xlabel("statistic")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)


def save_size_power_figure(table: list[tuple[float, float]], out: str | Path) -> None:
    """Nominal level against empirical rejection rate, with the diagonal."""
    xs = [row[0] for row in table]
    ys = [row[1] for row in table]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], "k:", lw=1)
    ax.plot(xs, ys, "o-")
    ax.set_xlabel("nominal level")
    ax.set_ylabel("empirical rejection rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
