"""Two-stage spot squared-volatility estimation with truncation.

Stage one builds equal-weight pilot estimates over local windows of
r_inv_pilot bins, truncating bins whose statistic exceeds the global rule
u = trunc_const * h * log(h^-1).  Stage two plugs the pilot values into the
variance-optimal weights, recomputes the bin statistics zeta_k^ad, truncates
with a locally adaptive threshold u_k = trunc_const * log(h^-1) * h * c_k^pilot
and averages over windows of r_inv bins to the right and left of each bin
boundary s = b*h:

    right window: bins b+1 .. b+r_inv      left window: bins b-r_inv .. b-1

Truncated bins contribute zero without changing the window divisor; at the
borders the window shrinks to the available bins and the divisor shrinks
with it.  Confidence intervals come from the feasible central limit theorem
c_hat +/- z * sqrt(r_n / I_hat) with I_hat the Fisher information evaluated
at the window's pilot value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import estimate_eta_iid
from .obs import NoisyPath, ReturnSeries, returns
from .spectral import (
    BinGrid,
    SpectralConfig,
    SpectralMatrix,
    fisher_summands,
    norm_inv_sq_table,
    spectral_statistics,
)
from .dists import normal_quantile

_PILOT_FLOOR_FALLBACK = 1e-12


@dataclass(frozen=True)
class SpotConfig:
    """Window lengths, truncation policy and minimum jump size.

    r_inv is the smoothing window in bins for the final stage; r_inv_pilot
    the (possibly different) pilot window.  trunc_const scales the threshold
    u = trunc_const * h * log(h^-1); the adaptive second-stage threshold
    multiplies this by the local pilot value.  a_min_jump restricts jump
    detection to h|zeta_k| > a_min_jump^2 when positive.
    """

    r_inv: int
    r_inv_pilot: int | None = None
    tau: float = 0.5
    trunc_const: float = 2.0
    adaptive_trunc: bool = True
    a_min_jump: float = 0.0
    pilot_floor_frac: float = 0.1

    def __post_init__(self) -> None:
        if self.r_inv < 1:
            raise ValueError("r_inv must be >= 1")
        if self.r_inv_pilot is not None and self.r_inv_pilot < 1:
            raise ValueError("r_inv_pilot must be >= 1")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.trunc_const <= 0:
            raise ValueError("trunc_const must be positive")
        if self.a_min_jump < 0:
            raise ValueError("a_min_jump must be nonnegative")
        if not 0.0 <= self.pilot_floor_frac < 1.0:
            raise ValueError("pilot_floor_frac must lie in [0, 1)")

    @property
    def pilot_window(self) -> int:
        return self.r_inv if self.r_inv_pilot is None else self.r_inv_pilot

    def validate_for(self, grid: BinGrid) -> None:
        if self.r_inv > grid.h_inv // 2:
            raise ValueError(
                f"r_inv={self.r_inv} exceeds half the bin count {grid.h_inv}"
            )


@dataclass(frozen=True)
class SpotEstimate:
    """Right/left spot estimates at one bin boundary with Fisher information.

    Unavailable sides (empty window at the borders, or fully truncated
    windows) are NaN; Fisher entries are positive where the side exists.
    """

    c_right: float
    c_left: float
    fisher_right: float
    fisher_left: float
    n_truncated_right: int
    n_truncated_left: int

    @property
    def has_right(self) -> bool:
        return not math.isnan(self.c_right)

    @property
    def has_left(self) -> bool:
        return not math.isnan(self.c_left)

    @property
    def combined(self) -> float:
        """(c_right + c_left)/2 where both sides exist, else the available side."""
        if self.has_right and self.has_left:
            return 0.5 * (self.c_right + self.c_left)
        if self.has_right:
            return self.c_right
        return self.c_left


@dataclass(frozen=True)
class SpotVolPath:
    """Full per-boundary spot-volatility output of the two-stage pipeline.

    Boundary b in 0..h_inv corresponds to time s = b*h.  Arrays indexed by
    boundary have length h_inv+1; arrays indexed by bin have length h_inv.
    """

    grid: BinGrid
    config: SpotConfig
    spectral_config: SpectralConfig
    eta_hat: float
    zeta_pilot: np.ndarray
    zeta_ad: np.ndarray
    pilot_by_bin: np.ndarray
    thresholds: np.ndarray
    truncated: np.ndarray
    c_right: np.ndarray
    c_left: np.ndarray
    fisher_right: np.ndarray
    fisher_left: np.ndarray
    n_truncated_right: np.ndarray
    n_truncated_left: np.ndarray
    # Effective inverse window sizes kept/size^2 per side: the variance of a
    # window average is var_scale / I.  Equals r_n for full untruncated
    # windows; larger when the window is border-shrunk or partly truncated.
    var_scale_right: np.ndarray
    var_scale_left: np.ndarray

    @property
    def combined(self) -> np.ndarray:
        """Per-boundary (c_right + c_left)/2, falling back to the available side."""
        out = 0.5 * (self.c_right + self.c_left)
        only_r = np.isnan(self.c_left) & ~np.isnan(self.c_right)
        only_l = np.isnan(self.c_right) & ~np.isnan(self.c_left)
        out[only_r] = self.c_right[only_r]
        out[only_l] = self.c_left[only_l]
        return out

    def estimate_at(self, boundary: int) -> SpotEstimate:
        if not 0 <= boundary <= self.grid.h_inv:
            raise ValueError(f"boundary {boundary} outside 0..{self.grid.h_inv}")
        return SpotEstimate(
            c_right=float(self.c_right[boundary]),
            c_left=float(self.c_left[boundary]),
            fisher_right=float(self.fisher_right[boundary]),
            fisher_left=float(self.fisher_left[boundary]),
            n_truncated_right=int(self.n_truncated_right[boundary]),
            n_truncated_left=int(self.n_truncated_left[boundary]),
        )

    @property
    def integrated_vol(self) -> float:
        """Integrated squared volatility: sum of h * zeta_k^ad over kept bins."""
        keep = ~self.truncated
        return float(self.grid.h * np.sum(self.zeta_ad[keep]))


def _window_bins(boundary: int, side: str, width: int, h_inv: int) -> np.ndarray:
    """Bin indices of the (possibly border-shrunk) window at a boundary."""
    if side == "right":
        lo, hi = boundary + 1, min(boundary + width, h_inv - 1)
    elif side == "left":
        lo, hi = max(boundary - width, 0), boundary - 1
    else:
        raise ValueError("side must be 'right' or 'left'")
    return np.arange(lo, hi + 1)


def _window_average(values: np.ndarray, keep: np.ndarray, bins: np.ndarray) -> tuple[float, int]:
    """Average of kept values over the window; truncated bins count as zero.

    The divisor is the window size (shrunk only at the borders), per the
    literal indicator form of the estimator.  Returns NaN when the window is
    empty or fully truncated.
    """
    if bins.size == 0:
        return math.nan, 0
    kept = keep[bins]
    n_trunc = int(np.sum(~kept))
    if n_trunc == bins.size:
        return math.nan, n_trunc
    return float(np.sum(values[bins] * kept) / bins.size), n_trunc


def pilot_spot(
    zeta_pilot: np.ndarray,
    keep: np.ndarray,
    cfg: SpotConfig,
    h_inv: int,
    boundary: int,
    side: str,
) -> tuple[float, int]:
    """Pilot window average at a boundary; returns (value, truncated count)."""
    bins = _window_bins(boundary, side, cfg.pilot_window, h_inv)
    return _window_average(zeta_pilot, keep, bins)


def fisher_at_bin(pilot_c: float, eta_hat: float, n: int, h: float, j_max: int) -> float:
    """Fisher information sum_j (1/2)(c + ||Phi_j.||_n^-2 eta/n)^-2 at one bin.

    Uses the full-bin closed-form norms; for eta = 0 this is J/(2c^2), and
    for J, n large it grows like log(n) / (8 c^{3/2} eta^{1/2}).
    """
    if not 1 <= j_max <= n * h:
        raise ValueError(f"j_max={j_max} outside 1..n*h={n * h}")
    j = np.arange(1, j_max + 1)
    nis = 4.0 * n**2 * np.sin(j * np.pi / (2.0 * n * h)) ** 2
    return float(np.sum(fisher_summands(pilot_c, eta_hat, nis, n)))


def _fisher(pilot_c: float, eta_hat: float, nis_col: np.ndarray, n: int) -> float:
    return float(np.sum(fisher_summands(pilot_c, eta_hat, nis_col, n)))


def spot_path(
    path: NoisyPath,
    grid: BinGrid,
    cfg: SpotConfig,
    spec_cfg: SpectralConfig,
    eta_hat: float | None = None,
) -> SpotVolPath:
    """Run the full two-stage pipeline over all bin boundaries.

    eta_hat defaults to the i.i.d. noise estimate from the data; passing the
    known value is intended for simulator-driven checks only.
    """
    if path.n != grid.n:
        raise ValueError("path and grid disagree on n")
    cfg.validate_for(grid)
    ret = returns(path)
    if eta_hat is None:
        eta_hat = estimate_eta_iid(ret).eta_hat
    elif eta_hat < 0:
        raise ValueError("eta_hat must be nonnegative")

    n, h_inv, h = grid.n, grid.h_inv, grid.h
    j_max, j_pi = spec_cfg.j_max, spec_cfg.j_max_pilot
    s = spectral_statistics(ret, grid, j_max).s
    nis = norm_inv_sq_table(grid, j_max)
    corrected = s**2 - nis * (eta_hat / n)

    # Stage one: equal-weight bin statistics and global truncation.
    zeta_pilot = corrected[:j_pi].mean(axis=0)
    u_glob = cfg.trunc_const * h * math.log(h_inv)
    keep_pilot = h * np.abs(zeta_pilot) <= u_glob

    pilot_right = np.full(h_inv + 1, math.nan)
    pilot_left = np.full(h_inv + 1, math.nan)
    for b in range(h_inv + 1):
        pilot_right[b], _ = pilot_spot(zeta_pilot, keep_pilot, cfg, h_inv, b, "right")
        pilot_left[b], _ = pilot_spot(zeta_pilot, keep_pilot, cfg, h_inv, b, "left")

    # Per-bin pilot value: both-side average at the bin's left boundary, so
    # the bin itself never enters its own weights or threshold.
    sides = np.stack([pilot_left[:h_inv], pilot_right[:h_inv]])
    n_sides = np.sum(np.isfinite(sides), axis=0)
    pilot_by_bin = np.where(
        n_sides > 0, np.nansum(sides, axis=0) / np.maximum(n_sides, 1), math.nan
    )
    positive = pilot_by_bin[np.isfinite(pilot_by_bin) & (pilot_by_bin > 0)]
    floor = (
        cfg.pilot_floor_frac * float(np.median(positive))
        if positive.size
        else _PILOT_FLOOR_FALLBACK
    )
    floor = max(floor, _PILOT_FLOOR_FALLBACK)
    pilot_by_bin = np.where(
        np.isfinite(pilot_by_bin), np.maximum(pilot_by_bin, floor), floor
    )

    # Stage two: adaptive weights per bin, adaptive truncation.
    i_jk = 0.5 / (pilot_by_bin[None, :] + nis * (eta_hat / n)) ** 2
    w_jk = i_jk / i_jk.sum(axis=0, keepdims=True)
    zeta_ad = np.sum(w_jk * corrected, axis=0)
    if cfg.adaptive_trunc:
        thresholds = cfg.trunc_const * math.log(h_inv) * h * pilot_by_bin
    else:
        thresholds = np.full(h_inv, u_glob)
    truncated = h * np.abs(zeta_ad) > np.maximum(thresholds, cfg.a_min_jump**2)
    keep_ad = ~truncated

    # Window averages and Fisher information at every boundary.
    c_right = np.full(h_inv + 1, math.nan)
    c_left = np.full(h_inv + 1, math.nan)
    fr = np.full(h_inv + 1, math.nan)
    fl = np.full(h_inv + 1, math.nan)
    ntr = np.zeros(h_inv + 1, dtype=int)
    ntl = np.zeros(h_inv + 1, dtype=int)
    vsr = np.full(h_inv + 1, math.nan)
    vsl = np.full(h_inv + 1, math.nan)
    for b in range(h_inv + 1):
        rbins = _window_bins(b, "right", cfg.r_inv, h_inv)
        lbins = _window_bins(b, "left", cfg.r_inv, h_inv)
        c_right[b], ntr[b] = _window_average(zeta_ad, keep_ad, rbins)
        c_left[b], ntl[b] = _window_average(zeta_ad, keep_ad, lbins)
        if rbins.size and ntr[b] < rbins.size:
            vsr[b] = (rbins.size - ntr[b]) / rbins.size**2
        if lbins.size and ntl[b] < lbins.size:
            vsl[b] = (lbins.size - ntl[b]) / lbins.size**2
        if rbins.size and not math.isnan(pilot_right[b]):
            bin_r = min(b + 1, h_inv - 1)
            fr[b] = _fisher(max(pilot_right[b], floor), eta_hat, nis[:, bin_r], n)
        if lbins.size and not math.isnan(pilot_left[b]):
            bin_l = max(b - 1, 0)
            fl[b] = _fisher(max(pilot_left[b], floor), eta_hat, nis[:, bin_l], n)

    return SpotVolPath(
        grid=grid,
        config=cfg,
        spectral_config=spec_cfg,
        eta_hat=float(eta_hat),
        zeta_pilot=zeta_pilot,
        zeta_ad=zeta_ad,
        pilot_by_bin=pilot_by_bin,
        thresholds=thresholds,
        truncated=truncated,
        c_right=c_right,
        c_left=c_left,
        fisher_right=fr,
        fisher_left=fl,
        n_truncated_right=ntr,
        n_truncated_left=ntl,
        var_scale_right=vsr,
        var_scale_left=vsl,
    )


def confidence_interval(
    c_hat: float, fisher: float, r_inv: int, level: float
) -> tuple[float, float]:
    """Feasible CLT interval c_hat +/- z_{(1+level)/2} sqrt(r_n / I_hat)."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if not fisher > 0:
        raise ValueError("fisher must be positive")
    if r_inv < 1:
        raise ValueError("r_inv must be >= 1")
    z = normal_quantile(0.5 * (1.0 + level))
    half = z * math.sqrt((1.0 / r_inv) / fisher)
    return c_hat - half, c_hat + half
