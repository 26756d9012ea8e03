"""Local sine-basis machinery: spectral statistics, norms, weights.

On each bin k of an equispaced partition of [0, 1] the observed returns are
combined linearly with discrete sine weights

    Phi_jk(t) = (sqrt(2 h) n sin(j pi / (2 n h)))^-1 sin(j pi h^-1 (t - k h))

supported on [kh, (k+1)h], for spectral frequencies j = 1..J.  The resulting
spectral statistics S_jk de-correlate noisy data across frequencies and are
the building blocks of every estimator in this package.

Real trade counts are never divisible by the bin count.  Bin k therefore
holds return indices (floor(k n / h_inv), floor((k+1) n / h_inv)], the sine
basis is laid out on each bin's actual index set, and norms use the exact
per-bin point count M_k instead of n h.  For full bins both coincide with
the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .obs import ReturnSeries


@dataclass(frozen=True)
class BinGrid:
    """Partition of [0,1] into h_inv bins for a grid of n returns."""

    h_inv: int
    n: int

    def __post_init__(self) -> None:
        if self.h_inv < 1:
            raise ValueError("h_inv must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.h_inv > self.n:
            raise ValueError("cannot have more bins than returns")

    @property
    def h(self) -> float:
        return 1.0 / self.h_inv

    @property
    def obs_per_bin(self) -> float:
        return self.n / self.h_inv

    @property
    def edges(self) -> np.ndarray:
        """Return-index edges; bin k covers dy indices edges[k]..edges[k+1]-1 (0-based)."""
        return (np.arange(self.h_inv + 1) * self.n) // self.h_inv

    @property
    def bin_sizes(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def min_bin_size(self) -> int:
        return int(self.bin_sizes.min())


@dataclass(frozen=True)
class SpectralConfig:
    """Spectral cut-offs: J for the final stage, J_pilot for the pilot stage."""

    j_max: int
    j_max_pilot: int

    def __post_init__(self) -> None:
        if not (1 <= self.j_max_pilot <= self.j_max):
            raise ValueError("need 1 <= j_max_pilot <= j_max")

    def validate_for(self, grid: BinGrid) -> None:
        if self.j_max > grid.min_bin_size:
            raise ValueError(
                f"j_max={self.j_max} exceeds the smallest bin size {grid.min_bin_size}"
            )


@dataclass(frozen=True)
class SpectralMatrix:
    """Spectral statistics S_jk, shape (J, h_inv); row j-1 holds frequency j."""

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 2:
            raise ValueError("s must be a (J, n_bins) matrix")
        if not np.all(np.isfinite(s)):
            raise ValueError("spectral statistics must be finite")
        object.__setattr__(self, "s", s)

    @property
    def j_max(self) -> int:
        return self.s.shape[0]

    @property
    def n_bins(self) -> int:
        return self.s.shape[1]


@dataclass(frozen=True)
class WeightVector:
    """Variance-optimal combination weights over frequencies plus their Fisher information."""

    w: np.ndarray
    fisher: float

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or np.any(w < 0):
            raise ValueError("weights must be a nonnegative vector")
        if not self.fisher > 0:
            raise ValueError("fisher must be positive")
        object.__setattr__(self, "w", w)


def phi(j: int, k: int, h: float, n: int, t: float) -> float:
    """Sine basis function Phi_jk evaluated at time t (full-bin layout)."""
    nh = n * h
    if not 1 <= j <= nh:
        raise ValueError(f"frequency j={j} outside 1..n*h={nh}")
    if not (k * h <= t <= (k + 1) * h):
        return 0.0
    pref = 1.0 / (np.sqrt(2.0 * h) * n * np.sin(j * np.pi / (2.0 * nh)))
    return float(pref * np.sin(j * np.pi * (t - k * h) / h))


def phi_cos(j: int, k: int, h: float, t: float) -> float:
    """Cosine companion sqrt(2) h^-1/2 cos(j pi h^-1 (t - kh)) on [kh, (k+1)h]."""
    if j < 1:
        raise ValueError("frequency j must be >= 1")
    if not (k * h <= t <= (k + 1) * h):
        return 0.0
    return float(np.sqrt(2.0 / h) * np.cos(j * np.pi * (t - k * h) / h))


def empirical_norm_sq(j: int, n: int, h: float) -> float:
    """Closed-form empirical norm ||Phi_jk||_n^2 = (4 n^2 sin^2(j pi/(2 n h)))^-1.

    Exact for full equispaced bins and 1 <= j < n h; at j = n h the sine
    vector on the grid is identically zero and the closed form is only the
    formal continuation.
    """
    nh = n * h
    if not 1 <= j <= nh:
        raise ValueError(f"frequency j={j} outside 1..n*h={nh}")
    return 1.0 / (4.0 * n**2 * np.sin(j * np.pi / (2.0 * nh)) ** 2)


def norm_inv_sq_table(grid: BinGrid, j_max: int) -> np.ndarray:
    """||Phi_jk||_n^-2 for j = 1..j_max and every bin, shape (j_max, h_inv).

    Uses each bin's actual point count M_k, which reduces to the closed form
    4 n^2 sin^2(j pi / (2 n h)) on full bins.
    """
    if j_max > grid.min_bin_size - 1:
        # j = M_k degenerates to the zero vector on the grid; stay below it.
        raise ValueError(
            f"j_max={j_max} too large for smallest bin ({grid.min_bin_size} points)"
        )
    j = np.arange(1, j_max + 1)[:, None]
    m = grid.bin_sizes[None, :]
    return 4.0 * grid.n**2 * np.sin(j * np.pi / (2.0 * m)) ** 2


def spectral_statistics(ret: ReturnSeries, grid: BinGrid, j_max: int) -> SpectralMatrix:
    """Spectral statistics S_jk = ||Phi_jk||_n^-1 sum_i dy_i Phi_jk(i/n).

    The prefactors collapse: with m = i - i_lo the statistic on bin k equals
    sqrt(2 n / M_k) * sum_m dy_{i_lo + m} sin(j pi m / M_k).
    """
    if ret.n != grid.n:
        raise ValueError("return series and grid disagree on n")
    if j_max > grid.min_bin_size - 1:
        raise ValueError(
            f"j_max={j_max} too large for smallest bin ({grid.min_bin_size} points)"
        )
    edges = grid.edges
    sizes = grid.bin_sizes
    s = np.empty((j_max, grid.h_inv))
    # Bins share at most a couple of distinct sizes; build one sine table per size.
    for m_size in np.unique(sizes):
        bins = np.flatnonzero(sizes == m_size)
        m = np.arange(1, m_size + 1)
        j = np.arange(1, j_max + 1)
        sines = np.sin(np.outer(j, m) * (np.pi / m_size))
        seg = np.stack([ret.dy[edges[k] : edges[k + 1]] for k in bins])
        s[:, bins] = np.sqrt(2.0 * grid.n / m_size) * (sines @ seg.T)
    return SpectralMatrix(s)


def fisher_summands(c: float, eta: float, norm_inv_sq: np.ndarray, n: int) -> np.ndarray:
    """I_j = (1/2) (c + ||Phi_j.||_n^-2 eta / n)^-2 for each frequency."""
    if not c > 0:
        raise ValueError("squared volatility c must be positive")
    if eta < 0:
        raise ValueError("noise level eta must be nonnegative")
    return 0.5 / (c + norm_inv_sq * (eta / n)) ** 2


def oracle_weights(c: float, eta: float, n: int, h: float, j_max: int) -> WeightVector:
    """Variance-optimal weights w_j = I_j / sum_m I_m and Fisher information sum_j I_j."""
    nh = n * h
    if not 1 <= j_max <= nh:
        raise ValueError(f"j_max={j_max} outside 1..n*h={nh}")
    j = np.arange(1, j_max + 1)
    nis = 4.0 * n**2 * np.sin(j * np.pi / (2.0 * nh)) ** 2
    i_j = fisher_summands(c, eta, nis, n)
    fisher = float(i_j.sum())
    return WeightVector(i_j / fisher, fisher)


def bin_estimate(
    s_col: np.ndarray,
    weights: WeightVector,
    norm_inv_sq_col: np.ndarray,
    eta: float,
    n: int,
) -> float:
    """Bin-wise squared-volatility estimate: weighted bias-corrected squared statistics.

    zeta_k = sum_j w_j (S_jk^2 - ||Phi_jk||_n^-2 eta / n)
    """
    s_col = np.asarray(s_col, dtype=float)
    if s_col.shape != weights.w.shape or s_col.shape != np.shape(norm_inv_sq_col):
        raise ValueError("dimension mismatch between statistics, weights and norms")
    return float(np.sum(weights.w * (s_col**2 - norm_inv_sq_col * (eta / n))))
