"""Observation model: tick data and the regular tick-time grid.

The i-th observed trade is mapped to grid time i/n (tick-time clock);
wall-clock spacing is deliberately ignored.  Log-prices on that grid form
the noisy observation sequence Y_0, ..., Y_n from which everything else
is computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Duplicate timestamps occur in real trade exports; ties are broken by file
# order after adding this jitter so that "strictly increasing" can be enforced.
_TIE_JITTER = 1e-9


@dataclass(frozen=True)
class TickSeries:
    """Raw trades: strictly increasing timestamps (seconds) and price levels."""

    timestamps: np.ndarray
    prices: np.ndarray

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=float)
        px = np.asarray(self.prices, dtype=float)
        if ts.ndim != 1 or px.ndim != 1 or ts.shape != px.shape:
            raise ValueError("timestamps and prices must be 1-d arrays of equal length")
        if ts.size < 2:
            raise ValueError("need at least 2 ticks")
        ts = _break_timestamp_ties(ts)
        if np.any(np.diff(ts) <= 0):
            bad = int(np.argmax(np.diff(ts) <= 0)) + 1
            raise ValueError(f"timestamps not increasing at index {bad}")
        nonpos = np.flatnonzero(~(px > 0))
        if nonpos.size:
            raise ValueError(f"non-positive price at index {int(nonpos[0])}")
        if not np.all(np.isfinite(px)):
            raise ValueError("prices must be finite")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", px)

    def __len__(self) -> int:
        return int(self.timestamps.size)


def _break_timestamp_ties(ts: np.ndarray) -> np.ndarray:
    """Resolve equal consecutive timestamps by file order with an epsilon jitter."""
    if not np.any(np.diff(ts) == 0):
        return ts
    out = ts.astype(float).copy()
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = np.nextafter(out[i - 1] + _TIE_JITTER, np.inf)
    return out


@dataclass(frozen=True)
class NoisyPath:
    """Log-price observations Y_0..Y_n on the tick-time grid i/n."""

    y: np.ndarray
    n: int = field(init=False)

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise ValueError("y must be a 1-d array of length >= 2")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n", int(y.size - 1))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


@dataclass(frozen=True)
class ReturnSeries:
    """Observed returns dy_i = Y_{i/n} - Y_{(i-1)/n}, i = 1..n."""

    dy: np.ndarray

    def __post_init__(self) -> None:
        dy = np.asarray(self.dy, dtype=float)
        if dy.ndim != 1 or dy.size < 1:
            raise ValueError("dy must be a nonempty 1-d array")
        object.__setattr__(self, "dy", dy)

    @property
    def n(self) -> int:
        return int(self.dy.size)


def from_ticks(ticks: TickSeries) -> NoisyPath:
    """Map trades to the noisy-path model: y_i = log(price_i), n = #trades - 1."""
    return NoisyPath(np.log(ticks.prices))


def returns(path: NoisyPath) -> ReturnSeries:
    return ReturnSeries(np.diff(path.y))
