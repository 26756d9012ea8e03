"""Noise-level estimation from observed returns.

The estimator

    eta_hat = (1/(2n)) sum_i (dy_i)^2

targets the variance of the i.i.d. observation noise with accuracy
eta + O_P(n^{-1/2}).  Note that eta_hat also absorbs an O(1/n) contribution
from the quadratic variation of the efficient price; no correction is
applied for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .obs import ReturnSeries


@dataclass(frozen=True)
class NoiseEstimate:
    """Estimated noise variance with a tag for the noise model assumed."""

    eta_hat: float
    method: str = "iid"

    def __post_init__(self) -> None:
        if self.eta_hat < 0:
            raise ValueError("eta_hat must be nonnegative")


def estimate_eta_iid(ret: ReturnSeries) -> NoiseEstimate:
    """Estimate the noise variance under i.i.d. noise: (1/2n) sum (dy_i)^2."""
    if ret.n < 2:
        raise ValueError("need at least 2 returns to estimate the noise level")
    return NoiseEstimate(float(np.sum(ret.dy**2)) / (2.0 * ret.n))
