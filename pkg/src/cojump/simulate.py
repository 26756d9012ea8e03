"""Reproducible path simulation for both Monte Carlo models.

Model "const_vol": Y = B + compound Poisson jumps + iid N(0, eta^2) noise,
with unit volatility.  Model "stoch_vol" adds a seasonal factor
phi_t = 1 - (3/5) t^{1/2} + (1/10) t^2 and a leveraged square-root
volatility process

    dc_t = 6 (1 - c_t) dt + sqrt(c_t) dB~_t + dJ_t,   d[B, B~]_t = rho dt,

simulated by full-truncation Euler on the observation grid.  Price jumps
arrive with intensity lambda and sizes from N(jump_mean, jump_mean/100)
(second parameter a standard deviation).  Volatility jumps are gamma times an
independent draw from the same law at every price-jump time, plus an
independent unit-intensity compound Poisson stream.  The noise variance in
this model is eta^2 (integral of phi^4 c^2)^{1/4}, transcribed verbatim and
evaluated by the trapezoid rule on the realized path; noise_std_override
replaces the resulting standard deviation outright.

Randomness comes from counter-based Philox streams keyed by (seed, stream),
one stream per stochastic driver, with normals drawn by inverse CDF, so
paths are bit-identical across platforms and runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .obs import NoisyPath

_STREAM_BROWNIAN = 1
_STREAM_BROWNIAN_PERP = 2
_STREAM_PRICE_JUMP_TIMES = 3
_STREAM_PRICE_JUMP_SIZES = 4
_STREAM_VOL_JUMP_TIMES = 5
_STREAM_VOL_JUMP_SIZES = 6
_STREAM_NOISE = 7
_STREAM_THINNING = 8

_MODELS = ("const_vol", "stoch_vol")


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation parameters plus the estimator settings of a scenario.

    The estimator fields (h_inv, j_max, j_max_pilot, r_inv, r_inv_pilot) are
    carried along for the Monte Carlo harness and ignored by simulate().
    """

    n: int
    lam: float
    jump_mean: float
    eta: float
    model: str = "const_vol"
    gamma: float = 0.0
    rho: float = 0.2
    half_jump_thinning: bool = False
    seed: int = 0
    noise_std_override: float | None = None
    h_inv: int | None = None
    j_max: int | None = None
    j_max_pilot: int | None = None
    r_inv: int | None = None
    r_inv_pilot: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if self.model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}")


@dataclass(frozen=True)
class SimulatedPath:
    """A simulated observation path together with its ground truth."""

    path: NoisyPath
    x: np.ndarray
    c_path: np.ndarray
    price_jumps: list[tuple[float, float]]
    vol_jumps: list[tuple[float, float]]
    epsilon: np.ndarray

    def __post_init__(self) -> None:
        if not np.array_equal(self.path.y, self.x + self.epsilon):
            raise ValueError("y must equal x + epsilon exactly")


def _gen(seed: int, stream: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)])
    return np.random.Generator(np.random.Philox(key=key))


def _normals(gen: np.random.Generator, size: int) -> np.ndarray:
    u = np.clip(gen.random(size), 1e-16, 1.0 - 1e-16)
    return ndtri(u)


def _compound_poisson(
    gen_times: np.random.Generator, intensity: float
) -> np.ndarray:
    """Sorted arrival times of a Poisson process on [0, 1]."""
    count = int(gen_times.poisson(intensity)) if intensity > 0 else 0
    return np.sort(gen_times.random(count))


def _jump_index(t: float, n: int) -> int:
    """First grid index i with i/n >= t (jump visible from observation i on)."""
    return min(max(int(math.ceil(t * n - 1e-12)), 1), n)


def _seasonal(t: np.ndarray) -> np.ndarray:
    return 1.0 - 0.6 * np.sqrt(t) + 0.1 * t**2


def simulate(cfg: ScenarioConfig) -> SimulatedPath:
    n = cfg.n
    dt = 1.0 / n
    sqdt = math.sqrt(dt)
    std = cfg.jump_mean / 100.0

    jump_times = _compound_poisson(_gen(cfg.seed, _STREAM_PRICE_JUMP_TIMES), cfg.lam)
    # Pairs (x, y): price-jump size and the co-located volatility draw.
    pair_z = _normals(_gen(cfg.seed, _STREAM_PRICE_JUMP_SIZES), 2 * jump_times.size)
    jump_sizes = cfg.jump_mean + std * pair_z[: jump_times.size]
    co_draws = cfg.jump_mean + std * pair_z[jump_times.size :]

    zb = _normals(_gen(cfg.seed, _STREAM_BROWNIAN), n)
    db = sqdt * zb

    if cfg.model == "const_vol":
        dx = db.copy()
        c = np.ones(n + 1)
        c_path = c
        vol_jumps: list[tuple[float, float]] = []
        noise_std = cfg.eta
    else:
        zw = _normals(_gen(cfg.seed, _STREAM_BROWNIAN_PERP), n)
        dbt = cfg.rho * db + math.sqrt(1.0 - cfg.rho**2) * sqdt * zw

        vol_times = _compound_poisson(_gen(cfg.seed, _STREAM_VOL_JUMP_TIMES), 1.0)
        vol_sizes = cfg.jump_mean + std * _normals(
            _gen(cfg.seed, _STREAM_VOL_JUMP_SIZES), vol_times.size
        )
        vol_jumps = list(zip(vol_times.tolist(), vol_sizes.tolist()))
        if cfg.gamma != 0.0:
            keep = np.ones(jump_times.size, dtype=bool)
            if cfg.half_jump_thinning:
                keep = _gen(cfg.seed, _STREAM_THINNING).random(jump_times.size) >= 0.5
            for t, y, k in zip(jump_times, co_draws, keep):
                if k:
                    vol_jumps.append((float(t), float(cfg.gamma * y)))
        vol_jumps.sort()

        vol_by_index: dict[int, float] = {}
        for t, size in vol_jumps:
            i = _jump_index(t, n)
            vol_by_index[i] = vol_by_index.get(i, 0.0) + size

        times = np.arange(n + 1) * dt
        phi_t = _seasonal(times)
        c = np.empty(n + 1)
        c[0] = 1.0
        dx = np.empty(n)
        drift = 6.0 * dt
        for i in range(n):
            ci = c[i]
            sq = math.sqrt(ci) if ci > 0.0 else 0.0
            dx[i] = phi_t[i] * sq * db[i]
            cn = ci + drift * (1.0 - ci) + sq * dbt[i]
            j = vol_by_index.get(i + 1)
            if j is not None:
                cn += j
            c[i + 1] = cn
        c_path = phi_t**2 * np.maximum(c, 0.0)
        spot_var = np.maximum(c, 0.0)
        integral = float(np.trapezoid(phi_t**4 * spot_var**2, dx=dt))
        noise_std = cfg.eta * integral**0.125

    x = np.concatenate(([0.0], np.cumsum(dx)))
    for t, size in zip(jump_times, jump_sizes):
        x[_jump_index(t, n) :] += size

    if cfg.noise_std_override is not None:
        noise_std = cfg.noise_std_override
    epsilon = noise_std * _normals(_gen(cfg.seed, _STREAM_NOISE), n + 1)

    return SimulatedPath(
        path=NoisyPath(x + epsilon),
        x=x,
        c_path=c_path,
        price_jumps=list(zip(jump_times.tolist(), jump_sizes.tolist())),
        vol_jumps=vol_jumps,
        epsilon=epsilon,
    )


_TABLE1 = {
    "I": dict(n=300000, lam=1, jump_mean=0.25, eta=0.001, model="const_vol",
              h_inv=300, j_max=50, j_max_pilot=25, r_inv=100, r_inv_pilot=10),
    "II": dict(n=30000, lam=2, jump_mean=0.25, eta=0.005, model="stoch_vol",
               h_inv=60, j_max=40, j_max_pilot=25, r_inv=3, r_inv_pilot=5),
    "III": dict(n=30000, lam=2, jump_mean=0.25, eta=0.05, model="stoch_vol",
                h_inv=60, j_max=40, j_max_pilot=25, r_inv=3, r_inv_pilot=5),
    "IV": dict(n=30000, lam=2, jump_mean=0.05, eta=0.005, model="stoch_vol",
               h_inv=60, j_max=40, j_max_pilot=25, r_inv=3, r_inv_pilot=5),
    "V": dict(n=5000, lam=2, jump_mean=0.25, eta=0.005, model="stoch_vol",
              h_inv=10, j_max=30, j_max_pilot=20, r_inv=3, r_inv_pilot=3),
    "VI": dict(n=5000, lam=2, jump_mean=0.25, eta=0.05, model="stoch_vol",
               h_inv=10, j_max=30, j_max_pilot=20, r_inv=3, r_inv_pilot=3),
    "VII": dict(n=5000, lam=2, jump_mean=0.05, eta=0.005, model="stoch_vol",
                h_inv=10, j_max=30, j_max_pilot=20, r_inv=3, r_inv_pilot=3),
    "VIII": dict(n=30000, lam=2, jump_mean=0.25, eta=0.005, model="stoch_vol",
                 gamma=1.0, h_inv=60, j_max=40, j_max_pilot=25, r_inv=3,
                 r_inv_pilot=5),
    "IX": dict(n=5000, lam=2, jump_mean=0.25, eta=0.005, model="stoch_vol",
               gamma=1.0, half_jump_thinning=True, h_inv=10, j_max=30,
               j_max_pilot=20, r_inv=3, r_inv_pilot=3),
}


def table1_scenario(scenario_id: str, seed: int = 0) -> ScenarioConfig:
    """Configuration of one Monte Carlo scenario I..IX."""
    key = scenario_id.strip().upper()
    if key not in _TABLE1:
        raise ValueError(f"unknown scenario {scenario_id!r}; expected I..IX")
    return ScenarioConfig(seed=seed, **_TABLE1[key])
