"""Shared fixtures: small simulated paths and spot-volatility pipelines.

The planted-jump fixtures take a constant-volatility path and add price
steps by hand so that jump locations and sizes are known exactly, without
relying on the simulator's Poisson draws.
"""

from __future__ import annotations

import numpy as np
import pytest

from cojump import (
    BinGrid,
    NoisyPath,
    ScenarioConfig,
    SpectralConfig,
    SpotConfig,
    simulate,
    spot_path,
)

# Small constant-volatility setting shared by the unit tests: 20 bins of
# 300 returns each, well inside every validity constraint.
N = 6000
H_INV = 20


@pytest.fixture(scope="session")
def grid():
    return BinGrid(H_INV, N)


@pytest.fixture(scope="session")
def spec_cfg():
    return SpectralConfig(j_max=12, j_max_pilot=6)


@pytest.fixture(scope="session")
def spot_cfg():
    return SpotConfig(r_inv=3, r_inv_pilot=3)


@pytest.fixture(scope="session")
def const_sim():
    """Constant-volatility path without jumps (c = 1, eta = 0.001)."""
    return simulate(ScenarioConfig(n=N, lam=0.0, jump_mean=0.25, eta=0.001, seed=42))


@pytest.fixture(scope="session")
def const_spot(const_sim, grid, spot_cfg, spec_cfg):
    return spot_path(const_sim.path, grid, spot_cfg, spec_cfg)


def plant_jumps(y: np.ndarray, jumps: list[tuple[int, float]]) -> NoisyPath:
    """Add a price step of the given size from observation index i onward."""
    out = y.copy()
    for i, size in jumps:
        out[i:] += size
    return NoisyPath(out)


# Observation indices 1950 and 4350 sit mid-bin in bins 6 and 14 of the
# 20-bin grid; size 1.0 clears the adaptive threshold by a wide margin.
JUMP_BINS = (6, 14)
JUMP_OBS = (1950, 4350)
JUMP_SIZE = 1.0


@pytest.fixture(scope="session")
def jumpy_path(const_sim):
    return plant_jumps(const_sim.path.y, [(i, JUMP_SIZE) for i in JUMP_OBS])


@pytest.fixture(scope="session")
def jumpy_spot(jumpy_path, grid, spot_cfg, spec_cfg):
    return spot_path(jumpy_path, grid, spot_cfg, spec_cfg)


@pytest.fixture(scope="session")
def edge_jump_spot(const_sim, grid, spot_cfg, spec_cfg):
    """A single planted jump in bin 1, too close to the border to test."""
    path = plant_jumps(const_sim.path.y, [(450, JUMP_SIZE)])
    return spot_path(path, grid, spot_cfg, spec_cfg)
