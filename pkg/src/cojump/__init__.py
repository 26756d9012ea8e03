"""Spot volatility estimation and price/volatility co-jump tests for noisy
high-frequency data, with a reproducible simulator and Monte Carlo harness."""

from .obs import NoisyPath, ReturnSeries, TickSeries, from_ticks, returns
from .noise import NoiseEstimate, estimate_eta_iid
from .spectral import (
    BinGrid,
    SpectralConfig,
    SpectralMatrix,
    WeightVector,
    bin_estimate,
    empirical_norm_sq,
    oracle_weights,
    phi,
    phi_cos,
    spectral_statistics,
)
from .spotvol import (
    SpotConfig,
    SpotEstimate,
    SpotVolPath,
    confidence_interval,
    fisher_at_bin,
    spot_path,
)
from .jumps import JumpEvent, detect, group
from .cotest import (
    CoJumpReport,
    TestConfig,
    chi2_test,
    g_stat,
    multiple_test,
    naive_test,
    run_test,
    t0_statistic,
)
from .dists import chi2_cdf, chi2_upper_quantile, normal_cdf, normal_quantile
from .simulate import ScenarioConfig, SimulatedPath, simulate, table1_scenario
from .montecarlo import MCReport, RunRecord, run_scenario, size_power_table

__all__ = [
    "BinGrid",
    "CoJumpReport",
    "JumpEvent",
    "MCReport",
    "NoiseEstimate",
    "NoisyPath",
    "ReturnSeries",
    "RunRecord",
    "ScenarioConfig",
    "SimulatedPath",
    "SpectralConfig",
    "SpectralMatrix",
    "SpotConfig",
    "SpotEstimate",
    "SpotVolPath",
    "TestConfig",
    "TickSeries",
    "WeightVector",
    "bin_estimate",
    "chi2_cdf",
    "chi2_test",
    "chi2_upper_quantile",
    "confidence_interval",
    "detect",
    "empirical_norm_sq",
    "estimate_eta_iid",
    "fisher_at_bin",
    "from_ticks",
    "g_stat",
    "group",
    "multiple_test",
    "naive_test",
    "normal_cdf",
    "normal_quantile",
    "oracle_weights",
    "phi",
    "phi_cos",
    "returns",
    "run_scenario",
    "run_test",
    "simulate",
    "size_power_table",
    "spectral_statistics",
    "spot_path",
    "t0_statistic",
    "table1_scenario",
]

__version__ = "0.1.0"
