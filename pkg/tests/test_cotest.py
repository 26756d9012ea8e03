"""Tests for the co-jump test variants and their building blocks."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cojump import (
    NoisyPath,
    SpectralConfig,
    TestConfig,
    chi2_cdf,
    chi2_test,
    chi2_upper_quantile,
    detect,
    g_stat,
    group,
    multiple_test,
    naive_test,
    run_test,
    spot_path,
    t0_statistic,
)
from cojump.cotest import filter_events, g_naive
from conftest import JUMP_BINS


@pytest.fixture(scope="module")
def jump_events(jumpy_spot, spot_cfg):
    return group(detect(jumpy_spot), spot_cfg.r_inv)


# ---- Test function g ----

def test_g_stat_pinned_values():
    assert g_stat(4.0, 1.0) == pytest.approx(2 * math.sqrt(2.5) - 3.0)
    assert g_stat(1.0, 0.0) == pytest.approx(math.sqrt(2.0) - 1.0)
    assert g_stat(0.0, 0.0) == 0.0


def test_g_stat_rejects_negative():
    with pytest.raises(ValueError, match="nonnegative"):
        g_stat(-0.1, 1.0)


@given(
    st.floats(min_value=0.0, max_value=100.0),
    st.floats(min_value=0.0, max_value=100.0),
)
def test_g_stat_properties(x1, x2):
    g = g_stat(x1, x2)
    assert g >= -1e-12  # concavity of sqrt makes g nonnegative
    assert g == pytest.approx(g_stat(x2, x1), abs=1e-12)  # symmetric
    assert g_stat(x1, x1) == 0.0  # vanishes iff both sides agree


def test_g_stat_scales_like_sqrt():
    assert g_stat(8.0, 2.0) == pytest.approx(2.0 * g_stat(2.0, 0.5))


def test_g_naive_is_difference():
    assert g_naive(3.0, 1.0) == 2.0
    assert g_naive(1.0, 3.0) == -2.0


# ---- Configuration and filtering ----

def test_test_config_validation():
    with pytest.raises(ValueError):
        TestConfig(level=0.0)
    with pytest.raises(ValueError):
        TestConfig(variant="bonferroni")
    with pytest.raises(ValueError):
        TestConfig(normalization="other")
    with pytest.raises(ValueError):
        TestConfig(a_min_jump=-1.0)


def test_filter_events_time_range(jump_events):
    assert filter_events(jump_events, None) == jump_events
    early = filter_events(jump_events, (0.0, 0.5))
    assert all(e.time <= 0.5 for e in early)
    assert len(early) < len(jump_events)
    with pytest.raises(ValueError, match="lo < hi"):
        filter_events(jump_events, (0.7, 0.2))


def test_time_range_flows_through_test(jumpy_spot, jump_events):
    # Restricting to the first half keeps only the bin-6 jump.
    report = chi2_test(
        jumpy_spot, jump_events, TestConfig(time_range=(0.0, 0.5))
    )
    assert report.n_jumps == 1
    assert report.per_jump[0].event.bin_start == JUMP_BINS[0]


# ---- chi2 test, fisher normalization ----

def test_chi2_test_on_planted_jumps(jumpy_spot, jump_events):
    report = chi2_test(jumpy_spot, jump_events, TestConfig())
    assert report.n_jumps == len(JUMP_BINS)
    assert report.dof == report.n_jumps
    assert report.p_value == pytest.approx(
        1.0 - chi2_cdf(report.statistic, report.dof)
    )
    assert report.reject == (
        report.statistic > chi2_upper_quantile(0.05, report.dof)
    )
    # Constant volatility on both sides of a pure price jump: do not expect
    # an extreme statistic.
    assert report.statistic < 25.0


def test_chi2_statistic_matches_manual_recomputation(jumpy_spot, jump_events):
    report = chi2_test(jumpy_spot, jump_events, TestConfig())
    total = 0.0
    for r in report.per_jump:
        e = r.event
        cr = max(float(jumpy_spot.c_right[e.bin_end]), 0.0)
        cl = max(float(jumpy_spot.c_left[e.bin_start]), 0.0)
        cbar = 0.5 * (cr + cl)
        denom = (
            jumpy_spot.var_scale_right[e.bin_end] / jumpy_spot.fisher_right[e.bin_end]
            + jumpy_spot.var_scale_left[e.bin_start] / jumpy_spot.fisher_left[e.bin_start]
        )
        total += 16.0 * cbar**1.5 * g_stat(cr, cl) / denom
    assert report.statistic == pytest.approx(total, rel=1e-12)


def test_fisher_statistic_scale_invariant():
    # The fisher normalization cancels any rescaling of the data: c scales
    # by alpha^2, the Fisher information by alpha^-4, and g by alpha.
    from cojump.cotest import _fisher_statistic, _JumpSides
    from cojump.jumps import JumpEvent

    ev = JumpEvent(bin_start=5, bin_end=5, time=0.25, zeta_value=1.0,
                   threshold_used=0.1)
    base = dict(event=ev, var_scale_right=1 / 3, var_scale_left=1 / 3)
    s1 = _JumpSides(c_right=1.1, c_left=0.9, fisher_right=6.0, fisher_left=5.0,
                    **base)
    alpha_sq = 0.25
    s2 = _JumpSides(
        c_right=1.1 * alpha_sq, c_left=0.9 * alpha_sq,
        fisher_right=6.0 / alpha_sq**2, fisher_left=5.0 / alpha_sq**2, **base
    )
    assert _fisher_statistic(s2) == pytest.approx(_fisher_statistic(s1), rel=1e-12)


def test_chi2_rate_normalization(jumpy_spot, jump_events):
    report = chi2_test(
        jumpy_spot, jump_events, TestConfig(normalization="rate")
    )
    factor = (
        math.log(jumpy_spot.grid.n)
        * jumpy_spot.config.r_inv
        / math.sqrt(jumpy_spot.eta_hat)
    )
    assert report.normalization_factor == pytest.approx(factor)
    assert report.statistic == pytest.approx(
        factor * t0_statistic(jumpy_spot, jump_events), rel=1e-12
    )


# ---- Skipping rules ----

def test_edge_jump_is_skipped(edge_jump_spot, spot_cfg):
    events = group(detect(edge_jump_spot), spot_cfg.r_inv)
    report = chi2_test(edge_jump_spot, events, TestConfig())
    edge_skips = [s for s in report.skipped if "outside tested range" in s]
    assert edge_skips
    assert report.n_jumps == 0
    assert report.p_value == 1.0 and not report.reject


def test_min_jump_size_screens_events(jumpy_spot, jump_events):
    report = chi2_test(jumpy_spot, jump_events, TestConfig(a_min_jump=10.0))
    assert report.n_jumps == 0
    assert report.statistic == 0.0 and report.dof == 0


def test_no_jump_report(const_spot):
    report = run_test(const_spot, [], TestConfig())
    assert report.n_jumps == 0
    assert report.p_value == 1.0
    assert not report.reject


# ---- naive test ----

def test_naive_statistic_matches_manual_recomputation(jumpy_spot, jump_events):
    report = naive_test(jumpy_spot, jump_events, TestConfig(variant="naive"))
    t0 = sum(
        jumpy_spot.c_right[e.bin_end] - jumpy_spot.c_left[e.bin_start]
        for e in jump_events
    )
    scale = math.sqrt(
        2.0
        * sum(
            jumpy_spot.var_scale_right[e.bin_end]
            / jumpy_spot.fisher_right[e.bin_end]
            for e in jump_events
        )
    )
    assert report.statistic == pytest.approx(t0 / scale, rel=1e-12)
    # Two-sided Gaussian p-value.
    assert 0.0 <= report.p_value <= 1.0
    assert report.reject == (report.p_value < 0.05)


# ---- multiple test (Sidak) ----

def test_multiple_test_sidak_correction(jumpy_spot, jump_events):
    chi2 = chi2_test(jumpy_spot, jump_events, TestConfig())
    mult = multiple_test(jumpy_spot, jump_events, TestConfig(variant="multiple"))
    assert mult.n_jumps == 2
    per_level = 1.0 - (1.0 - 0.05) ** 0.5
    assert per_level == pytest.approx(0.025320565519103666)
    crit = chi2_upper_quantile(per_level, 1)
    # Per-jump statistics agree with the chi2 variant's summands; the global
    # statistic is their maximum, rejection is any per-jump exceedance.
    assert mult.statistic == pytest.approx(
        max(r.statistic for r in mult.per_jump)
    )
    assert sum(r.statistic for r in mult.per_jump) == pytest.approx(
        chi2.statistic, rel=1e-12
    )
    assert mult.reject == any(r.statistic > crit for r in mult.per_jump)
    for r in mult.per_jump:
        assert r.p_value == pytest.approx(1.0 - chi2_cdf(r.statistic, 1))


def test_multiple_equals_chi2_for_single_jump(jumpy_spot, jump_events):
    one = [jump_events[0]]
    chi2 = chi2_test(jumpy_spot, one, TestConfig())
    mult = multiple_test(jumpy_spot, one, TestConfig(variant="multiple"))
    assert mult.statistic == pytest.approx(chi2.statistic, rel=1e-12)
    # With N = 1 the Sidak level is the nominal level: same decision.
    assert mult.reject == chi2.reject


# ---- Dispatcher and report serialization ----

def test_run_test_dispatch(jumpy_spot, jump_events):
    for variant in ("chi2", "naive", "multiple"):
        report = run_test(jumpy_spot, jump_events, TestConfig(variant=variant))
        assert report.variant == variant


def test_report_to_dict_round_trip(jumpy_spot, jump_events):
    report = chi2_test(jumpy_spot, jump_events, TestConfig())
    d = report.to_dict()
    assert d["n_jumps"] == report.n_jumps
    assert d["statistic"] == report.statistic
    assert len(d["per_jump"]) == report.n_jumps
    assert d["per_jump"][0]["bin_start"] == report.per_jump[0].event.bin_start


# ---- Power sanity on a genuine volatility shift ----

def test_naive_test_detects_volatility_shift(grid, spot_cfg):
    # Price jump in the middle of bin 9 followed by a volatility jump from
    # 1 to 4 at the bin-10 boundary: the right spot estimate should exceed
    # the left and the naive test should see it.
    rng = np.random.default_rng(21)
    n = grid.n
    sigma = np.where(np.arange(n) < n // 2, 1.0, 2.0)
    dy = sigma * rng.standard_normal(n) / math.sqrt(n)
    y = np.concatenate(([0.0], np.cumsum(dy)))
    y[2850:] += 1.0  # mid-bin price jump; sine weights peak there
    # A higher cut-off keeps the per-bin estimation noise well below the
    # volatility shift of size 3.
    spot = spot_path(NoisyPath(y), grid, spot_cfg, SpectralConfig(40, 20))
    events = group(detect(spot), spot_cfg.r_inv)
    assert any(e.bin_start <= 9 <= e.bin_end for e in events)
    report = naive_test(spot, events, TestConfig(variant="naive"))
    assert report.statistic > 2.0
    assert report.reject
