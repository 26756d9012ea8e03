"""Tests for truncation-based jump detection and event grouping."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cojump import JumpEvent, detect, group
from conftest import JUMP_BINS


# ---- Detection on planted jumps ----

def test_detect_flags_planted_jumps(jumpy_spot):
    events = detect(jumpy_spot)
    bins = {e.bin_start for e in events}
    assert set(JUMP_BINS) <= bins
    for e in events:
        assert e.bin_start == e.bin_end
        assert not e.grouped
        assert abs(e.zeta_value) > e.threshold_used
        assert e.time == pytest.approx(e.bin_start * jumpy_spot.grid.h)


def test_detect_nothing_on_continuous_path(const_spot):
    assert detect(const_spot) == []


def test_detect_exclude_edges(edge_jump_spot):
    assert any(e.bin_start == 1 for e in detect(edge_jump_spot))
    # Bin 1 lies within the first r_inv = 3 bins and is dropped.
    assert not any(
        e.bin_start == 1 for e in detect(edge_jump_spot, exclude_edges=True)
    )


def test_detect_matches_truncation_flags(jumpy_spot):
    assert {e.bin_start for e in detect(jumpy_spot)} == set(
        np.flatnonzero(jumpy_spot.truncated).tolist()
    )


# ---- Event construction ----

def test_jump_event_rejects_inverted_range():
    with pytest.raises(ValueError, match="bin_end"):
        JumpEvent(bin_start=5, bin_end=4, time=0.5, zeta_value=1.0, threshold_used=0.1)


# ---- Grouping ----

def _ev(start, end=None, zeta=1.0):
    end = start if end is None else end
    return JumpEvent(
        bin_start=start, bin_end=end, time=start * 0.05, zeta_value=zeta,
        threshold_used=0.1,
    )


def test_group_merges_overlapping_windows():
    # Gap of 5 bins < 2 * r_inv = 6: the windows would overlap, so merge.
    merged = group([_ev(5, zeta=1.0), _ev(11, zeta=-2.0)], r_inv=3)
    assert len(merged) == 1
    assert (merged[0].bin_start, merged[0].bin_end) == (5, 11)
    assert merged[0].grouped
    # The merged event keeps the member with the largest |zeta|.
    assert merged[0].zeta_value == -2.0


def test_group_keeps_separated_events():
    # Gap of exactly 2 * r_inv = 6 bins: windows just fit, no merge.
    kept = group([_ev(5), _ev(12)], r_inv=3)
    assert len(kept) == 2
    assert not any(e.grouped for e in kept)


def test_group_chains_multiple_merges():
    merged = group([_ev(2, zeta=0.5), _ev(4, zeta=3.0), _ev(6, zeta=1.0)], r_inv=2)
    assert len(merged) == 1
    assert (merged[0].bin_start, merged[0].bin_end) == (2, 6)
    assert merged[0].zeta_value == 3.0


def test_group_idempotent(jumpy_spot, spot_cfg):
    events = group(detect(jumpy_spot), spot_cfg.r_inv)
    assert group(events, spot_cfg.r_inv) == events


def test_group_rejects_overlapping_inputs():
    with pytest.raises(ValueError, match="disjoint"):
        group([_ev(5, 8), _ev(7)], r_inv=2)


def test_group_validation_and_empty():
    assert group([], r_inv=3) == []
    with pytest.raises(ValueError):
        group([_ev(5)], r_inv=0)


@given(
    st.lists(st.integers(0, 200), min_size=1, max_size=30, unique=True),
    st.integers(1, 5),
)
@settings(max_examples=100, deadline=None)
def test_group_properties(bins, r_inv):
    events = [_ev(b) for b in sorted(bins)]
    merged = group(events, r_inv)
    # Output ranges are disjoint, ordered and separated by >= 2 * r_inv bins.
    for prev, nxt in zip(merged, merged[1:]):
        assert nxt.bin_start - prev.bin_end - 1 >= 2 * r_inv
    # Every input bin is covered by exactly one output event.
    for b in bins:
        assert sum(e.bin_start <= b <= e.bin_end for e in merged) == 1
    # Idempotence.
    assert group(merged, r_inv) == merged
