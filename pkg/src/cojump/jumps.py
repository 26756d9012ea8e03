"""Price-jump detection by truncation and grouping of adjacent detections.

A bin k flags a jump when h * |zeta_k^ad| exceeds its truncation threshold
(or a_min_jump^2 when that is larger).  Detections whose test windows would
overlap -- gaps of fewer than 2 * r_inv bins -- are merged into one grouped
event whose windows sit left of the first and right of the last member.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .spotvol import SpotVolPath


@dataclass(frozen=True)
class JumpEvent:
    """A detected price jump occupying bins bin_start..bin_end (inclusive)."""

    bin_start: int
    bin_end: int
    time: float
    zeta_value: float
    threshold_used: float
    grouped: bool = False

    def __post_init__(self) -> None:
        if self.bin_end < self.bin_start:
            raise ValueError("bin_end must be >= bin_start")


def detect(spot: SpotVolPath, exclude_edges: bool = False) -> list[JumpEvent]:
    """Flag bins whose h-scaled adaptive statistic exceeds the threshold.

    exclude_edges drops detections in the first and last r_inv bins,
    mirroring the exclusion of opening/closing periods in market data.
    """
    h = spot.grid.h
    r_inv = spot.config.r_inv
    a_sq = spot.config.a_min_jump**2
    events = []
    for k in np.flatnonzero(spot.truncated):
        k = int(k)
        if exclude_edges and (k < r_inv or k >= spot.grid.h_inv - r_inv):
            continue
        events.append(
            JumpEvent(
                bin_start=k,
                bin_end=k,
                time=k * h,
                zeta_value=float(h * spot.zeta_ad[k]),
                threshold_used=max(float(spot.thresholds[k]), a_sq),
            )
        )
    return events


def group(events: list[JumpEvent], r_inv: int) -> list[JumpEvent]:
    """Merge events whose windows would overlap (gap < 2 * r_inv bins).

    The merged event keeps the largest |zeta_value| and its threshold, spans
    all member bins, and is marked grouped.  Idempotent.
    """
    if r_inv < 1:
        raise ValueError("r_inv must be >= 1")
    if not events:
        return []
    events = sorted(events, key=lambda e: e.bin_start)
    merged = [events[0]]
    for ev in events[1:]:
        prev = merged[-1]
        if ev.bin_start <= prev.bin_end:
            raise ValueError("events must have disjoint bin ranges")
        gap = ev.bin_start - prev.bin_end - 1
        if gap < 2 * r_inv:
            lead = prev if abs(prev.zeta_value) >= abs(ev.zeta_value) else ev
            merged[-1] = replace(
                prev,
                bin_end=ev.bin_end,
                zeta_value=lead.zeta_value,
                threshold_used=lead.threshold_used,
                grouped=True,
            )
        else:
            merged.append(ev)
    return merged
