"""CSV/JSON input and output.

Tick CSV contract: header `timestamp,price`; timestamp is decimal seconds
or an ISO-8601 datetime; price is a positive level (log transform happens
inside the library).  Reports are JSON with a schema_version field; plot
data is two-column CSV.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime
from pathlib import Path

import numpy as np

from .obs import TickSeries
from .simulate import ScenarioConfig, SimulatedPath
from .spotvol import SpotVolPath, confidence_interval

SCHEMA_VERSION = 1


class DataError(Exception):
    """Malformed input data (maps to CLI exit code 2)."""


def _parse_timestamp(raw: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(raw).timestamp()
    except ValueError:
        raise DataError(
            f"line {line_no}: timestamp {raw!r} is neither seconds nor ISO-8601"
        ) from None


def read_ticks(path: str | Path) -> TickSeries:
    """Read a `timestamp,price` CSV into a TickSeries."""
    timestamps, prices = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != [
            "timestamp",
            "price",
        ]:
            raise DataError(f"{path}: expected header 'timestamp,price'")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise DataError(f"line {line_no}: expected 2 columns, got {len(row)}")
            timestamps.append(_parse_timestamp(row[0].strip(), line_no))
            try:
                prices.append(float(row[1]))
            except ValueError:
                raise DataError(f"line {line_no}: bad price {row[1]!r}") from None
    try:
        return TickSeries(np.array(timestamps), np.array(prices))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_spot_csv(path: str | Path, spot: SpotVolPath, level: float = 0.95) -> None:
    """Per-bin spot path: estimates, confidence band and truncation flag."""
    h = spot.grid.h
    combined = spot.combined
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["bin", "time", "c_right", "c_left", "combined", "ci_low", "ci_high",
             "truncated"]
        )
        for k in range(spot.grid.h_inv):
            fisher = spot.fisher_right[k]
            if math.isnan(fisher):
                fisher = spot.fisher_left[k]
            if math.isnan(combined[k]) or math.isnan(fisher):
                lo = hi = math.nan
            else:
                lo, hi = confidence_interval(
                    float(combined[k]), float(fisher), spot.config.r_inv, level
                )
            writer.writerow(
                [k, f"{k * h:.10g}", _fmt(spot.c_right[k]), _fmt(spot.c_left[k]),
                 _fmt(combined[k]), _fmt(lo), _fmt(hi), int(spot.truncated[k])]
            )


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else f"{x:.12g}"


def write_report_json(path: str | Path, payload: dict) -> None:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_plot_csv(
    path: str | Path, xs, ys, header: tuple[str, str] = ("x", "y")
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for x, y in zip(xs, ys):
            writer.writerow([f"{x:.12g}", f"{y:.12g}"])


def write_sim_csv(path: str | Path, sim: SimulatedPath) -> None:
    """Export a simulated path in the tick CSV format the CLI ingests."""
    n = sim.path.n
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "price"])
        for i, y in enumerate(sim.path.y):
            writer.writerow([f"{i / n:.12g}", f"{math.exp(y):.17g}"])


def write_truth_json(path: str | Path, sim: SimulatedPath, cfg: ScenarioConfig) -> None:
    """Ground-truth sidecar for simulator output, for oracles and debugging."""
    payload = {
        "config": {k: v for k, v in cfg.__dict__.items()},
        "price_jumps": [[t, s] for t, s in sim.price_jumps],
        "vol_jumps": [[t, s] for t, s in sim.vol_jumps],
        "n": sim.path.n,
    }
    write_report_json(path, payload)
