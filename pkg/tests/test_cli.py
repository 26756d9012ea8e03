"""End-to-end tests for the command-line front end."""

from __future__ import annotations

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cojump import BinGrid, SpectralConfig, SpotConfig, simulate, spot_path, table1_scenario
from cojump.cli import main, read_config_file
from cojump.io import DataError, read_ticks
from cojump.obs import from_ticks


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--scenario", "V", "--seed", "1",
                 "--out", str(d)]) == 0
    return d


# ---- simulate ----

def test_simulate_writes_path_and_truth(sim_dir):
    assert (sim_dir / "path.csv").exists()
    truth = json.loads((sim_dir / "truth.json").read_text())
    assert truth["n"] == 5000
    assert truth["config"]["lam"] == 2


def test_simulate_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert main(["simulate", "--scenario", "I", "--seed", "1",
                     "--out", str(d)]) == 0
    assert (d1 / "path.csv").read_bytes() == (d2 / "path.csv").read_bytes()
    assert (d1 / "truth.json").read_bytes() == (d2 / "truth.json").read_bytes()


def test_simulate_unknown_scenario_is_usage_error(tmp_path):
    assert main(["simulate", "--scenario", "XL", "--out", str(tmp_path)]) == 1


# ---- estimate ----

def test_estimate_outputs(sim_dir, tmp_path):
    out = tmp_path / "est"
    assert main(["estimate", str(sim_dir / "path.csv"), "--out", str(out),
                 "--bins", "10", "--freqs", "20", "--pilot-freqs", "10",
                 "--window", "3"]) == 0
    assert (out / "spot.csv").exists()
    assert (out / "spot.png").stat().st_size > 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n"] == 5000
    assert summary["config"]["bins"] == 10
    assert summary["eta_hat"] > 0
    # Output row count equals the number of bins (plus a header line).
    assert len((out / "spot.csv").read_text().splitlines()) == 11


def test_estimate_matches_in_process_pipeline(sim_dir, tmp_path):
    # Round trip: the CLI on exported data reproduces the library result.
    out = tmp_path / "est"
    assert main(["estimate", str(sim_dir / "path.csv"), "--out", str(out),
                 "--bins", "10", "--freqs", "20", "--pilot-freqs", "10",
                 "--window", "3"]) == 0
    path = from_ticks(read_ticks(sim_dir / "path.csv"))
    spot = spot_path(path, BinGrid(10, path.n), SpotConfig(r_inv=3),
                     SpectralConfig(20, 10))
    summary = json.loads((out / "summary.json").read_text())
    assert summary["eta_hat"] == pytest.approx(spot.eta_hat, rel=1e-12)
    assert summary["integrated_vol"] == pytest.approx(
        spot.integrated_vol, rel=1e-12
    )


def test_estimate_constant_price_gives_bias_correction_only(tmp_path):
    p = tmp_path / "flat.csv"
    rows = "".join(f"{i},100.0\n" for i in range(400))
    p.write_text("timestamp,price" + "\n" + rows)
    out = tmp_path / "est"
    assert main(["estimate", str(p), "--out", str(out), "--bins", "4",
                 "--freqs", "10", "--pilot-freqs", "5", "--window", "2"]) == 0
    # Zero returns: eta_hat = 0, every spot estimate is exactly 0.
    summary = json.loads((out / "summary.json").read_text())
    assert summary["eta_hat"] == 0.0
    assert summary["integrated_vol"] == 0.0


def test_estimate_missing_file_is_data_error(tmp_path):
    assert main(["estimate", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path)]) == 2


def test_estimate_too_few_observations_per_bin(tmp_path):
    p = tmp_path / "short.csv"
    rows = "".join(f"{i},{100 + 0.01 * (i % 7)}\n" for i in range(100))
    p.write_text("timestamp,price" + "\n" + rows)
    assert main(["estimate", str(p), "--out", str(tmp_path)]) == 2


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["test", str(tmp_path / "x.csv"), "--variant", "bogus"])
    assert exc.value.code == 1


def test_invalid_window_is_usage_error(sim_dir, tmp_path):
    # r_inv larger than half the bin count violates a library precondition.
    assert main(["estimate", str(sim_dir / "path.csv"), "--out", str(tmp_path),
                 "--bins", "10", "--freqs", "20", "--pilot-freqs", "10",
                 "--window", "8"]) == 1


# ---- test ----

def test_test_subcommand_outputs(sim_dir, tmp_path):
    out = tmp_path / "t"
    assert main(["test", str(sim_dir / "path.csv"), "--out", str(out),
                 "--bins", "10", "--freqs", "20", "--pilot-freqs", "10",
                 "--window", "3"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["variant"] == "chi2"
    assert report["n_jumps"] == len(report["per_jump"])
    assert (out / "spot.csv").exists()
    assert (out / "spot.png").stat().st_size > 0


def test_test_subcommand_deterministic(sim_dir, tmp_path):
    outs = []
    for name in ("t1", "t2"):
        out = tmp_path / name
        assert main(["test", str(sim_dir / "path.csv"), "--out", str(out),
                     "--bins", "10", "--freqs", "20", "--pilot-freqs", "10",
                     "--window", "3"]) == 0
        report = json.loads((out / "report.json").read_text())
        report.pop("config")  # embeds the output directory
        outs.append(json.dumps(report, sort_keys=True))
    assert outs[0] == outs[1]


def test_test_no_jumps_is_success(tmp_path):
    # A pure noise path has nothing to truncate.
    rng = np.random.default_rng(5)
    p = tmp_path / "noise.csv"
    prices = 100.0 * np.exp(1e-4 * rng.standard_normal(2001).cumsum() / 45)
    p.write_text(
        "timestamp,price\n"
        + "".join(f"{i},{v:.12f}\n" for i, v in enumerate(prices))
    )
    out = tmp_path / "t"
    code = main(["test", str(p), "--out", str(out), "--bins", "8",
                 "--freqs", "12", "--pilot-freqs", "6", "--window", "3"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["reject"] in (True, False)


# ---- mc ----

def test_mc_subcommand_outputs(tmp_path):
    out = tmp_path / "mc"
    assert main(["mc", "--scenario", "V", "--runs", "4", "--seed", "2",
                 "--out", str(out)]) == 0
    report = json.loads((out / "mc_report.json").read_text())
    assert report["n_runs"] == 4
    assert len(report["records"]) == 4
    assert report["scenario"] == "V"
    assert (out / "size_power.csv").exists()
    assert (out / "size_power.png").stat().st_size > 0


def test_mc_deterministic_across_runs_and_threads(tmp_path):
    payloads = []
    for name, threads in (("m1", "1"), ("m2", "1"), ("m3", "2")):
        out = tmp_path / name
        assert main(["mc", "--scenario", "V", "--runs", "4", "--seed", "2",
                     "--threads", threads, "--out", str(out)]) == 0
        report = json.loads((out / "mc_report.json").read_text())
        report.pop("config")  # embeds output directory and thread count
        payloads.append(json.dumps(report, sort_keys=True))
    assert payloads[0] == payloads[1] == payloads[2]


# ---- Config file ----

def test_read_config_file_coercion(tmp_path):
    p = tmp_path / "cfg"
    p.write_text(
        "bins = 10      # comment\n"
        "\n"
        "pilot-freqs = 5\n"
        "threshold = 'global'\n"
        "exclude-edges = true\n"
        "level = 0.9\n"
    )
    values = read_config_file(p)
    assert values == {
        "bins": 10, "pilot_freqs": 5, "threshold": "global",
        "exclude_edges": True, "level": 0.9,
    }
    p.write_text("not a key value line\n")
    with pytest.raises(DataError, match="key = value"):
        read_config_file(p)


def test_config_file_unknown_key_is_data_error(sim_dir, tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("not_a_flag = 1\n")
    assert main(["--config", str(cfg), "estimate", str(sim_dir / "path.csv"),
                 "--out", str(tmp_path / "est")]) == 2


def test_config_file_supplies_defaults(sim_dir, tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("bins = 10\nfreqs = 20\npilot-freqs = 10\nwindow = 3\n")
    out = tmp_path / "est"
    assert main(["--config", str(cfg), "estimate", str(sim_dir / "path.csv"),
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["bins"] == 10
    assert summary["config"]["window"] == 3
