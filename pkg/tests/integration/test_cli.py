import json

import numpy as np
import pandas as pd
import pytest
from pytvspec import cli
from pytvspec.functions import gen

SMALL = [
    "--set", "T=200",
    "--set", "n_iter=40",
    "--set", "n_burn=10",
    "--set", "J_max=4",
    "--set", "n_freq=11",
]  # fmt: skip


def _manifest(out):
    return json.loads((out / "manifest.json").read_text())


def _prices(path, n=200):
    rng = np.random.default_rng(3)
    prices = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.01, n)))
    dates = pd.date_range("2015-01-01", periods=n).strftime("%Y-%m-%d")
    pd.DataFrame({"date": dates, "close": prices}).to_csv(path, index=False)


def test_simulate_is_reproducible(tmp_path) -> None:
    """Test that simulate writes the same series twice and records it."""
    for name in ("a", "b"):
        status = cli.main(
            ["simulate", "--seed", "5", "--out", str(tmp_path / name), *SMALL]
        )
        assert status == cli.EXIT_OK
    a, b = _manifest(tmp_path / "a"), _manifest(tmp_path / "b")
    assert a["status"] == "complete"
    assert a["command"] == "simulate"
    assert a["master_seed"] == 5
    assert {e["name"] for e in a["artifacts"]} == {"series.csv", "truth.csv"}
    assert a["artifacts"] == b["artifacts"]
    assert (tmp_path / "a" / "config.resolved.txt").is_file()
    assert not (tmp_path / "a" / "error.json").exists()


def test_simulate_seed_changes_series(tmp_path) -> None:
    """Test that another master seed gives another series."""
    cli.main(["simulate", "--seed", "5", "--out", str(tmp_path / "a"), *SMALL])
    cli.main(["simulate", "--seed", "6", "--out", str(tmp_path / "b"), *SMALL])
    a = gen.read_series(tmp_path / "a" / "series.csv").values
    b = gen.read_series(tmp_path / "b" / "series.csv").values
    assert not np.allclose(a, b)


def test_simulate_piecewise(tmp_path) -> None:
    """Test that the piecewise process also writes its spectrum."""
    out = tmp_path / "ps"
    args = ["simulate", "--dgp", "piecewise_spectrum", "--out", str(out), *SMALL]
    assert cli.main(args) == 0
    ps = gen.read_piecewise_spectrum(out / "piecewise_spectrum.csv")
    assert ps.segment_lengths == [60, 80, 60]


def test_fit_simulated_and_replay(tmp_path) -> None:
    """Test fit on a simulated series and a replay of its manifest."""
    out = tmp_path / "fit"
    assert cli.main(["fit", "--seed", "9", "--out", str(out), *SMALL]) == 0
    manifest = _manifest(out)
    names = {e["name"] for e in manifest["artifacts"]}
    assert {
        "series.csv",
        "truth.csv",
        "spectrogram.csv",
        "k_posterior.csv",
        "cutpoints.csv",
        "traces.csv",
        "draws.jsonl",
        "piecewise_spectrum.csv",
    } <= names
    spec, lower, upper = gen.read_spectrogram(out / "spectrogram.csv")
    assert spec.power.shape == (200, 11)
    assert np.all(upper >= lower)

    again = tmp_path / "replay"
    args = ["replay", "--manifest", str(out / "manifest.json"), "--out", str(again)]
    assert cli.main(args) == 0
    replayed = _manifest(again)
    assert replayed["artifacts"] == manifest["artifacts"]
    assert replayed["config"]["output_dir"] == str(again)


def test_fit_price_file(tmp_path) -> None:
    """Test fit on squared returns of a price file with both baselines."""
    prices = tmp_path / "prices.csv"
    _prices(prices)
    out = tmp_path / "fit"
    status = cli.main(
        [
            "fit",
            "--input", str(prices),
            "--squared",
            "--out", str(out),
            "--set", "estimators=AD,G,R",
            *SMALL,
        ]
    )  # fmt: skip
    assert status == cli.EXIT_OK
    manifest = _manifest(out)
    # MS-GARCH needs 500 observations
    assert manifest["status"] == "partial"
    assert any(note.startswith("R:") for note in manifest["notes"])
    names = {e["name"] for e in manifest["artifacts"]}
    assert {"spectrogram.csv", "spectrogram_G.csv", "garch_params.csv"} <= names
    assert "truth.csv" not in names
    series = gen.read_series(out / "series.csv")
    rs = gen.ingest_csv(prices)
    np.testing.assert_allclose(series.values, rs.squared)
    assert series.dates == rs.dates


def test_evaluate_simulated(tmp_path) -> None:
    """Test evaluate on one simulated replicate."""
    out = tmp_path / "ev"
    status = cli.main(
        ["evaluate", "--out", str(out), "--set", "estimators=G,AD", *SMALL]
    )
    assert status == 0
    reports = gen.read_reports(out / "reports.csv")
    assert [r.estimator for r in reports] == ["AD", "G"]
    assert all(r.skl >= 0 and r.mse >= 0 for r in reports)
    assert (out / "spectrogram_G.csv").is_file()


def test_evaluate_file_pair(tmp_path) -> None:
    """Test scoring a spectrogram file against a truth file."""
    sim = tmp_path / "sim"
    cli.main(["simulate", "--out", str(sim), *SMALL])
    truth = sim / "truth.csv"
    out = tmp_path / "ev"
    status = cli.main(
        [
            "evaluate",
            "--out", str(out),
            "--set", f"truth_file={truth}",
            "--set", f"estimate_file={truth}",
            *SMALL,
        ]
    )  # fmt: skip
    assert status == 0
    (report,) = gen.read_reports(out / "reports.csv")
    assert report.skl == pytest.approx(0.0, abs=1e-9)
    assert report.estimator == "truth"


def test_experiment(tmp_path) -> None:
    """Test the experiment command outputs."""
    out = tmp_path / "exp"
    status = cli.main(
        [
            "experiment",
            "--out", str(out),
            "--set", "n_replicates=2",
            "--set", "estimators=G",
            *SMALL,
        ]
    )  # fmt: skip
    assert status == 0
    summary = pd.read_csv(out / "summary.csv")
    assert summary["n"].tolist() == [2]
    assert _manifest(out)["status"] == "complete"


@pytest.mark.parametrize(
    "args",
    [
        ["simulate", "--set", "T=10"],
        ["simulate", "--set", "n_iters=10"],
        ["simulate", "--set", "T"],
        ["simulate", "--set", "preset=huge"],
        ["fit", "--input", "does_not_exist.csv"],
        ["evaluate", "--set", "estimators=AD,XYZ"],
    ],
)
def test_config_errors(tmp_path, args) -> None:
    """Test that invalid configurations exit with status 2 and an error record."""
    out = tmp_path / "bad"
    assert cli.main([*args, "--out", str(out)]) == cli.EXIT_CONFIG
    record = json.loads((out / "error.json").read_text())
    assert record["command"] == args[0]
    assert record["error_type"]
    assert not (out / "manifest.json").exists()


def test_runtime_error(tmp_path) -> None:
    """Test that a failure during computation exits with status 1."""
    prices = tmp_path / "prices.csv"
    _prices(prices, n=40)
    out = tmp_path / "bad"
    status = cli.main(["fit", "--input", str(prices), "--out", str(out), *SMALL])
    assert status == cli.EXIT_RUNTIME
    record = json.loads((out / "error.json").read_text())
    assert record["error_type"] == "InvalidInputError"
    assert _manifest(out)["status"] == "failed"


def test_replay_bad_manifest(tmp_path) -> None:
    """Test replay of a manifest that cannot be read."""
    bad = tmp_path / "manifest.json"
    bad.write_text("{not json")
    out = tmp_path / "replay"
    assert cli.main(["replay", "--manifest", str(bad), "--out", str(out)]) == 2
    assert (out / "error.json").is_file()
