import pydantic
import pytest
from pytvspec.support.config import (
    RunConfig,
    RunManifest,
    load_config,
    parse_config_file,
    write_config_file,
)
from pytvspec.support.utils.exceptions import InvalidInputError


def test_parse_config_file(tmp_path) -> None:
    """Test comments, empty values and explicit none."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "# study\n"
        "T = 500   # length\n"
        "\n"
        "dgp = regime\n"
        "n_iter =\n"
        "date_col = none\n"
    )
    assert parse_config_file(path) == {"T": "500", "dgp": "regime", "date_col": None}


@pytest.mark.parametrize(
    "text, expected_msg",
    [
        ("T 500\n", "expected 'key = value'"),
        ("= 500\n", "empty key"),
        ("T = 1\nT = 2\n", "duplicate key 'T'"),
    ],
)
def test_parse_config_file_exc(tmp_path, text, expected_msg) -> None:
    """Test malformed configuration files."""
    path = tmp_path / "run.cfg"
    path.write_text(text)
    with pytest.raises(InvalidInputError) as excinfo:
        parse_config_file(path)
    assert expected_msg in str(excinfo.value)


def test_load_config_precedence(tmp_path) -> None:
    """Test preset, then file, then overrides."""
    path = tmp_path / "run.cfg"
    path.write_text("preset = paper\nT = 3000\nn_iter = 500\nn_burn = 100\n")
    cfg = load_config(path, {"n_iter": "800", "workers": None})
    assert cfg.preset == "paper"
    assert cfg.T == 3000
    assert cfg.n_iter == 800
    assert cfg.n_burn == 100
    assert cfg.n_replicates == 50
    assert cfg.workers == 1


def test_load_config_defaults() -> None:
    """Test the desk preset defaults."""
    cfg = load_config()
    assert (cfg.T, cfg.n_replicates, cfg.n_iter, cfg.n_burn) == (1024, 20, 6000, 2000)
    assert cfg.estimators_for("fit") == ["AD"]
    assert cfg.estimators_for("experiment") == ["AD", "G", "R"]


def test_estimators_field() -> None:
    """Test the comma-separated estimator list."""
    cfg = RunConfig(estimators="R, AD")
    assert cfg.estimators == ["AD", "R"]
    assert cfg.estimators_for("fit") == ["AD", "R"]
    with pytest.raises(pydantic.ValidationError):
        RunConfig(estimators="AD,Q")
    with pytest.raises(pydantic.ValidationError):
        RunConfig(estimators="")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_iter": 100, "n_burn": 100},
        {"T": 40},
        {"input": "missing.csv"},
        {"master_seed": -1},
        {"dgp": "arma"},
        {"unknown_key": 1},
    ],
)
def test_run_config_exc(kwargs) -> None:
    """Test configurations rejected before any computation."""
    with pytest.raises(pydantic.ValidationError):
        RunConfig(**kwargs)


def test_load_config_unknown_preset() -> None:
    """Test an unknown preset."""
    with pytest.raises(InvalidInputError):
        load_config(overrides={"preset": "huge"})


def test_config_file_round_trip(tmp_path) -> None:
    """Test that a resolved configuration reads back unchanged."""
    cfg = load_config(overrides={"estimators": "AD,G", "date_col": None, "T": 300})
    path = tmp_path / "config.resolved.txt"
    write_config_file(cfg, path)
    assert load_config(path) == cfg


def test_run_config_params() -> None:
    """Test the estimator run parameters built from a configuration."""
    cfg = RunConfig(n_iter=100, n_burn=10, J_max=7, n_freq=21, n_starts=2)
    ad = cfg.adaptspec_params(seed=123)
    assert (ad.n_iter, ad.n_burn, ad.J_max, ad.rng_seed, ad.n_freq) == (
        100,
        10,
        7,
        123,
        21,
    )
    ms = cfg.msgarch_params(seed=4)
    assert (ms.n_starts, ms.seed) == (2, 4)
    assert cfg.garch_params().n_freq == 21


def test_manifest_read_write(tmp_path) -> None:
    """Test writing a manifest and rebuilding its configuration."""
    cfg = RunConfig(T=300)
    manifest = RunManifest(
        command="simulate",
        config=cfg.model_dump(),
        master_seed=cfg.master_seed,
        versions={"python": "3"},
        created="2024-01-01T00:00:00+00:00",
    )
    path = tmp_path / "manifest.json"
    manifest.write(path)
    back = RunManifest.read(path)
    assert back == manifest
    assert back.nondeterministic_columns == ["wall_time_s"]
    assert back.run_config(output_dir="elsewhere").output_dir == "elsewhere"
    assert back.run_config().T == 300
    with pytest.raises(InvalidInputError):
        RunManifest.read(tmp_path / "missing.json")
