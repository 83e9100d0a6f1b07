"""Long statistical checks of the full pipeline; run with ``pytest -m slow``."""

import numpy as np
import pytest
from pytvspec import cli
from pytvspec.functions import garch, gen, generators, rjmcmc
from pytvspec.setup.experiment import run_experiment
from pytvspec.support.config import load_config
from pytvspec.support.data import PartitionConfig, SamplerConfig
from scipy import signal

pytestmark = pytest.mark.slow


def test_stationary_ar1_prefers_one_segment() -> None:
    """A stationary AR(1) keeps most posterior mass on K = 1."""
    rng = np.random.default_rng(21)
    y = signal.lfilter([1.0], [1.0, -0.5], rng.standard_normal(1024))
    draws = rjmcmc.run_chain(
        y, SamplerConfig(n_iter=4000, n_burn=1000, J_max=10, rng_seed=21)
    )
    assert draws.mode_k() == 1
    assert draws.k_posterior()[1] > 0.5


def test_white_noise_posterior_mean_is_flat() -> None:
    """Time-averaged posterior mean of unit white noise stays near 1."""
    y = np.random.default_rng(22).standard_normal(1024)
    draws = rjmcmc.run_chain(
        y,
        SamplerConfig(n_iter=3000, n_burn=1000, J_max=10, rng_seed=22),
        PartitionConfig(),
    )
    avg = rjmcmc.posterior_mean_spectrum(draws).power.mean(axis=0)
    assert np.all(avg > 0.8) and np.all(avg < 1.25)
    rates = draws.acceptance_rates()
    assert rates["within"] > 0.1


def test_fit_variance_break_power_ratio(tmp_path) -> None:
    """fit on the variance-break process separates the two variance levels."""
    out = tmp_path / "fit"
    status = cli.main(
        [
            "fit",
            "--dgp", "variance_break",
            "--seed", "3",
            "--out", str(out),
            "--set", "T=1000",
            "--set", "n_iter=4000",
            "--set", "n_burn=1000",
            "--set", "J_max=10",
            "--set", "keep_states=false",
        ]
    )  # fmt: skip
    assert status == 0
    spec, _, _ = gen.read_spectrogram(out / "spectrogram.csv")
    early = spec.power[:500].mean()
    late = spec.power[500:].mean()
    assert 6.0 <= late / early <= 12.0


def test_msgarch_recovers_regime_variances() -> None:
    """MS-GARCH on the regime layout finds both variance levels and the span."""
    spec = generators.reference_regime_spec()
    series, _ = generators.simulate_regime(spec, np.random.default_rng(31))
    fit = garch.fit_msgarch(series, seed=31)
    levels = [r.sigma2_uc for r in fit.params.regimes]
    assert levels[0] == pytest.approx(1.25, rel=0.25)
    assert levels[1] == pytest.approx(2.0, rel=0.25)
    peak = int(np.argmax(fit.probs.smoothed[:, 1])) + 1
    assert 1000 < peak <= 3000


def test_variance_break_recovered_across_seeds() -> None:
    """At least 18 of 20 seeded runs put the mode at K=2 with the cut near 500."""
    hits = 0
    for seed in range(20):
        series, _ = generators.variance_break_series(np.random.default_rng(100 + seed))
        draws = rjmcmc.run_chain(
            series,
            SamplerConfig(
                n_iter=6000, n_burn=2000, J_max=10, rng_seed=seed, keep_states=False
            ),
            PartitionConfig(t_min=50, S=10),
        )
        if draws.mode_k() == 2 and abs(draws.median_cutpoints(2)[0] - 500) <= 30:
            hits += 1
    assert hits >= 18


def test_garch_estimates_over_replicates() -> None:
    """Mean GARCH estimates over 20 series of length 10**4 sit near the truth."""
    truth = generators.reference_garch_params()
    estimates = []
    for rep in range(20):
        rng = gen.make_rng(5, rep, 0)
        fit = garch.fit_garch(generators.simulate_garch(truth, 10_000, rng))
        estimates.append((fit.params.alpha0, fit.params.alpha1, fit.params.beta1))
    alpha0, alpha1, beta1 = np.mean(estimates, axis=0)
    assert alpha0 == pytest.approx(1.0, abs=0.15)
    assert alpha1 == pytest.approx(0.1, abs=0.05)
    assert beta1 == pytest.approx(0.1, abs=0.15)


@pytest.fixture(scope="module")
def desk_cfg():
    return load_config(
        overrides={"preset": "desk", "keep_states": False, "master_seed": 7}
    )


def _median_skl(dgp: str, cfg) -> dict:
    reports = run_experiment(
        dgp, cfg.n_replicates, cfg.T, ["AD", "G", "R"], cfg, workers=4
    )
    return {
        code: np.median(
            [r.skl for r in reports if r.estimator == code and r.skl is not None]
        )
        for code in ("AD", "G", "R")
    }


def test_garch_process_ordering(desk_cfg) -> None:
    """On GARCH data the GARCH fit is best and AD beats the regime model."""
    median = _median_skl("garch", desk_cfg)
    assert median["G"] < median["AD"] < median["R"]


def test_regime_process_ordering(desk_cfg) -> None:
    """On regime data AD or the regime model beats the single GARCH."""
    median = _median_skl("regime", desk_cfg)
    assert min(median["R"], median["AD"]) < median["G"]


def test_piecewise_process_favours_adaptspec(desk_cfg) -> None:
    """On a piecewise spectrum the median SKL of AD beats both baselines."""
    median = _median_skl("piecewise_spectrum", desk_cfg)
    assert median["AD"] < median["G"]
    assert median["AD"] < median["R"]
