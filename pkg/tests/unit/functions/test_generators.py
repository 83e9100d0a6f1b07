import numpy as np
import pytest
from pytvspec.functions import generators, spectral
from pytvspec.support.data import GarchParams, SpectrumCurve
from pytvspec.support.utils.exceptions import InvalidInputError


def test_reference_regime_spec() -> None:
    """Test the regime layout 1, 2, 1 with breaks at T/5 and 3T/5."""
    spec = generators.reference_regime_spec(5000)
    assert list(spec.cutpoints) == [1000, 3000, 5000]
    assert [r.sigma2_uc for r in spec.regimes] == pytest.approx([1.25, 2.0])
    path = spec.regime_path()
    assert path[999] == 0 and path[1000] == 1 and path[3000] == 0


def test_simulate_garch_is_seeded() -> None:
    """Test that simulate_garch depends only on the generator state."""
    params = generators.reference_garch_params()
    y1 = generators.simulate_garch(params, 200, np.random.default_rng(3))
    y2 = generators.simulate_garch(params, 200, np.random.default_rng(3))
    np.testing.assert_array_equal(y1.values, y2.values)
    assert y1.origin_label == "garch"


def test_simulate_garch_first_step() -> None:
    """Test that the recursion starts at the unconditional variance."""
    params = GarchParams(mu=0.5, alpha0=1.0, alpha1=0.1, beta1=0.1)
    y = generators.simulate_garch(params, 2, np.random.default_rng(8)).values
    z = np.random.default_rng(8).standard_normal(2)
    assert y[0] == pytest.approx(0.5 + np.sqrt(1.25) * z[0])
    s2 = 1.0 + 0.1 * (y[0] - 0.5) ** 2 + 0.1 * 1.25
    assert y[1] == pytest.approx(0.5 + np.sqrt(s2) * z[1])


@pytest.mark.slow
def test_simulate_garch_variance() -> None:
    """Test the sample variance of a long GARCH series."""
    params = generators.reference_garch_params()
    y = generators.simulate_garch(params, 200_000, np.random.default_rng(0)).values
    assert np.var(y) == pytest.approx(params.sigma2_uc, rel=0.03)


def test_simulate_garch_exc() -> None:
    """Test simulate_garch with a bad length and nonstationary parameters."""
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidInputError):
        generators.simulate_garch(generators.reference_garch_params(), 0, rng)
    params = GarchParams.model_construct(mu=0.0, alpha0=1.0, alpha1=0.6, beta1=0.5)
    with pytest.raises(InvalidInputError) as excinfo:
        generators.simulate_garch(params, 10, rng)
    assert "stationarity" in str(excinfo.value)


@pytest.mark.parametrize("reset", [False, True])
def test_simulate_regime(reset: bool) -> None:
    """Test the regime series and its flat truth."""
    spec = generators.reference_regime_spec(500)
    series, truth = generators.simulate_regime(
        spec, np.random.default_rng(1), reset_at_boundaries=reset
    )
    assert series.n == 500
    assert truth.power.shape == (500, 101)
    np.testing.assert_allclose(truth.power[:100], 1.25)
    np.testing.assert_allclose(truth.power[100:300], 2.0)
    np.testing.assert_allclose(truth.power[300:], 1.25)


def test_simulate_regime_reset_differs_only_after_boundary() -> None:
    """Test that the reset switch changes the path from the first boundary on."""
    spec = generators.reference_regime_spec(500)
    carried, _ = generators.simulate_regime(spec, np.random.default_rng(2))
    reset, _ = generators.simulate_regime(
        spec, np.random.default_rng(2), reset_at_boundaries=True
    )
    np.testing.assert_array_equal(carried.values[:100], reset.values[:100])
    assert carried.values[100] != reset.values[100]


def test_synthesize_from_spectrum_shape_and_mean() -> None:
    """Test the synthesized series for odd and even lengths."""
    curve = spectral.garch_flat_spectrum(1.0)
    for n in (101, 128):
        series = generators.synthesize_from_spectrum(curve, n, np.random.default_rng(n))
        assert series.n == n
        assert series.values.sum() == pytest.approx(0.0, abs=1e-9)
    kept = generators.synthesize_from_spectrum(
        curve, 64, np.random.default_rng(0), zero_dc=False
    )
    assert abs(kept.values.sum()) > 1e-9


@pytest.mark.slow
def test_synthesize_unit_spectrum_variance_and_periodogram() -> None:
    """Test that f = 1 gives unit variance and unit mean periodogram."""
    curve = spectral.garch_flat_spectrum(1.0)
    rng = np.random.default_rng(11)
    variances, ordinates = [], []
    for _ in range(2000):
        y = generators.synthesize_from_spectrum(curve, 1024, rng, zero_dc=False).values
        variances.append(np.mean(y**2))
        ordinates.append(spectral.periodogram(y).ordinates[1:-1].mean())
    assert np.mean(variances) == pytest.approx(1.0, rel=0.03)
    assert np.mean(ordinates) == pytest.approx(1.0, rel=0.05)


@pytest.mark.slow
def test_synthesize_ar2_autocorrelation() -> None:
    """Test the lag-1 autocorrelation of a synthesized AR(2) spectrum."""
    curve = spectral.ar2_spectrum(0.9, -0.2, 1.0, np.linspace(0, 0.5, 2001))
    rng = np.random.default_rng(12)
    acf = []
    for _ in range(200):
        y = generators.synthesize_from_spectrum(curve, 1024, rng).values
        y = y - y.mean()
        acf.append(np.sum(y[1:] * y[:-1]) / np.sum(y * y))
    rho1, _ = spectral.ar2_autocorrelation(0.9, -0.2)
    assert np.mean(acf) == pytest.approx(rho1, abs=0.02)


def test_synthesize_from_spectrum_exc() -> None:
    """Test synthesize_from_spectrum with a short length."""
    with pytest.raises(InvalidInputError):
        generators.synthesize_from_spectrum(
            SpectrumCurve(freqs=np.array([0.0, 0.5]), power=np.ones(2)),
            3,
            np.random.default_rng(0),
        )


def test_synthesize_piecewise_and_truth() -> None:
    """Test the piecewise fixture, its series and its truth."""
    ps = generators.reference_piecewise_spectrum(1000, n_freq=51)
    assert ps.segment_lengths == [300, 400, 300]
    series = generators.synthesize_piecewise(ps, np.random.default_rng(0))
    assert series.n == 1000
    truth = generators.piecewise_truth(ps, spectral.default_freq_grid(51))
    np.testing.assert_allclose(truth.power[0], ps.curves[0].power)
    np.testing.assert_allclose(truth.power[300], ps.curves[1].power)
    np.testing.assert_allclose(truth.power[-1], ps.curves[2].power)


def test_variance_break_series() -> None:
    """Test the variance-break fixture and its truth."""
    series, truth = generators.variance_break_series(
        np.random.default_rng(0), freq_grid=spectral.default_freq_grid(11)
    )
    assert series.n == 1000
    assert truth.power.shape == (1000, 11)
    np.testing.assert_allclose(truth.power[:500], 1.0)
    np.testing.assert_allclose(truth.power[500:], 9.0)
    with pytest.raises(InvalidInputError):
        generators.variance_break_series(np.random.default_rng(0), T=100, at=100)
