import numpy as np
import pytest
from pytvspec.functions import basis, partition, rjmcmc, spectral
from pytvspec.support.data import (
    ModelState,
    Partition,
    PartitionConfig,
    SamplerConfig,
    SegmentParams,
)
from pytvspec.support.utils.exceptions import InvalidInputError
from scipy import stats


@pytest.fixture(name="ctx")
def chain_context_fixture(white_noise) -> rjmcmc.ChainContext:
    """Chain context on 300 white-noise points, t_min=50, S=4, J_max=5."""
    return rjmcmc.ChainContext(
        white_noise,
        SamplerConfig(J_max=5, rng_seed=11),
        PartitionConfig(t_min=50, S=4),
    )


def _state(T: int, cutpoints, J: int = 5, tau2=1.0) -> ModelState:
    K = len(cutpoints) - 1
    rng = np.random.default_rng(K)
    tau2s = np.broadcast_to(tau2, (K,))
    return ModelState(
        partition=Partition(T=T, cutpoints=tuple(cutpoints)),
        segments=[
            SegmentParams(alpha0=0.1 * s, beta=0.3 * rng.standard_normal(J), tau2=t)
            for s, t in enumerate(tau2s)
        ],
    )


# -----------------------------------------------------------------------------
# conditional mode


def test_conditional_mode_closed_form(white_noise) -> None:
    """Test the intercept-only mode under a flat prior: log of the mean ordinate."""
    y = white_noise[:120]
    b = basis.build_basis(120, J_max=0)
    mode = rjmcmc.conditional_mode(y, 1.0, b, alpha_prior_var=np.inf)
    pg = spectral.segment_periodogram(y)
    w = spectral.whittle_weights(pg.freqs)
    assert mode.converged
    assert mode.mode[0] == pytest.approx(np.log(np.sum(w * pg.ordinates) / w.sum()))


def test_conditional_mode_hessian_matches_finite_differences(white_noise) -> None:
    """Test the negative Hessian at the mode against central differences."""
    y = white_noise[:100]
    b = basis.build_basis(100, J_max=3)
    tau2 = 0.5
    mode = rjmcmc.conditional_mode(y, tau2, b, tol=1e-10)
    assert mode.converged

    def objective(theta: np.ndarray) -> float:
        params = SegmentParams(alpha0=theta[0], beta=theta[1:], tau2=tau2)
        return rjmcmc.segment_loglik(y, params, b) + basis.log_prior_coefficients(
            theta, tau2
        )

    h = 1e-4
    d = mode.mode.size
    hess = np.empty((d, d))
    eye = np.eye(d) * h
    for i in range(d):
        for j in range(d):
            hess[i, j] = (
                objective(mode.mode + eye[i] + eye[j])
                - objective(mode.mode + eye[i] - eye[j])
                - objective(mode.mode - eye[i] + eye[j])
                + objective(mode.mode - eye[i] - eye[j])
            ) / (4 * h * h)
    np.testing.assert_allclose(-hess, mode.neg_hessian, rtol=1e-3, atol=1e-3)
    grad = [
        (objective(mode.mode + eye[i]) - objective(mode.mode - eye[i])) / (2 * h)
        for i in range(d)
    ]
    np.testing.assert_allclose(grad, 0.0, atol=1e-5)


def test_conditional_mode_exc(white_noise) -> None:
    """Test conditional_mode with a nonpositive tau2 and a mismatched basis."""
    b = basis.build_basis(100, J_max=3)
    with pytest.raises(InvalidInputError):
        rjmcmc.conditional_mode(white_noise[:100], 0.0, b)
    with pytest.raises(InvalidInputError) as excinfo:
        rjmcmc.conditional_mode(white_noise[:80], 1.0, b)
    assert "does not match" in str(excinfo.value)


# -----------------------------------------------------------------------------
# moves


def test_draw_tau2_inverse_gamma_mean() -> None:
    """Test the Gibbs draw of tau2 against the inverse-gamma mean."""
    beta = np.array([0.5, -1.0, 2.0, 0.0])
    rng = np.random.default_rng(5)
    draws = np.array([rjmcmc.draw_tau2(beta, rng) for _ in range(20000)])
    shape, scale = 1.0 + 2.0, 1.0 + 0.5 * float(beta @ beta)
    assert draws.mean() == pytest.approx(scale / (shape - 1.0), rel=0.03)


def test_move_probabilities(ctx) -> None:
    """Test renormalization over the feasible moves."""
    one = rjmcmc.move_probabilities(_state(300, (0, 300)), ctx)
    assert one["death"] == 0.0 and one["relocate"] == 0.0
    assert one["birth"] + one["within"] == pytest.approx(1.0)
    full = rjmcmc.move_probabilities(_state(300, (0, 50, 100, 150, 300)), ctx)
    assert full["birth"] == 0.0
    assert sum(full.values()) == pytest.approx(1.0)


def test_birth_death_reversible(ctx) -> None:
    """Test that a birth and the matching death have opposite log ratios."""
    state = _state(300, (0, 120, 300), tau2=[0.7, 1.3])
    rng = np.random.default_rng(0)
    birth = rjmcmc.propose_birth(state, ctx, rng, segment=2, cut=200, u=0.3)
    assert birth is not None
    assert birth.state.partition.cutpoints == (0, 120, 200, 300)
    death = rjmcmc.propose_death(
        birth.state, ctx, rng, cut_index=2, theta=state.segments[1].theta
    )
    assert death is not None
    assert death.state.partition.cutpoints == state.partition.cutpoints
    assert death.state.segments[1].tau2 == pytest.approx(1.3)
    assert birth.log_ratio + death.log_ratio == pytest.approx(0.0, abs=1e-8)


def test_relocate_reversible(ctx) -> None:
    """Test that a relocation and its reverse have opposite log ratios."""
    state = _state(300, (0, 120, 300))
    rng = np.random.default_rng(1)
    forward = rjmcmc.propose_relocate(state, ctx, rng, cut_index=1, position=165)
    assert forward is not None
    back = rjmcmc.propose_relocate(
        forward.state,
        ctx,
        rng,
        cut_index=1,
        position=120,
        thetas=(state.segments[0].theta, state.segments[1].theta),
    )
    assert back is not None
    assert forward.log_ratio + back.log_ratio == pytest.approx(0.0, abs=1e-8)


def test_propose_birth_exc(ctx) -> None:
    """Test propose_birth with a forced cut outside the segment."""
    state = _state(300, (0, 300))
    with pytest.raises(InvalidInputError):
        rjmcmc.propose_birth(state, ctx, np.random.default_rng(0), segment=1, cut=20)


def test_update_within_keeps_partition_dimensions(ctx) -> None:
    """Test that a within-model update keeps K and the basis sizes."""
    state = _state(300, (0, 150, 300))
    new = rjmcmc.update_within(state, ctx, np.random.default_rng(2))
    assert new.K == 2
    assert all(p.beta.size == 5 and p.tau2 > 0 for p in new.segments)
    assert ctx.acceptance["within"][0] == 2


# -----------------------------------------------------------------------------
# chain and summaries


def test_run_chain(white_noise, short_sampler_config) -> None:
    """Test the bookkeeping of a short chain."""
    draws = rjmcmc.run_chain(
        white_noise, short_sampler_config, PartitionConfig(t_min=50, S=4)
    )
    assert draws.n_retained == 40
    assert draws.spectrum_sum.shape == (300, 101)
    assert sum(draws.k_counts.values()) == 40
    assert len(draws.states) == 40
    assert draws.iterations[0] == 20
    mean = rjmcmc.posterior_mean_spectrum(draws)
    assert np.all(mean.power > 0)
    band = rjmcmc.posterior_band(draws, level=0.9)
    assert np.all(band.lower <= band.upper * (1 + 1e-12))
    assert np.all(band.variance >= 0)


def test_run_chain_traces_follow_first_segment(
    white_noise, short_sampler_config
) -> None:
    """Test that the scalar traces are taken from segment 1 of each retained state."""
    draws = rjmcmc.run_chain(
        white_noise, short_sampler_config, PartitionConfig(t_min=50, S=4)
    )
    first = [state.segments[0] for state in draws.states]
    np.testing.assert_array_equal(draws.alpha0_trace, [s.alpha0 for s in first])
    np.testing.assert_array_equal(draws.tau2_trace, [s.tau2 for s in first])
    assert list(draws.k_trace) == [state.K for state in draws.states]


def test_run_chain_is_reproducible(white_noise, short_sampler_config) -> None:
    """Test that a seeded chain is repeatable."""
    pcfg = PartitionConfig(t_min=50, S=4)
    d1 = rjmcmc.run_chain(white_noise, short_sampler_config, pcfg)
    d2 = rjmcmc.run_chain(white_noise, short_sampler_config, pcfg)
    np.testing.assert_array_equal(d1.spectrum_sum, d2.spectrum_sum)
    assert d1.cutpoint_trace == d2.cutpoint_trace


def test_run_chain_short_series_fixed_k(short_sampler_config) -> None:
    """Test that T < 2 t_min keeps one segment."""
    y = np.random.default_rng(9).standard_normal(80)
    draws = rjmcmc.run_chain(y, short_sampler_config, PartitionConfig(t_min=50, S=4))
    assert draws.k_counts == {1: 40}
    piecewise = rjmcmc.derive_piecewise_spectrum(draws)
    assert piecewise.segment_lengths == [80]


def test_run_chain_exc(short_sampler_config) -> None:
    """Test run_chain with a too short series and a bad output grid."""
    with pytest.raises(InvalidInputError):
        rjmcmc.run_chain(np.ones(10), short_sampler_config)
    with pytest.raises(InvalidInputError):
        rjmcmc.run_chain(
            np.random.default_rng(0).standard_normal(100),
            short_sampler_config,
            PartitionConfig(t_min=50),
            output_grid=np.array([0.3, 0.1]),
        )


def test_posterior_summaries_exc(white_noise) -> None:
    """Test the band without retained states."""
    cfg = SamplerConfig(n_iter=10, n_burn=5, J_max=3, keep_states=False)
    draws = rjmcmc.run_chain(white_noise, cfg, PartitionConfig(t_min=50, S=4))
    assert draws.states is None
    with pytest.raises(InvalidInputError):
        rjmcmc.posterior_band(draws)


def _prior_cell(K: int, interior, T: int, t_min: int, n_bins: int) -> int:
    """Cell of (K, binned first cutpoint); K=1 is a single cell."""
    if K == 1:
        return 0
    edges = np.linspace(t_min, T - (K - 1) * t_min + 1, n_bins + 1)
    b = int(np.searchsorted(edges, interior[0], side="right")) - 1
    return 1 + (K - 2) * n_bins + min(b, n_bins - 1)


@pytest.mark.slow
def test_prior_only_chain_matches_partition_prior() -> None:
    """Test the chain without likelihood against the enumerated partition prior.

    Draws are split into batches; the Pearson statistic is deflated by the
    between-batch dispersion so that autocorrelated draws are not over-counted.
    """
    T, t_min, S, n_bins, n_batches = 300, 50, 4, 5, 20
    pcfg = PartitionConfig(t_min=t_min, S=S)
    n_cells = 1 + (S - 1) * n_bins

    parts, probs = partition.prior_table(T, pcfg)
    expected = np.zeros(n_cells)
    for p, pr in zip(parts, probs):
        expected[_prior_cell(p.K, p.interior, T, t_min, n_bins)] += pr
    np.testing.assert_allclose(expected[0], 0.25, rtol=1e-12)

    cfg = SamplerConfig(
        n_iter=102_000, n_burn=2_000, thin=20, J_max=3, rng_seed=1, keep_states=False
    )
    draws = rjmcmc.run_chain(np.zeros(T), cfg, pcfg, use_likelihood=False)
    cells = np.array(
        [
            _prior_cell(int(k), c, T, t_min, n_bins)
            for k, c in zip(draws.k_trace, draws.cutpoint_trace)
        ]
    )
    assert cells.size == 5_000

    batches = cells.reshape(n_batches, -1)
    m = batches.shape[1]
    freqs = np.stack([np.bincount(b, minlength=n_cells) / m for b in batches])
    observed = freqs.mean(axis=0)
    dispersion = max(
        1.0,
        float(np.mean(m * freqs.var(axis=0, ddof=1) / (expected * (1 - expected)))),
    )
    statistic = cells.size * np.sum((observed - expected) ** 2 / expected) / dispersion
    assert stats.chi2.sf(statistic, n_cells - 1) > 0.01
    k_freq = [np.mean(draws.k_trace == k) for k in range(1, S + 1)]
    np.testing.assert_allclose(k_freq, 0.25, atol=0.03)


@pytest.mark.slow
def test_variance_break_recovery() -> None:
    """Test that a variance break at t=500 yields two segments around it."""
    from pytvspec.functions import generators

    series, _ = generators.variance_break_series(np.random.default_rng(123))
    cfg = SamplerConfig(n_iter=6000, n_burn=2000, J_max=10, rng_seed=4)
    draws = rjmcmc.run_chain(series, cfg, PartitionConfig(t_min=50, S=10))
    assert draws.mode_k() == 2
    assert draws.median_cutpoints(2)[0] == pytest.approx(500, abs=30)
