"""
Adaptive Piecewise Spectral Estimator Module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import logging
import typing

import numpy as np

from pytvspec.algorithms.base import BaseAlgorithm
from pytvspec.algorithms.data.result import AdaptSpecResult
from pytvspec.algorithms.data.run_params import AdaptSpecRunParams
from pytvspec.functions import plot, rjmcmc
from pytvspec.support.data import TimeSeries, TvSpectrum

logger = logging.getLogger(__name__)


class AdaptSpec(BaseAlgorithm[AdaptSpecRunParams, AdaptSpecResult, TimeSeries]):
    """
    Reversible-jump MCMC estimator of a piecewise-stationary spectrum.

    The series is split into an unknown number of segments, each with a smooth
    log spectrum under a Whittle likelihood. The estimate is the posterior mean of
    f(nu, t); when the retained states are kept the result also carries a pointwise
    credible band.
    """

    code = "AD"
    RunParamCls = AdaptSpecRunParams
    ResultCls = AdaptSpecResult

    def run(self) -> AdaptSpecResult:
        params = self.run_params
        draws = rjmcmc.run_chain(
            self.data,
            params.sampler_config(),
            params.partition_config(),
            self._freq_grid(None),
            progress=params.progress,
        )
        mean = rjmcmc.posterior_mean_spectrum(draws)
        lower = upper = variance = None
        if draws.states:
            band = rjmcmc.posterior_band(draws, level=params.band_level)
            lower, upper, variance = band.lower, band.upper, band.variance
        return AdaptSpecResult(
            spectrum=mean,
            draws=draws,
            lower=lower,
            upper=upper,
            variance=variance,
            piecewise=rjmcmc.derive_piecewise_spectrum(draws, mean),
        )

    def tv_spectrum(self, freq_grid: typing.Optional[np.ndarray] = None) -> TvSpectrum:
        """
        Posterior mean spectrum, re-evaluated from the kept states on a new grid.

        Raises
        ------
        ValueError
            If the estimator has not been run, or a different grid is requested and
            the states were not kept.
        """
        super().tv_spectrum(freq_grid)
        spec = self.result.spectrum
        if freq_grid is None or (
            np.size(freq_grid) == spec.freq_grid.size
            and np.allclose(freq_grid, spec.freq_grid, rtol=0, atol=1e-12)
        ):
            return spec
        draws = self.result.draws
        if not draws.states:
            raise ValueError(f"{self.name}: a new grid needs the kept states")
        grid = np.asarray(freq_grid, dtype=float)
        total = np.zeros((draws.T, grid.size))
        for state in draws.states:
            g = rjmcmc.segment_log_spectra(state, grid, draws.J_max, draws.t_min)
            total += np.repeat(np.exp(g), state.partition.lengths, axis=0)
        return TvSpectrum(
            time_grid=draws.time_grid, freq_grid=grid, power=total / len(draws.states)
        )

    def plot_tvspectrum(self, log: bool = True) -> typing.Any:
        """Spectrogram of the posterior mean with the median cutpoints at the mode K."""
        if self.result is None:
            raise ValueError("Run algorithm first")
        draws = self.result.draws
        K = draws.mode_k()
        cuts = draws.median_cutpoints(K) if K > 1 else ()
        return plot.plot_tvspectrum(
            self.result.spectrum,
            log=log,
            cutpoints=cuts,
            dates=self.data.dates if self.data is not None else None,
        )

    def plot_k_hist(self) -> typing.Any:
        if self.result is None:
            raise ValueError("Run algorithm first")
        return plot.plot_k_hist(self.result.draws.k_posterior())
