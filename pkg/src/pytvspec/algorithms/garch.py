"""
Parametric Volatility Estimators Module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import logging
import typing

import numpy as np

from pytvspec.algorithms.base import BaseAlgorithm
from pytvspec.algorithms.data.result import GarchResult, MsGarchResult
from pytvspec.algorithms.data.run_params import GarchRunParams, MsGarchRunParams
from pytvspec.functions import garch, plot
from pytvspec.support.data import TimeSeries, TvSpectrum

logger = logging.getLogger(__name__)


# =============================================================================
# GARCH(1,1)
# =============================================================================
class GARCH(BaseAlgorithm[GarchRunParams, GarchResult, TimeSeries]):
    """
    Gaussian GARCH(1,1) fitted by quasi-maximum likelihood.

    Returns are serially uncorrelated under the model, so the implied spectrum is
    flat at the unconditional variance at every time point.
    """

    code = "G"
    RunParamCls = GarchRunParams
    ResultCls = GarchResult

    def run(self) -> GarchResult:
        fit = garch.fit_garch(
            self.data, max_eval=self.run_params.max_eval, tol=self.run_params.tol
        )
        spectrum = garch.garch_implied_tvspectrum(
            fit.params, self.data.n, self._freq_grid(None)
        )
        return GarchResult(
            spectrum=spectrum,
            params=fit.params,
            loglik=fit.loglik,
            converged=fit.converged,
        )

    def tv_spectrum(self, freq_grid: typing.Optional[np.ndarray] = None) -> TvSpectrum:
        super().tv_spectrum(freq_grid)
        return garch.garch_implied_tvspectrum(
            self.result.params, self.data.n, self._freq_grid(freq_grid)
        )


# =============================================================================
# MARKOV-SWITCHING GARCH
# =============================================================================
class MSGARCH(BaseAlgorithm[MsGarchRunParams, MsGarchResult, TimeSeries]):
    """
    Markov-switching GARCH(1,1) with smoothed regime probabilities.

    The implied spectrum at time t mixes the regimes' unconditional variances with
    the smoothed probabilities of each regime.
    """

    code = "R"
    RunParamCls = MsGarchRunParams
    ResultCls = MsGarchResult

    def run(self) -> MsGarchResult:
        p = self.run_params
        fit = garch.fit_msgarch(
            self.data,
            p.n_regimes,
            n_starts=p.n_starts,
            seed=p.seed,
            variance_carry=p.variance_carry,
            max_eval=p.max_eval,
            screen_eval=p.screen_eval,
            tol=p.tol,
        )
        spectrum = garch.msgarch_implied_tvspectrum(
            fit.params, fit.probs, self._freq_grid(None)
        )
        return MsGarchResult(
            spectrum=spectrum,
            params=fit.params,
            probs=fit.probs,
            loglik=fit.loglik,
            converged=fit.converged,
        )

    def tv_spectrum(self, freq_grid: typing.Optional[np.ndarray] = None) -> TvSpectrum:
        super().tv_spectrum(freq_grid)
        return garch.msgarch_implied_tvspectrum(
            self.result.params, self.result.probs, self._freq_grid(freq_grid)
        )

    def plot_regime_probs(
        self, regime: typing.Optional[int] = None, **kwargs: typing.Any
    ) -> typing.Any:
        """Smoothed probability of ``regime`` (the highest-variance one by default)."""
        if self.result is None:
            raise ValueError("Run algorithm first")
        regime = regime or self.result.params.n_regimes
        return plot.plot_regime_probs(self.result.probs, regime=regime, **kwargs)
