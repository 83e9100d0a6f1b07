"""
This module provides classes for storing the results of the spectral estimators
of the pyTVSpec package.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from pytvspec.support.data import (
    GarchParams,
    MsGarchParams,
    PiecewiseSpectrum,
    PosteriorDraws,
    RegimeProbs,
    TvSpectrum,
)


class BaseResult(BaseModel):
    """
    Base class for storing results data.

    Attributes
    ----------
    spectrum : TvSpectrum
        Estimated time-varying spectrum on the output grid.
    """

    model_config = ConfigDict(from_attributes=True, arbitrary_types_allowed=True)
    spectrum: Optional[TvSpectrum] = None


class AdaptSpecResult(BaseResult):
    """
    Results of the reversible-jump estimator.

    Attributes
    ----------
    draws : PosteriorDraws
        Chain output.
    lower, upper : numpy.ndarray
        Pointwise credible band of f(nu, t), when the states were kept.
    variance : numpy.ndarray
        Pointwise posterior variance of f(nu, t).
    piecewise : PiecewiseSpectrum
        Piecewise summary at the posterior mode K.
    """

    draws: Optional[PosteriorDraws] = None
    lower: Optional[npt.NDArray[np.float64]] = None
    upper: Optional[npt.NDArray[np.float64]] = None
    variance: Optional[npt.NDArray[np.float64]] = None
    piecewise: Optional[PiecewiseSpectrum] = None


class GarchResult(BaseResult):
    params: Optional[GarchParams] = None
    loglik: Optional[float] = None
    converged: bool = False


class MsGarchResult(BaseResult):
    params: Optional[MsGarchParams] = None
    probs: Optional[RegimeProbs] = None
    loglik: Optional[float] = None
    converged: bool = False
