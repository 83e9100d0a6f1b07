# -*- coding: utf-8 -*-
"""
Spectral Core Utility Functions module.
Part of the pyTVSpec package.

DFT, periodogram and Whittle log-likelihood with the 1/sqrt(n) normalization and the
t = 1..n indexing convention, plus analytic reference spectra.
"""

from __future__ import annotations

import logging
import typing

import numpy as np

from pytvspec.support.data import FourierCoeffs, Periodogram, SpectrumCurve, TimeSeries
from pytvspec.support.utils.exceptions import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)

SeriesLike = typing.Union[TimeSeries, np.ndarray, typing.Sequence[float]]


def as_values(y: SeriesLike) -> np.ndarray:
    """Return the observations of ``y`` as a float array."""
    if isinstance(y, TimeSeries):
        return y.values
    return np.asarray(y, dtype=float)


# =============================================================================
# TRANSFORMS
# =============================================================================
def dft(y: SeriesLike) -> FourierCoeffs:
    """
    Discrete Fourier transform with 1/sqrt(n) normalization.

    Coefficient k equals (1/sqrt(n)) sum_{t=1..n} y_t exp(-2 pi i k t / n). The FFT
    indexes time from 0, so its output is multiplied by exp(-2 pi i k / n).

    Parameters
    ----------
    y : TimeSeries or array_like
        Real series of length n >= 2.

    Returns
    -------
    FourierCoeffs
        Coefficients at the frequencies k/n, k = 0..n-1.

    Raises
    ------
    InvalidInputError
        If the series is shorter than 2.
    """
    values = as_values(y)
    n = values.size
    if values.ndim != 1 or n < 2:
        raise InvalidInputError(f"dft needs a 1-D series of length >= 2, got {n}")
    k = np.arange(n)
    coeffs = np.exp(-2j * np.pi * k / n) * np.fft.fft(values) / np.sqrt(n)
    coeffs.imag[0] = 0.0
    if n % 2 == 0:
        coeffs.imag[n // 2] = 0.0
    return FourierCoeffs.model_construct(
        real_part=coeffs.real.copy(), imag_part=coeffs.imag.copy()
    )


# -----------------------------------------------------------------------------


def inverse_dft(coeffs: typing.Union[FourierCoeffs, np.ndarray]) -> np.ndarray:
    """
    Inverse of :func:`dft`.

    Raises
    ------
    NumericalError
        If the result is not real to within 1e-10.
    """
    x = coeffs.to_complex() if isinstance(coeffs, FourierCoeffs) else np.asarray(coeffs)
    n = x.size
    k = np.arange(n)
    y = np.fft.ifft(np.sqrt(n) * np.exp(2j * np.pi * k / n) * x)
    scale = max(1.0, float(np.max(np.abs(y.real))))
    if np.max(np.abs(y.imag)) > 1e-10 * scale:
        raise NumericalError("inverse DFT is not real; coefficients are not symmetric")
    return y.real.copy()


# -----------------------------------------------------------------------------


def periodogram(y: SeriesLike) -> Periodogram:
    """
    Periodogram I(k/n) = |x_k|^2 for k = 0..n//2.

    Parameters
    ----------
    y : TimeSeries or array_like
        Real series of length n >= 2.

    Returns
    -------
    Periodogram
        Ordinates at the frequencies k/n.
    """
    values = as_values(y)
    n = values.size
    if values.ndim != 1 or n < 2:
        raise InvalidInputError(f"periodogram needs a 1-D series of length >= 2, got {n}")
    # the phase factor of dft() has unit modulus and drops out here
    ordinates = np.abs(np.fft.rfft(values)) ** 2 / n
    freqs = np.arange(n // 2 + 1) / n
    return Periodogram.model_construct(freqs=freqs, ordinates=ordinates, n=n)


# -----------------------------------------------------------------------------


def segment_periodogram(y: SeriesLike) -> Periodogram:
    """
    Periodogram of the demeaned series restricted to the likelihood frequencies.

    The zero frequency is dropped, so the ordinates are at k/n, k = 1..n//2.
    """
    values = as_values(y)
    if values.size < 2:
        raise InvalidInputError("segment_periodogram needs at least 2 observations")
    pg = periodogram(values - values.mean())
    return Periodogram.model_construct(
        freqs=pg.freqs[1:], ordinates=pg.ordinates[1:], n=pg.n
    )


# =============================================================================
# WHITTLE LIKELIHOOD
# =============================================================================
def whittle_weights(freqs: np.ndarray) -> np.ndarray:
    """
    Likelihood weight of each frequency.

    0 at frequency 0 (its ordinate vanishes after demeaning), 1/2 at the Nyquist
    frequency 0.5 (chi-square with one degree of freedom) and 1 otherwise.
    """
    freqs = np.asarray(freqs, dtype=float)
    weights = np.ones_like(freqs)
    weights[freqs == 0.0] = 0.0
    weights[np.isclose(freqs, 0.5, rtol=0, atol=1e-12)] = 0.5
    return weights


# -----------------------------------------------------------------------------


def whittle_loglik(pg: Periodogram, logspec: typing.Sequence[float]) -> float:
    """
    Whittle log-likelihood of a periodogram under a log-spectrum.

    Returns sum_k c_k (-g_k - I_k exp(-g_k)) where c_k are the weights of
    :func:`whittle_weights`. The additive -log(pi) terms are omitted.

    Parameters
    ----------
    pg : Periodogram
        Ordinates, typically from :func:`segment_periodogram`.
    logspec : array_like
        Log spectral density g at ``pg.freqs``.

    Raises
    ------
    InvalidInputError
        If ``logspec`` is not aligned with ``pg.freqs`` or is not finite.
    """
    g = np.asarray(logspec, dtype=float)
    if g.shape != pg.ordinates.shape:
        raise InvalidInputError(
            f"logspec has shape {g.shape}, periodogram has {pg.ordinates.shape}"
        )
    if not np.all(np.isfinite(g)):
        raise InvalidInputError("logspec must be finite")
    weights = whittle_weights(pg.freqs)
    return float(np.sum(weights * (-g - pg.ordinates * np.exp(-g))))


# =============================================================================
# REFERENCE SPECTRA
# =============================================================================
def default_freq_grid(n_freq: int = 101) -> np.ndarray:
    """Equally spaced frequencies on [0, 0.5]."""
    return np.linspace(0.0, 0.5, n_freq)


# -----------------------------------------------------------------------------


def garch_flat_spectrum(
    sigma2_uc: float, freq_grid: typing.Optional[np.ndarray] = None
) -> SpectrumCurve:
    """
    Flat spectrum of serially uncorrelated returns with variance ``sigma2_uc``.

    Raises
    ------
    InvalidInputError
        If ``sigma2_uc`` is not positive.
    """
    if not np.isfinite(sigma2_uc) or sigma2_uc <= 0:
        raise InvalidInputError(f"sigma2_uc must be positive, got {sigma2_uc}")
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    return SpectrumCurve(freqs=freqs, power=np.full(freqs.shape, float(sigma2_uc)))


# -----------------------------------------------------------------------------


def check_ar2_stationary(phi1: float, phi2: float) -> None:
    """Raise InvalidInputError outside the AR(2) stationarity triangle."""
    if not (phi1 + phi2 < 1 and phi2 - phi1 < 1 and abs(phi2) < 1):
        raise InvalidInputError(f"AR(2) coefficients ({phi1}, {phi2}) are not stationary")


# -----------------------------------------------------------------------------


def ar2_spectrum(
    phi1: float,
    phi2: float,
    sigma2: float = 1.0,
    freq_grid: typing.Optional[np.ndarray] = None,
) -> SpectrumCurve:
    """
    Spectral density of a stationary AR(2) process.

    f(nu) = sigma2 / |1 - phi1 exp(-2 pi i nu) - phi2 exp(-4 pi i nu)|^2

    Parameters
    ----------
    phi1, phi2 : float
        Autoregressive coefficients.
    sigma2 : float, optional
        Innovation variance. Default 1.
    freq_grid : numpy.ndarray, optional
        Frequencies in [0, 0.5]. Defaults to 101 equally spaced points.

    Raises
    ------
    InvalidInputError
        If the coefficients are not stationary or ``sigma2`` is not positive.
    """
    check_ar2_stationary(phi1, phi2)
    if sigma2 <= 0:
        raise InvalidInputError("sigma2 must be positive")
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    z = np.exp(-2j * np.pi * freqs)
    power = sigma2 / np.abs(1.0 - phi1 * z - phi2 * z**2) ** 2
    return SpectrumCurve(freqs=freqs, power=power)


# -----------------------------------------------------------------------------


def ar2_autocorrelation(phi1: float, phi2: float) -> typing.Tuple[float, float]:
    """Lag-1 and lag-2 autocorrelations from the Yule-Walker equations."""
    check_ar2_stationary(phi1, phi2)
    rho1 = phi1 / (1.0 - phi2)
    rho2 = phi1 * rho1 + phi2
    return rho1, rho2


# -----------------------------------------------------------------------------


def ar2_variance(phi1: float, phi2: float, sigma2: float = 1.0) -> float:
    """Process variance of a stationary AR(2)."""
    rho1, rho2 = ar2_autocorrelation(phi1, phi2)
    return sigma2 / (1.0 - phi1 * rho1 - phi2 * rho2)
