# -*- coding: utf-8 -*-
"""
Data Generating Processes Utility Functions module.
Part of the pyTVSpec package.

GARCH(1,1) and deterministic regime-switching GARCH simulation, and synthesis of
series from a spectral density through random Fourier components.
"""

from __future__ import annotations

import logging
import typing

import numpy as np

from pytvspec.functions.spectral import (
    ar2_spectrum,
    default_freq_grid,
    garch_flat_spectrum,
    inverse_dft,
)
from pytvspec.support.data import (
    GarchParams,
    PiecewiseSpectrum,
    RegimeSpec,
    SpectrumCurve,
    TimeSeries,
    TvSpectrum,
)
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)


# =============================================================================
# REFERENCE PARAMETERS
# =============================================================================
def reference_garch_params() -> GarchParams:
    """GARCH(1,1) used by the simulation study: mu=0, alpha0=1, alpha1=0.1, beta1=0.1."""
    return GarchParams(mu=0.0, alpha0=1.0, alpha1=0.1, beta1=0.1)


def reference_regime_spec(T: int = 5000) -> RegimeSpec:
    """
    Three-segment regime layout 1, 2, 1 with breaks at T/5 and 3T/5.

    Regime 1 is :func:`reference_garch_params`, regime 2 has alpha0=1, alpha1=0.3,
    beta1=0.2. For T=5000 the cutpoints are (1000, 3000, 5000).
    """
    if T < 5:
        raise InvalidInputError("T must be at least 5")
    cuts = [int(round(T * 0.2)), int(round(T * 0.6)), T]
    return RegimeSpec(
        regimes=[
            reference_garch_params(),
            GarchParams(mu=0.0, alpha0=1.0, alpha1=0.3, beta1=0.2),
        ],
        cutpoints=cuts,
        labels=[1, 2, 1],
    )


def reference_piecewise_spectrum(T: int = 1024, n_freq: int = 101) -> PiecewiseSpectrum:
    """
    Three AR(2)-shaped segments covering 30%, 40% and 30% of T.

    The segments have a low-frequency peak, a high-frequency peak and a mid-frequency
    peak, so no flat spectrum fits them.
    """
    freqs = default_freq_grid(n_freq)
    first = int(round(0.3 * T))
    second = int(round(0.4 * T))
    lengths = [first, second, T - first - second]
    curves = [
        ar2_spectrum(0.9, -0.2, 1.0, freqs),
        ar2_spectrum(-0.6, -0.3, 2.0, freqs),
        ar2_spectrum(0.0, -0.5, 1.0, freqs),
    ]
    return PiecewiseSpectrum(segment_lengths=lengths, curves=curves)


# =============================================================================
# GARCH SIMULATION
# =============================================================================
def _garch_recursion(
    z: np.ndarray,
    mu: np.ndarray,
    alpha0: np.ndarray,
    alpha1: np.ndarray,
    beta1: np.ndarray,
    sigma2_init: float,
    reset: typing.Optional[np.ndarray] = None,
    reset_values: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Run sigma2_t = alpha0_t + alpha1_t eta_{t-1}^2 + beta1_t sigma2_{t-1} forward.

    Parameters are arrays over t (the parameters active at time t). eta_{t-1} is
    y_{t-1} - mu_t. Where ``reset`` is True sigma2_t is set to ``reset_values[t]``.
    """
    T = z.size
    y = np.empty(T)
    sigma2 = np.empty(T)
    s2 = float(sigma2_init)
    for t in range(T):
        if t > 0:
            if reset is not None and reset[t]:
                s2 = float(reset_values[t])
            else:
                eta = y[t - 1] - mu[t]
                s2 = alpha0[t] + alpha1[t] * eta * eta + beta1[t] * s2
        sigma2[t] = s2
        y[t] = mu[t] + np.sqrt(s2) * z[t]
    return y, sigma2


# -----------------------------------------------------------------------------


def _check_garch(params: GarchParams) -> None:
    if params.alpha0 <= 0 or params.alpha1 < 0 or params.beta1 < 0:
        raise InvalidInputError(f"invalid GARCH parameters {params}")
    if params.alpha1 + params.beta1 >= 1:
        raise InvalidInputError(
            f"alpha1 + beta1 = {params.alpha1 + params.beta1} violates stationarity"
        )


# -----------------------------------------------------------------------------


def simulate_garch(params: GarchParams, T: int, rng: np.random.Generator) -> TimeSeries:
    """
    Simulate a Gaussian GARCH(1,1) series.

    The recursion starts at sigma2_1 = sigma2_uc and uses eta_{t-1} = y_{t-1} - mu.

    Parameters
    ----------
    params : GarchParams
        Stationary GARCH parameters.
    T : int
        Length, at least 1.
    rng : numpy.random.Generator
        Random generator.

    Raises
    ------
    InvalidInputError
        If T < 1 or the parameters are not stationary.
    """
    if T < 1:
        raise InvalidInputError("T must be at least 1")
    _check_garch(params)
    z = rng.standard_normal(T)
    full = np.ones(T)
    y, _ = _garch_recursion(
        z,
        params.mu * full,
        params.alpha0 * full,
        params.alpha1 * full,
        params.beta1 * full,
        params.sigma2_uc,
    )
    return TimeSeries(values=y, origin_label="garch")


# -----------------------------------------------------------------------------


def regime_truth(
    spec: RegimeSpec, freq_grid: typing.Optional[np.ndarray] = None
) -> TvSpectrum:
    """Ground-truth spectrum of a regime layout: flat per segment at sigma2_uc."""
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    levels = np.array([r.sigma2_uc for r in spec.regimes])[spec.regime_path()]
    return TvSpectrum(
        time_grid=np.arange(1, spec.T + 1),
        freq_grid=freqs,
        power=np.repeat(levels[:, None], freqs.size, axis=1),
    )


# -----------------------------------------------------------------------------


def simulate_regime(
    spec: RegimeSpec,
    rng: np.random.Generator,
    *,
    reset_at_boundaries: bool = False,
    freq_grid: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[TimeSeries, TvSpectrum]:
    """
    Simulate GARCH returns whose parameters switch at deterministic cutpoints.

    Within segment k the parameters of ``regimes[labels[k] - 1]`` are used. The
    variance recursion continues across boundaries from sigma2_{t-1} unless
    ``reset_at_boundaries`` restarts it at the new regime's sigma2_uc.

    Returns
    -------
    tuple of (TimeSeries, TvSpectrum)
        Series and its ground-truth spectrum, flat per segment at sigma2_uc.

    Raises
    ------
    InvalidInputError
        If a regime is not stationary.
    """
    for regime in spec.regimes:
        _check_garch(regime)
    T = spec.T
    z = rng.standard_normal(T)
    path = spec.regime_path()
    table = np.array(
        [[r.mu, r.alpha0, r.alpha1, r.beta1, r.sigma2_uc] for r in spec.regimes]
    )
    per_t = table[path]
    reset = None
    if reset_at_boundaries:
        reset = np.zeros(T, dtype=bool)
        reset[1:] = path[1:] != path[:-1]
    y, _ = _garch_recursion(
        z,
        per_t[:, 0],
        per_t[:, 1],
        per_t[:, 2],
        per_t[:, 3],
        per_t[0, 4],
        reset,
        per_t[:, 4],
    )
    series = TimeSeries(values=y, origin_label="regime")
    return series, regime_truth(spec, freq_grid)


# -----------------------------------------------------------------------------


def garch_truth(
    params: GarchParams, T: int, freq_grid: typing.Optional[np.ndarray] = None
) -> TvSpectrum:
    """Ground-truth spectrum of a GARCH series, flat at sigma2_uc."""
    curve = garch_flat_spectrum(params.sigma2_uc, freq_grid)
    return TvSpectrum(
        time_grid=np.arange(1, T + 1),
        freq_grid=curve.freqs,
        power=np.tile(curve.power, (T, 1)),
    )


# =============================================================================
# SPECTRAL SYNTHESIS
# =============================================================================
def synthesize_from_spectrum(
    curve: SpectrumCurve,
    n: int,
    rng: np.random.Generator,
    *,
    zero_dc: bool = True,
) -> TimeSeries:
    """
    Draw a stationary Gaussian series with spectral density ``curve``.

    The curve is interpolated at nu_k = k/n. Fourier components are drawn as
    x_0 ~ N(0, f(0)), real and imaginary parts of x_k ~ N(0, f(nu_k)/2) for
    0 < k < n/2, a real Nyquist component ~ N(0, f(1/2)) when n is even, and the
    remaining components by conjugate symmetry. The inverse DFT uses the 1/sqrt(n)
    normalization of :func:`pytvspec.functions.spectral.dft`.

    Parameters
    ----------
    curve : SpectrumCurve
        Positive spectral density on [0, 0.5].
    n : int
        Length, at least 4. For odd n there is no Nyquist component.
    rng : numpy.random.Generator
        Random generator.
    zero_dc : bool, optional
        Force x_0 = 0 so the series sums to zero. Default True.

    Raises
    ------
    InvalidInputError
        If n < 4 or the interpolated density is not positive.
    NumericalError
        If the inverse transform is not real.
    """
    if n < 4:
        raise InvalidInputError(f"n must be at least 4, got {n}")
    half = n // 2
    f = curve.at(np.arange(half + 1) / n)
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise InvalidInputError("spectral density must be positive")

    n_interior = (n - 1) // 2
    x0 = rng.normal(0.0, np.sqrt(f[0]))
    interior_sd = np.sqrt(f[1 : n_interior + 1] / 2.0)
    re = rng.normal(0.0, 1.0, n_interior) * interior_sd
    im = rng.normal(0.0, 1.0, n_interior) * interior_sd

    x = np.zeros(n, dtype=complex)
    x[0] = 0.0 if zero_dc else x0
    x[1 : n_interior + 1] = re + 1j * im
    if n % 2 == 0:
        x[half] = rng.normal(0.0, np.sqrt(f[half]))
    x[n - n_interior :] = np.conj(x[1 : n_interior + 1][::-1])
    return TimeSeries(values=inverse_dft(x), origin_label="spectrum")


# -----------------------------------------------------------------------------


def synthesize_piecewise(
    ps: PiecewiseSpectrum, rng: np.random.Generator, *, zero_dc: bool = True
) -> TimeSeries:
    """Independent :func:`synthesize_from_spectrum` draws per segment, concatenated."""
    parts = [
        synthesize_from_spectrum(curve, n, rng, zero_dc=zero_dc).values
        for n, curve in zip(ps.segment_lengths, ps.curves)
    ]
    return TimeSeries(values=np.concatenate(parts), origin_label="piecewise_spectrum")


# -----------------------------------------------------------------------------


def piecewise_truth(
    ps: PiecewiseSpectrum, freq_grid: typing.Optional[np.ndarray] = None
) -> TvSpectrum:
    """Ground-truth spectrum of a piecewise spectrum on a time x frequency grid."""
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    rows = np.stack([curve.at(freqs) for curve in ps.curves])
    power = np.repeat(rows, ps.segment_lengths, axis=0)
    return TvSpectrum(time_grid=np.arange(1, ps.T + 1), freq_grid=freqs, power=power)


# -----------------------------------------------------------------------------


def variance_break_series(
    rng: np.random.Generator,
    T: int = 1000,
    at: int = 500,
    variances: typing.Tuple[float, float] = (1.0, 9.0),
    freq_grid: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[TimeSeries, TvSpectrum]:
    """
    Gaussian white noise whose variance jumps once.

    Returns the series and its truth on ``freq_grid`` (101 points by default),
    flat at ``variances[0]`` for t <= at and at ``variances[1]`` afterwards.
    """
    if not 0 < at < T:
        raise InvalidInputError("the break must lie strictly inside the series")
    if min(variances) <= 0:
        raise InvalidInputError("variances must be positive")
    sd = np.where(np.arange(1, T + 1) <= at, np.sqrt(variances[0]), np.sqrt(variances[1]))
    y = rng.standard_normal(T) * sd
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    ps = PiecewiseSpectrum(
        segment_lengths=[at, T - at],
        curves=[garch_flat_spectrum(v, freqs) for v in variances],
    )
    return TimeSeries(values=y, origin_label="variance_break"), piecewise_truth(ps, freqs)
