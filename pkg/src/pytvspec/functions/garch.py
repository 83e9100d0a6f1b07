# -*- coding: utf-8 -*-
"""
Parametric Baselines Utility Functions module.
Part of the pyTVSpec package.

Gaussian GARCH(1,1) quasi-maximum likelihood, Markov-switching GARCH with a
Hamilton filter and Kim smoother, and the time-varying spectra the fitted models
imply.
"""

from __future__ import annotations

import logging
import math
import typing
import warnings

import numpy as np
from scipy import optimize, signal

from pytvspec.functions.spectral import SeriesLike, as_values, default_freq_grid
from pytvspec.support.data import (
    GarchParams,
    MsGarchParams,
    RegimeProbs,
    TvSpectrum,
)
from pytvspec.support.utils.exceptions import (
    ConvergenceWarning,
    InvalidInputError,
    NumericalError,
)

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
PROB_FLOOR = 1e-300
PENALTY = 1e12

MIN_T_GARCH = 100
MIN_T_MSGARCH = 500

VarianceCarry = typing.Literal["per_regime", "collapsed"]


class GarchFit(typing.NamedTuple):
    params: GarchParams
    loglik: float
    converged: bool


class MsGarchFit(typing.NamedTuple):
    params: MsGarchParams
    probs: RegimeProbs
    loglik: float
    converged: bool


class FilterOutput(typing.NamedTuple):
    filtered: np.ndarray
    loglik: float
    sigma2: np.ndarray


# =============================================================================
# GARCH(1,1)
# =============================================================================
def _check_stationary(params: GarchParams) -> None:
    if params.alpha0 <= 0 or params.alpha1 < 0 or params.beta1 < 0:
        raise InvalidInputError(f"invalid GARCH parameters {params}")
    if params.alpha1 + params.beta1 >= 1:
        raise InvalidInputError(
            f"alpha1 + beta1 = {params.alpha1 + params.beta1} is not below 1"
        )


# -----------------------------------------------------------------------------


def garch_variance(
    y: SeriesLike, params: GarchParams, sigma2_init: typing.Optional[float] = None
) -> np.ndarray:
    """
    Conditional variance path of a GARCH(1,1).

    sigma2_t = alpha0 + alpha1 (y_{t-1} - mu)^2 + beta1 sigma2_{t-1}, started at
    ``sigma2_init`` (the sample variance by default).
    """
    values = as_values(y)
    s0 = float(np.var(values)) if sigma2_init is None else float(sigma2_init)
    eta2 = (values[:-1] - params.mu) ** 2
    drive = params.alpha0 + params.alpha1 * eta2
    rest, _ = signal.lfilter(
        [1.0], [1.0, -params.beta1], drive, zi=np.array([params.beta1 * s0])
    )
    return np.concatenate(([s0], rest))


# -----------------------------------------------------------------------------


def garch_loglik(
    y: SeriesLike, params: GarchParams, sigma2_init: typing.Optional[float] = None
) -> float:
    """Gaussian log-likelihood sum_t -0.5 [log(2 pi sigma2_t) + eta_t^2 / sigma2_t]."""
    values = as_values(y)
    sigma2 = garch_variance(values, params, sigma2_init)
    eta2 = (values - params.mu) ** 2
    return float(-0.5 * np.sum(LOG_2PI + np.log(sigma2) + eta2 / sigma2))


# -----------------------------------------------------------------------------


def _unpack_garch(theta: typing.Sequence[float]) -> GarchParams:
    """(mu, log alpha0, a, b) to GarchParams, (alpha1, beta1) by a softmax."""
    mu, log_a0, a, b = theta
    top = max(0.0, a, b)
    ea, eb, e0 = math.exp(a - top), math.exp(b - top), math.exp(-top)
    denom = e0 + ea + eb
    return GarchParams.model_construct(
        mu=float(mu), alpha0=math.exp(log_a0), alpha1=ea / denom, beta1=eb / denom
    )


def _pack_garch(params: GarchParams) -> np.ndarray:
    rest = 1.0 - params.alpha1 - params.beta1
    return np.array(
        [
            params.mu,
            math.log(params.alpha0),
            math.log(max(params.alpha1, 1e-8) / rest),
            math.log(max(params.beta1, 1e-8) / rest),
        ]
    )


# -----------------------------------------------------------------------------


def _simplex(
    fun: typing.Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_eval: int,
    tol: float,
) -> optimize.OptimizeResult:
    return optimize.minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={"maxfev": max_eval, "xatol": tol, "fatol": tol, "adaptive": x0.size > 4},
    )


# -----------------------------------------------------------------------------


def fit_garch(
    y: SeriesLike,
    *,
    max_eval: int = 5000,
    tol: float = 1e-8,
) -> GarchFit:
    """
    Gaussian quasi-maximum likelihood GARCH(1,1).

    The variance recursion is started at the sample variance. alpha0 is optimized
    on the log scale and (alpha1, beta1) through a softmax with a reference category,
    so every trial point satisfies alpha1 + beta1 < 1. The Nelder-Mead simplex is
    started from three moment-based initial values and the best optimum is kept.

    Parameters
    ----------
    y : TimeSeries or array_like
        Returns, at least 100 observations.
    max_eval : int, optional
        Maximum number of objective evaluations per start. Default 5000.
    tol : float, optional
        Simplex tolerance in objective and parameters. Default 1e-8.

    Returns
    -------
    GarchFit
        Parameters, maximized log-likelihood and a convergence flag. A fit that did
        not converge carries the best parameters found and emits a
        :class:`ConvergenceWarning`.

    Raises
    ------
    InvalidInputError
        If fewer than 100 observations are given.
    """
    values = as_values(y)
    if values.size < MIN_T_GARCH:
        raise InvalidInputError(
            f"fit_garch needs at least {MIN_T_GARCH} observations, got {values.size}"
        )
    mean = float(values.mean())
    var = float(values.var())
    if var <= 0:
        raise InvalidInputError("the series is constant")

    def neg_loglik(theta: np.ndarray) -> float:
        try:
            value = -garch_loglik(values, _unpack_garch(theta), var)
        except OverflowError:
            return PENALTY
        return value if np.isfinite(value) else PENALTY

    best: typing.Optional[optimize.OptimizeResult] = None
    for a1, b1 in ((0.05, 0.5), (0.1, 0.1), (0.02, 0.9)):
        start = GarchParams.model_construct(
            mu=mean, alpha0=var * (1.0 - a1 - b1), alpha1=a1, beta1=b1
        )
        res = _simplex(neg_loglik, _pack_garch(start), max_eval, tol)
        logger.debug(
            "GARCH start (%s, %s): -loglik %.6f, nfev %d", a1, b1, res.fun, res.nfev
        )
        if best is None or res.fun < best.fun:
            best = res

    params = _unpack_garch(best.x)
    fitted = GarchParams(
        mu=params.mu, alpha0=params.alpha0, alpha1=params.alpha1, beta1=params.beta1
    )
    converged = bool(best.success) and best.fun < PENALTY
    if not converged:
        logger.warning("GARCH fit did not converge: %s", best.message)
        warnings.warn(
            f"GARCH fit did not converge: {best.message}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return GarchFit(fitted, float(-best.fun), converged)


# -----------------------------------------------------------------------------


def _flat_tvspectrum(
    levels: np.ndarray, freq_grid: typing.Optional[np.ndarray]
) -> TvSpectrum:
    freqs = default_freq_grid() if freq_grid is None else np.asarray(freq_grid, float)
    return TvSpectrum(
        time_grid=np.arange(1, levels.size + 1),
        freq_grid=freqs,
        power=np.repeat(levels[:, None], freqs.size, axis=1),
    )


def garch_implied_tvspectrum(
    params: GarchParams, T: int, freq_grid: typing.Optional[np.ndarray] = None
) -> TvSpectrum:
    """
    Spectrum implied by a GARCH(1,1): sigma2_uc at every time and frequency.

    Raises
    ------
    InvalidInputError
        If alpha1 + beta1 >= 1.
    """
    _check_stationary(params)
    if T < 1:
        raise InvalidInputError("T must be at least 1")
    return _flat_tvspectrum(np.full(T, params.sigma2_uc), freq_grid)


# =============================================================================
# MARKOV-SWITCHING GARCH
# =============================================================================
def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Stationary distribution pi = pi P of a row-stochastic matrix."""
    P = np.asarray(transition, dtype=float)
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


# -----------------------------------------------------------------------------


def hamilton_filter(
    y: SeriesLike,
    params: MsGarchParams,
    *,
    variance_carry: VarianceCarry = "per_regime",
    sigma2_init: typing.Optional[float] = None,
) -> FilterOutput:
    """
    Forward filter of a Markov-switching GARCH(1,1).

    Each regime j runs its own recursion
    sigma2_{j,t} = alpha0_j + alpha1_j (y_{t-1} - mu_j)^2 + beta1_j s_{j,t-1}
    where s_{j,t-1} is regime j's own lagged variance ("per_regime") or the
    filtered-probability weighted average of all regimes' lagged variances
    ("collapsed"). All recursions start at ``sigma2_init`` (sample variance by
    default) and the regime chain starts from its stationary distribution.
    Regime densities are rescaled by their maximum at each t before mixing.

    Parameters
    ----------
    y : TimeSeries or array_like
        Observed returns.
    params : MsGarchParams
        Regime parameters and transition matrix.
    variance_carry : {"per_regime", "collapsed"}, optional
        Lagged variance used by each regime. Default "per_regime".
    sigma2_init : float, optional
        Initial variance of every regime.

    Returns
    -------
    FilterOutput
        Filtered probabilities (T, N_R), marginal log-likelihood and the per-regime
        conditional variances (T, N_R).

    Raises
    ------
    NumericalError
        If the predictive density vanishes or becomes NaN.
    InvalidInputError
        If ``variance_carry`` is unknown.
    """
    if variance_carry not in ("per_regime", "collapsed"):
        raise InvalidInputError(f"unknown variance_carry {variance_carry!r}")
    values = as_values(y)
    T = values.size
    N = params.n_regimes
    P = np.asarray(params.transition, dtype=float)
    Pl = P.tolist()
    mu = [r.mu for r in params.regimes]
    a0 = [r.alpha0 for r in params.regimes]
    a1 = [r.alpha1 for r in params.regimes]
    b1 = [r.beta1 for r in params.regimes]
    s0 = float(np.var(values)) if sigma2_init is None else float(sigma2_init)
    collapsed = variance_carry == "collapsed"

    if collapsed:
        sigma2_path = np.empty((T, N))
        logd_rows = None
    else:
        # per-regime paths do not depend on the regime probabilities
        sigma2_path = np.column_stack(
            [garch_variance(values, r, sigma2_init=s0) for r in params.regimes]
        )
        resid2 = (values[:, None] - np.asarray(mu)) ** 2
        logd = -0.5 * (LOG_2PI + np.log(sigma2_path) + resid2 / sigma2_path)
        logd_rows = logd.tolist()

    filtered = np.empty((T, N))
    prob = stationary_distribution(P).tolist()
    s2 = [s0] * N
    prev_prob = prob
    loglik = 0.0
    ys = values.tolist()
    rng_N = range(N)

    for t in range(T):
        if t > 0:
            pred = [sum(prev_prob[i] * Pl[i][j] for i in rng_N) for j in rng_N]
        else:
            pred = prob
        if collapsed:
            if t > 0:
                carry = sum(prev_prob[j] * s2[j] for j in rng_N)
                s2 = [
                    a0[j] + a1[j] * (ys[t - 1] - mu[j]) ** 2 + b1[j] * carry
                    for j in rng_N
                ]
            sigma2_path[t] = s2
            logd = [
                -0.5 * (LOG_2PI + math.log(s2[j]) + (ys[t] - mu[j]) ** 2 / s2[j])
                for j in rng_N
            ]
        else:
            logd = logd_rows[t]
        top = max(logd)
        w = [pred[j] * math.exp(logd[j] - top) for j in rng_N]
        total = sum(w)
        if not total > 0 or not math.isfinite(total):
            raise NumericalError(f"predictive density vanished at t={t + 1}")
        loglik += top + math.log(total)
        prev_prob = [wj / total for wj in w]
        filtered[t] = prev_prob

    if not math.isfinite(loglik):
        raise NumericalError("Hamilton filter log-likelihood is not finite")
    return FilterOutput(filtered, float(loglik), sigma2_path)


# -----------------------------------------------------------------------------


def kim_smoother(filtered: np.ndarray, transition: np.ndarray) -> np.ndarray:
    """
    Backward smoothing of filtered regime probabilities.

    Pr(s_t = i | y) = Pr(s_t = i | y_1..t) sum_j P_ij Pr(s_{t+1} = j | y) /
    Pr(s_{t+1} = j | y_1..t), with predicted probabilities floored at 1e-300.
    """
    filtered = np.asarray(filtered, dtype=float)
    P = np.asarray(transition, dtype=float)
    T = filtered.shape[0]
    smoothed = np.empty_like(filtered)
    smoothed[-1] = filtered[-1]
    for t in range(T - 2, -1, -1):
        pred = np.maximum(filtered[t] @ P, PROB_FLOOR)
        row = filtered[t] * (P @ (smoothed[t + 1] / pred))
        smoothed[t] = row / max(row.sum(), PROB_FLOOR)
    return smoothed


# -----------------------------------------------------------------------------


def _unpack_msgarch(theta: np.ndarray, N: int) -> MsGarchParams:
    regimes = [_unpack_garch(theta[4 * j : 4 * j + 4]) for j in range(N)]
    logits = theta[4 * N :].reshape(N, N - 1) if N > 1 else np.zeros((1, 0))
    P = np.empty((N, N))
    for i in range(N):
        row = np.insert(logits[i], i, 0.0)
        row = np.exp(row - row.max())
        P[i] = row / row.sum()
    return MsGarchParams.model_construct(regimes=regimes, transition=P)


def _pack_msgarch(params: MsGarchParams) -> np.ndarray:
    N = params.n_regimes
    P = np.asarray(params.transition)
    parts = [_pack_garch(r) for r in params.regimes]
    for i in range(N):
        off = np.delete(np.log(np.maximum(P[i], 1e-12) / max(P[i, i], 1e-12)), i)
        parts.append(off)
    return np.concatenate(parts)


# -----------------------------------------------------------------------------


def _initial_msgarch(
    values: np.ndarray, N: int, rng: typing.Optional[np.random.Generator]
) -> MsGarchParams:
    """Moment-based start: regime variances spread around the sample variance."""
    mean, var = float(values.mean()), float(values.var())
    levels = np.geomspace(0.6, 1.6, N) if N > 1 else np.ones(1)
    a1, b1, stay = 0.05, 0.5, 0.98
    if rng is not None:
        levels = levels * np.exp(rng.normal(0.0, 0.3, N))
        a1 = float(np.clip(a1 + rng.normal(0.0, 0.03), 0.01, 0.3))
        b1 = float(np.clip(b1 + rng.normal(0.0, 0.15), 0.05, 0.85))
        stay = float(np.clip(stay + rng.normal(0.0, 0.01), 0.9, 0.999))
    regimes = [
        GarchParams.model_construct(
            mu=mean, alpha0=var * lev * (1.0 - a1 - b1), alpha1=a1, beta1=b1
        )
        for lev in np.sort(levels)
    ]
    if N > 1:
        P = np.full((N, N), (1.0 - stay) / (N - 1))
        np.fill_diagonal(P, stay)
    else:
        P = np.ones((1, 1))
    return MsGarchParams.model_construct(regimes=regimes, transition=P)


# -----------------------------------------------------------------------------


def sort_regimes(
    params: MsGarchParams, probs: RegimeProbs
) -> typing.Tuple[MsGarchParams, RegimeProbs]:
    """Relabel regimes by increasing unconditional variance."""
    order = np.argsort([r.sigma2_uc for r in params.regimes], kind="stable")
    P = np.asarray(params.transition)[np.ix_(order, order)]
    P = P / P.sum(axis=1, keepdims=True)
    sorted_params = MsGarchParams(
        regimes=[params.regimes[j] for j in order], transition=P
    )
    sorted_probs = RegimeProbs(
        filtered=probs.filtered[:, order], smoothed=probs.smoothed[:, order]
    )
    return sorted_params, sorted_probs


# -----------------------------------------------------------------------------


def fit_msgarch(
    y: SeriesLike,
    n_regimes: int = 2,
    *,
    n_starts: int = 5,
    seed: typing.Optional[int] = None,
    variance_carry: VarianceCarry = "per_regime",
    max_eval: int = 5000,
    screen_eval: int = 600,
    tol: float = 1e-8,
) -> MsGarchFit:
    """
    Maximum likelihood Markov-switching GARCH(1,1).

    The objective is the Hamilton filter log-likelihood over regime parameters
    (reparameterized as in :func:`fit_garch`) and transition-matrix logits, with
    the diagonal of each row as reference. The first start is moment-based, the
    others are random perturbations of it. Every start runs ``screen_eval``
    simplex evaluations; the best one is then continued up to ``max_eval``.
    Regimes are relabeled by increasing sigma2_uc.

    Parameters
    ----------
    y : TimeSeries or array_like
        Returns, at least 500 observations.
    n_regimes : int, optional
        Number of regimes N_R >= 1. Default 2.
    n_starts : int, optional
        Number of starting points. Default 5.
    seed : int, optional
        Seed of the perturbations.
    variance_carry : {"per_regime", "collapsed"}, optional
        Regime variance recursion, see :func:`hamilton_filter`.
    max_eval : int, optional
        Maximum evaluations of the final simplex run. Default 5000.
    screen_eval : int, optional
        Evaluations per start in the screening stage. Default 600.
    tol : float, optional
        Simplex tolerance. Default 1e-8.

    Returns
    -------
    MsGarchFit
        Parameters, regime probabilities, log-likelihood and a convergence flag.

    Raises
    ------
    InvalidInputError
        If fewer than 500 observations are given or ``n_regimes`` < 1.
    """
    values = as_values(y)
    if values.size < MIN_T_MSGARCH:
        raise InvalidInputError(
            f"fit_msgarch needs at least {MIN_T_MSGARCH} observations, got {values.size}"
        )
    if n_regimes < 1:
        raise InvalidInputError("n_regimes must be at least 1")
    var = float(values.var())
    if var <= 0:
        raise InvalidInputError("the series is constant")

    def neg_loglik(theta: np.ndarray) -> float:
        params = _unpack_msgarch(theta, n_regimes)
        try:
            out = hamilton_filter(
                values, params, variance_carry=variance_carry, sigma2_init=var
            )
        except (NumericalError, OverflowError, ValueError):
            return PENALTY
        return -out.loglik if np.isfinite(out.loglik) else PENALTY

    rng = np.random.default_rng(seed)
    screened = []
    for k in range(max(1, n_starts)):
        start = _initial_msgarch(values, n_regimes, rng if k else None)
        res = _simplex(neg_loglik, _pack_msgarch(start), screen_eval, tol)
        logger.debug("MS-GARCH start %d: -loglik %.6f", k, res.fun)
        screened.append(res)
    best = min(screened, key=lambda r: r.fun)
    if best.fun >= PENALTY:
        logger.warning("no MS-GARCH start produced a finite likelihood")
    elif not best.success:
        best = _simplex(neg_loglik, best.x, max_eval, tol)

    params = _unpack_msgarch(best.x, n_regimes)
    converged = bool(best.success) and best.fun < PENALTY
    if not converged:
        logger.warning("MS-GARCH fit did not converge: %s", best.message)
        warnings.warn(
            f"MS-GARCH fit did not converge: {best.message}",
            ConvergenceWarning,
            stacklevel=2,
        )
    params = MsGarchParams(
        regimes=[
            GarchParams(mu=r.mu, alpha0=r.alpha0, alpha1=r.alpha1, beta1=r.beta1)
            for r in params.regimes
        ],
        transition=params.transition,
    )
    out = hamilton_filter(values, params, variance_carry=variance_carry, sigma2_init=var)
    probs = RegimeProbs(
        filtered=out.filtered, smoothed=kim_smoother(out.filtered, params.transition)
    )
    params, probs = sort_regimes(params, probs)
    logger.info(
        "MS-GARCH fit: loglik %.3f, sigma2_uc %s",
        out.loglik,
        [round(r.sigma2_uc, 4) for r in params.regimes],
    )
    return MsGarchFit(params, probs, out.loglik, converged)


# -----------------------------------------------------------------------------


def msgarch_implied_tvspectrum(
    params: MsGarchParams,
    probs: typing.Union[RegimeProbs, np.ndarray],
    freq_grid: typing.Optional[np.ndarray] = None,
) -> TvSpectrum:
    """
    Spectrum implied by a Markov-switching GARCH.

    f(nu, t) = sum_j Pr(s_t = j | y) sigma2_uc(j), flat in nu.

    Raises
    ------
    InvalidInputError
        If a regime is not stationary or the probabilities do not match the regimes.
    """
    for regime in params.regimes:
        _check_stationary(regime)
    smoothed = probs.smoothed if isinstance(probs, RegimeProbs) else np.asarray(probs)
    if smoothed.ndim != 2 or smoothed.shape[1] != params.n_regimes:
        raise InvalidInputError(
            f"probabilities of shape {smoothed.shape} do not match "
            f"{params.n_regimes} regimes"
        )
    levels = smoothed @ np.array([r.sigma2_uc for r in params.regimes])
    return _flat_tvspectrum(levels, freq_grid)
