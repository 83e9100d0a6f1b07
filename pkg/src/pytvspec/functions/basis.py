# -*- coding: utf-8 -*-
"""
Smoothing Basis Utility Functions module.
Part of the pyTVSpec package.

Gaussian-process prior on the log spectrum of a segment: the Brownian-motion covariance
min(nu_i, nu_j) on the likelihood frequencies, its truncated eigenbasis, and the
log-density of the segment parameters.
"""

from __future__ import annotations

import functools
import logging
import typing

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from pytvspec.support.data import BasisMatrix, SegmentParams
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

LOG_2PI = float(np.log(2.0 * np.pi))


# =============================================================================
# COVARIANCE AND EIGENBASIS
# =============================================================================
def brownian_cov(freqs: typing.Sequence[float]) -> np.ndarray:
    """
    Brownian-motion covariance matrix with entries min(nu_i, nu_j).

    Parameters
    ----------
    freqs : array_like
        Strictly increasing frequencies in (0, 0.5].

    Raises
    ------
    InvalidInputError
        If the frequencies are unordered or out of range.
    """
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if freqs.ndim != 1 or freqs.size == 0:
        raise InvalidInputError("freqs must be a non-empty 1-D array")
    if np.any(np.diff(freqs) <= 0):
        raise InvalidInputError("freqs must be strictly increasing")
    if freqs[0] <= 0 or freqs[-1] > 0.5:
        raise InvalidInputError("freqs must lie in (0, 0.5]")
    return np.minimum.outer(freqs, freqs)


# -----------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _cached_basis(n: int, J_max: int) -> BasisMatrix:
    freqs = np.arange(1, n // 2 + 1) / n
    omega = brownian_cov(freqs)
    eigval, eigvec = linalg.eigh(omega)
    order = np.argsort(eigval)[::-1]
    eigval = np.clip(eigval[order], 0.0, None)
    eigvec = eigvec[:, order]
    # eigh leaves the sign of each eigenvector arbitrary
    signs = np.sign(eigvec.sum(axis=0))
    signs[signs == 0] = 1.0
    eigvec = eigvec * signs

    J = min(J_max, freqs.size)
    design = eigvec[:, :J] * np.sqrt(eigval[:J])
    for arr in (freqs, design):
        arr.setflags(write=False)
    lam = eigval[:J].copy()
    lam.setflags(write=False)
    return BasisMatrix.model_construct(freqs=freqs, design=design, eigenvalues=lam)


# -----------------------------------------------------------------------------


def build_basis(n_segment_length: int, J_max: int = 30, t_min: int = 2) -> BasisMatrix:
    """
    Truncated eigenbasis of the Brownian covariance for a segment length.

    The covariance is evaluated at the likelihood frequencies k/n, k = 1..n//2, and
    decomposed as Q D Q^T. The design matrix keeps the first J = min(J_max, n//2)
    columns of Q D^{1/2}. Results are memoized per (n, J_max) and are read-only.

    Parameters
    ----------
    n_segment_length : int
        Segment length n.
    J_max : int, optional
        Maximum number of basis functions. Default 30.
    t_min : int, optional
        Minimum admissible segment length. Default 2.

    Returns
    -------
    BasisMatrix
        Frequencies, design matrix and eigenvalues.

    Raises
    ------
    InvalidInputError
        If the segment is shorter than ``t_min`` (or 2).
    """
    n = int(n_segment_length)
    if n < max(2, t_min):
        raise InvalidInputError(
            f"segment of length {n} is shorter than the minimum {max(2, t_min)}"
        )
    if J_max < 0:
        raise InvalidInputError("J_max must be nonnegative")
    return _cached_basis(n, int(J_max))


# -----------------------------------------------------------------------------


def eval_log_spectrum(basis: BasisMatrix, params: SegmentParams) -> np.ndarray:
    """
    Log spectrum g = alpha0 + X beta at the likelihood frequencies.

    Raises
    ------
    InvalidInputError
        If the length of beta differs from the number of basis columns.
    """
    beta = np.asarray(params.beta, dtype=float)
    if beta.size != basis.J:
        raise InvalidInputError(
            f"beta has {beta.size} coefficients, basis has {basis.J} columns"
        )
    return params.alpha0 + basis.design @ beta


# =============================================================================
# PRIOR
# =============================================================================
def log_prior_coefficients(
    theta: np.ndarray, tau2: float, alpha_prior_var: float = 100.0
) -> float:
    """
    Log-density of (alpha0, beta) given tau2.

    alpha0 ~ N(0, alpha_prior_var) and beta ~ N(0, tau2 I). An infinite
    ``alpha_prior_var`` gives a flat prior on alpha0 (its term is dropped).
    """
    theta = np.asarray(theta, dtype=float)
    beta = theta[1:]
    J = beta.size
    lp = -0.5 * J * (LOG_2PI + np.log(tau2)) - 0.5 * float(beta @ beta) / tau2
    if np.isfinite(alpha_prior_var):
        lp += -0.5 * (LOG_2PI + np.log(alpha_prior_var)) - 0.5 * theta[0] ** 2 / (
            alpha_prior_var
        )
    return float(lp)


# -----------------------------------------------------------------------------


def log_prior_tau2(tau2: float, a: float = 1.0, b: float = 1.0) -> float:
    """Log-density of InverseGamma(a, b) at tau2."""
    return float(a * np.log(b) - gammaln(a) - (a + 1.0) * np.log(tau2) - b / tau2)


# -----------------------------------------------------------------------------


def log_prior_segment(
    params: SegmentParams,
    alpha_prior_var: float = 100.0,
    tau_a: float = 1.0,
    tau_b: float = 1.0,
) -> float:
    """
    Log prior density of a segment's parameters.

    Sum of the log-densities of beta ~ N(0, tau2 I_J), alpha0 ~ N(0, alpha_prior_var)
    and tau2 ~ InverseGamma(tau_a, tau_b).

    Parameters
    ----------
    params : SegmentParams
        Segment parameters.
    alpha_prior_var : float, optional
        Prior variance of alpha0. Default 100.
    tau_a, tau_b : float, optional
        Inverse-gamma shape and scale. Default 1 and 1.
    """
    return log_prior_coefficients(
        params.theta, params.tau2, alpha_prior_var
    ) + log_prior_tau2(params.tau2, tau_a, tau_b)
