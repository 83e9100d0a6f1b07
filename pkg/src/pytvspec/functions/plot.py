# -*- coding: utf-8 -*-
"""
Plotting Utility Functions module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import logging
import typing

import matplotlib.pyplot as plt
import numpy as np

from pytvspec.support.data import RegimeProbs, TvSpectrum

logger = logging.getLogger(__name__)


# =============================================================================
# SERIES
# =============================================================================
def plt_data(
    data: np.ndarray,
    names: typing.Optional[typing.List[str]] = None,
    unit: str = "%",
    show_rms: bool = False,
) -> typing.Tuple[plt.Figure, np.ndarray]:
    """
    Plot one or more series against the time index, one subplot per series.

    Parameters
    ----------
    data : numpy.ndarray
        Array of shape (T,) or (T, n_series).
    names : list of str, optional
        Subplot titles.
    unit : str, optional
        Label of the y-axis. Default "%".
    show_rms : bool, optional
        Draw the root mean square of each series as a horizontal line.

    Returns
    -------
    fig : matplotlib.figure.Figure
    axs : numpy.ndarray of matplotlib.axes.Axes
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    T, n_series = data.shape
    time = np.arange(1, T + 1)
    fig, axs = plt.subplots(
        figsize=(8, 2.5 * n_series), nrows=n_series, ncols=1, sharex=True, squeeze=False
    )
    axs = axs[:, 0]
    for kk, ax in enumerate(axs):
        ax.plot(time, data[:, kk], c="k", lw=0.6)
        if names is not None:
            ax.set_title(names[kk])
        if show_rms:
            rms = float(np.sqrt(np.mean(data[:, kk] ** 2)))
            ax.axhline(rms, c="r", label=f"rms={rms:.3f}")
            ax.legend()
        ax.set_ylabel(unit)
        ax.grid()
    axs[-1].set_xlabel("t")
    plt.tight_layout()
    return fig, axs


# =============================================================================
# SPECTRA
# =============================================================================
def plot_tvspectrum(
    spec: TvSpectrum,
    log: bool = True,
    title: str = "Time-varying log spectrum",
    cutpoints: typing.Optional[typing.Sequence[float]] = None,
    dates: typing.Optional[typing.Sequence[str]] = None,
) -> typing.Tuple[plt.Figure, plt.Axes]:
    """
    Spectrogram of a time-varying spectrum as a pseudocolor map.

    Parameters
    ----------
    spec : TvSpectrum
        Spectrum to draw.
    log : bool, optional
        Plot log f instead of f. Default True.
    title : str, optional
        Figure title.
    cutpoints : sequence of float, optional
        Segment ends drawn as vertical dashed lines.
    dates : sequence of str, optional
        Date of every time point; a few are used as tick labels.
    """
    values = np.log(spec.power) if log else spec.power
    fig, ax = plt.subplots(figsize=(8, 5))
    mesh = ax.pcolormesh(spec.time_grid, spec.freq_grid, values.T, shading="auto")
    fig.colorbar(mesh, ax=ax, label="log f" if log else "f")
    for xi in cutpoints or ():
        ax.axvline(xi, c="w", ls="--", lw=1)
    if dates is not None:
        ticks = np.linspace(0, len(dates) - 1, 6).astype(int)
        ax.set_xticks(spec.time_grid[ticks])
        ax.set_xticklabels([dates[i] for i in ticks], rotation=30)
    ax.set_title(title)
    ax.set_xlabel("t")
    ax.set_ylabel("frequency")
    plt.tight_layout()
    return fig, ax


# -----------------------------------------------------------------------------


def plot_k_hist(
    k_posterior: typing.Dict[int, float],
) -> typing.Tuple[plt.Figure, plt.Axes]:
    """Bar plot of the posterior distribution of the number of segments."""
    ks = sorted(k_posterior)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ks, [k_posterior[k] for k in ks], color="steelblue", edgecolor="k")
    ax.set_xticks(ks)
    ax.set_xlabel("K")
    ax.set_ylabel("posterior probability")
    ax.set_title("Number of segments")
    plt.tight_layout()
    return fig, ax


# -----------------------------------------------------------------------------


def plot_regime_probs(
    probs: RegimeProbs,
    regime: int = 2,
    shade: typing.Optional[typing.Tuple[int, int]] = None,
    show_filtered: bool = False,
) -> typing.Tuple[plt.Figure, plt.Axes]:
    """
    Smoothed probability of one regime over time.

    Parameters
    ----------
    probs : RegimeProbs
        Filtered and smoothed probabilities.
    regime : int, optional
        1-based regime index. Default 2.
    shade : tuple of int, optional
        Interval (a, b] to highlight, e.g. the true span of the regime.
    show_filtered : bool, optional
        Overlay the filtered probabilities.
    """
    T, N = probs.smoothed.shape
    if not 1 <= regime <= N:
        raise ValueError(f"regime must lie in 1..{N}")
    time = np.arange(1, T + 1)
    fig, ax = plt.subplots(figsize=(8, 3.5))
    if shade is not None:
        ax.axvspan(shade[0], shade[1], color="0.85")
    if show_filtered:
        ax.plot(time, probs.filtered[:, regime - 1], c="0.5", lw=0.6, label="filtered")
    ax.plot(time, probs.smoothed[:, regime - 1], c="k", lw=0.8, label="smoothed")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("t")
    ax.set_ylabel(f"Pr(regime {regime})")
    ax.legend()
    plt.tight_layout()
    return fig, ax
