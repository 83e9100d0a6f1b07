# -*- coding: utf-8 -*-
"""
Evaluation Metrics Utility Functions module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import logging
import typing

import numpy as np
import pandas as pd

from pytvspec.support.data import MetricReport, TvSpectrum
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "dgp",
    "estimator",
    "replicate",
    "seed",
    "skl",
    "mse",
    "wall_time_s",
    "n_time",
    "n_freq",
    "error",
]


def check_same_grid(true_f: TvSpectrum, est_f: TvSpectrum) -> None:
    """Raise InvalidInputError unless both spectra live on the same grid."""
    if not true_f.same_grid(est_f):
        raise InvalidInputError(
            f"grid mismatch: {true_f.power.shape} on "
            f"[{true_f.freq_grid[0]}, {true_f.freq_grid[-1]}] vs {est_f.power.shape}"
        )


# -----------------------------------------------------------------------------


def skl(true_f: TvSpectrum, est_f: TvSpectrum) -> float:
    """
    Symmetrized Kullback-Leibler divergence between two spectra.

    sum_t sum_k [f log(f / g) + g log(g / f)] = sum (f - g)(log f - log g) over the
    common grid.

    Raises
    ------
    InvalidInputError
        On a grid mismatch or nonpositive entries.
    """
    check_same_grid(true_f, est_f)
    f, g = true_f.power, est_f.power
    if np.any(f <= 0) or np.any(g <= 0):
        raise InvalidInputError("skl needs strictly positive spectra")
    return float(np.sum((f - g) * (np.log(f) - np.log(g))))


# -----------------------------------------------------------------------------


def mse(true_f: TvSpectrum, est_f: TvSpectrum) -> float:
    """Sum of squared differences over the common grid."""
    check_same_grid(true_f, est_f)
    return float(np.sum((est_f.power - true_f.power) ** 2))


# -----------------------------------------------------------------------------


def evaluate(
    true_f: TvSpectrum,
    est_f: TvSpectrum,
    *,
    dgp: str,
    estimator: str,
    replicate: int = 0,
    seed: int = 0,
    wall_time_s: float = 0.0,
) -> MetricReport:
    """Both metrics for one estimate, packed in a :class:`MetricReport`."""
    return MetricReport(
        dgp=dgp,
        estimator=estimator,
        replicate=replicate,
        seed=seed,
        skl=skl(true_f, est_f),
        mse=mse(true_f, est_f),
        wall_time_s=wall_time_s,
        n_time=int(true_f.time_grid.size),
        n_freq=int(true_f.freq_grid.size),
    )


# -----------------------------------------------------------------------------


def reports_frame(reports: typing.Iterable[MetricReport]) -> pd.DataFrame:
    """Reports as a data frame with the columns of :data:`REPORT_COLUMNS`."""
    rows = [r.model_dump() for r in reports]
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def summarize_reports(reports: typing.Iterable[MetricReport]) -> pd.DataFrame:
    """
    Median log-SKL and log-MSE per (dgp, estimator).

    Logs are taken for presentation only; failed runs are counted in ``n_failed``.
    """
    df = reports_frame(reports)
    ok = df[df["error"].isna()].copy()
    ok["log_skl"] = np.log(ok["skl"].astype(float))
    ok["log_mse"] = np.log(ok["mse"].astype(float))
    summary = ok.groupby(["dgp", "estimator"]).agg(
        n=("replicate", "size"),
        median_log_skl=("log_skl", "median"),
        median_log_mse=("log_mse", "median"),
    )
    failed = df[df["error"].notna()].groupby(["dgp", "estimator"]).size()
    summary["n_failed"] = failed.reindex(summary.index, fill_value=0)
    return summary.reset_index()
