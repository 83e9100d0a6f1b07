# -*- coding: utf-8 -*-
"""
Single Series Setup Module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import copy
import logging
import typing

import matplotlib.pyplot as plt
import numpy as np

from pytvspec.functions import metrics, plot
from pytvspec.setup.base import BaseSetup
from pytvspec.support.data import MetricReport, TimeSeries, TvSpectrum

if typing.TYPE_CHECKING:
    from pytvspec.algorithms import BaseAlgorithm


logger = logging.getLogger(__name__)


class SingleSetup(BaseSetup):
    """
    One series analysed by several estimators.

    Parameters
    ----------
    data : TimeSeries or array_like
        Observed series.
    label : str, optional
        Origin label used when ``data`` is a plain array.

    Attributes
    ----------
    data : TimeSeries
        Current series (possibly squared).
    T : int
        Number of observations.
    algorithms : dict[str, BaseAlgorithm]
        Estimators of the setup.
    timings : dict[str, float]
        Wall time in seconds of the last run of each estimator.
    """

    T: int
    algorithms: typing.Dict[str, BaseAlgorithm]

    def __init__(
        self,
        data: typing.Union[TimeSeries, np.ndarray, typing.Sequence[float]],
        label: str = "data",
    ):
        if not isinstance(data, TimeSeries):
            data = TimeSeries(values=np.asarray(data, dtype=float), origin_label=label)
        self.data = data
        self._initialize_data(data)

    def _initialize_data(self, data: TimeSeries) -> None:
        self._initial_data = copy.deepcopy(data)
        self.T = data.n
        self.algorithms: typing.Dict[str, BaseAlgorithm] = {}
        self.timings: typing.Dict[str, float] = {}

    def rollback(self) -> None:
        """Restore the series given at construction and drop all estimators."""
        self.data = self._initial_data
        self._initialize_data(self._initial_data)

    def square_data(self) -> None:
        """
        Replace the series by its squares.

        Estimators already added receive the squared series and lose their results.
        """
        self.data = TimeSeries(
            values=self.data.values**2,
            origin_label=f"squared {self.data.origin_label}",
            dates=self.data.dates,
        )
        for alg in self.algorithms.values():
            alg._set_data(self.data)
        logger.info("series replaced by its squares")

    def plot_data(
        self, unit: str = "%", show_rms: bool = False
    ) -> typing.Tuple[plt.Figure, np.ndarray]:
        return plot.plt_data(
            self.data.values, names=[self.data.origin_label], unit=unit, show_rms=show_rms
        )

    def evaluate(
        self,
        truth: TvSpectrum,
        *,
        dgp: str = "data",
        replicate: int = 0,
        seed: int = 0,
        names: typing.Optional[typing.Sequence[str]] = None,
    ) -> typing.List[MetricReport]:
        """
        SKL and MSE of every estimator that has a result, on the grid of ``truth``.

        ``names`` restricts the evaluation to some estimators.

        Raises
        ------
        InvalidInputError
            If the time grid of ``truth`` does not match the series.
        """
        reports = []
        for name, alg in self.algorithms.items():
            if names is not None and name not in names:
                continue
            if alg.result is None:
                logger.warning("%s has no result and is not evaluated", name)
                continue
            est = alg.tv_spectrum(truth.freq_grid)
            reports.append(
                metrics.evaluate(
                    truth,
                    est,
                    dgp=dgp,
                    estimator=alg.code or name,
                    replicate=replicate,
                    seed=seed,
                    wall_time_s=self.timings.get(name, 0.0),
                )
            )
        return reports
