# -*- coding: utf-8 -*-
"""
Estimator Setup Base Module.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import logging
import time
import typing

from pytvspec.support.data import TimeSeries

if typing.TYPE_CHECKING:
    from pytvspec.algorithms import BaseAlgorithm


logger = logging.getLogger(__name__)


class BaseSetup:
    """
    Base class of the setups that attach a series to several estimators.

    Attributes
    ----------
    algorithms : dict[str, BaseAlgorithm]
        Estimators added to the setup, keyed by name.
    data : TimeSeries
        Series shared by all estimators.
    timings : dict[str, float]
        Wall time in seconds of the last successful run of each estimator.

    Warning
    -------
    The BaseSetup class is not intended for direct instantiation by users.
    """

    algorithms: typing.Dict[str, BaseAlgorithm]
    data: TimeSeries
    timings: typing.Dict[str, float]

    def rollback(self) -> None:
        raise NotImplementedError("subclasses restore their own initial series")

    def add_algorithms(self, *algorithms: BaseAlgorithm) -> None:
        """
        Add estimators to the setup and hand them the series.

        Names must be unique; an estimator with an existing name replaces it.
        """
        added = {alg.name: alg._set_data(data=self.data) for alg in algorithms}
        self.algorithms = {**getattr(self, "algorithms", {}), **added}

    def run_all(self) -> None:
        """Run every estimator in insertion order."""
        for name in list(self.algorithms):
            self.run_by_name(name=name)
        logger.info("%d estimators run on T=%d", len(self.algorithms), self.data.n)

    def run_by_name(self, name: str) -> None:
        """
        Run one estimator, store its result on it and record its wall time.

        A failing run leaves no timing and no result behind.

        Raises
        ------
        KeyError
            If no estimator has that name.
        """
        alg = self[name]
        logger.info("running estimator %s", name)
        logger.debug("run parameters of %s: %s", name, alg.run_params)
        start = time.perf_counter()
        alg._pre_run()
        alg._set_result(alg.run())
        self.timings[name] = time.perf_counter() - start
        logger.debug("%s finished in %.2f s", name, self.timings[name])

    def __getitem__(self, name: str) -> BaseAlgorithm:
        try:
            return self.algorithms[name]
        except KeyError:
            known = ", ".join(self.algorithms) or "none"
            raise KeyError(f"no estimator named '{name}' (known: {known})") from None

    def get(
        self, name: str, default: typing.Optional[BaseAlgorithm] = None
    ) -> typing.Optional[BaseAlgorithm]:
        return self.algorithms.get(name, default)
