from __future__ import annotations

import typing

import numpy as np
from pytvspec.algorithms import BaseAlgorithm
from pytvspec.algorithms.data.result import BaseResult
from pytvspec.algorithms.data.run_params import BaseRunParams
from pytvspec.functions.spectral import default_freq_grid
from pytvspec.support.data import TimeSeries, TvSpectrum


class FakeRunParams(BaseRunParams):
    """FakeRunParams is a subclass of BaseRunParams."""

    level: float = 2.0
    param2: str = "test"


class FakeResult(BaseResult):
    """FakeResult is a subclass of BaseResult."""

    result1: int = 1
    result2: str = "test"


class FakeAlgorithm(BaseAlgorithm[FakeRunParams, FakeResult, TimeSeries]):
    """FakeAlgorithm estimates a flat spectrum at ``run_params.level``."""

    code = "F"
    RunParamCls = FakeRunParams
    ResultCls = FakeResult

    def run(self) -> FakeResult:
        return FakeResult(spectrum=self.tv_spectrum_at(self._freq_grid(None)))

    def tv_spectrum_at(self, freq_grid: np.ndarray) -> TvSpectrum:
        T = self.data.n
        return TvSpectrum(
            time_grid=np.arange(1, T + 1),
            freq_grid=freq_grid,
            power=np.full((T, freq_grid.size), self.run_params.level),
        )

    def tv_spectrum(self, freq_grid: typing.Optional[np.ndarray] = None) -> TvSpectrum:
        super().tv_spectrum(freq_grid)
        return self.tv_spectrum_at(self._freq_grid(freq_grid))


class FakeAlgorithm2(FakeAlgorithm):
    """FakeAlgorithm2 is a subclass of FakeAlgorithm."""

    code = "F2"


class FailingAlgorithm(FakeAlgorithm):
    """FailingAlgorithm raises on run."""

    code = "X"

    def run(self) -> FakeResult:
        raise RuntimeError("estimator failure")


def flat_tvspectrum(level: float, T: int = 10, n_freq: int = 5) -> TvSpectrum:
    """Constant spectrum on the default grid."""
    return TvSpectrum(
        time_grid=np.arange(1, T + 1),
        freq_grid=default_freq_grid(n_freq),
        power=np.full((T, n_freq), float(level)),
    )
