"""
Abstract Base Class Module used by the spectral estimators.
Part of the pyTVSpec package.
"""

from __future__ import annotations

import abc
import typing

import numpy as np
from pydantic import BaseModel

from pytvspec.algorithms.data.result import BaseResult
from pytvspec.algorithms.data.run_params import BaseRunParams
from pytvspec.functions.spectral import default_freq_grid
from pytvspec.support.data import TimeSeries, TvSpectrum

T_RunParams = typing.TypeVar("T_RunParams", bound=BaseRunParams)
T_Result = typing.TypeVar("T_Result", bound=BaseResult)
T_Data = typing.TypeVar("T_Data", bound=TimeSeries)


class BaseAlgorithm(typing.Generic[T_RunParams, T_Result, T_Data], abc.ABC):
    """
    Abstract base class for time-varying spectral estimators.

    Attributes
    ----------
    result : T_Result, optional
        Result of the last run.
    run_params : T_RunParams, optional
        Parameters of the run.
    name : str, optional
        Name of the estimator inside a setup; defaults to the class name.
    code : str
        Short label used in reports and seed derivation ("AD", "G", "R").
    RunParamCls : Type[T_RunParams]
        Run parameter class, a subclass of BaseRunParams.
    ResultCls : Type[T_Result]
        Result class, a subclass of BaseResult.
    data : TimeSeries, optional
        Series set by the setup.

    Warning
    -------
    The BaseAlgorithm class is not intended for direct instantiation by users.
    """

    result: typing.Optional[T_Result] = None
    run_params: typing.Optional[T_RunParams] = None
    name: typing.Optional[str] = None
    code: typing.ClassVar[str] = ""
    RunParamCls: typing.Type[T_RunParams]
    ResultCls: typing.Type[T_Result]

    data: typing.Optional[T_Data] = None

    def __init__(
        self,
        run_params: typing.Optional[T_RunParams] = None,
        name: typing.Optional[str] = None,
        *args: typing.Any,
        **kwargs: typing.Any,
    ):
        """
        Initialize the estimator.

        Parameters
        ----------
        run_params : T_RunParams, optional
            Run parameters. When omitted they are built from ``kwargs`` (or the
            defaults of ``RunParamCls``).
        name : str, optional
            Name of the estimator, defaults to the class name.
        **kwargs : dict
            Fields of ``RunParamCls``.
        """
        if run_params is not None:
            self.run_params = run_params
        else:
            self.run_params = self.RunParamCls(**kwargs)
        self.name = name or self.__class__.__name__

    def _pre_run(self) -> None:
        if self.data is None:
            raise ValueError(
                f"{self.name}: data must be set before running the estimator, "
                "use a Setup class to run it"
            )
        if self.run_params is None:
            raise ValueError(f"{self.name}: run parameters must be set before running")

    @abc.abstractmethod
    def run(self) -> T_Result:
        """Estimate on ``data`` with ``run_params`` and return a ``ResultCls``."""

    @abc.abstractmethod
    def tv_spectrum(self, freq_grid: typing.Optional[np.ndarray] = None) -> TvSpectrum:
        """
        Estimated time-varying spectrum on a frequency grid.

        Raises
        ------
        ValueError
            If the estimator has not been run.
        """
        if self.result is None:
            raise ValueError(f"{self.name}: run the estimator first")

    def set_run_params(self, run_params: T_RunParams) -> "BaseAlgorithm":
        self.run_params = run_params
        return self

    def _set_result(self, result: T_Result) -> "BaseAlgorithm":
        self.result = result
        return self

    def _set_data(self, data: T_Data) -> "BaseAlgorithm":
        """Attach the series; called by the setup."""
        self.data = data
        self.result = None
        return self

    def _freq_grid(self, freq_grid: typing.Optional[np.ndarray]) -> np.ndarray:
        if freq_grid is not None:
            return np.asarray(freq_grid, dtype=float)
        return default_freq_grid(self.run_params.n_freq)

    def __class_getitem__(cls, item):
        # bind RunParamCls and ResultCls from the subscript of concrete subclasses
        if not issubclass(cls, BaseAlgorithm):
            cls.RunParamCls = item[0]
            cls.ResultCls = item[1]
        return cls

    def __init_subclass__(cls, **kwargs):
        """
        Check that subclasses define ``RunParamCls`` and ``ResultCls``.

        Raises
        ------
        ValueError
            If either is missing or of the wrong type.
        """
        super().__init_subclass__(**kwargs)

        if not getattr(cls, "RunParamCls", None) or not issubclass(
            cls.RunParamCls, BaseModel
        ):
            raise ValueError(
                f"{cls.__name__}: RunParamCls must be defined in subclasses of "
                "BaseAlgorithm\n\n"
                f"class {cls.__name__}:\n"
                "\tRunParamCls = ...\n"
            )
        if not getattr(cls, "ResultCls", None) or not issubclass(
            cls.ResultCls, BaseResult
        ):
            raise ValueError(
                f"{cls.__name__}: ResultCls must be defined in subclasses of "
                "BaseAlgorithm\n\n"
                f"class {cls.__name__}:\n"
                "\tResultCls = ...\n"
            )
