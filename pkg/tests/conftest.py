from __future__ import annotations

import typing
import unittest.mock
from unittest.mock import MagicMock

if typing.TYPE_CHECKING:
    from pytvspec.setup import SingleSetup

import numpy as np
import pytest
from pytvspec.functions import generators
from pytvspec.support.data import SamplerConfig

from .factory import FakeAlgorithm, FakeResult, FakeRunParams


@pytest.fixture(scope="session")
def fake_algorithm_no_param_fixture() -> typing.Generator[FakeAlgorithm, None, None]:
    """Fixture for FakeAlgorithm without parameters."""
    yield FakeAlgorithm()


@pytest.fixture(scope="session")
def fake_ran_algorithm() -> typing.Generator[FakeAlgorithm, None, None]:
    """Fixture for FakeAlgorithm that has been run."""
    fa = FakeAlgorithm()
    # set result to mock that the algorithm has been run
    fa.result = FakeResult()
    yield fa


@pytest.fixture(scope="function")
def fake_single_setup_fixture_with_param() -> typing.Generator[SingleSetup, None, None]:
    """Fixture for SingleSetup with one FakeAlgorithm."""
    from pytvspec.setup import SingleSetup

    ss = SingleSetup(data=np.arange(1.0, 101.0))
    ss.add_algorithms(FakeAlgorithm(run_params=FakeRunParams()))
    yield ss


@pytest.fixture(scope="session")
def white_noise() -> np.ndarray:
    """Repeatable unit white noise of length 300."""
    return np.random.default_rng(42).standard_normal(300)


@pytest.fixture(scope="function", name="ss")
def single_setup_fixture(white_noise) -> typing.Generator[SingleSetup, None, None]:
    """Fixture for SingleSetup on white noise."""
    from pytvspec.setup import SingleSetup

    yield SingleSetup(data=white_noise)


@pytest.fixture(scope="session")
def garch_series():
    """Reference GARCH(1,1) series of length 1000 and its true spectrum."""
    params = generators.reference_garch_params()
    series = generators.simulate_garch(params, 1000, np.random.default_rng(7))
    return series, generators.garch_truth(params, 1000)


@pytest.fixture(scope="session")
def short_sampler_config() -> SamplerConfig:
    """Short chain with a small basis, for tests that only check plumbing."""
    return SamplerConfig(n_iter=60, n_burn=20, J_max=5, rng_seed=3)


@pytest.fixture(autouse=True)
def mock_imports():
    with unittest.mock.patch(
        "matplotlib.pyplot.figure"
    ) as mock_figure, unittest.mock.patch(
        "matplotlib.pyplot.show"
    ) as mock_show, unittest.mock.patch(
        "matplotlib.pyplot.subplots"
    ) as subplots, unittest.mock.patch(
        "matplotlib.pyplot.tight_layout"
    ):
        """
        Mocks the plotting calls for the tests.
        """

        def subplots_side_effect(nrows=1, ncols=1, *args, squeeze=True, **kwargs):
            """
            Mock for matplotlib.pyplot.subplots.
            Returns a MagicMock for the figure and a MagicMock or an array of
            MagicMocks for the axes, shaped like matplotlib's.
            """
            if squeeze and nrows == 1 and ncols == 1:
                return (MagicMock(), MagicMock())
            mock_array = np.empty((nrows, ncols), dtype=object)
            for i in range(nrows):
                for j in range(ncols):
                    mock_array[i, j] = MagicMock()
            if squeeze:
                mock_array = mock_array.reshape(-1) if 1 in (nrows, ncols) else mock_array
            return (MagicMock(), mock_array)

        subplots.side_effect = subplots_side_effect
        yield mock_figure, mock_show, subplots
