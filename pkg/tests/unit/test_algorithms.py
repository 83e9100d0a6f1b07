from typing import Any

import numpy as np
import pytest
from pytvspec.algorithms import ESTIMATORS, GARCH, MSGARCH, AdaptSpec, BaseAlgorithm
from pytvspec.algorithms.data.result import BaseResult
from pytvspec.algorithms.data.run_params import AdaptSpecRunParams, BaseRunParams
from pytvspec.functions import spectral
from pytvspec.setup import SingleSetup

from ..factory import FakeAlgorithm


def test_child_algo_must_define_run_param_cls():
    """
    Check that a subclass of BaseAlgorithm must define RunParamCls
    """
    with pytest.raises(ValueError) as excinfo:

        class MyClass(BaseAlgorithm):
            def run(self):
                return super().run()

            def tv_spectrum(self, *args, **kwargs) -> Any:
                return super().tv_spectrum(*args, **kwargs)

    assert "RunParamCls must be defined in subclasses of BaseAlgorithm" in str(
        excinfo.value
    )


def test_run_param_cls_is_subclass_of_base_run_params():
    """
    Check that RunParamCls must be a pydantic model
    """
    with pytest.raises(ValueError) as excinfo:

        class MyClass(BaseAlgorithm):
            RunParamCls = object

            def run(self):
                return super().run()

            def tv_spectrum(self, *args, **kwargs) -> Any:
                return super().tv_spectrum(*args, **kwargs)

    assert "RunParamCls must be defined in subclasses of BaseAlgorithm" in str(
        excinfo.value
    )


def test_child_algo_must_define_result_cls():
    """
    Check that a subclass of BaseAlgorithm must define ResultCls
    """
    with pytest.raises(ValueError) as excinfo:

        class MyClass(BaseAlgorithm):
            RunParamCls = BaseRunParams

            def run(self):
                return super().run()

            def tv_spectrum(self, *args, **kwargs) -> Any:
                return super().tv_spectrum(*args, **kwargs)

    assert "ResultCls must be defined in subclasses of BaseAlgorithm" in str(
        excinfo.value
    )


def test_result_cls_is_subclass_of_base_result():
    """
    Check that ResultCls must be a subclass of BaseResult
    """
    with pytest.raises(ValueError) as excinfo:

        class MyClass(BaseAlgorithm):
            RunParamCls = BaseRunParams
            ResultCls = object

            def run(self):
                return super().run()

            def tv_spectrum(self, *args, **kwargs) -> Any:
                return super().tv_spectrum(*args, **kwargs)

    assert "ResultCls must be defined in subclasses of BaseAlgorithm" in str(
        excinfo.value
    )


def test_run_cant_be_called_without_data(fake_algorithm_no_param_fixture):
    """
    Check that an estimator outside a setup refuses to run
    """
    with pytest.raises(ValueError) as excinfo:
        fake_algorithm_no_param_fixture._pre_run()
    assert "data must be set before running the estimator" in str(excinfo.value)


def test_tv_spectrum_needs_result():
    """
    Check that tv_spectrum can't be called before run
    """
    with pytest.raises(ValueError) as excinfo:
        FakeAlgorithm().tv_spectrum()
    assert "run the estimator first" in str(excinfo.value)


def test_result_from_setup(fake_single_setup_fixture_with_param: SingleSetup):
    """
    Check that result is not none after run with the setup class
    """
    algos = fake_single_setup_fixture_with_param.algorithms.values()
    assert all(algo.result is None for algo in algos)
    fake_single_setup_fixture_with_param.run_all()
    assert all(isinstance(algo.result, BaseResult) for algo in algos)


def test_run_params_from_kwargs():
    """
    Check that keyword arguments build the run parameters
    """
    alg = AdaptSpec(n_iter=50, n_burn=10, J_max=4, name="fast")
    assert isinstance(alg.run_params, AdaptSpecRunParams)
    assert alg.name == "fast"
    cfg = alg.run_params.sampler_config()
    assert (cfg.n_iter, cfg.n_burn, cfg.J_max) == (50, 10, 4)
    assert alg.run_params.partition_config().t_min == 50
    with pytest.raises(ValueError):
        AdaptSpec(n_iters=50)


def test_estimator_registry():
    """
    Check the estimator codes
    """
    assert ESTIMATORS == {"AD": AdaptSpec, "G": GARCH, "R": MSGARCH}


def test_adaptspec_run(white_noise):
    """
    Check the posterior mean, band and re-evaluation on a new grid
    """
    ss = SingleSetup(white_noise)
    ss.add_algorithms(
        AdaptSpec(n_iter=60, n_burn=20, J_max=5, n_freq=11, rng_seed=1, name="AD")
    )
    ss.run_by_name("AD")
    res = ss["AD"].result
    assert res.spectrum.power.shape == (300, 11)
    assert res.draws.n_retained == 40
    assert np.all(res.upper >= res.lower)
    assert res.piecewise.T == 300
    assert ss["AD"].tv_spectrum() is res.spectrum
    finer = ss["AD"].tv_spectrum(spectral.default_freq_grid(21))
    assert finer.power.shape == (300, 21)
    np.testing.assert_allclose(finer.power[:, ::2], res.spectrum.power)
    assert ss.timings["AD"] > 0


def test_adaptspec_new_grid_needs_states(white_noise):
    """
    Check that a new grid needs the kept states
    """
    ss = SingleSetup(white_noise)
    ss.add_algorithms(
        AdaptSpec(n_iter=30, n_burn=10, J_max=3, n_freq=11, keep_states=False)
    )
    ss.run_all()
    alg = ss["AdaptSpec"]
    assert alg.result.lower is None
    with pytest.raises(ValueError):
        alg.tv_spectrum(spectral.default_freq_grid(21))


def test_garch_run(garch_series):
    """
    Check the flat GARCH spectrum and its evaluation
    """
    series, truth = garch_series
    ss = SingleSetup(series)
    ss.add_algorithms(GARCH(n_freq=101))
    ss.run_all()
    res = ss["GARCH"].result
    assert res.params.persistence < 1
    np.testing.assert_allclose(res.spectrum.power, res.params.sigma2_uc)
    reports = ss.evaluate(truth, dgp="garch")
    assert [r.estimator for r in reports] == ["G"]
    assert reports[0].skl >= 0


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_msgarch_run(garch_series):
    """
    Check the MS-GARCH spectrum and regime probabilities
    """
    series, _ = garch_series
    ss = SingleSetup(series)
    ss.add_algorithms(
        MSGARCH(n_starts=2, screen_eval=60, max_eval=120, seed=0, n_freq=11)
    )
    ss.run_all()
    res = ss["MSGARCH"].result
    assert res.probs.smoothed.shape == (1000, 2)
    sigma = [r.sigma2_uc for r in res.params.regimes]
    assert sigma == sorted(sigma)
    assert np.all(res.spectrum.power >= sigma[0] - 1e-9)
    assert np.all(res.spectrum.power <= sigma[1] + 1e-9)
    grid = spectral.default_freq_grid(5)
    assert ss["MSGARCH"].tv_spectrum(grid).power.shape == (1000, 5)
