"""
This module provides classes for storing run parameters for the spectral
estimators included in the pyTVSpec package.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from pytvspec.support.data import PartitionConfig, SamplerConfig


class BaseRunParams(BaseModel):
    """
    Base class for storing run parameters of the spectral estimators.

    Attributes
    ----------
    n_freq : int
        Number of equally spaced output frequencies on [0, 0.5].
    """

    model_config = ConfigDict(
        from_attributes=True, arbitrary_types_allowed=True, extra="forbid"
    )
    n_freq: int = Field(default=101, ge=2)


class AdaptSpecRunParams(BaseRunParams):
    """
    Run parameters of the reversible-jump piecewise spectral estimator.

    Attributes
    ----------
    n_iter, n_burn, thin : int
        Chain length, burn-in and thinning. Defaults 10000, 2000, 1.
    t_min : int
        Minimum segment length. Default 50.
    S : int
        Maximum number of segments. Default 30.
    J_max : int
        Maximum number of basis functions per segment. Default 30.
    p_birth, p_death, p_relocate, p_within : float
        Base move probabilities.
    rng_seed : int
        Seed of the chain.
    keep_states : bool
        Keep the retained states, needed for credible bands and draw records.
    band_level : float
        Coverage of the pointwise credible band. Default 0.9.
    progress : bool
        Show a progress bar.
    """

    n_iter: int = 10000
    n_burn: int = 2000
    thin: int = 1
    t_min: int = 50
    S: int = 30
    J_max: int = 30
    p_birth: float = 0.25
    p_death: float = 0.25
    p_relocate: float = 0.2
    p_within: float = 0.3
    rng_seed: int = 0
    keep_states: bool = True
    band_level: float = Field(default=0.9, gt=0, lt=1)
    progress: bool = False

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(
            n_iter=self.n_iter,
            n_burn=self.n_burn,
            thin=self.thin,
            J_max=self.J_max,
            p_birth=self.p_birth,
            p_death=self.p_death,
            p_relocate=self.p_relocate,
            p_within=self.p_within,
            rng_seed=self.rng_seed,
            keep_states=self.keep_states,
        )

    def partition_config(self) -> PartitionConfig:
        return PartitionConfig(t_min=self.t_min, S=self.S)


class GarchRunParams(BaseRunParams):
    """GARCH(1,1) quasi-likelihood settings."""

    max_eval: int = 5000
    tol: float = 1e-8


class MsGarchRunParams(BaseRunParams):
    """
    Markov-switching GARCH settings.

    Attributes
    ----------
    n_regimes : int
        Number of regimes. Default 2.
    n_starts : int
        Number of optimizer starts. Default 5.
    seed : int, optional
        Seed of the start perturbations.
    variance_carry : {"per_regime", "collapsed"}
        Lagged variance used in each regime's recursion.
    max_eval, screen_eval : int
        Final and per-start screening evaluation budgets.
    tol : float
        Simplex tolerance.
    """

    n_regimes: int = Field(default=2, ge=1)
    n_starts: int = Field(default=5, ge=1)
    seed: Optional[int] = None
    variance_carry: Literal["per_regime", "collapsed"] = "per_regime"
    max_eval: int = 5000
    screen_eval: int = 600
    tol: float = 1e-8
