"""
Domain data types.
Part of the pyTVSpec package.

Value types shared by the spectral, sampler, generator and baseline modules. Numeric
arrays are numpy arrays validated on construction; internally generated objects that
are already known to be valid are built with ``model_construct``.
"""

from __future__ import annotations

import typing

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pytvspec.support.utils.typing import FloatArray, IntArray

SCHEMA_VERSION = 1


class _DataModel(BaseModel):
    model_config = ConfigDict(from_attributes=True, arbitrary_types_allowed=True)


# =============================================================================
# SPECTRAL CORE
# =============================================================================
class TimeSeries(_DataModel):
    """
    Ordered real-valued observations.

    Attributes
    ----------
    values : numpy.ndarray
        1-D array of finite observations.
    origin_label : str, optional
        Free text describing the provenance of the series.
    dates : list of str, optional
        ISO-8601 time stamps, one per observation.
    """

    values: FloatArray
    origin_label: typing.Optional[str] = None
    dates: typing.Optional[typing.List[str]] = None

    @model_validator(mode="after")
    def _check(self) -> "TimeSeries":
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("TimeSeries values must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("TimeSeries values must be finite")
        if self.dates is not None and len(self.dates) != self.values.size:
            raise ValueError("dates and values must have the same length")
        return self

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


class FourierCoeffs(_DataModel):
    """DFT coefficients at frequencies k/n, k = 0..n-1."""

    real_part: FloatArray
    imag_part: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "FourierCoeffs":
        if self.real_part.shape != self.imag_part.shape or self.real_part.ndim != 1:
            raise ValueError("real and imaginary parts must be 1-D with equal length")
        n = self.real_part.size
        scale = max(1.0, float(np.max(np.abs(self.real_part), initial=0.0)))
        if n and abs(self.imag_part[0]) > 1e-10 * scale:
            raise ValueError("imaginary part at frequency 0 must vanish")
        if n and n % 2 == 0 and abs(self.imag_part[n // 2]) > 1e-10 * scale:
            raise ValueError("imaginary part at the Nyquist frequency must vanish")
        return self

    @property
    def n(self) -> int:
        return int(self.real_part.size)

    def to_complex(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part


class Periodogram(_DataModel):
    """
    Periodogram ordinates.

    Attributes
    ----------
    freqs : numpy.ndarray
        Frequencies in cycles per observation.
    ordinates : numpy.ndarray
        Squared DFT moduli at ``freqs``.
    n : int
        Length of the series the ordinates come from.
    """

    freqs: FloatArray
    ordinates: FloatArray
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def _check(self) -> "Periodogram":
        if self.freqs.shape != self.ordinates.shape or self.freqs.ndim != 1:
            raise ValueError("freqs and ordinates must be 1-D with equal length")
        if not np.all(np.isfinite(self.ordinates)) or np.any(self.ordinates < 0):
            raise ValueError("periodogram ordinates must be finite and nonnegative")
        return self


class SpectrumCurve(_DataModel):
    """Spectral density sampled on increasing frequencies in [0, 0.5]."""

    freqs: FloatArray
    power: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "SpectrumCurve":
        if self.freqs.shape != self.power.shape or self.freqs.ndim != 1:
            raise ValueError("freqs and power must be 1-D with equal length")
        if self.freqs.size == 0:
            raise ValueError("SpectrumCurve needs at least one frequency")
        if np.any(np.diff(self.freqs) <= 0):
            raise ValueError("SpectrumCurve freqs must be strictly increasing")
        if self.freqs[0] < 0 or self.freqs[-1] > 0.5:
            raise ValueError("SpectrumCurve freqs must lie in [0, 0.5]")
        if not np.all(np.isfinite(self.power)) or np.any(self.power <= 0):
            raise ValueError("SpectrumCurve power must be positive and finite")
        return self

    def at(self, freqs: np.ndarray) -> np.ndarray:
        """Linear interpolation of the curve (constant beyond the end points)."""
        return np.interp(np.asarray(freqs, dtype=float), self.freqs, self.power)


class TvSpectrum(_DataModel):
    """
    Time-varying spectrum on a time x frequency grid.

    Attributes
    ----------
    time_grid : numpy.ndarray
        Integer time indices, usually 1..T.
    freq_grid : numpy.ndarray
        Frequencies in [0, 0.5].
    power : numpy.ndarray
        Matrix of shape (len(time_grid), len(freq_grid)) with positive entries.
    """

    time_grid: IntArray
    freq_grid: FloatArray
    power: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "TvSpectrum":
        if self.power.shape != (self.time_grid.size, self.freq_grid.size):
            raise ValueError(
                f"power shape {self.power.shape} does not match grid "
                f"({self.time_grid.size}, {self.freq_grid.size})"
            )
        if not np.all(np.isfinite(self.power)) or np.any(self.power <= 0):
            raise ValueError("TvSpectrum power must be positive and finite")
        return self

    def same_grid(self, other: "TvSpectrum") -> bool:
        return (
            self.power.shape == other.power.shape
            and np.array_equal(self.time_grid, other.time_grid)
            and np.allclose(self.freq_grid, other.freq_grid, rtol=0, atol=1e-12)
        )


# =============================================================================
# SMOOTHING BASIS
# =============================================================================
class BasisMatrix(_DataModel):
    """
    Truncated eigenbasis of the Brownian-motion covariance.

    Attributes
    ----------
    freqs : numpy.ndarray
        Likelihood frequencies k/n, k = 1..n//2.
    design : numpy.ndarray
        Design matrix of shape (n_freq, J), columns scaled by sqrt(eigenvalue).
    eigenvalues : numpy.ndarray
        Leading J eigenvalues in nonincreasing order.
    """

    freqs: FloatArray
    design: FloatArray
    eigenvalues: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "BasisMatrix":
        if self.design.ndim != 2 or self.design.shape[0] != self.freqs.size:
            raise ValueError("design rows must match the frequency count")
        if self.design.shape[1] != self.eigenvalues.size:
            raise ValueError("design columns must match the eigenvalue count")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be nonincreasing")
        return self

    @property
    def n_freq(self) -> int:
        return int(self.freqs.size)

    @property
    def J(self) -> int:
        return int(self.design.shape[1])


class SegmentParams(_DataModel):
    """
    Parameters of one locally stationary segment.

    Attributes
    ----------
    alpha0 : float
        Log-power intercept.
    beta : numpy.ndarray
        Basis coefficients.
    tau2 : float
        Smoothing variance.
    """

    alpha0: float
    beta: FloatArray
    tau2: float = Field(gt=0)

    @model_validator(mode="after")
    def _check(self) -> "SegmentParams":
        if self.beta.ndim != 1 or not np.all(np.isfinite(self.beta)):
            raise ValueError("beta must be a finite 1-D array")
        if not np.isfinite(self.alpha0) or not np.isfinite(self.tau2):
            raise ValueError("alpha0 and tau2 must be finite")
        return self

    @property
    def theta(self) -> np.ndarray:
        """Stacked (alpha0, beta) vector."""
        return np.concatenate(([self.alpha0], self.beta))


# =============================================================================
# PARTITION MODEL
# =============================================================================
class PartitionConfig(_DataModel):
    """
    Segmentation limits.

    Attributes
    ----------
    t_min : int
        Minimum segment length, default 50.
    S : int
        Maximum number of segments, default 30.
    """

    t_min: int = Field(default=50, ge=2)
    S: int = Field(default=30, ge=1)

    def max_segments(self, T: int) -> int:
        """Largest segment count feasible for a series of length T."""
        return max(1, min(self.S, T // self.t_min))


class Partition(_DataModel):
    """
    Segmentation of 1..T.

    Segment s covers times cutpoints[s-1]+1 .. cutpoints[s].
    """

    T: int = Field(ge=1)
    cutpoints: typing.Tuple[int, ...]

    @model_validator(mode="after")
    def _check(self) -> "Partition":
        xi = self.cutpoints
        if len(xi) < 2 or xi[0] != 0 or xi[-1] != self.T:
            raise ValueError("cutpoints must start at 0 and end at T")
        if any(b <= a for a, b in zip(xi[:-1], xi[1:])):
            raise ValueError("cutpoints must be strictly increasing")
        return self

    @property
    def K(self) -> int:
        return len(self.cutpoints) - 1

    @property
    def lengths(self) -> typing.Tuple[int, ...]:
        xi = self.cutpoints
        return tuple(b - a for a, b in zip(xi[:-1], xi[1:]))

    @property
    def interior(self) -> typing.Tuple[int, ...]:
        return self.cutpoints[1:-1]

    def segment_bounds(self, s: int) -> typing.Tuple[int, int]:
        """0-based slice bounds of segment s (1-based)."""
        return self.cutpoints[s - 1], self.cutpoints[s]

    def is_valid(self, cfg: PartitionConfig) -> bool:
        return self.K <= cfg.S and min(self.lengths) >= cfg.t_min


# =============================================================================
# SAMPLER
# =============================================================================
class SamplerConfig(_DataModel):
    """
    Reversible-jump sampler settings.

    Attributes
    ----------
    n_iter, n_burn, thin : int
        Total iterations, burn-in and thinning interval.
    p_birth, p_death, p_relocate, p_within : float
        Base move probabilities, renormalized over feasible moves.
    newton_tol : float
        Gradient infinity-norm tolerance of the conditional-mode search.
    newton_max_iter : int
        Iteration cap of the conditional-mode search.
    relocate_window : int
        Half width of the local cutpoint proposal.
    p_local : float
        Probability of the local cutpoint proposal.
    rw_step : float
        Random-walk step used when the mode search fails.
    J_max : int
        Maximum number of basis functions.
    alpha_prior_var : float
        Prior variance of the intercept.
    tau_a, tau_b : float
        Inverse-gamma prior on the smoothing variance.
    rng_seed : int
        Seed of the chain generator.
    keep_states : bool
        Whether retained states are stored on the result.
    """

    n_iter: int = Field(default=10000, ge=1)
    n_burn: int = Field(default=2000, ge=0)
    thin: int = Field(default=1, ge=1)
    p_birth: float = Field(default=0.25, ge=0)
    p_death: float = Field(default=0.25, ge=0)
    p_relocate: float = Field(default=0.2, ge=0)
    p_within: float = Field(default=0.3, ge=0)
    newton_tol: float = Field(default=1e-6, gt=0)
    newton_max_iter: int = Field(default=100, ge=1)
    relocate_window: int = Field(default=10, ge=1)
    p_local: float = Field(default=0.5, ge=0, le=1)
    rw_step: float = Field(default=0.1, gt=0)
    J_max: int = Field(default=30, ge=0)
    alpha_prior_var: float = Field(default=100.0, gt=0)
    tau_a: float = Field(default=1.0, gt=0)
    tau_b: float = Field(default=1.0, gt=0)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    keep_states: bool = True

    @model_validator(mode="after")
    def _check(self) -> "SamplerConfig":
        total = self.p_birth + self.p_death + self.p_relocate + self.p_within
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"move probabilities must sum to 1, got {total}")
        if self.p_within <= 0:
            raise ValueError("p_within must be positive")
        if self.n_burn >= self.n_iter:
            raise ValueError("n_burn must be smaller than n_iter")
        return self


class ModelState(_DataModel):
    """Partition plus the parameters of each of its segments."""

    partition: Partition
    segments: typing.List[SegmentParams]

    @model_validator(mode="after")
    def _check(self) -> "ModelState":
        if len(self.segments) != self.partition.K:
            raise ValueError("one SegmentParams per segment is required")
        return self

    @property
    def K(self) -> int:
        return self.partition.K


class SegmentRecord(_DataModel):
    alpha0: float
    tau2: float
    beta: typing.List[float]


class DrawRecord(_DataModel):
    """One retained sampler state, serialized as a JSON line."""

    schema_version: int = SCHEMA_VERSION
    iteration: int
    K: int
    cutpoints: typing.List[int]
    segments: typing.List[SegmentRecord]

    @classmethod
    def from_state(cls, iteration: int, state: ModelState) -> "DrawRecord":
        return cls(
            iteration=iteration,
            K=state.K,
            cutpoints=list(state.partition.cutpoints),
            segments=[
                SegmentRecord(alpha0=p.alpha0, tau2=p.tau2, beta=p.beta.tolist())
                for p in state.segments
            ],
        )

    def to_state(self) -> ModelState:
        T = self.cutpoints[-1]
        return ModelState(
            partition=Partition(T=T, cutpoints=tuple(self.cutpoints)),
            segments=[
                SegmentParams(alpha0=s.alpha0, beta=s.beta, tau2=s.tau2)
                for s in self.segments
            ],
        )


class PosteriorDraws(_DataModel):
    """
    Output of a reversible-jump chain.

    Attributes
    ----------
    time_grid, freq_grid : numpy.ndarray
        Output grid of the accumulated spectra.
    spectrum_sum, spectrum_sumsq : numpy.ndarray
        Sums of exp(g) and exp(2g) over retained states.
    n_retained : int
        Number of retained states.
    k_counts : dict
        Histogram of the segment count over retained states.
    iterations : numpy.ndarray
        Iteration index of every retained state.
    k_trace : numpy.ndarray
        Segment count of every retained state.
    cutpoint_trace : list of tuple
        Interior cutpoints of every retained state.
    alpha0_trace, tau2_trace : numpy.ndarray
        Intercept and smoothing variance of the first segment of every retained state.
    states : list of ModelState, optional
        Retained states, when requested.
    acceptance : dict
        Per move type, the pair (proposed, accepted).
    t_min, J_max : int
        Settings needed to re-evaluate stored states.
    """

    time_grid: IntArray
    freq_grid: FloatArray
    spectrum_sum: FloatArray
    spectrum_sumsq: FloatArray
    n_retained: int = Field(ge=0)
    k_counts: typing.Dict[int, int]
    iterations: IntArray
    k_trace: IntArray
    cutpoint_trace: typing.List[typing.Tuple[int, ...]]
    alpha0_trace: FloatArray
    tau2_trace: FloatArray
    states: typing.Optional[typing.List[ModelState]] = None
    acceptance: typing.Dict[str, typing.Tuple[int, int]] = {}
    t_min: int = 50
    J_max: int = 30

    @model_validator(mode="after")
    def _check(self) -> "PosteriorDraws":
        if sum(self.k_counts.values()) != self.n_retained:
            raise ValueError("K histogram total must equal n_retained")
        shape = (self.time_grid.size, self.freq_grid.size)
        if self.spectrum_sum.shape != shape or self.spectrum_sumsq.shape != shape:
            raise ValueError("accumulators must match the output grid")
        return self

    @property
    def T(self) -> int:
        return int(self.time_grid.size)

    def k_posterior(self) -> typing.Dict[int, float]:
        """Posterior probability of each visited segment count."""
        return {k: c / self.n_retained for k, c in sorted(self.k_counts.items())}

    def mode_k(self) -> int:
        """Most visited segment count (smallest on ties)."""
        if not self.k_counts:
            raise ValueError("no retained draws")
        return max(sorted(self.k_counts), key=lambda k: self.k_counts[k])

    def cutpoint_samples(self, k: int) -> np.ndarray:
        """Interior cutpoints of retained states with k segments, shape (m, k-1)."""
        rows = [c for c, kk in zip(self.cutpoint_trace, self.k_trace) if kk == k]
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), k - 1)

    def median_cutpoints(self, k: int) -> np.ndarray:
        samples = self.cutpoint_samples(k)
        if samples.shape[0] == 0:
            raise ValueError(f"no retained state has K={k}")
        return np.median(samples, axis=0)

    def acceptance_rates(self) -> typing.Dict[str, float]:
        return {
            move: (acc / prop if prop else float("nan"))
            for move, (prop, acc) in self.acceptance.items()
        }


# =============================================================================
# GENERATORS / BASELINES
# =============================================================================
class GarchParams(_DataModel):
    """
    GARCH(1,1) parameters.

    Attributes
    ----------
    mu : float
        Mean of the returns.
    alpha0 : float
        Variance intercept, positive.
    alpha1, beta1 : float
        ARCH and GARCH coefficients, nonnegative with alpha1 + beta1 < 1.
    """

    mu: float = 0.0
    alpha0: float = Field(gt=0)
    alpha1: float = Field(ge=0)
    beta1: float = Field(ge=0)

    @model_validator(mode="after")
    def _check(self) -> "GarchParams":
        if self.alpha1 + self.beta1 >= 1:
            raise ValueError("alpha1 + beta1 must be smaller than 1 (stationarity)")
        return self

    @property
    def persistence(self) -> float:
        return self.alpha1 + self.beta1

    @property
    def sigma2_uc(self) -> float:
        """Unconditional variance alpha0 / (1 - alpha1 - beta1)."""
        return self.alpha0 / (1.0 - self.alpha1 - self.beta1)


class RegimeSpec(_DataModel):
    """
    Deterministic regime layout.

    Attributes
    ----------
    regimes : list of GarchParams
        Parameters of each regime.
    cutpoints : list of int
        End of each segment, increasing, the last equal to T.
    labels : list of int
        Regime (1-based) active in each segment.
    """

    regimes: typing.List[GarchParams]
    cutpoints: typing.List[int]
    labels: typing.List[int]

    @model_validator(mode="after")
    def _check(self) -> "RegimeSpec":
        if len(self.cutpoints) != len(self.labels) or not self.cutpoints:
            raise ValueError("cutpoints and labels must have the same nonzero length")
        if self.cutpoints[0] < 1 or any(
            b <= a for a, b in zip(self.cutpoints[:-1], self.cutpoints[1:])
        ):
            raise ValueError("cutpoints must be positive and increasing")
        if any(lab < 1 or lab > len(self.regimes) for lab in self.labels):
            raise ValueError("labels must lie in 1..N_R")
        if len(self.labels) < len(self.regimes):
            raise ValueError("each regime needs at least one segment")
        return self

    @property
    def T(self) -> int:
        return self.cutpoints[-1]

    def regime_path(self) -> np.ndarray:
        """0-based regime index at each t = 1..T."""
        lengths = np.diff(np.concatenate(([0], self.cutpoints)))
        return np.repeat(np.asarray(self.labels) - 1, lengths)


class PiecewiseSpectrum(_DataModel):
    """Concatenation of stationary spectra, one curve per segment."""

    segment_lengths: typing.List[int]
    curves: typing.List[SpectrumCurve]

    @model_validator(mode="after")
    def _check(self) -> "PiecewiseSpectrum":
        if len(self.segment_lengths) != len(self.curves) or not self.curves:
            raise ValueError("one curve per segment is required")
        if min(self.segment_lengths) < 2:
            raise ValueError("segment lengths must be at least 2")
        return self

    @property
    def T(self) -> int:
        return int(sum(self.segment_lengths))


class MsGarchParams(_DataModel):
    """Per-regime GARCH parameters and a row-stochastic transition matrix."""

    regimes: typing.List[GarchParams]
    transition: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "MsGarchParams":
        n = len(self.regimes)
        P = self.transition
        if P.shape != (n, n):
            raise ValueError(f"transition must be {n}x{n}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition rows must be nonnegative and sum to 1")
        return self

    @property
    def n_regimes(self) -> int:
        return len(self.regimes)


class RegimeProbs(_DataModel):
    """Filtered and smoothed regime probabilities, shape (T, N_R)."""

    filtered: FloatArray
    smoothed: FloatArray

    @model_validator(mode="after")
    def _check(self) -> "RegimeProbs":
        for name in ("filtered", "smoothed"):
            arr = getattr(self, name)
            if arr.ndim != 2:
                raise ValueError(f"{name} must be a matrix")
            if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            if np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-10):
                raise ValueError(f"{name} rows must sum to 1")
        if self.filtered.shape != self.smoothed.shape:
            raise ValueError("filtered and smoothed must have the same shape")
        return self


# =============================================================================
# EVALUATION / INGESTION
# =============================================================================
class MetricReport(_DataModel):
    """
    Distance between a true and an estimated spectrum for one replicate.

    ``skl`` and ``mse`` are missing when the estimator failed; ``error`` then holds
    the failure label.
    """

    dgp: str
    estimator: str
    replicate: int = Field(ge=0)
    seed: int
    skl: typing.Optional[float] = Field(default=None, ge=0)
    mse: typing.Optional[float] = Field(default=None, ge=0)
    wall_time_s: float = 0.0
    n_time: int = 0
    n_freq: int = 0
    error: typing.Optional[str] = None


class ReturnsSeries(_DataModel):
    """
    Percent log-returns built from a price file.

    Attributes
    ----------
    dates : list of str, optional
        ISO-8601 date of each return.
    returns : numpy.ndarray
        100 * (ln p_t - ln p_{t-1}).
    squared : numpy.ndarray, optional
        Squared returns.
    dropped_rows : list of int
        1-based data rows of the input file that were discarded.
    """

    dates: typing.Optional[typing.List[str]] = None
    returns: FloatArray
    squared: typing.Optional[FloatArray] = None
    dropped_rows: typing.List[int] = []

    @model_validator(mode="after")
    def _check(self) -> "ReturnsSeries":
        if not np.all(np.isfinite(self.returns)):
            raise ValueError("returns must not contain NaN")
        if self.squared is not None and self.squared.shape != self.returns.shape:
            raise ValueError("squared must match returns")
        if self.dates is not None and len(self.dates) != self.returns.size:
            raise ValueError("dates must match returns")
        return self

    def to_series(self, squared: bool = False, label: str = "returns") -> TimeSeries:
        values = self.returns**2 if squared else self.returns
        return TimeSeries(
            values=values,
            origin_label=f"squared {label}" if squared else label,
            dates=self.dates,
        )
