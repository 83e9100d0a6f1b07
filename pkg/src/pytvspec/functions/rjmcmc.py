# -*- coding: utf-8 -*-
"""
Reversible-Jump MCMC Utility Functions module.
Part of the pyTVSpec package.

Sampler over piecewise-stationary segmentations (K, cutpoints) and the per-segment
log-spectrum parameters (alpha0, beta, tau2), and summaries of its output on a
time x frequency grid.

Moves
-----
within    MH update of (alpha0, beta) of every segment from a Gaussian centred at the
          conditional mode, Gibbs draw of tau2, then one cutpoint relocation.
birth     split of a segment at a new cutpoint; tau2 split through an auxiliary u.
death     merge of two adjacent segments, reverse of birth.
relocate  move of one cutpoint, local or global uniform proposal.
"""

from __future__ import annotations

import logging
import typing

import numpy as np
from scipy import linalg
from tqdm import tqdm

from pytvspec.functions.basis import (
    build_basis,
    eval_log_spectrum,
    log_prior_coefficients,
    log_prior_tau2,
)
from pytvspec.functions.partition import log_prior_partition
from pytvspec.functions.spectral import (
    SeriesLike,
    as_values,
    default_freq_grid,
    segment_periodogram,
    whittle_loglik,
    whittle_weights,
)
from pytvspec.support.data import (
    BasisMatrix,
    ModelState,
    Partition,
    PartitionConfig,
    PiecewiseSpectrum,
    PosteriorDraws,
    SamplerConfig,
    SegmentParams,
    SpectrumCurve,
    TvSpectrum,
)
from pytvspec.support.utils.exceptions import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)

MOVES = ("birth", "death", "relocate", "within")
LOG_2PI = float(np.log(2.0 * np.pi))


# =============================================================================
# CONDITIONAL MODE
# =============================================================================
class ConditionalMode(typing.NamedTuple):
    """Result of the Newton search for the conditional mode of (alpha0, beta)."""

    mode: np.ndarray
    neg_hessian: np.ndarray
    converged: bool
    n_iter: int


class GaussianProposal:
    """
    Multivariate normal N(mean, precision^-1) parameterized by its precision.

    Parameters
    ----------
    mean : numpy.ndarray
        Centre of the proposal.
    precision : numpy.ndarray
        Positive-definite precision matrix.
    """

    def __init__(self, mean: np.ndarray, precision: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        self.chol = linalg.cholesky(precision, lower=True)
        self.half_logdet = float(np.sum(np.log(np.diag(self.chol))))

    @property
    def dim(self) -> int:
        return self.mean.size

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.dim)
        return self.mean + linalg.solve_triangular(self.chol, z, lower=True, trans="T")

    def logpdf(self, x: np.ndarray) -> float:
        v = self.chol.T @ (np.asarray(x, dtype=float) - self.mean)
        return float(-0.5 * v @ v + self.half_logdet - 0.5 * self.dim * LOG_2PI)


# -----------------------------------------------------------------------------


def _objective(theta, design, ordinates, weights, prior_prec) -> float:
    g = design @ theta
    value = -0.5 * float(theta @ (prior_prec * theta))
    if ordinates is not None:
        value += float(np.sum(weights * (-g - ordinates * np.exp(-g))))
    return value


def _gradient_and_neg_hessian(theta, design, ordinates, weights, prior_prec):
    grad = -prior_prec * theta
    neg_h = np.diag(prior_prec)
    if ordinates is not None:
        e = weights * ordinates * np.exp(-(design @ theta))
        grad = grad + design.T @ (e - weights)
        neg_h = neg_h + (design.T * e) @ design
    return grad, neg_h


def newton_mode(
    design: np.ndarray,
    ordinates: typing.Optional[np.ndarray],
    weights: typing.Optional[np.ndarray],
    prior_prec: np.ndarray,
    start: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> ConditionalMode:
    """
    Newton ascent with step halving on the conditional log-posterior of a segment.

    The objective is sum_k c_k (-g_k - I_k exp(-g_k)) - theta' P theta / 2 with
    g = design @ theta and P = diag(prior_prec). Passing ``ordinates=None`` drops the
    likelihood term.

    Raises
    ------
    NumericalError
        If the objective is not finite at the start.
    """
    theta = np.array(start, dtype=float)
    f = _objective(theta, design, ordinates, weights, prior_prec)
    if not np.isfinite(f):
        raise NumericalError("conditional log-posterior is not finite at the start")

    grad, neg_h = _gradient_and_neg_hessian(theta, design, ordinates, weights, prior_prec)
    for it in range(max_iter):
        if np.max(np.abs(grad), initial=0.0) < tol:
            return ConditionalMode(theta, neg_h, True, it)
        try:
            step = linalg.solve(neg_h, grad, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            break
        t = 1.0
        for _ in range(40):
            cand = theta + t * step
            fc = _objective(cand, design, ordinates, weights, prior_prec)
            if np.isfinite(fc) and fc >= f - 1e-12 * abs(f):
                break
            t *= 0.5
        else:
            break
        theta, f = cand, fc
        grad, neg_h = _gradient_and_neg_hessian(
            theta, design, ordinates, weights, prior_prec
        )
    converged = bool(np.max(np.abs(grad), initial=0.0) < tol)
    return ConditionalMode(theta, neg_h, converged, max_iter)


# -----------------------------------------------------------------------------


def prior_precision(J: int, tau2: float, alpha_prior_var: float = 100.0) -> np.ndarray:
    """Diagonal of the prior precision of (alpha0, beta)."""
    return np.concatenate(([1.0 / alpha_prior_var], np.full(J, 1.0 / tau2)))


def default_start(ordinates, weights, J: int) -> np.ndarray:
    """Newton start: log of the weighted mean ordinate, beta = 0."""
    start = np.zeros(J + 1)
    if ordinates is not None and np.sum(weights) > 0:
        level = np.sum(weights * ordinates) / np.sum(weights)
        start[0] = np.log(max(level, 1e-300))
    return start


# -----------------------------------------------------------------------------


def conditional_mode(
    y_segment: SeriesLike,
    tau2: float,
    basis: BasisMatrix,
    start: typing.Optional[np.ndarray] = None,
    *,
    alpha_prior_var: float = 100.0,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> ConditionalMode:
    """
    Conditional mode of (alpha0, beta) given tau2 for one segment.

    Maximizes segment_loglik - beta'beta / (2 tau2) - alpha0^2 / (2 alpha_prior_var)
    by Newton ascent until the gradient infinity-norm drops below ``tol`` or
    ``max_iter`` iterations are spent.

    Parameters
    ----------
    y_segment : array_like
        Observations of the segment.
    tau2 : float
        Smoothing variance, positive.
    basis : BasisMatrix
        Basis for the segment length.
    start : numpy.ndarray, optional
        Starting point; defaults to (log weighted mean periodogram, 0).
    alpha_prior_var : float, optional
        Prior variance of alpha0; ``numpy.inf`` gives a flat prior. Default 100.
    tol, max_iter : optional
        Stopping rule.

    Returns
    -------
    ConditionalMode
        Mode, negative Hessian at the mode, and a convergence flag. Callers fall back
        to a random-walk proposal when the flag is False.

    Raises
    ------
    InvalidInputError
        If tau2 is not positive or the basis does not match the segment.
    NumericalError
        If the objective is not finite.
    """
    if not tau2 > 0:
        raise InvalidInputError(f"tau2 must be positive, got {tau2}")
    pg = segment_periodogram(y_segment)
    if pg.freqs.size != basis.n_freq:
        raise InvalidInputError("basis does not match the segment length")
    weights = whittle_weights(pg.freqs)
    design = np.column_stack([np.ones(basis.n_freq), basis.design])
    prec = prior_precision(basis.J, tau2, alpha_prior_var)
    if start is None:
        start = default_start(pg.ordinates, weights, basis.J)
    return newton_mode(design, pg.ordinates, weights, prec, start, tol, max_iter)


# =============================================================================
# CHAIN CONTEXT
# =============================================================================
class SegmentData:
    """Cached quantities of the segment covering times start+1 .. end."""

    __slots__ = (
        "start",
        "end",
        "n",
        "basis",
        "design",
        "ordinates",
        "weights",
        "start_theta",
    )

    def __init__(self, start, end, basis, design, ordinates, weights, start_theta):
        self.start = start
        self.end = end
        self.n = end - start
        self.basis = basis
        self.design = design
        self.ordinates = ordinates
        self.weights = weights
        self.start_theta = start_theta

    @property
    def J(self) -> int:
        return self.basis.J


class ChainContext:
    """
    Series, settings and caches shared by the moves of one chain.

    Parameters
    ----------
    y : TimeSeries or array_like
        Observed series of length T >= t_min.
    cfg : SamplerConfig
        Sampler settings.
    partition_cfg : PartitionConfig
        Segmentation limits. S is clamped to T // t_min.
    use_likelihood : bool, optional
        If False the chain samples from the prior. Default True.
    cache_size : int, optional
        Number of cached segments before the cache is flushed.

    Raises
    ------
    InvalidInputError
        If T < t_min.
    """

    def __init__(
        self,
        y: SeriesLike,
        cfg: SamplerConfig,
        partition_cfg: PartitionConfig,
        use_likelihood: bool = True,
        cache_size: int = 20000,
    ):
        self.y = as_values(y)
        self.T = int(self.y.size)
        self.cfg = cfg
        self.partition_cfg = partition_cfg
        self.t_min = partition_cfg.t_min
        self.use_likelihood = use_likelihood
        self.cache_size = cache_size
        if self.T < self.t_min:
            raise InvalidInputError(
                f"series of length {self.T} is shorter than t_min={self.t_min}"
            )
        self.S = partition_cfg.max_segments(self.T)
        if self.T < 2 * self.t_min:
            logger.warning(
                "T=%d < 2*t_min=%d: the segmentation is fixed at K=1",
                self.T,
                2 * self.t_min,
            )
        elif self.S < partition_cfg.S:
            logger.info(
                "maximum segment count reduced from %d to %d (T=%d, t_min=%d)",
                partition_cfg.S,
                self.S,
                self.T,
                self.t_min,
            )
        self._segments: typing.Dict[typing.Tuple[int, int], SegmentData] = {}
        self.acceptance: typing.Dict[str, typing.List[int]] = {
            m: [0, 0] for m in (*MOVES, "within_relocate")
        }

    def segment(self, start: int, end: int) -> SegmentData:
        key = (start, end)
        seg = self._segments.get(key)
        if seg is not None:
            return seg
        if len(self._segments) >= self.cache_size:
            self._segments.clear()
        basis = build_basis(end - start, self.cfg.J_max, self.t_min)
        design = np.column_stack([np.ones(basis.n_freq), basis.design])
        if self.use_likelihood:
            pg = segment_periodogram(self.y[start:end])
            ordinates, weights = pg.ordinates, whittle_weights(pg.freqs)
        else:
            ordinates, weights = None, None
        seg = SegmentData(
            start,
            end,
            basis,
            design,
            ordinates,
            weights,
            default_start(ordinates, weights, basis.J),
        )
        self._segments[key] = seg
        return seg

    def loglik(self, seg: SegmentData, theta: np.ndarray) -> float:
        if seg.ordinates is None:
            return 0.0
        g = seg.design @ theta
        return float(np.sum(seg.weights * (-g - seg.ordinates * np.exp(-g))))

    def log_posterior(self, seg: SegmentData, theta: np.ndarray, tau2: float) -> float:
        """Log-likelihood plus log prior of (alpha0, beta) given tau2."""
        return self.loglik(seg, theta) + log_prior_coefficients(
            theta, tau2, self.cfg.alpha_prior_var
        )

    def log_prior_tau2(self, tau2: float) -> float:
        return log_prior_tau2(tau2, self.cfg.tau_a, self.cfg.tau_b)

    def fit(self, seg: SegmentData, tau2: float) -> ConditionalMode:
        prec = prior_precision(seg.J, tau2, self.cfg.alpha_prior_var)
        try:
            return newton_mode(
                seg.design,
                seg.ordinates,
                seg.weights,
                prec,
                seg.start_theta,
                self.cfg.newton_tol,
                self.cfg.newton_max_iter,
            )
        except NumericalError:
            logger.debug("mode search failed on segment (%d, %d]", seg.start, seg.end)
            return ConditionalMode(seg.start_theta, np.diag(prec), False, 0)

    def proposal(
        self, seg: SegmentData, tau2: float
    ) -> typing.Optional[GaussianProposal]:
        """Gaussian proposal at the conditional mode, None if the search failed."""
        fit = self.fit(seg, tau2)
        if not fit.converged:
            return None
        try:
            return GaussianProposal(fit.mode, fit.neg_hessian)
        except linalg.LinAlgError:
            return None

    def record(self, move: str, proposed: bool, accepted: bool) -> None:
        self.acceptance[move][0] += int(proposed)
        self.acceptance[move][1] += int(accepted)


# -----------------------------------------------------------------------------


def segment_loglik(
    y_segment: SeriesLike, params: SegmentParams, basis: BasisMatrix
) -> float:
    """
    Whittle log-likelihood of one segment under its parameters.

    Raises
    ------
    InvalidInputError
        If the basis does not match the segment length or beta.
    """
    pg = segment_periodogram(y_segment)
    if pg.freqs.size != basis.n_freq:
        raise InvalidInputError("basis does not match the segment length")
    return whittle_loglik(pg, eval_log_spectrum(basis, params))


# -----------------------------------------------------------------------------


def state_loglik(state: ModelState, ctx: ChainContext) -> float:
    """Sum of the segment log-likelihoods of a state."""
    total = 0.0
    for s, params in enumerate(state.segments, start=1):
        seg = ctx.segment(*state.partition.segment_bounds(s))
        total += ctx.loglik(seg, params.theta)
    return total


# =============================================================================
# MOVE HELPERS
# =============================================================================
class Proposal(typing.NamedTuple):
    state: ModelState
    log_ratio: float


def acceptance_probability(log_ratio: float) -> float:
    """min(1, exp(log_ratio)); NaN ratios give 0."""
    if np.isnan(log_ratio):
        return 0.0
    return float(np.exp(min(0.0, log_ratio)))


def _accept(log_ratio: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() < acceptance_probability(log_ratio))


def _make_state(T: int, cutpoints, segments) -> ModelState:
    return ModelState.model_construct(
        partition=Partition.model_construct(
            T=T, cutpoints=tuple(int(c) for c in cutpoints)
        ),
        segments=list(segments),
    )


def _params(theta: np.ndarray, tau2: float) -> SegmentParams:
    return SegmentParams.model_construct(
        alpha0=float(theta[0]), beta=np.array(theta[1:]), tau2=float(tau2)
    )


def splittable_segments(partition: Partition, t_min: int) -> typing.List[int]:
    """1-based indices of segments long enough to be split."""
    return [s for s, n in enumerate(partition.lengths, start=1) if n >= 2 * t_min]


# -----------------------------------------------------------------------------


def move_probabilities(state: ModelState, ctx: ChainContext) -> typing.Dict[str, float]:
    """
    Move selection probabilities renormalized over the moves feasible in ``state``.

    Birth needs K < S and a segment of length >= 2 t_min; death and relocate need
    K > 1; within is always feasible.
    """
    K = state.K
    feasible = {
        "birth": K < ctx.S and bool(splittable_segments(state.partition, ctx.t_min)),
        "death": K > 1,
        "relocate": K > 1,
        "within": True,
    }
    base = {
        "birth": ctx.cfg.p_birth,
        "death": ctx.cfg.p_death,
        "relocate": ctx.cfg.p_relocate,
        "within": ctx.cfg.p_within,
    }
    total = sum(base[m] for m in MOVES if feasible[m])
    return {m: (base[m] / total if feasible[m] else 0.0) for m in MOVES}


# -----------------------------------------------------------------------------


def draw_tau2(
    beta: np.ndarray, rng: np.random.Generator, a: float = 1.0, b: float = 1.0
) -> float:
    """Gibbs draw tau2 ~ InverseGamma(a + J/2, b + beta'beta/2)."""
    beta = np.asarray(beta, dtype=float)
    shape = a + 0.5 * beta.size
    scale = b + 0.5 * float(beta @ beta)
    return float(scale / rng.gamma(shape))


# -----------------------------------------------------------------------------


def within_log_ratio(
    ctx: ChainContext,
    seg: SegmentData,
    theta_current: np.ndarray,
    theta_proposed: np.ndarray,
    tau2: float,
    proposal: GaussianProposal,
) -> float:
    """MH log-ratio of an independence proposal for (alpha0, beta) of one segment."""
    return (
        ctx.log_posterior(seg, theta_proposed, tau2)
        - ctx.log_posterior(seg, theta_current, tau2)
        + proposal.logpdf(theta_current)
        - proposal.logpdf(theta_proposed)
    )


# =============================================================================
# MOVES
# =============================================================================
def update_within(
    state: ModelState, ctx: ChainContext, rng: np.random.Generator
) -> ModelState:
    """
    Within-model update of every segment followed by one cutpoint relocation.

    For each segment (alpha0, beta) is proposed from N(mode, (-H)^-1) and accepted by
    MH; when the mode search fails a random walk with step ``rw_step`` is used. tau2
    is then drawn from its inverse-gamma full conditional.

    Parameters
    ----------
    state : ModelState
        Current state.
    ctx : ChainContext
        Series and settings.
    rng : numpy.random.Generator
        Random generator.

    Returns
    -------
    ModelState
        Updated state; rejected proposals leave the parameters unchanged.
    """
    cfg = ctx.cfg
    part = state.partition
    segments = list(state.segments)
    for s in range(1, part.K + 1):
        seg = ctx.segment(*part.segment_bounds(s))
        current = segments[s - 1]
        theta, tau2 = current.theta, current.tau2
        proposal = ctx.proposal(seg, tau2)
        if proposal is not None:
            theta_new = proposal.sample(rng)
            log_r = within_log_ratio(ctx, seg, theta, theta_new, tau2, proposal)
        else:
            theta_new = theta + cfg.rw_step * rng.standard_normal(theta.size)
            log_r = ctx.log_posterior(seg, theta_new, tau2) - ctx.log_posterior(
                seg, theta, tau2
            )
        accepted = _accept(log_r, rng)
        ctx.record("within", True, accepted)
        if accepted:
            theta = theta_new
        tau2 = draw_tau2(theta[1:], rng, cfg.tau_a, cfg.tau_b)
        segments[s - 1] = _params(theta, tau2)

    state = ModelState.model_construct(partition=part, segments=segments)
    if part.K > 1:
        relocation = propose_relocate(state, ctx, rng, move="within")
        accepted = relocation is not None and _accept(relocation.log_ratio, rng)
        ctx.record("within_relocate", relocation is not None, accepted)
        if accepted:
            state = relocation.state
    return state


# -----------------------------------------------------------------------------


def _split_jacobian(tau2: float, u: float) -> float:
    return float(np.log(2.0 * tau2 / (u * (1.0 - u))))


def propose_birth(
    state: ModelState,
    ctx: ChainContext,
    rng: np.random.Generator,
    *,
    segment: typing.Optional[int] = None,
    cut: typing.Optional[int] = None,
    u: typing.Optional[float] = None,
    thetas: typing.Optional[typing.Tuple[np.ndarray, np.ndarray]] = None,
) -> typing.Optional[Proposal]:
    """
    Split a segment in two.

    A splittable segment and a cutpoint inside it are drawn uniformly, u ~ U(0, 1)
    maps tau2 to tau2 u/(1-u) and tau2 (1-u)/u, and both children draw (alpha0, beta)
    from Gaussians at their conditional modes.

    Parameters
    ----------
    state : ModelState
        Current state.
    ctx : ChainContext
        Series and settings.
    rng : numpy.random.Generator
        Random generator.
    segment, cut, u, thetas : optional
        Force the random choices (1-based segment index, new cutpoint, auxiliary
        variable, child parameters).

    Returns
    -------
    Proposal or None
        Proposed state and log acceptance ratio; None when the move is infeasible or
        a mode search failed (counts as rejected).
    """
    probs = move_probabilities(state, ctx)
    if probs["birth"] == 0.0:
        return None
    part = state.partition
    t_min = ctx.t_min
    split = splittable_segments(part, t_min)
    s = segment if segment is not None else split[int(rng.integers(len(split)))]
    if s not in split:
        raise InvalidInputError(f"segment {s} cannot be split")
    a, b = part.segment_bounds(s)
    lo, hi = a + t_min, b - t_min
    c = cut if cut is not None else int(rng.integers(lo, hi + 1))
    if not lo <= c <= hi:
        raise InvalidInputError(f"cut {c} outside [{lo}, {hi}]")
    if u is None:
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
    parent = state.segments[s - 1]
    tau2 = parent.tau2
    tau2_l = tau2 * u / (1.0 - u)
    tau2_r = tau2 * (1.0 - u) / u

    seg_p, seg_l, seg_r = ctx.segment(a, b), ctx.segment(a, c), ctx.segment(c, b)
    q_p, q_l, q_r = (
        ctx.proposal(seg_p, tau2),
        ctx.proposal(seg_l, tau2_l),
        ctx.proposal(seg_r, tau2_r),
    )
    if q_p is None or q_l is None or q_r is None:
        return None
    if thetas is None:
        theta_l, theta_r = q_l.sample(rng), q_r.sample(rng)
    else:
        theta_l, theta_r = (np.asarray(t, dtype=float) for t in thetas)

    xi = part.cutpoints
    segments = [
        *state.segments[: s - 1],
        _params(theta_l, tau2_l),
        _params(theta_r, tau2_r),
        *state.segments[s:],
    ]
    new_state = _make_state(part.T, (*xi[:s], c, *xi[s:]), segments)
    probs_rev = move_probabilities(new_state, ctx)

    log_r = (
        ctx.log_posterior(seg_l, theta_l, tau2_l)
        + ctx.log_prior_tau2(tau2_l)
        + ctx.log_posterior(seg_r, theta_r, tau2_r)
        + ctx.log_prior_tau2(tau2_r)
        - ctx.log_posterior(seg_p, parent.theta, tau2)
        - ctx.log_prior_tau2(tau2)
    )
    log_r += log_prior_partition(new_state.partition, ctx.partition_cfg)
    log_r -= log_prior_partition(part, ctx.partition_cfg)
    # reverse death picks one of the K cutpoints of the new state
    log_r += np.log(probs_rev["death"]) - np.log(part.K)
    log_r -= np.log(probs["birth"]) - np.log(len(split)) - np.log(hi - lo + 1)
    log_r += q_p.logpdf(parent.theta) - q_l.logpdf(theta_l) - q_r.logpdf(theta_r)
    log_r += _split_jacobian(tau2, u)
    return Proposal(new_state, float(log_r))


# -----------------------------------------------------------------------------


def propose_death(
    state: ModelState,
    ctx: ChainContext,
    rng: np.random.Generator,
    *,
    cut_index: typing.Optional[int] = None,
    theta: typing.Optional[np.ndarray] = None,
) -> typing.Optional[Proposal]:
    """
    Merge the two segments adjacent to a uniformly chosen cutpoint.

    The merged tau2 is the geometric mean of the two, and (alpha0, beta) is drawn
    from the Gaussian at the merged segment's conditional mode.

    Parameters
    ----------
    state : ModelState
        Current state.
    ctx : ChainContext
        Series and settings.
    rng : numpy.random.Generator
        Random generator.
    cut_index, theta : optional
        Force the removed cutpoint (1..K-1) and the merged parameters.

    Returns
    -------
    Proposal or None
        Proposed state and log acceptance ratio; None when K = 1 or a mode search
        failed.
    """
    probs = move_probabilities(state, ctx)
    if probs["death"] == 0.0:
        return None
    part = state.partition
    K = part.K
    j = cut_index if cut_index is not None else int(rng.integers(1, K))
    if not 1 <= j <= K - 1:
        raise InvalidInputError(f"cut index {j} outside 1..{K - 1}")
    xi = part.cutpoints
    a, c, b = xi[j - 1], xi[j], xi[j + 1]
    left, right = state.segments[j - 1], state.segments[j]
    tau2 = float(np.sqrt(left.tau2 * right.tau2))
    u = float(np.sqrt(left.tau2) / (np.sqrt(left.tau2) + np.sqrt(right.tau2)))

    seg_p, seg_l, seg_r = ctx.segment(a, b), ctx.segment(a, c), ctx.segment(c, b)
    q_p, q_l, q_r = (
        ctx.proposal(seg_p, tau2),
        ctx.proposal(seg_l, left.tau2),
        ctx.proposal(seg_r, right.tau2),
    )
    if q_p is None or q_l is None or q_r is None:
        return None
    theta_p = q_p.sample(rng) if theta is None else np.asarray(theta, dtype=float)

    segments = [
        *state.segments[: j - 1],
        _params(theta_p, tau2),
        *state.segments[j + 1 :],
    ]
    new_state = _make_state(part.T, (*xi[:j], *xi[j + 1 :]), segments)
    probs_rev = move_probabilities(new_state, ctx)
    n_split = len(splittable_segments(new_state.partition, ctx.t_min))
    n_cuts = (b - a) - 2 * ctx.t_min + 1

    log_r = (
        ctx.log_posterior(seg_p, theta_p, tau2)
        + ctx.log_prior_tau2(tau2)
        - ctx.log_posterior(seg_l, left.theta, left.tau2)
        - ctx.log_prior_tau2(left.tau2)
        - ctx.log_posterior(seg_r, right.theta, right.tau2)
        - ctx.log_prior_tau2(right.tau2)
    )
    log_r += log_prior_partition(new_state.partition, ctx.partition_cfg)
    log_r -= log_prior_partition(part, ctx.partition_cfg)
    log_r += np.log(probs_rev["birth"]) - np.log(n_split) - np.log(n_cuts)
    log_r -= np.log(probs["death"]) - np.log(K - 1)
    log_r += q_l.logpdf(left.theta) + q_r.logpdf(right.theta) - q_p.logpdf(theta_p)
    log_r -= _split_jacobian(tau2, u)
    return Proposal(new_state, float(log_r))


# -----------------------------------------------------------------------------


def relocate_log_density(
    new: int, old: int, lo: int, hi: int, window: int, p_local: float
) -> float:
    """Log-probability of proposing cutpoint ``new`` from ``old`` on [lo, hi]."""
    w_lo, w_hi = max(lo, old - window), min(hi, old + window)
    density = (1.0 - p_local) / (hi - lo + 1)
    if w_lo <= new <= w_hi:
        density += p_local / (w_hi - w_lo + 1)
    return float(np.log(density))


def propose_relocate(
    state: ModelState,
    ctx: ChainContext,
    rng: np.random.Generator,
    *,
    move: str = "relocate",
    cut_index: typing.Optional[int] = None,
    position: typing.Optional[int] = None,
    thetas: typing.Optional[typing.Tuple[np.ndarray, np.ndarray]] = None,
) -> typing.Optional[Proposal]:
    """
    Move one cutpoint and refresh the parameters of the two adjacent segments.

    With probability ``p_local`` the new position is uniform within
    +/- ``relocate_window`` of the old one, otherwise uniform over every position
    that keeps both segments at least t_min long. tau2 of both segments is kept and
    (alpha0, beta) re-drawn from the conditional modes.

    Parameters
    ----------
    state : ModelState
        Current state with K > 1.
    ctx : ChainContext
        Series and settings.
    rng : numpy.random.Generator
        Random generator.
    move : str, optional
        Move whose selection probability enters the ratio ("relocate" or "within").
    cut_index, position, thetas : optional
        Force the random choices.

    Returns
    -------
    Proposal or None
        None when K = 1 or a mode search failed.
    """
    part = state.partition
    K = part.K
    if K < 2:
        return None
    cfg = ctx.cfg
    j = cut_index if cut_index is not None else int(rng.integers(1, K))
    xi = part.cutpoints
    a, c, b = xi[j - 1], xi[j], xi[j + 1]
    lo, hi = a + ctx.t_min, b - ctx.t_min
    if position is None:
        if rng.random() < cfg.p_local:
            w_lo = max(lo, c - cfg.relocate_window)
            w_hi = min(hi, c + cfg.relocate_window)
            c_new = int(rng.integers(w_lo, w_hi + 1))
        else:
            c_new = int(rng.integers(lo, hi + 1))
    else:
        c_new = int(position)
    if not lo <= c_new <= hi:
        raise InvalidInputError(f"position {c_new} outside [{lo}, {hi}]")

    left, right = state.segments[j - 1], state.segments[j]
    seg_lo, seg_ro = ctx.segment(a, c), ctx.segment(c, b)
    seg_ln, seg_rn = ctx.segment(a, c_new), ctx.segment(c_new, b)
    q_lo, q_ro = ctx.proposal(seg_lo, left.tau2), ctx.proposal(seg_ro, right.tau2)
    q_ln, q_rn = ctx.proposal(seg_ln, left.tau2), ctx.proposal(seg_rn, right.tau2)
    if q_lo is None or q_ro is None or q_ln is None or q_rn is None:
        return None
    if thetas is None:
        theta_l, theta_r = q_ln.sample(rng), q_rn.sample(rng)
    else:
        theta_l, theta_r = (np.asarray(t, dtype=float) for t in thetas)

    segments = list(state.segments)
    segments[j - 1] = _params(theta_l, left.tau2)
    segments[j] = _params(theta_r, right.tau2)
    new_state = _make_state(part.T, (*xi[:j], c_new, *xi[j + 1 :]), segments)

    log_r = (
        ctx.log_posterior(seg_ln, theta_l, left.tau2)
        + ctx.log_posterior(seg_rn, theta_r, right.tau2)
        - ctx.log_posterior(seg_lo, left.theta, left.tau2)
        - ctx.log_posterior(seg_ro, right.theta, right.tau2)
    )
    log_r += log_prior_partition(new_state.partition, ctx.partition_cfg)
    log_r -= log_prior_partition(part, ctx.partition_cfg)
    log_r += np.log(move_probabilities(new_state, ctx)[move])
    log_r -= np.log(move_probabilities(state, ctx)[move])
    log_r += relocate_log_density(c, c_new, lo, hi, cfg.relocate_window, cfg.p_local)
    log_r -= relocate_log_density(c_new, c, lo, hi, cfg.relocate_window, cfg.p_local)
    log_r += q_lo.logpdf(left.theta) + q_ro.logpdf(right.theta)
    log_r -= q_ln.logpdf(theta_l) + q_rn.logpdf(theta_r)
    return Proposal(new_state, float(log_r))


# =============================================================================
# CHAIN
# =============================================================================
def initial_state(ctx: ChainContext) -> ModelState:
    """K = 1, alpha0 = log mean periodogram, beta = 0, tau2 = 1."""
    seg = ctx.segment(0, ctx.T)
    theta = seg.start_theta.copy()
    return _make_state(ctx.T, (0, ctx.T), [_params(theta, 1.0)])


# -----------------------------------------------------------------------------


def step(state: ModelState, ctx: ChainContext, rng: np.random.Generator) -> ModelState:
    """One sampler iteration: select a feasible move and apply it."""
    probs = move_probabilities(state, ctx)
    cum = np.cumsum([probs[m] for m in MOVES])
    idx = int(np.searchsorted(cum, rng.random(), side="right"))
    move = MOVES[min(idx, len(MOVES) - 1)]
    if move == "within":
        return update_within(state, ctx, rng)
    proposer = {
        "birth": propose_birth,
        "death": propose_death,
        "relocate": propose_relocate,
    }[move]
    proposal = proposer(state, ctx, rng)
    accepted = proposal is not None and _accept(proposal.log_ratio, rng)
    ctx.record(move, True, accepted)
    return proposal.state if accepted else state


# -----------------------------------------------------------------------------


def segment_log_spectra(
    state: ModelState, freq_grid: np.ndarray, J_max: int = 30, t_min: int = 2
) -> np.ndarray:
    """
    Log spectrum of every segment on ``freq_grid``, shape (K, n_freq).

    g is evaluated at the segment's Fourier frequencies and linearly interpolated
    in frequency, constant beyond the first and last of them.
    """
    out = np.empty((state.K, freq_grid.size))
    for s, params in enumerate(state.segments, start=1):
        a, b = state.partition.segment_bounds(s)
        basis = build_basis(b - a, J_max, min(t_min, b - a))
        g = params.alpha0 + basis.design @ params.beta
        out[s - 1] = np.interp(freq_grid, basis.freqs, g)
    return out


# -----------------------------------------------------------------------------


def run_chain(
    y: SeriesLike,
    cfg: typing.Optional[SamplerConfig] = None,
    partition_cfg: typing.Optional[PartitionConfig] = None,
    output_grid: typing.Optional[np.ndarray] = None,
    *,
    use_likelihood: bool = True,
    progress: bool = False,
) -> PosteriorDraws:
    """
    Run the reversible-jump sampler.

    The chain starts at K = 1 and runs ``cfg.n_iter`` iterations. After ``n_burn``
    iterations every ``thin``-th state is retained and its piecewise spectrum
    exp(g(nu, t)) accumulated on the output grid.

    Parameters
    ----------
    y : TimeSeries or array_like
        Observed series.
    cfg : SamplerConfig, optional
        Sampler settings, defaults to ``SamplerConfig()``.
    partition_cfg : PartitionConfig, optional
        Segmentation limits, defaults to ``PartitionConfig()``.
    output_grid : numpy.ndarray, optional
        Frequencies of the output grid. Defaults to 101 points on [0, 0.5].
    use_likelihood : bool, optional
        If False the chain samples from the prior. Default True.
    progress : bool, optional
        Show a tqdm progress bar. Default False.

    Returns
    -------
    PosteriorDraws
        Accumulated spectra, K histogram, traces and (optionally) retained states.
        The alpha0 and tau2 traces follow segment 1 only, whose left end stays
        at t = 1 while K changes; per-segment values are on the retained states.

    Raises
    ------
    InvalidInputError
        If T < t_min or the output grid is invalid.
    """
    cfg = cfg or SamplerConfig()
    partition_cfg = partition_cfg or PartitionConfig()
    if output_grid is None:
        freq_grid = default_freq_grid()
    else:
        freq_grid = np.asarray(output_grid, dtype=float)
    if freq_grid.ndim != 1 or np.any(np.diff(freq_grid) <= 0):
        raise InvalidInputError("output grid must be strictly increasing")
    if freq_grid[0] < 0 or freq_grid[-1] > 0.5:
        raise InvalidInputError("output grid must lie in [0, 0.5]")
    ctx = ChainContext(y, cfg, partition_cfg, use_likelihood=use_likelihood)
    T = ctx.T
    rng = np.random.default_rng(cfg.rng_seed)
    state = initial_state(ctx)

    # difference arrays: a segment (a, b] adds at row a and removes at row b
    diff_sum = np.zeros((T + 1, freq_grid.size))
    diff_sumsq = np.zeros((T + 1, freq_grid.size))
    k_counts: typing.Dict[int, int] = {}
    iterations, k_trace, alpha0_trace, tau2_trace = [], [], [], []
    cutpoint_trace: typing.List[typing.Tuple[int, ...]] = []
    states: typing.List[ModelState] = []

    for it in tqdm(range(cfg.n_iter), desc="RJMCMC", disable=not progress):
        state = step(state, ctx, rng)
        if it < cfg.n_burn or (it - cfg.n_burn) % cfg.thin:
            continue
        spec = np.exp(segment_log_spectra(state, freq_grid, cfg.J_max, ctx.t_min))
        xi = np.asarray(state.partition.cutpoints)
        diff_sum[xi[:-1]] += spec
        diff_sum[xi[1:]] -= spec
        diff_sumsq[xi[:-1]] += spec**2
        diff_sumsq[xi[1:]] -= spec**2
        k_counts[state.K] = k_counts.get(state.K, 0) + 1
        iterations.append(it)
        k_trace.append(state.K)
        cutpoint_trace.append(state.partition.interior)
        alpha0_trace.append(state.segments[0].alpha0)
        tau2_trace.append(state.segments[0].tau2)
        if cfg.keep_states:
            states.append(state)

    spectrum_sum = np.cumsum(diff_sum, axis=0)[:T]
    spectrum_sumsq = np.cumsum(diff_sumsq, axis=0)[:T]
    draws = PosteriorDraws.model_construct(
        time_grid=np.arange(1, T + 1),
        freq_grid=freq_grid,
        spectrum_sum=spectrum_sum,
        spectrum_sumsq=spectrum_sumsq,
        n_retained=len(iterations),
        k_counts=k_counts,
        iterations=np.asarray(iterations, dtype=np.int64),
        k_trace=np.asarray(k_trace, dtype=np.int64),
        cutpoint_trace=cutpoint_trace,
        alpha0_trace=np.asarray(alpha0_trace),
        tau2_trace=np.asarray(tau2_trace),
        states=states if cfg.keep_states else None,
        acceptance={m: (p, a) for m, (p, a) in ctx.acceptance.items()},
        t_min=ctx.t_min,
        J_max=cfg.J_max,
    )
    logger.info(
        "chain finished: %d retained, posterior mode K=%d, acceptance %s",
        draws.n_retained,
        draws.mode_k() if draws.n_retained else 0,
        {m: round(r, 3) for m, r in draws.acceptance_rates().items() if np.isfinite(r)},
    )
    return draws


# =============================================================================
# POSTERIOR SUMMARIES
# =============================================================================
class PosteriorBand(typing.NamedTuple):
    variance: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def posterior_mean_spectrum(draws: PosteriorDraws) -> TvSpectrum:
    """
    Posterior mean of f(nu, t) on the output grid.

    Raises
    ------
    InvalidInputError
        If no state was retained.
    """
    if draws.n_retained < 1:
        raise InvalidInputError("posterior summaries need at least one retained draw")
    return TvSpectrum(
        time_grid=draws.time_grid,
        freq_grid=draws.freq_grid,
        power=draws.spectrum_sum / draws.n_retained,
    )


# -----------------------------------------------------------------------------


def posterior_band(
    draws: PosteriorDraws, level: float = 0.9, max_cells: int = 20_000_000
) -> PosteriorBand:
    """
    Pointwise posterior variance and central credible band of f(nu, t).

    Quantiles are taken over the retained states, processed in blocks of time
    points so that at most ``max_cells`` values are held at once.

    Raises
    ------
    InvalidInputError
        If no state was retained, states were not kept, or ``level`` is not in (0, 1).
    """
    if draws.n_retained < 1:
        raise InvalidInputError("posterior summaries need at least one retained draw")
    if not 0 < level < 1:
        raise InvalidInputError("level must lie in (0, 1)")
    if not draws.states:
        raise InvalidInputError("credible bands need the retained states (keep_states)")
    mean = draws.spectrum_sum / draws.n_retained
    variance = np.clip(draws.spectrum_sumsq / draws.n_retained - mean**2, 0.0, None)

    F = draws.freq_grid.size
    logspecs = [
        segment_log_spectra(st, draws.freq_grid, draws.J_max, draws.t_min)
        for st in draws.states
    ]
    seg_index = [np.repeat(np.arange(st.K), st.partition.lengths) for st in draws.states]
    n = len(logspecs)
    block = max(1, max_cells // (n * F))
    probs = [(1.0 - level) / 2.0, (1.0 + level) / 2.0]
    lower = np.empty((draws.T, F))
    upper = np.empty((draws.T, F))
    for t0 in range(0, draws.T, block):
        t1 = min(draws.T, t0 + block)
        values = np.stack([g[idx[t0:t1]] for g, idx in zip(logspecs, seg_index)])
        lo, hi = np.quantile(values, probs, axis=0)
        lower[t0:t1] = np.exp(lo)
        upper[t0:t1] = np.exp(hi)
    return PosteriorBand(variance, lower, upper)


# -----------------------------------------------------------------------------


def derive_piecewise_spectrum(
    draws: PosteriorDraws, mean: typing.Optional[TvSpectrum] = None
) -> PiecewiseSpectrum:
    """
    Piecewise spectrum summarizing a fit.

    Uses the posterior mode K, the componentwise median cutpoints among retained
    states with that K, and the time average of the posterior mean within each
    segment.
    """
    if mean is None:
        mean = posterior_mean_spectrum(draws)
    K = draws.mode_k()
    cuts = np.floor(draws.median_cutpoints(K)).astype(int) if K > 1 else np.array([], int)
    bounds = [0, *cuts.tolist(), draws.T]
    curves = [
        SpectrumCurve(freqs=mean.freq_grid, power=mean.power[a:b].mean(axis=0))
        for a, b in zip(bounds[:-1], bounds[1:])
    ]
    lengths = [b - a for a, b in zip(bounds[:-1], bounds[1:])]
    return PiecewiseSpectrum(segment_lengths=lengths, curves=curves)
