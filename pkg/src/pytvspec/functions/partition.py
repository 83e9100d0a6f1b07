# -*- coding: utf-8 -*-
"""
Partition Model Utility Functions module.
Part of the pyTVSpec package.

Prior over segmentations of 1..T: Pr(K) = 1/S and cutpoints drawn sequentially,
each uniform over the positions that still leave room for the remaining segments.
"""

from __future__ import annotations

import logging
import math
import typing

import numpy as np

from pytvspec.support.data import Partition, PartitionConfig
from pytvspec.support.utils.exceptions import (
    EmptyDomainError,
    InvalidInputError,
    ResourceLimitError,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 10**6


# =============================================================================
# CUTPOINT PRIOR
# =============================================================================
def location_range(
    T: int, xi_prev: int, s: int, K: int, t_min: int
) -> typing.Tuple[int, int]:
    """
    Valid positions [lo, hi] of cutpoint s given the previous cutpoint.

    Raises
    ------
    EmptyDomainError
        If no position is valid.
    """
    lo = xi_prev + t_min
    hi = T - (K - s) * t_min
    if hi < lo:
        raise EmptyDomainError(
            f"no valid location for cutpoint {s} of {K} (T={T}, previous={xi_prev}, "
            f"t_min={t_min})"
        )
    return lo, hi


# -----------------------------------------------------------------------------


def available_locations(T: int, xi_prev: int, s: int, K: int, t_min: int) -> int:
    """
    Number of valid positions p_{s,K} = T - xi_{s-1} - (K - s + 1) t_min + 1.

    Parameters
    ----------
    T : int
        Series length.
    xi_prev : int
        Previous cutpoint xi_{s-1}.
    s : int
        Index of the cutpoint being placed, 1 <= s <= K-1.
    K : int
        Number of segments.
    t_min : int
        Minimum segment length.

    Raises
    ------
    EmptyDomainError
        If no position is valid; callers must not propose in that case.
    """
    lo, hi = location_range(T, xi_prev, s, K, t_min)
    return hi - lo + 1


# -----------------------------------------------------------------------------


def check_partition(p: Partition, cfg: PartitionConfig) -> None:
    """Raise InvalidInputError if ``p`` violates the limits of ``cfg``."""
    if p.K > cfg.S:
        raise InvalidInputError(f"K={p.K} exceeds the maximum of {cfg.S} segments")
    if min(p.lengths) < cfg.t_min:
        raise InvalidInputError(
            f"segment lengths {p.lengths} violate t_min={cfg.t_min}"
        )


# -----------------------------------------------------------------------------


def log_prior_partition(p: Partition, cfg: PartitionConfig) -> float:
    """
    Log prior of a partition, -log S - sum_{s=1}^{K-1} log p_{s,K}.

    Raises
    ------
    InvalidInputError
        If the partition violates ``cfg``.
    """
    check_partition(p, cfg)
    lp = -math.log(cfg.S)
    xi = p.cutpoints
    for s in range(1, p.K):
        lp -= math.log(available_locations(p.T, xi[s - 1], s, p.K, cfg.t_min))
    return lp


# =============================================================================
# ENUMERATION
# =============================================================================
def count_partitions(T: int, K: int, t_min: int) -> int:
    """Number of partitions of 1..T into K segments of length >= t_min."""
    free = T - K * t_min
    if free < 0:
        return 0
    return math.comb(free + K - 1, K - 1)


# -----------------------------------------------------------------------------


def enumerate_partitions(
    T: int, cfg: PartitionConfig, max_count: int = MAX_ENUMERATION
) -> typing.List[Partition]:
    """
    Every valid partition of 1..T exactly once.

    Parameters
    ----------
    T : int
        Series length.
    cfg : PartitionConfig
        Minimum segment length and maximum segment count.
    max_count : int, optional
        Bound on the number of partitions. Default 10**6.

    Raises
    ------
    InvalidInputError
        If T < t_min.
    ResourceLimitError
        If more than ``max_count`` partitions exist.
    """
    if T < cfg.t_min:
        raise InvalidInputError(f"T={T} is shorter than t_min={cfg.t_min}")
    k_max = cfg.max_segments(T)
    total = sum(count_partitions(T, K, cfg.t_min) for K in range(1, k_max + 1))
    if total > max_count:
        raise ResourceLimitError(
            f"{total} partitions exceed the enumeration bound of {max_count}"
        )

    out: typing.List[Partition] = []

    def _extend(prefix: typing.List[int], K: int) -> None:
        s = len(prefix)
        if s == K:
            out.append(Partition.model_construct(T=T, cutpoints=(*prefix, T)))
            return
        lo, hi = location_range(T, prefix[-1], s, K, cfg.t_min)
        for xi in range(lo, hi + 1):
            _extend([*prefix, xi], K)

    for K in range(1, k_max + 1):
        _extend([0], K)
    logger.debug("enumerated %d partitions of T=%d", len(out), T)
    return out


# -----------------------------------------------------------------------------


def prior_table(
    T: int, cfg: PartitionConfig
) -> typing.Tuple[typing.List[Partition], np.ndarray]:
    """
    Partitions of 1..T with their prior probabilities renormalized over feasible K.

    Pr(K) = 1/S puts no mass on segment counts that cannot fit in T; this oracle
    spreads it over the feasible ones.
    """
    parts = enumerate_partitions(T, cfg)
    probs = np.exp([log_prior_partition(p, cfg) for p in parts])
    return parts, probs / probs.sum()
