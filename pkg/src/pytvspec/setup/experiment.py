# -*- coding: utf-8 -*-
"""
Replicated Experiment Module.
Part of the pyTVSpec package.

Simulates replicates of a data generating process, runs the requested estimators
on each through a :class:`SingleSetup` and scores them against the truth.
"""

from __future__ import annotations

import concurrent.futures
import logging
import pathlib
import typing

import numpy as np
from tqdm import tqdm

from pytvspec.algorithms import ESTIMATORS
from pytvspec.functions import gen, generators
from pytvspec.functions.spectral import default_freq_grid
from pytvspec.setup.single import SingleSetup
from pytvspec.support.config import ESTIMATOR_CODES, RunConfig
from pytvspec.support.data import (
    MetricReport,
    PiecewiseSpectrum,
    TimeSeries,
    TvSpectrum,
)
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

# second key of the seed sequence of each random stream of a replicate
STREAM_KEYS = {"data": 0, "AD": 1, "G": 2, "R": 3}


# =============================================================================
# DATA
# =============================================================================
def simulate_dgp(
    dgp: str,
    T: int,
    rng: np.random.Generator,
    cfg: typing.Optional[RunConfig] = None,
    piecewise: typing.Optional[PiecewiseSpectrum] = None,
) -> typing.Tuple[TimeSeries, TvSpectrum]:
    """
    One realization of a data generating process and its true spectrum.

    Parameters
    ----------
    dgp : {"garch", "regime", "piecewise_spectrum", "variance_break"}
        Process: the reference GARCH(1,1), the reference three-segment regime
        layout scaled to T, a piecewise spectrum (``piecewise`` or the AR(2)
        fixture), or white noise whose variance jumps from 1 to 9 at T/2.
    T : int
        Length. Ignored for a given ``piecewise`` spectrum, which fixes it.
    rng : numpy.random.Generator
        Random generator.
    cfg : RunConfig, optional
        Source of n_freq, zero_dc and reset_at_boundaries.
    piecewise : PiecewiseSpectrum, optional
        Spectrum of the "piecewise_spectrum" process.

    Raises
    ------
    InvalidInputError
        If ``dgp`` is unknown.
    """
    cfg = cfg or RunConfig()
    freqs = default_freq_grid(cfg.n_freq)
    if dgp == "garch":
        params = generators.reference_garch_params()
        series = generators.simulate_garch(params, T, rng)
        return series, generators.garch_truth(params, T, freqs)
    if dgp == "regime":
        return generators.simulate_regime(
            generators.reference_regime_spec(T),
            rng,
            reset_at_boundaries=cfg.reset_at_boundaries,
            freq_grid=freqs,
        )
    if dgp == "piecewise_spectrum":
        ps = piecewise or generators.reference_piecewise_spectrum(T, cfg.n_freq)
        series = generators.synthesize_piecewise(ps, rng, zero_dc=cfg.zero_dc)
        return series, generators.piecewise_truth(ps, freqs)
    if dgp == "variance_break":
        return generators.variance_break_series(rng, T=T, at=T // 2, freq_grid=freqs)
    raise InvalidInputError(f"unknown data generating process {dgp!r}")


# =============================================================================
# REPLICATES
# =============================================================================
def build_estimators(
    codes: typing.Sequence[str], cfg: RunConfig, replicate: int
) -> typing.List[typing.Any]:
    """Estimators for one replicate, each seeded from its own stream."""
    out = []
    for code in codes:
        seed = gen.derive_seed(cfg.master_seed, replicate, STREAM_KEYS[code])
        if code == "AD":
            params = cfg.adaptspec_params(seed)
        elif code == "G":
            params = cfg.garch_params()
        else:
            params = cfg.msgarch_params(seed)
        out.append(ESTIMATORS[code](run_params=params, name=code))
    return out


# -----------------------------------------------------------------------------


def run_replicate(
    dgp: str,
    replicate: int,
    T: int,
    codes: typing.Sequence[str],
    cfg: RunConfig,
    piecewise: typing.Optional[PiecewiseSpectrum] = None,
) -> typing.List[MetricReport]:
    """
    Simulate one replicate and score every estimator on it.

    An estimator that raises yields a report with ``error`` set and no metrics.
    """
    data_seed = gen.derive_seed(cfg.master_seed, replicate, STREAM_KEYS["data"])
    rng = gen.make_rng(cfg.master_seed, replicate, STREAM_KEYS["data"])
    series, truth = simulate_dgp(dgp, T, rng, cfg, piecewise)

    setup = SingleSetup(series)
    setup.add_algorithms(*build_estimators(codes, cfg, replicate))
    reports = []
    for code in codes:
        try:
            setup.run_by_name(code)
            reports.extend(
                setup.evaluate(
                    truth, dgp=dgp, replicate=replicate, seed=data_seed, names=[code]
                )
            )
            setup[code].result = None
        except Exception as e:  # noqa: BLE001
            logger.warning("replicate %d, %s failed: %s", replicate, code, e)
            reports.append(
                MetricReport(
                    dgp=dgp,
                    estimator=code,
                    replicate=replicate,
                    seed=data_seed,
                    wall_time_s=setup.timings.get(code, 0.0),
                    n_time=truth.time_grid.size,
                    n_freq=truth.freq_grid.size,
                    error=f"{type(e).__name__}: {e}",
                )
            )
    return reports


def _replicate_job(args: typing.Tuple) -> typing.Tuple[int, typing.List[MetricReport]]:
    dgp, replicate, T, codes, cfg, piecewise = args
    return replicate, run_replicate(dgp, replicate, T, codes, cfg, piecewise)


def _estimator_rank(code: str) -> int:
    if code in ESTIMATOR_CODES:
        return ESTIMATOR_CODES.index(code)
    return len(ESTIMATOR_CODES)


def _sort_key(report: MetricReport) -> typing.Tuple[int, int]:
    return report.replicate, _estimator_rank(report.estimator)


def _sink_key(report: MetricReport) -> typing.Tuple[str, int, int, str]:
    rank = _estimator_rank(report.estimator)
    return report.dgp, report.replicate, rank, report.estimator


# -----------------------------------------------------------------------------


def run_experiment(
    dgp: str,
    n_replicates: int,
    T: int,
    estimators: typing.Iterable[str],
    cfg: RunConfig,
    *,
    sink: typing.Optional[typing.Union[str, pathlib.Path]] = None,
    workers: typing.Optional[int] = None,
    piecewise: typing.Optional[PiecewiseSpectrum] = None,
    progress: bool = False,
) -> typing.List[MetricReport]:
    """
    Replicated simulation study.

    Replicate r draws its data from the seed sequence (master_seed, r, 0) and each
    estimator from (master_seed, r, k) with k = 1, 2, 3 for AD, G, R, so results
    do not depend on the order or the set of estimators run. Reports of a finished
    replicate are appended to ``sink`` at once; replicates already present in an
    existing sink are not run again. Rows of other processes in the sink are kept
    and the sink is rewritten sorted by (dgp, replicate, estimator) at the end.

    Parameters
    ----------
    dgp : str
        Data generating process, see :func:`simulate_dgp`.
    n_replicates : int
        Number of replicates.
    T : int
        Series length.
    estimators : iterable of str
        Estimator codes among "AD", "G", "R".
    cfg : RunConfig
        Master seed and estimator settings.
    sink : str or pathlib.Path, optional
        Comma-separated report file written incrementally.
    workers : int, optional
        Worker processes; defaults to ``cfg.workers``.
    piecewise : PiecewiseSpectrum, optional
        Spectrum of the "piecewise_spectrum" process.
    progress : bool, optional
        Show a progress bar.

    Returns
    -------
    list of MetricReport
        Sorted by replicate, then estimator in the order AD, G, R.

    Raises
    ------
    InvalidInputError
        If an estimator code is unknown.
    """
    codes = [c for c in ESTIMATOR_CODES if c in set(estimators)]
    unknown = set(estimators) - set(ESTIMATOR_CODES)
    if unknown or not codes:
        raise InvalidInputError(f"unknown or empty estimator set {sorted(unknown)}")
    workers = workers or cfg.workers

    reports: typing.List[MetricReport] = []
    kept: typing.List[MetricReport] = []
    done: typing.Set[int] = set()
    if sink is not None and pathlib.Path(sink).exists():
        rows = gen.read_reports(sink)
        by_rep: typing.Dict[int, typing.Set[str]] = {}
        for r in rows:
            if r.dgp == dgp:
                by_rep.setdefault(r.replicate, set()).add(r.estimator)
        done = {rep for rep, est in by_rep.items() if set(codes) <= est}
        # rows of unfinished replicates are recomputed, all others are kept
        kept = [
            r
            for r in rows
            if r.dgp != dgp or r.replicate in done or r.estimator not in codes
        ]
        reports = [
            r
            for r in kept
            if r.dgp == dgp and r.replicate in done and r.estimator in codes
        ]
        if done:
            logger.info("resuming: %d replicate(s) already in %s", len(done), sink)
        gen.write_reports(sorted(kept, key=_sink_key), sink)

    todo = [r for r in range(n_replicates) if r not in done]
    jobs = [(dgp, r, T, codes, cfg, piecewise) for r in todo]

    def _collect(rep_reports: typing.List[MetricReport]) -> None:
        reports.extend(rep_reports)
        kept.extend(rep_reports)
        if sink is not None:
            gen.write_reports(rep_reports, sink, append=True)

    bar = tqdm(total=len(jobs), desc=f"experiment {dgp}", disable=not progress)
    if workers > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_replicate_job, job) for job in jobs]
            for fut in concurrent.futures.as_completed(futures):
                _, rep_reports = fut.result()
                _collect(rep_reports)
                bar.update()
    else:
        for job in jobs:
            _, rep_reports = _replicate_job(job)
            _collect(rep_reports)
            bar.update()
    bar.close()

    reports.sort(key=_sort_key)
    if sink is not None:
        gen.write_reports(sorted(kept, key=_sink_key), sink)
    n_failed = sum(r.error is not None for r in reports)
    logger.info(
        "experiment %s finished: %d report(s), %d failed", dgp, len(reports), n_failed
    )
    return reports
