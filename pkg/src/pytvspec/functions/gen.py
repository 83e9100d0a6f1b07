# -*- coding: utf-8 -*-
"""
General Utility Functions module.
Part of the pyTVSpec package.

Price-file ingestion, seed derivation, and readers/writers of the plain-text
artifacts (comma-separated tables and line-delimited JSON).
"""

from __future__ import annotations

import hashlib
import logging
import pathlib
import typing

import numpy as np
import pandas as pd

from pytvspec.functions.metrics import reports_frame
from pytvspec.support.data import (
    DrawRecord,
    GarchParams,
    MetricReport,
    MsGarchParams,
    PiecewiseSpectrum,
    PosteriorDraws,
    RegimeProbs,
    ReturnsSeries,
    SpectrumCurve,
    TimeSeries,
    TvSpectrum,
)
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

PathLike = typing.Union[str, pathlib.Path]


# =============================================================================
# SEEDS
# =============================================================================
def seed_sequence(master_seed: int, *keys: int) -> np.random.SeedSequence:
    """Child seed sequence identified by ``keys`` under a master seed."""
    return np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])


def derive_seed(master_seed: int, *keys: int) -> int:
    """32-bit integer seed for (master_seed, keys), stable across runs."""
    return int(seed_sequence(master_seed, *keys).generate_state(1)[0])


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master_seed, *keys))


# -----------------------------------------------------------------------------


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# =============================================================================
# INGESTION
# =============================================================================
GAP_FACTOR = 4


def date_gaps(
    dates: typing.Union[pd.Series, typing.Sequence[str]], factor: int = GAP_FACTOR
) -> typing.List[typing.Tuple[str, str]]:
    """
    Consecutive dates further apart than ``factor`` times the median spacing.

    Weekends in daily trading data stay below the default factor.

    Returns
    -------
    list of tuple of str
        (last date before, first date after) of every gap, as YYYY-MM-DD.
    """
    stamps = pd.Series(pd.to_datetime(pd.Series(dates))).reset_index(drop=True)
    if stamps.size < 3:
        return []
    spacing = stamps.diff().iloc[1:]
    median = spacing.median()
    if median <= pd.Timedelta(0):
        return []
    idx = np.flatnonzero((spacing > factor * median).to_numpy()) + 1
    fmt = "%Y-%m-%d"
    return [(stamps[i - 1].strftime(fmt), stamps[i].strftime(fmt)) for i in idx]


# -----------------------------------------------------------------------------


def ingest_csv(
    path: PathLike,
    price_column: str = "close",
    date_column: typing.Optional[str] = "date",
    t_min: int = 50,
) -> ReturnsSeries:
    """
    Percent log-returns from a comma-separated price file.

    r_t = 100 (ln p_t - ln p_{t-1}) over the rows whose price is present and
    positive. Discarded rows are logged with their 1-based data row numbers (the
    header is not counted) and stored in ``dropped_rows``. Squared returns are
    always provided.

    Parameters
    ----------
    path : str or pathlib.Path
        File with a header row.
    price_column : str, optional
        Name of the price column. Default "close".
    date_column : str, optional
        Name of the date column, or None when the file has no dates. Default "date".
    t_min : int, optional
        Minimum segment length; at least ``t_min + 1`` usable prices are required.
        Default 50.

    Returns
    -------
    ReturnsSeries
        Dates of each return (ISO-8601), returns, squared returns and dropped rows.

    Raises
    ------
    InvalidInputError
        If the file cannot be read, a column is missing, a date cannot be parsed,
        or too few usable rows remain.
    """
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidInputError(f"cannot read {path}: {e}") from e

    required = [price_column] + ([date_column] if date_column else [])
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise InvalidInputError(
            f"{path}: missing column(s) {missing}; available: {list(df.columns)}"
        )

    prices = pd.to_numeric(df[price_column], errors="coerce")
    bad = prices.isna() | ~(prices > 0)
    dropped = (np.flatnonzero(bad.to_numpy()) + 1).tolist()
    if dropped:
        logger.warning(
            "%s: dropped %d row(s) with missing or nonpositive prices: %s",
            path,
            len(dropped),
            dropped[:20] if len(dropped) > 20 else dropped,
        )
    kept = df.loc[~bad]
    if len(kept) < t_min + 1:
        raise InvalidInputError(
            f"{path}: {len(kept)} usable prices, at least {t_min + 1} are required"
        )

    dates = None
    if date_column:
        parsed = pd.to_datetime(kept[date_column], errors="coerce")
        unparsed = np.flatnonzero(parsed.isna().to_numpy())
        if unparsed.size:
            rows = (kept.index.to_numpy()[unparsed] + 1).tolist()
            raise InvalidInputError(f"{path}: unparseable dates in data rows {rows}")
        gaps = date_gaps(parsed)
        if gaps:
            logger.info(
                "%s: %d date gap(s) longer than %d x the median spacing: %s",
                path,
                len(gaps),
                GAP_FACTOR,
                gaps[:10],
            )
        dates = parsed.dt.strftime("%Y-%m-%d").tolist()[1:]

    logp = np.log(kept[price_column].astype(float).to_numpy())
    returns = 100.0 * np.diff(logp)
    return ReturnsSeries(
        dates=dates, returns=returns, squared=returns**2, dropped_rows=dropped
    )


# =============================================================================
# TABULAR ARTIFACTS
# =============================================================================
def write_series(series: TimeSeries, path: PathLike) -> None:
    """Columns t, y and, when present, date."""
    df = pd.DataFrame({"t": np.arange(1, series.n + 1), "y": series.values})
    if series.dates is not None:
        df["date"] = series.dates
    df.to_csv(path, index=False)


def read_series(path: PathLike, label: str = "file") -> TimeSeries:
    df = pd.read_csv(path)
    dates = df["date"].astype(str).tolist() if "date" in df.columns else None
    return TimeSeries(values=df["y"].to_numpy(float), origin_label=label, dates=dates)


# -----------------------------------------------------------------------------


def write_spectrogram(
    spec: TvSpectrum,
    path: PathLike,
    lower: typing.Optional[np.ndarray] = None,
    upper: typing.Optional[np.ndarray] = None,
) -> None:
    """
    Long-format grid with columns t, nu, log_f and, when given, lower90, upper90.

    Bands are stored on the natural-log scale like the estimate.
    """
    T, F = spec.power.shape
    df = pd.DataFrame(
        {
            "t": np.repeat(spec.time_grid, F),
            "nu": np.tile(spec.freq_grid, T),
            "log_f": np.log(spec.power).ravel(),
        }
    )
    if lower is not None and upper is not None:
        df["lower90"] = np.log(lower).ravel()
        df["upper90"] = np.log(upper).ravel()
    df.to_csv(path, index=False)


def read_spectrogram(
    path: PathLike,
) -> typing.Tuple[TvSpectrum, typing.Optional[np.ndarray], typing.Optional[np.ndarray]]:
    """Inverse of :func:`write_spectrogram`: spectrum and optional band."""
    df = pd.read_csv(path)
    time_grid = pd.unique(df["t"])
    freq_grid = pd.unique(df["nu"])
    shape = (time_grid.size, freq_grid.size)
    if len(df) != shape[0] * shape[1]:
        raise InvalidInputError(f"{path}: rows do not form a complete t x nu grid")
    power = np.exp(df["log_f"].to_numpy(float).reshape(shape))
    spec = TvSpectrum(time_grid=time_grid, freq_grid=freq_grid, power=power)
    if "lower90" in df.columns:
        lower = np.exp(df["lower90"].to_numpy(float).reshape(shape))
        upper = np.exp(df["upper90"].to_numpy(float).reshape(shape))
        return spec, lower, upper
    return spec, None, None


# -----------------------------------------------------------------------------


def write_piecewise_spectrum(ps: PiecewiseSpectrum, path: PathLike) -> None:
    """Columns segment (1-based), length, nu, power; one row per segment and frequency."""
    frames = [
        pd.DataFrame(
            {"segment": k + 1, "length": n, "nu": curve.freqs, "power": curve.power}
        )
        for k, (n, curve) in enumerate(zip(ps.segment_lengths, ps.curves))
    ]
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)


def read_piecewise_spectrum(path: PathLike) -> PiecewiseSpectrum:
    df = pd.read_csv(path)
    lengths, curves = [], []
    for _, seg in df.groupby("segment", sort=True):
        lengths.append(int(seg["length"].iloc[0]))
        curves.append(
            SpectrumCurve(
                freqs=seg["nu"].to_numpy(float), power=seg["power"].to_numpy(float)
            )
        )
    return PiecewiseSpectrum(segment_lengths=lengths, curves=curves)


# -----------------------------------------------------------------------------


def write_posterior_summaries(
    draws: PosteriorDraws, out_dir: PathLike
) -> typing.List[str]:
    """
    K histogram, cutpoint samples and alpha0 / tau2 traces of a chain.

    Writes k_posterior.csv (K, count, prob), cutpoints.csv (iteration, K,
    cutpoints joined by ";") and traces.csv (iteration, K, alpha0, tau2). Returns
    the file names.
    """
    out_dir = pathlib.Path(out_dir)
    pd.DataFrame(
        [
            {"K": k, "count": c, "prob": c / draws.n_retained}
            for k, c in sorted(draws.k_counts.items())
        ],
        columns=["K", "count", "prob"],
    ).to_csv(out_dir / "k_posterior.csv", index=False)
    pd.DataFrame(
        {
            "iteration": draws.iterations,
            "K": draws.k_trace,
            "cutpoints": [";".join(map(str, cuts)) for cuts in draws.cutpoint_trace],
        }
    ).to_csv(out_dir / "cutpoints.csv", index=False)
    pd.DataFrame(
        {
            "iteration": draws.iterations,
            "K": draws.k_trace,
            "alpha0": draws.alpha0_trace,
            "tau2": draws.tau2_trace,
        }
    ).to_csv(out_dir / "traces.csv", index=False)
    return ["k_posterior.csv", "cutpoints.csv", "traces.csv"]


def read_k_posterior(path: PathLike) -> typing.Dict[int, float]:
    df = pd.read_csv(path)
    return {int(k): float(p) for k, p in zip(df["K"], df["prob"])}


def read_cutpoints(path: PathLike) -> typing.List[typing.Tuple[int, ...]]:
    df = pd.read_csv(path, keep_default_na=False, dtype={"cutpoints": str})
    return [
        tuple(int(c) for c in cell.split(";")) if cell else () for cell in df["cutpoints"]
    ]


# -----------------------------------------------------------------------------


def write_regime_probs(probs: RegimeProbs, path: PathLike) -> None:
    """Columns t, filtered_1..N, smoothed_1..N."""
    T, N = probs.filtered.shape
    df = pd.DataFrame({"t": np.arange(1, T + 1)})
    for j in range(N):
        df[f"filtered_{j + 1}"] = probs.filtered[:, j]
    for j in range(N):
        df[f"smoothed_{j + 1}"] = probs.smoothed[:, j]
    df.to_csv(path, index=False)


def read_regime_probs(path: PathLike) -> RegimeProbs:
    df = pd.read_csv(path)
    filt = sorted((c for c in df.columns if c.startswith("filtered_")), key=_suffix)
    smooth = sorted((c for c in df.columns if c.startswith("smoothed_")), key=_suffix)
    return RegimeProbs(
        filtered=df[filt].to_numpy(float), smoothed=df[smooth].to_numpy(float)
    )


def _suffix(name: str) -> int:
    return int(name.rsplit("_", 1)[1])


# -----------------------------------------------------------------------------


def write_garch_params(
    params: GarchParams, path: PathLike, loglik: typing.Optional[float] = None
) -> None:
    """One row: mu, alpha0, alpha1, beta1, sigma2_uc, loglik."""
    row = params.model_dump()
    row.update(sigma2_uc=params.sigma2_uc, loglik=loglik)
    pd.DataFrame([row]).to_csv(path, index=False)


def write_msgarch_params(params: MsGarchParams, path: PathLike) -> None:
    """One row per regime: regime, mu, alpha0, alpha1, beta1, sigma2_uc, p_to_1..N."""
    rows = []
    for j, r in enumerate(params.regimes):
        row = {
            "regime": j + 1,
            "mu": r.mu,
            "alpha0": r.alpha0,
            "alpha1": r.alpha1,
            "beta1": r.beta1,
            "sigma2_uc": r.sigma2_uc,
        }
        row.update({f"p_to_{i + 1}": p for i, p in enumerate(params.transition[j])})
        rows.append(row)
    pd.DataFrame(rows).to_csv(path, index=False)


# -----------------------------------------------------------------------------


def write_reports(
    reports: typing.Iterable[MetricReport], path: PathLike, append: bool = False
) -> None:
    """Comma-separated report records; the header is written only for a new file."""
    path = pathlib.Path(path)
    df = reports_frame(reports)
    new_file = not (append and path.exists())
    df.to_csv(path, index=False, mode="w" if new_file else "a", header=new_file)


def read_reports(path: PathLike) -> typing.List[MetricReport]:
    df = pd.read_csv(path, dtype={"error": object})
    df = df.astype(object).where(df.notna(), None)
    return [MetricReport(**row) for row in df.to_dict(orient="records")]


# =============================================================================
# DRAW RECORDS
# =============================================================================
def write_draws(draws: PosteriorDraws, path: PathLike) -> None:
    """One :class:`DrawRecord` JSON line per retained state."""
    if draws.states is None:
        raise InvalidInputError("draw records need the retained states (keep_states)")
    with open(path, "w", encoding="utf-8") as f:
        for it, state in zip(draws.iterations.tolist(), draws.states):
            f.write(DrawRecord.from_state(it, state).model_dump_json())
            f.write("\n")


def read_draws(path: PathLike) -> typing.List[DrawRecord]:
    with open(path, encoding="utf-8") as f:
        return [DrawRecord.model_validate_json(line) for line in f if line.strip()]
