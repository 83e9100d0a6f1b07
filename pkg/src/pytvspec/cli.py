# -*- coding: utf-8 -*-
"""
Command Line Interface module.
Part of the pyTVSpec package.

Usage::

    pytvspec simulate   [--config FILE] [--seed N] [--out DIR] [--dgp NAME] ...
    pytvspec fit        --input prices.csv [--squared] [--price-col close] ...
    pytvspec evaluate   [--set truth_file=...] [--set estimate_file=...]
    pytvspec experiment [--preset desk|paper] [--workers N] ...
    pytvspec replay     --manifest DIR/manifest.json --out NEW_DIR

Every command writes its artifacts, ``config.resolved.txt`` and ``manifest.json``
under the output directory. A failure writes ``error.json`` and returns a nonzero
exit status: 2 for an invalid configuration, 1 for a failure during computation.
"""

from __future__ import annotations

import argparse
import logging
import pathlib
import time
import typing

import pydantic

from pytvspec.functions import gen, generators, metrics
from pytvspec.setup.experiment import (
    STREAM_KEYS,
    build_estimators,
    run_experiment,
    simulate_dgp,
)
from pytvspec.setup.single import SingleSetup
from pytvspec.support.config import (
    ArtifactEntry,
    ErrorRecord,
    RunConfig,
    RunManifest,
    load_config,
    package_versions,
    utc_timestamp,
    write_config_file,
)
from pytvspec.support.data import MetricReport, PiecewiseSpectrum
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

BOOKKEEPING = ("config.resolved.txt", "manifest.json", "error.json")


class CommandOutcome(typing.NamedTuple):
    """Artifacts written by a command and the parts of it that failed."""

    artifacts: typing.List[str]
    failures: typing.List[str] = []


# =============================================================================
# HELPERS
# =============================================================================
def _out_dir(cfg: RunConfig) -> pathlib.Path:
    out = pathlib.Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _piecewise(cfg: RunConfig) -> typing.Optional[PiecewiseSpectrum]:
    if cfg.dgp != "piecewise_spectrum":
        return None
    if cfg.piecewise_file is not None:
        return gen.read_piecewise_spectrum(cfg.piecewise_file)
    return generators.reference_piecewise_spectrum(cfg.T, cfg.n_freq)


def _simulate(cfg: RunConfig):
    """Replicate 0 of the configured process."""
    rng = gen.make_rng(cfg.master_seed, 0, STREAM_KEYS["data"])
    return simulate_dgp(cfg.dgp, cfg.T, rng, cfg, _piecewise(cfg))


def _load_series(cfg: RunConfig):
    if cfg.input_format == "series":
        return gen.read_series(cfg.input, label=pathlib.Path(cfg.input).stem)
    returns = gen.ingest_csv(
        cfg.input,
        price_column=cfg.price_col,
        date_column=cfg.date_col,
        t_min=cfg.t_min,
    )
    return returns.to_series(label=pathlib.Path(cfg.input).stem)


def _write_estimate(
    setup: SingleSetup, code: str, out: pathlib.Path, artifacts: typing.List[str]
) -> None:
    """Spectrogram and model-specific outputs of one estimator that has a result."""
    result = setup[code].result
    if code == "AD":
        gen.write_spectrogram(
            result.spectrum, out / "spectrogram.csv", result.lower, result.upper
        )
        artifacts.append("spectrogram.csv")
        artifacts.extend(gen.write_posterior_summaries(result.draws, out))
        if result.draws.states is not None:
            gen.write_draws(result.draws, out / "draws.jsonl")
            artifacts.append("draws.jsonl")
        gen.write_piecewise_spectrum(result.piecewise, out / "piecewise_spectrum.csv")
        artifacts.append("piecewise_spectrum.csv")
        return
    name = f"spectrogram_{code}.csv"
    gen.write_spectrogram(result.spectrum, out / name)
    artifacts.append(name)
    if code == "G":
        gen.write_garch_params(result.params, out / "garch_params.csv", result.loglik)
        artifacts.append("garch_params.csv")
    else:
        gen.write_msgarch_params(result.params, out / "msgarch_params.csv")
        gen.write_regime_probs(result.probs, out / "regime_probs.csv")
        artifacts.extend(["msgarch_params.csv", "regime_probs.csv"])


# =============================================================================
# COMMANDS
# =============================================================================
def cmd_simulate(cfg: RunConfig) -> CommandOutcome:
    """Series of the configured process and its true spectrum."""
    out = _out_dir(cfg)
    series, truth = _simulate(cfg)
    gen.write_series(series, out / "series.csv")
    gen.write_spectrogram(truth, out / "truth.csv")
    artifacts = ["series.csv", "truth.csv"]
    piecewise = _piecewise(cfg)
    if piecewise is not None:
        gen.write_piecewise_spectrum(piecewise, out / "piecewise_spectrum.csv")
        artifacts.append("piecewise_spectrum.csv")
    logger.info("simulated %s, T=%d", cfg.dgp, series.n)
    return CommandOutcome(artifacts)


def cmd_fit(cfg: RunConfig) -> CommandOutcome:
    """
    Fit the estimators to an input file or, without one, to a simulated series.

    The reversible-jump estimator must succeed; a failing baseline only marks the
    run as partial.
    """
    out = _out_dir(cfg)
    artifacts: typing.List[str] = []
    if cfg.input is not None:
        series = _load_series(cfg)
    else:
        series, truth = _simulate(cfg)
        gen.write_spectrogram(truth, out / "truth.csv")
        artifacts.append("truth.csv")

    setup = SingleSetup(series)
    if cfg.squared:
        setup.square_data()
    gen.write_series(setup.data, out / "series.csv")
    artifacts.insert(0, "series.csv")

    codes = cfg.estimators_for("fit")
    setup.add_algorithms(*build_estimators(codes, cfg, 0))
    failures = []
    for code in codes:
        try:
            setup.run_by_name(code)
        except Exception as e:
            if code == "AD":
                raise
            logger.warning("%s failed: %s", code, e)
            failures.append(f"{code}: {type(e).__name__}: {e}")
            continue
        _write_estimate(setup, code, out, artifacts)
    return CommandOutcome(artifacts, failures)


def cmd_evaluate(cfg: RunConfig) -> CommandOutcome:
    """
    SKL and MSE reports.

    With ``truth_file`` and ``estimate_file`` (spectrogram files) the estimate is
    scored against the truth. Otherwise one replicate of the configured process is
    simulated and every configured estimator is fitted and scored.
    """
    out = _out_dir(cfg)
    if cfg.truth_file is not None or cfg.estimate_file is not None:
        if cfg.truth_file is None or cfg.estimate_file is None:
            raise InvalidInputError("truth_file and estimate_file go together")
        truth, _, _ = gen.read_spectrogram(cfg.truth_file)
        est, _, _ = gen.read_spectrogram(cfg.estimate_file)
        report = metrics.evaluate(
            truth, est, dgp=cfg.dgp, estimator=pathlib.Path(cfg.estimate_file).stem
        )
        gen.write_reports([report], out / "reports.csv")
        return CommandOutcome(["reports.csv"])

    series, truth = _simulate(cfg)
    data_seed = gen.derive_seed(cfg.master_seed, 0, STREAM_KEYS["data"])
    gen.write_spectrogram(truth, out / "truth.csv")
    artifacts = ["reports.csv", "truth.csv"]

    codes = cfg.estimators_for("evaluate")
    setup = SingleSetup(series)
    setup.add_algorithms(*build_estimators(codes, cfg, 0))
    reports: typing.List[MetricReport] = []
    failures = []
    for code in codes:
        try:
            setup.run_by_name(code)
        except Exception as e:
            logger.warning("%s failed: %s", code, e)
            failures.append(f"{code}: {type(e).__name__}: {e}")
            reports.append(
                MetricReport(
                    dgp=cfg.dgp,
                    estimator=code,
                    replicate=0,
                    seed=data_seed,
                    n_time=truth.time_grid.size,
                    n_freq=truth.freq_grid.size,
                    error=f"{type(e).__name__}: {e}",
                )
            )
            continue
        reports.extend(setup.evaluate(truth, dgp=cfg.dgp, seed=data_seed, names=[code]))
        name = f"spectrogram_{code}.csv"
        gen.write_spectrogram(setup[code].tv_spectrum(truth.freq_grid), out / name)
        artifacts.append(name)
    gen.write_reports(reports, out / "reports.csv")
    return CommandOutcome(artifacts, failures)


def cmd_experiment(cfg: RunConfig) -> CommandOutcome:
    """Replicated study; ``reports.csv`` grows replicate by replicate and resumes."""
    out = _out_dir(cfg)
    reports = run_experiment(
        cfg.dgp,
        cfg.n_replicates,
        cfg.T,
        cfg.estimators_for("experiment"),
        cfg,
        sink=out / "reports.csv",
        workers=cfg.workers,
        piecewise=_piecewise(cfg),
        progress=True,
    )
    metrics.summarize_reports(reports).to_csv(out / "summary.csv", index=False)
    failures = [
        f"replicate {r.replicate}, {r.estimator}: {r.error}" for r in reports if r.error
    ]
    return CommandOutcome(["reports.csv", "summary.csv"], failures)


COMMANDS: typing.Dict[str, typing.Callable[[RunConfig], CommandOutcome]] = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "experiment": cmd_experiment,
}


# =============================================================================
# EXECUTION
# =============================================================================
def _write_error(out: pathlib.Path, command: str, e: BaseException) -> None:
    out.mkdir(parents=True, exist_ok=True)
    ErrorRecord(error_type=type(e).__name__, message=str(e), command=command).write(
        out / "error.json"
    )


def _manifest(
    command: str,
    cfg: RunConfig,
    out: pathlib.Path,
    artifacts: typing.Iterable[str],
    wall_time: float,
    status: str,
    notes: typing.List[str],
) -> RunManifest:
    entries = [
        ArtifactEntry(name=name, sha256=gen.sha256_file(out / name))
        for name in dict.fromkeys(artifacts)
        if (out / name).is_file()
    ]
    return RunManifest(
        command=command,
        config=cfg.model_dump(),
        master_seed=cfg.master_seed,
        versions=package_versions(),
        created=utc_timestamp(),
        wall_time_s=wall_time,
        status=status,
        artifacts=entries,
        notes=notes,
    )


def execute(command: str, cfg: RunConfig) -> int:
    """
    Run a validated command and record it.

    Writes ``config.resolved.txt`` first and ``manifest.json`` last. The manifest
    status is "complete", "partial" when some estimator failed, or "failed" when
    the command raised; in the last case ``error.json`` is written as well.

    Returns
    -------
    int
        Exit status.
    """
    out = _out_dir(cfg)
    (out / "error.json").unlink(missing_ok=True)
    write_config_file(cfg, out / "config.resolved.txt")
    logger.info("%s started, output in %s", command, out)
    start = time.perf_counter()
    try:
        outcome = COMMANDS[command](cfg)
    except Exception as e:
        logger.error("%s failed: %s: %s", command, type(e).__name__, e)
        _write_error(out, command, e)
        written = sorted(
            p.name for p in out.iterdir() if p.is_file() and p.name not in BOOKKEEPING
        )
        _manifest(
            command,
            cfg,
            out,
            written,
            time.perf_counter() - start,
            "failed",
            [f"{type(e).__name__}: {e}"],
        ).write(out / "manifest.json")
        return EXIT_RUNTIME

    status = "partial" if outcome.failures else "complete"
    wall_time = time.perf_counter() - start
    _manifest(
        command, cfg, out, outcome.artifacts, wall_time, status, outcome.failures
    ).write(out / "manifest.json")
    logger.info("%s %s in %.1f s", command, status, wall_time)
    return EXIT_OK


# =============================================================================
# ARGUMENTS
# =============================================================================
def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat 'key = value' configuration file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--preset", choices=["desk", "paper"])
    parser.add_argument("--workers", type=int, help="worker processes for replicates")
    parser.add_argument("--dgp", help="data generating process")
    parser.add_argument("--input", help="price file (fit)")
    parser.add_argument(
        "--squared", action="store_true", default=None, help="analyse squared returns"
    )
    parser.add_argument("--price-col", help="price column of the input file")
    parser.add_argument("--date-col", help="date column of the input file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="any configuration key; may be repeated",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pytvspec",
        description="Time-varying spectral estimation by reversible-jump MCMC.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=COMMANDS[name].__doc__.splitlines()[0]))
    replay = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    replay.add_argument("--manifest", required=True, help="manifest.json of a run")
    replay.add_argument("--out", required=True, help="new output directory")
    return parser


def _overrides(args: argparse.Namespace) -> typing.Dict[str, typing.Any]:
    """Configuration keys given on the command line; ``--set`` comes first."""
    overrides: typing.Dict[str, typing.Any] = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise InvalidInputError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    flags = {
        "master_seed": args.seed,
        "output_dir": args.out,
        "preset": args.preset,
        "workers": args.workers,
        "dgp": args.dgp,
        "input": args.input,
        "squared": args.squared,
        "price_col": args.price_col,
        "date_col": args.date_col,
    }
    overrides.update({k: v for k, v in flags.items() if v is not None})
    return overrides


def _absolute_paths(cfg: RunConfig) -> RunConfig:
    """Resolve input file paths so that a manifest replays from any directory."""
    update = {
        key: str(pathlib.Path(getattr(cfg, key)).resolve())
        for key in ("input", "piecewise_file", "truth_file", "estimate_file")
        if getattr(cfg, key) is not None
    }
    return cfg.model_copy(update=update)


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "replay":
        out = pathlib.Path(args.out)
        try:
            manifest = RunManifest.read(args.manifest)
            command = manifest.command
            cfg = manifest.run_config(output_dir=str(out))
        except (InvalidInputError, pydantic.ValidationError) as e:
            logger.error("invalid manifest: %s", e)
            _write_error(out, "replay", e)
            return EXIT_CONFIG
        logger.info("replaying %s from %s", command, args.manifest)
        return execute(command, cfg)

    command = args.command
    try:
        cfg = _absolute_paths(load_config(args.config, _overrides(args)))
    except (InvalidInputError, pydantic.ValidationError, OSError) as e:
        logger.error("invalid configuration: %s", e)
        _write_error(pathlib.Path(args.out or RunConfig().output_dir), command, e)
        return EXIT_CONFIG
    return execute(command, cfg)


if __name__ == "__main__":
    raise SystemExit(main())
