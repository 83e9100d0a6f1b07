"""
Run Configuration module.
Part of the pyTVSpec package.

Command configuration validated before any computation, read from a flat
``key = value`` file and completed from a preset, plus the run manifest.
"""

from __future__ import annotations

import datetime
import importlib.metadata
import json
import logging
import pathlib
import platform
import typing

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from pytvspec.algorithms.data.run_params import (
    AdaptSpecRunParams,
    GarchRunParams,
    MsGarchRunParams,
)
from pytvspec.support.data import SCHEMA_VERSION
from pytvspec.support.utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

Command = typing.Literal["simulate", "fit", "evaluate", "experiment"]
Dgp = typing.Literal["garch", "regime", "piecewise_spectrum", "variance_break"]

ESTIMATOR_CODES = ("AD", "G", "R")

PRESETS: typing.Dict[str, typing.Dict[str, typing.Any]] = {
    "desk": {"T": 1024, "n_replicates": 20, "n_iter": 6000, "n_burn": 2000},
    "paper": {"T": 5000, "n_replicates": 50, "n_iter": 20000, "n_burn": 5000},
}

_FILE_KEYS = ("input", "piecewise_file", "truth_file", "estimate_file")


class RunConfig(BaseModel):
    """
    Resolved configuration of a command.

    Attributes
    ----------
    preset : {"desk", "paper"}
        Source of the defaults of T, n_replicates, n_iter and n_burn.
    master_seed : int
        Seed from which every random stream is derived.
    output_dir : str
        Directory of the artifacts.
    dgp : str
        Data generating process of simulate / evaluate / experiment, and of fit
        when no input file is given.
    estimators : list of str, optional
        Estimator codes; fit defaults to ["AD"], the others to ["AD", "G", "R"].
    input : str, optional
        Price file of fit (or a series file written by simulate, see
        ``input_format``).
    squared : bool
        Analyse squared returns.
    """

    model_config = ConfigDict(extra="forbid")

    preset: typing.Literal["desk", "paper"] = "desk"
    master_seed: int = Field(default=20240101, ge=0)
    output_dir: str = "pytvspec_out"
    workers: int = Field(default=1, ge=1)

    # data
    dgp: Dgp = "garch"
    T: int = Field(default=1024, ge=2)
    n_replicates: int = Field(default=20, ge=1)
    reset_at_boundaries: bool = False
    zero_dc: bool = True
    piecewise_file: typing.Optional[str] = None
    input: typing.Optional[str] = None
    input_format: typing.Literal["prices", "series"] = "prices"
    price_col: str = "close"
    date_col: typing.Optional[str] = "date"
    squared: bool = False

    # estimators
    estimators: typing.Optional[typing.List[str]] = None
    n_freq: int = Field(default=101, ge=2)
    n_iter: int = Field(default=6000, ge=1)
    n_burn: int = Field(default=2000, ge=0)
    thin: int = Field(default=1, ge=1)
    t_min: int = Field(default=50, ge=2)
    S: int = Field(default=30, ge=1)
    J_max: int = Field(default=30, ge=0)
    keep_states: bool = True
    band_level: float = Field(default=0.9, gt=0, lt=1)
    n_regimes: int = Field(default=2, ge=1)
    n_starts: int = Field(default=5, ge=1)
    variance_carry: typing.Literal["per_regime", "collapsed"] = "per_regime"
    max_eval: int = Field(default=5000, ge=10)

    # evaluate
    truth_file: typing.Optional[str] = None
    estimate_file: typing.Optional[str] = None

    @field_validator("estimators", mode="before")
    @classmethod
    def _split_estimators(cls, v: typing.Any) -> typing.Any:
        if isinstance(v, str):
            return [s.strip() for s in v.split(",") if s.strip()]
        return v

    @field_validator("estimators")
    @classmethod
    def _known_estimators(
        cls, v: typing.Optional[typing.List[str]]
    ) -> typing.Optional[typing.List[str]]:
        if v is None:
            return v
        unknown = [e for e in v if e not in ESTIMATOR_CODES]
        if unknown or not v:
            raise ValueError(
                f"estimators must be a non-empty subset of {ESTIMATOR_CODES}"
            )
        return [e for e in ESTIMATOR_CODES if e in v]

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if self.n_burn >= self.n_iter:
            raise ValueError("n_burn must be smaller than n_iter")
        if self.T < self.t_min:
            raise ValueError(f"T={self.T} is shorter than t_min={self.t_min}")
        for key in _FILE_KEYS:
            value = getattr(self, key)
            if value is not None and not pathlib.Path(value).is_file():
                raise ValueError(f"{key}: file {value} does not exist")
        return self

    def estimators_for(self, command: str) -> typing.List[str]:
        if self.estimators is not None:
            return list(self.estimators)
        return ["AD"] if command == "fit" else list(ESTIMATOR_CODES)

    # -------------------------------------------------------------------------
    def adaptspec_params(self, seed: int) -> AdaptSpecRunParams:
        return AdaptSpecRunParams(
            n_iter=self.n_iter,
            n_burn=self.n_burn,
            thin=self.thin,
            t_min=self.t_min,
            S=self.S,
            J_max=self.J_max,
            rng_seed=seed,
            keep_states=self.keep_states,
            band_level=self.band_level,
            n_freq=self.n_freq,
        )

    def garch_params(self) -> GarchRunParams:
        return GarchRunParams(max_eval=self.max_eval, n_freq=self.n_freq)

    def msgarch_params(self, seed: int) -> MsGarchRunParams:
        return MsGarchRunParams(
            n_regimes=self.n_regimes,
            n_starts=self.n_starts,
            seed=seed,
            variance_carry=self.variance_carry,
            max_eval=self.max_eval,
            n_freq=self.n_freq,
        )


# =============================================================================
# FLAT KEY-VALUE FILES
# =============================================================================
def parse_config_file(
    path: typing.Union[str, pathlib.Path],
) -> typing.Dict[str, typing.Optional[str]]:
    """
    Read ``key = value`` lines.

    Blank lines and text after ``#`` are ignored. An empty value means "use the
    default" and is left out; ``none`` explicitly unsets an optional key.

    Raises
    ------
    InvalidInputError
        On a line without ``=``, an empty key or a repeated key.
    """
    out: typing.Dict[str, typing.Optional[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise InvalidInputError(f"{path}:{lineno}: empty key")
            if key in out:
                raise InvalidInputError(f"{path}:{lineno}: duplicate key {key!r}")
            if value.lower() == "none":
                out[key] = None
            elif value:
                out[key] = value
    return out


def _format_value(value: typing.Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def write_config_file(cfg: RunConfig, path: typing.Union[str, pathlib.Path]) -> None:
    """Write every field of ``cfg`` as ``key = value`` lines."""
    lines = [f"{key} = {_format_value(value)}" for key, value in cfg.model_dump().items()]
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_config(
    path: typing.Optional[typing.Union[str, pathlib.Path]] = None,
    overrides: typing.Optional[typing.Dict[str, typing.Any]] = None,
) -> RunConfig:
    """
    Resolve a configuration: preset defaults, then the file, then ``overrides``.

    The preset itself is taken from the overrides, else the file, else "desk".

    Raises
    ------
    InvalidInputError
        If the preset is unknown or the file cannot be parsed.
    pydantic.ValidationError
        If a value is out of range.
    """
    from_file = parse_config_file(path) if path is not None else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    preset = overrides.get("preset", from_file.get("preset", "desk"))
    if preset not in PRESETS:
        raise InvalidInputError(f"unknown preset {preset!r}; choose from {list(PRESETS)}")
    merged: typing.Dict[str, typing.Any] = {"preset": preset, **PRESETS[preset]}
    merged.update(from_file)
    merged.update(overrides)
    return RunConfig(**merged)


# =============================================================================
# MANIFEST
# =============================================================================
class ArtifactEntry(BaseModel):
    name: str
    sha256: str


class RunManifest(BaseModel):
    """
    Record of a command run; replaying it reproduces the numeric artifacts.

    ``nondeterministic_columns`` lists table columns (wall times) that differ
    between otherwise identical runs.
    """

    schema_version: int = SCHEMA_VERSION
    command: Command
    config: typing.Dict[str, typing.Any]
    master_seed: int
    versions: typing.Dict[str, str]
    created: str
    wall_time_s: float = 0.0
    status: typing.Literal["complete", "partial", "failed"] = "complete"
    artifacts: typing.List[ArtifactEntry] = []
    nondeterministic_columns: typing.List[str] = ["wall_time_s"]
    notes: typing.List[str] = []

    def run_config(self, output_dir: typing.Optional[str] = None) -> RunConfig:
        config = dict(self.config)
        if output_dir is not None:
            config["output_dir"] = str(output_dir)
        return RunConfig(**config)

    def write(self, path: typing.Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")

    @classmethod
    def read(cls, path: typing.Union[str, pathlib.Path]) -> "RunManifest":
        try:
            return cls.model_validate_json(pathlib.Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidInputError(f"cannot read manifest {path}: {e}") from e


class ErrorRecord(BaseModel):
    """Machine-readable record of a failed command, written to ``error.json``."""

    error_type: str
    message: str
    command: str

    def write(self, path: typing.Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")


def package_versions() -> typing.Dict[str, str]:
    versions = {"python": platform.python_version()}
    dists = ("pytvspec", "numpy", "scipy", "pandas", "pydantic", "matplotlib", "tqdm")
    for dist in dists:
        try:
            versions[dist] = importlib.metadata.version(dist)
        except importlib.metadata.PackageNotFoundError:
            versions[dist] = "unknown"
    return versions


def utc_timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
