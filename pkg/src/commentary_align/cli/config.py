"""
Run configuration of the command line.

Effective settings are resolved in a fixed order: model defaults, then the
config file given with `--config`, then command-line flags. Flags left unset
never override. The config file is TOML with one table per stage:

    seed = 7

    [synth]
    num_matches = 24
    noise_sigma = 0.3

    [train]
    epochs = 50

    [realign]
    before_s = 45.0

    [coarse]
    mode = "lexical"

A `run_manifest.<command>.json` written by a previous command is accepted as
a config file too, and its `argv` replays the run from the manifest alone.
"""

import json
import os
import tomllib
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from commentary_align.aligner.training import TrainConfig
from commentary_align.coarse.prealign import CoarseConfig
from commentary_align.core.errors import UsageError
from commentary_align.core.logging import get_logger
from commentary_align.core.metrics import DEFAULT_WINDOWS
from commentary_align.realign.realigner import RealignConfig
from commentary_align.synth.generator import SynthConfig

logger = get_logger(__name__)

SEEDED_SECTIONS = ("synth", "train")
# Endpoint details and paths derived from --out stay out of the config block
MANIFEST_EXCLUDE = {"coarse": {"endpoint"}, "train": {"checkpoint_path", "loss_trace_path"}}


def check_windows(windows: tuple[float, ...]) -> tuple[float, ...]:
    """Window radii must be non-negative and strictly ascending.

    Raises:
        ValueError: Naming the offending radii.
    """
    if any(w < 0 for w in windows):
        raise ValueError(f"window radii must be non-negative, got {list(windows)}")
    if any(b <= a for a, b in zip(windows, windows[1:])):
        raise ValueError(f"window radii must be strictly ascending, got {list(windows)}")
    return windows


class RunConfig(BaseModel):
    """Every setting a command may use."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    windows: tuple[float, ...] = Field(default=DEFAULT_WINDOWS, min_length=1)
    histogram_bin_s: float = Field(default=10.0, gt=0.0)
    synth: SynthConfig = Field(default_factory=SynthConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    realign: RealignConfig = Field(default_factory=RealignConfig)
    coarse: CoarseConfig = Field(default_factory=CoarseConfig)

    @field_validator("windows")
    @classmethod
    def validate_windows(cls, windows: tuple[float, ...]) -> tuple[float, ...]:
        return check_windows(windows)


def read_config_file(path: Path | str) -> dict[str, Any]:
    """Raw settings of a TOML config file or a run manifest.

    Raises:
        UsageError: If the file is missing or unparsable.
    """
    path = Path(path)
    try:
        if path.suffix == ".json":
            document = json.loads(path.read_text(encoding="utf-8"))
            if isinstance(document, dict) and "config" in document and "command" in document:
                document = document["config"]
        else:
            with path.open("rb") as handle:
                document = tomllib.load(handle)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise UsageError(f"config file {path} must hold a table of settings")
    return document


def merge_settings(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Recursive merge; None values in `overrides` leave `base` untouched."""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = merge_settings(merged[key], value)
        elif isinstance(value, Mapping):
            merged[key] = merge_settings({}, value)
        else:
            merged[key] = value
    return merged


def resolve_config(
    config_path: Path | str | None = None, overrides: Mapping[str, Any] | None = None
) -> RunConfig:
    """Resolve defaults ← config file ← flags into a validated RunConfig.

    A top-level `seed` seeds the synth and train sections unless those set
    their own; a `--seed` flag overrides both.

    Raises:
        UsageError: On an unreadable file or an invalid value.
    """
    settings: dict[str, Any] = {}
    if config_path is not None:
        settings = read_config_file(config_path)
        if "seed" in settings:
            for section in SEEDED_SECTIONS:
                settings.setdefault(section, {})
                if isinstance(settings[section], dict):
                    settings[section].setdefault("seed", settings["seed"])

    overrides = dict(overrides or {})
    if overrides.get("seed") is not None:
        for section in SEEDED_SECTIONS:
            overrides[section] = {**overrides.get(section, {}), "seed": overrides["seed"]}
    settings = merge_settings(settings, overrides)

    try:
        return RunConfig.model_validate(settings)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise UsageError(f"invalid setting {where}: {first['msg']}") from exc


def run_manifest_name(command: str) -> str:
    """File name of the run manifest a command writes next to its outputs."""
    return f"run_manifest.{command}.json"


def _argument(value: str | Path, out_dir: Path) -> str:
    if isinstance(value, Path):
        return Path(os.path.relpath(value.resolve(), out_dir.resolve())).as_posix()
    return str(value)


def write_run_manifest(
    out_dir: Path | str, command: str, config: RunConfig, arguments: Sequence[str | Path] = ()
) -> Path:
    """Write `run_manifest.<command>.json` into `out_dir`.

    The manifest holds every effective setting and the `argv` that replays
    the run from `out_dir`: the command, its `arguments` with paths made
    relative to `out_dir`, and `--config` pointing back at the manifest. No
    wall-clock or host fields are recorded, so identical runs write identical
    manifests.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = run_manifest_name(command)
    document = {
        "argv": [command, *(_argument(value, out_dir) for value in arguments), "--config", name],
        "command": command,
        "config": config.model_dump(mode="json", exclude=MANIFEST_EXCLUDE),
    }
    path = out_dir / name
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.debug("Wrote run manifest %s", path)
    return path
