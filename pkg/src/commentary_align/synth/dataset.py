"""
Synthetic dataset directories.

Layout, per match `<id>`: `<id>.json` (match file), `<id>.frames.alnf`,
`<id>.text.alnf` (feature files) and `<id>.asr.json` (transcript), plus one
`manifest.json` listing the train/val/test split and the effective config.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ValidationError

from commentary_align.coarse.transcript import write_asr
from commentary_align.core.errors import DataError
from commentary_align.core.io import load_match, write_match
from commentary_align.core.logging import get_logger
from commentary_align.core.types import MatchRecord
from commentary_align.synth.generator import SynthConfig, generate_match
from commentary_align.synth.transcript import write_transcript

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"

SplitName = Literal["train", "val", "test"]


class DatasetSplit(BaseModel):
    train: list[str]
    val: list[str]
    test: list[str]


class DatasetManifest(BaseModel):
    """Contents of `manifest.json`."""

    config: SynthConfig
    offset_sigma_s: float
    split: DatasetSplit


def split_ids(cfg: SynthConfig) -> DatasetSplit:
    """Train first, then validation, then test, in generation order."""
    ids = [cfg.match_id(i) for i in range(cfg.num_matches)]
    n_train = cfg.num_matches - cfg.val_matches - cfg.test_matches
    return DatasetSplit(
        train=ids[:n_train],
        val=ids[n_train : n_train + cfg.val_matches],
        test=ids[n_train + cfg.val_matches :],
    )


def _write_one(cfg: SynthConfig, index: int, out_dir: Path) -> str:
    match, gt_map = generate_match(cfg, [cfg.seed, index], index=index)
    segments = write_transcript(
        match, gt_map, vocab_seed=[cfg.seed, index, 1], filler_per_min=cfg.filler_per_min
    )
    asr_path = write_asr(segments, out_dir / f"{match.match_id}.asr.json")
    write_match(replace(match, asr_path=asr_path), out_dir / f"{match.match_id}.json")
    return match.match_id


def write_dataset(out_dir: Path | str, cfg: SynthConfig, workers: int = 1) -> Path:
    """Generate every match of `cfg` into `out_dir` and write the manifest.

    Matches are independent and seeded by `[cfg.seed, index]`, so the output
    does not depend on `workers`.

    Returns:
        Path: The manifest file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sigma = cfg.offset_sigma()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        written = list(pool.map(lambda i: _write_one(cfg, i, out_dir), range(cfg.num_matches)))

    manifest = DatasetManifest(config=cfg, offset_sigma_s=sigma, split=split_ids(cfg))
    path = out_dir / MANIFEST_NAME
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %d synthetic matches to %s", len(written), out_dir)
    return path


def read_manifest(data_dir: Path | str) -> DatasetManifest:
    """Read `manifest.json` of a dataset directory.

    Raises:
        DataError: If the manifest is missing or invalid.
    """
    path = Path(data_dir) / MANIFEST_NAME
    try:
        return DatasetManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DataError(f"dataset manifest not found: {path}") from exc
    except ValidationError as exc:
        raise DataError(f"{path}: {exc.errors()[0]['msg']}") from exc


def load_split(data_dir: Path | str, split: SplitName) -> list[MatchRecord]:
    """Load every match of one split of a dataset directory."""
    data_dir = Path(data_dir)
    manifest = read_manifest(data_dir)
    ids = getattr(manifest.split, split)
    return [load_match(data_dir / f"{match_id}.json") for match_id in ids]
