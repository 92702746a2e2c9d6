"""
MTAC checkpoint codec.

Layout (little-endian): magic b"MTAC", version u32, d_in u32, d_h u32,
d_out u32, then the float32 parameter blocks in `PARAM_ORDER` (text head
W1, b1, W2, b2, then the visual head), then the u64 training seed.
"""

import hashlib
import struct
from pathlib import Path

import numpy as np

from commentary_align.core.errors import CheckpointError
from commentary_align.core.logging import get_logger
from commentary_align.numerics.heads import PARAM_ORDER, ProjectionHeads

logger = get_logger(__name__)

MAGIC = b"MTAC"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")
_SEED = struct.Struct("<Q")


def _block_shapes(d_in: int, d_h: int, d_out: int) -> dict[str, tuple[int, ...]]:
    shapes = {"W1": (d_in, d_h), "b1": (d_h,), "W2": (d_h, d_out), "b2": (d_out,)}
    return {name: shapes[name.split(".")[1]] for name in PARAM_ORDER}


def save_checkpoint(heads: ProjectionHeads, path: Path | str) -> Path:
    """Write both heads and their seed to `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d_in, d_h, d_out = heads.dims
    params = heads.parameters()
    with path.open("wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION, d_in, d_h, d_out))
        for name in PARAM_ORDER:
            handle.write(np.ascontiguousarray(params[name], dtype="<f4").tobytes())
        handle.write(_SEED.pack(heads.seed))
    logger.info("Checkpoint written to %s (d_in=%d, d_h=%d, d_out=%d)", path, d_in, d_h, d_out)
    return path


def load_checkpoint(path: Path | str) -> ProjectionHeads:
    """Read heads written by `save_checkpoint` as float32 arrays.

    Raises:
        CheckpointError: Missing file, bad header, or size mismatch.
    """
    path = Path(path)
    try:
        payload = path.read_bytes()
    except FileNotFoundError as exc:
        raise CheckpointError(f"checkpoint not found: {path}") from exc
    if len(payload) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header")

    magic, version, d_in, d_h, d_out = _HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")

    shapes = _block_shapes(d_in, d_h, d_out)
    expected = _HEADER.size + 4 * sum(int(np.prod(s)) for s in shapes.values()) + _SEED.size
    if len(payload) != expected:
        raise CheckpointError(f"{path}: expected {expected} bytes, found {len(payload)}")

    offset = _HEADER.size
    params: dict[str, np.ndarray] = {}
    for name in PARAM_ORDER:
        count = int(np.prod(shapes[name]))
        block = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        params[name] = block.reshape(shapes[name]).astype(np.float32)
        offset += 4 * count
    (seed,) = _SEED.unpack_from(payload, offset)
    return ProjectionHeads.from_parameters(params, seed=int(seed))


def checkpoint_id(path: Path | str) -> str:
    """SHA-256 hex digest of a checkpoint file, used in provenance blocks."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
