"""
ALNF feature file codec.

Layout (all little-endian):

    magic      4 bytes  b"ALNF"
    version    u32      1
    dtype      u8       0 = float32
    n          u64      row count
    d          u64      embedding dimension
    features   n*d f32  row-major
    timestamps n   u64  milliseconds

Frame files store strictly increasing key-frame times; commentary feature
files reuse the layout with the commentary source times, which need not be
ordered.
"""

import struct
from pathlib import Path

import numpy as np

from commentary_align.core.errors import FeatureFileError
from commentary_align.core.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"ALNF"
VERSION = 1
DTYPE_FLOAT32 = 0
_HEADER = struct.Struct("<4sIBQQ")


def write_features(path: Path | str, timestamps_s: np.ndarray, features: np.ndarray) -> Path:
    """Write an (n, d) embedding matrix and its n timestamps to `path`.

    Timestamps are rounded to whole milliseconds.

    Raises:
        FeatureFileError: If shapes disagree or a timestamp is negative.
    """
    path = Path(path)
    timestamps_s = np.asarray(timestamps_s, dtype=np.float64)
    features = np.asarray(features)
    if features.ndim != 2 or timestamps_s.shape != (features.shape[0],):
        raise FeatureFileError(
            f"{path}: need (n, d) features and n timestamps, "
            f"got {features.shape} and {timestamps_s.shape}"
        )
    if np.any(timestamps_s < 0):
        raise FeatureFileError(f"{path}: negative timestamps cannot be encoded")

    n, d = features.shape
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT32, n, d))
        handle.write(np.ascontiguousarray(features, dtype="<f4").tobytes())
        handle.write(np.rint(timestamps_s * 1000.0).astype("<u8").tobytes())
    logger.debug("Wrote %d x %d features to %s", n, d, path)
    return path


def read_features(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    """Read an ALNF file.

    Returns:
        tuple: (timestamps in seconds as float64, features as float32 (n, d)).

    Raises:
        FeatureFileError: Missing file, bad magic/version/dtype, or truncation.
    """
    path = Path(path)
    try:
        payload = path.read_bytes()
    except FileNotFoundError as exc:
        raise FeatureFileError(f"feature file not found: {path}") from exc

    if len(payload) < _HEADER.size:
        raise FeatureFileError(f"{path}: truncated header")
    magic, version, dtype_code, n, d = _HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    if dtype_code != DTYPE_FLOAT32:
        raise FeatureFileError(f"{path}: unsupported dtype code {dtype_code}")

    feature_bytes = n * d * 4
    expected = _HEADER.size + feature_bytes + n * 8
    if len(payload) != expected:
        raise FeatureFileError(f"{path}: expected {expected} bytes, found {len(payload)}")

    offset = _HEADER.size
    features = np.frombuffer(payload, dtype="<f4", count=n * d, offset=offset)
    features = features.reshape(n, d).astype(np.float32)
    millis = np.frombuffer(payload, dtype="<u8", count=n, offset=offset + feature_bytes)
    return millis.astype(np.float64) / 1000.0, features
