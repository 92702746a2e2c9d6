import struct

import numpy as np
import pytest

from commentary_align.core.errors import CheckpointError
from commentary_align.numerics.checkpoint import (
    MAGIC,
    checkpoint_id,
    load_checkpoint,
    save_checkpoint,
)
from commentary_align.numerics.heads import PARAM_ORDER, init_heads


@pytest.fixture
def heads():
    return init_heads(6, 5, 4, seed=11)


class TestCheckpoint:
    def test_save_and_load(self, heads, tmp_path):
        """Every block and the seed survive a save/load cycle."""
        path = save_checkpoint(heads, tmp_path / "heads.mtac")
        loaded = load_checkpoint(path)

        assert loaded.dims == (6, 5, 4)
        assert loaded.seed == 11
        for name in PARAM_ORDER:
            assert np.array_equal(loaded.parameters()[name], heads.parameters()[name])

    def test_layout(self, heads, tmp_path):
        """Header fields, float32 blocks and the u64 seed footer sit where documented."""
        payload = save_checkpoint(heads, tmp_path / "heads.mtac").read_bytes()

        magic, version, d_in, d_h, d_out = struct.unpack_from("<4sIIII", payload, 0)
        assert (magic, version, d_in, d_h, d_out) == (MAGIC, 1, 6, 5, 4)
        floats = 2 * (6 * 5 + 5 + 5 * 4 + 4)
        assert len(payload) == 20 + 4 * floats + 8
        assert struct.unpack_from("<Q", payload, len(payload) - 8)[0] == 11
        first = np.frombuffer(payload, dtype="<f4", count=30, offset=20).reshape(6, 5)
        assert np.array_equal(first, heads.text.W1)

    def test_checkpoint_id_is_content_hash(self, heads, tmp_path):
        """Identical heads give identical ids; different heads do not."""
        a = checkpoint_id(save_checkpoint(heads, tmp_path / "a.mtac"))
        b = checkpoint_id(save_checkpoint(heads, tmp_path / "b.mtac"))
        c = checkpoint_id(save_checkpoint(init_heads(6, 5, 4, seed=12), tmp_path / "c.mtac"))
        assert a == b
        assert a != c
        assert len(a) == 64

    def test_missing_file(self, tmp_path):
        """A missing checkpoint raises CheckpointError."""
        with pytest.raises(CheckpointError, match="not found"):
            load_checkpoint(tmp_path / "absent.mtac")

    def test_bad_magic(self, heads, tmp_path):
        """A file with the wrong magic is rejected."""
        path = save_checkpoint(heads, tmp_path / "heads.mtac")
        path.write_bytes(b"XXXX" + path.read_bytes()[4:])
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(path)

    def test_truncated_payload(self, heads, tmp_path):
        """A short file is rejected with the expected and found sizes."""
        path = save_checkpoint(heads, tmp_path / "heads.mtac")
        path.write_bytes(path.read_bytes()[:-12])
        with pytest.raises(CheckpointError, match="expected"):
            load_checkpoint(path)
