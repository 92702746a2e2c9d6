import json

import numpy as np
import pytest

from commentary_align.core.errors import MatchFileError
from commentary_align.core.io import load_match, write_match


class TestMatchFiles:
    def test_write_then_load(self, make_match, tmp_path):
        """Commentaries, frames and commentary embeddings survive a write/load cycle."""
        match = make_match(t=(10.0, 20.5), t_gt=(8.0, 19.0))
        path = write_match(match, tmp_path / "tiny.json")

        loaded = load_match(path)
        assert loaded.match_id == "tiny"
        assert [c.t for c in loaded.commentaries] == [10.0, 20.5]
        assert [c.t_gt for c in loaded.commentaries] == [8.0, 19.0]
        np.testing.assert_array_equal(loaded.frames.timestamps, match.frames.timestamps)
        np.testing.assert_allclose(loaded.frames.features, match.frames.features, rtol=1e-6)
        np.testing.assert_allclose(loaded.text_features, match.text_features, rtol=1e-6)

    def test_feature_files_sit_next_to_match(self, make_match, tmp_path):
        """Feature files are referenced relative to the match file."""
        write_match(make_match(), tmp_path / "tiny.json")
        document = json.loads((tmp_path / "tiny.json").read_text())

        assert document["frames"]["feature_file"] == "tiny.frames.alnf"
        assert document["commentary_features"]["feature_file"] == "tiny.text.alnf"
        assert (tmp_path / "tiny.frames.alnf").is_file()
        assert document["commentaries"][0]["display"] == "1 - 00:10"

    def test_display_string_is_ignored_on_load(self, make_match, tmp_path):
        """A stale display string never overrides t."""
        path = write_match(make_match(), tmp_path / "tiny.json")
        document = json.loads(path.read_text())
        document["commentaries"][0]["display"] = "1 - 44:00"
        path.write_text(json.dumps(document))
        assert load_match(path).commentaries[0].t == 10.0

    def test_invalid_field_is_named(self, make_match, tmp_path):
        """A negative commentary time names the match and the dotted field."""
        path = write_match(make_match(t=(1.0, 2.0, 3.0)), tmp_path / "tiny.json")
        document = json.loads(path.read_text())
        document["commentaries"][2]["t"] = -4.0
        path.write_text(json.dumps(document))

        with pytest.raises(MatchFileError) as excinfo:
            load_match(path)
        assert excinfo.value.match_id == "tiny"
        assert excinfo.value.field == "commentaries.2.t"

    def test_missing_feature_file(self, make_match, tmp_path):
        """A match whose frame file is gone fails with the frames field named."""
        path = write_match(make_match(), tmp_path / "tiny.json")
        (tmp_path / "tiny.frames.alnf").unlink()
        with pytest.raises(MatchFileError) as excinfo:
            load_match(path)
        assert excinfo.value.field == "frames.feature_file"

    def test_missing_match_file(self, tmp_path):
        """A missing file is a MatchFileError."""
        with pytest.raises(MatchFileError, match="not found"):
            load_match(tmp_path / "absent.json")

    def test_unparsable_file(self, tmp_path):
        """Broken JSON is reported without a match id."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(MatchFileError) as excinfo:
            load_match(path)
        assert excinfo.value.match_id is None

    def test_missing_transcript(self, make_match, tmp_path):
        """A referenced transcript must exist."""
        path = write_match(make_match(), tmp_path / "tiny.json")
        document = json.loads(path.read_text())
        document["asr_file"] = "tiny.asr.json"
        path.write_text(json.dumps(document))
        with pytest.raises(MatchFileError) as excinfo:
            load_match(path)
        assert excinfo.value.field == "asr_file"
