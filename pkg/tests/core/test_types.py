import numpy as np
import pytest
from pydantic import ValidationError

from commentary_align.core.errors import InvariantError, MissingGroundTruthError
from commentary_align.core.types import (
    CommentaryItem,
    FrameFeatureSequence,
    MatchRecord,
    display_time,
)


def frames(n=5, d=3):
    return FrameFeatureSequence(np.arange(n, dtype=float), np.ones((n, d)), fps=1.0)


class TestCommentaryItem:
    def test_negative_time_rejected(self):
        """Source times must be non-negative."""
        with pytest.raises(ValidationError):
            CommentaryItem(text="goal", t=-1.0)

    def test_empty_text_rejected(self):
        """Commentary text may not be empty."""
        with pytest.raises(ValidationError):
            CommentaryItem(text="", t=1.0)

    def test_display_time(self):
        """The display string is "H - MM:SS" of the whole seconds."""
        assert display_time(2, 754.9) == "2 - 12:34"


class TestFrameFeatureSequence:
    def test_dimensions(self):
        """n and d come from the feature matrix."""
        seq = frames(4, 7)
        assert (seq.n, seq.d) == (4, 7)

    def test_timestamps_must_increase(self):
        """Repeated timestamps violate strict ordering."""
        with pytest.raises(InvariantError, match="strictly increasing"):
            FrameFeatureSequence(np.array([0.0, 1.0, 1.0]), np.zeros((3, 2)))

    def test_non_finite_feature_row_is_named(self):
        """A NaN entry names its row."""
        features = np.zeros((3, 2))
        features[2, 1] = np.nan
        with pytest.raises(InvariantError) as excinfo:
            FrameFeatureSequence(np.arange(3.0), features)
        assert excinfo.value.field == "features.2"

    def test_row_count_mismatch(self):
        """Feature rows must match timestamps."""
        with pytest.raises(InvariantError):
            FrameFeatureSequence(np.arange(3.0), np.zeros((2, 2)))

    def test_grid_keeps_every_frame_at_native_rate(self):
        """At the file's own rate the grid is every frame."""
        np.testing.assert_array_equal(frames(5).grid(1.0), np.arange(5))

    def test_grid_strides_denser_files(self):
        """A 2 FPS file sampled at 1 FPS keeps every other frame."""
        seq = FrameFeatureSequence(np.arange(6) / 2.0, np.ones((6, 2)), fps=2.0)
        np.testing.assert_array_equal(seq.grid(1.0), [0, 2, 4])


class TestMatchRecord:
    def test_ground_truth_access(self):
        """ground_truth_times lists t_gt when every commentary has one."""
        match = MatchRecord(
            match_id="m",
            half=1,
            duration_s=5.0,
            commentaries=[CommentaryItem(text="a", t=1.0, t_gt=2.0)],
            frames=frames(),
        )
        assert match.has_ground_truth
        np.testing.assert_array_equal(match.ground_truth_times(), [2.0])

    def test_missing_ground_truth(self):
        """A commentary without t_gt makes ground_truth_times raise."""
        match = MatchRecord(
            match_id="m",
            half=1,
            duration_s=5.0,
            commentaries=[CommentaryItem(text="a", t=1.0)],
            frames=frames(),
        )
        assert not match.has_ground_truth
        with pytest.raises(MissingGroundTruthError):
            match.ground_truth_times()

    def test_aligned_times_fall_back_to_source(self):
        """Unaligned commentaries report their source time."""
        match = MatchRecord(
            match_id="m",
            half=2,
            duration_s=5.0,
            commentaries=[
                CommentaryItem(text="a", t=1.0, t_aligned=3.0),
                CommentaryItem(text="b", t=4.0),
            ],
            frames=frames(),
        )
        np.testing.assert_array_equal(match.aligned_times(), [3.0, 4.0])

    @pytest.mark.parametrize(
        ("changes", "field"),
        [
            ({"half": 3}, "half"),
            ({"duration_s": 0.0}, "duration_s"),
            ({"commentaries": []}, "commentaries"),
            ({"text_features": np.zeros((1, 4))}, "commentary_features"),
        ],
    )
    def test_invariants(self, changes, field):
        """Each broken invariant names its field."""
        kwargs = dict(
            match_id="m",
            half=1,
            duration_s=5.0,
            commentaries=[CommentaryItem(text="a", t=1.0)],
            frames=frames(),
        )
        kwargs.update(changes)
        with pytest.raises(InvariantError) as excinfo:
            MatchRecord(**kwargs)
        assert excinfo.value.field == field

    def test_commentary_beyond_stoppage_tolerance(self):
        """A source time far past the half's end is rejected with its index."""
        with pytest.raises(InvariantError) as excinfo:
            MatchRecord(
                match_id="m",
                half=1,
                duration_s=5.0,
                commentaries=[CommentaryItem(text="a", t=1.0), CommentaryItem(text="b", t=900.0)],
                frames=frames(),
            )
        assert excinfo.value.field == "commentaries.1.t"
