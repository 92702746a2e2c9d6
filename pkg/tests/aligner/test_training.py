import csv

import numpy as np
import pytest

from commentary_align.aligner.training import TrainConfig, train, write_loss_trace
from commentary_align.core.errors import DataError, DimensionError, MissingGroundTruthError
from commentary_align.numerics.checkpoint import load_checkpoint
from commentary_align.numerics.heads import PARAM_ORDER, init_heads
from commentary_align.synth.generator import SynthConfig, generate_match


@pytest.fixture(scope="module")
def planted_matches():
    """Two small noise-free synthetic matches."""
    cfg = SynthConfig(
        num_matches=2,
        test_matches=0,
        commentaries_per_match=12,
        duration_s=300.0,
        d=16,
        offset_sigma_s=10.0,
        seed=3,
    )
    return [generate_match(cfg, [cfg.seed, i], index=i)[0] for i in range(2)]


def small_config(**changes) -> TrainConfig:
    settings = dict(epochs=2, lr=5e-3, hidden_dim=16, out_dim=16, seed=1)
    settings.update(changes)
    return TrainConfig(**settings)


class TestTrain:
    def test_zero_lr_keeps_initial_heads(self, planted_matches):
        """With lr = 0 the final heads are bit-identical to the seeded initialisation."""
        result = train(planted_matches, small_config(lr=0.0))
        initial = init_heads(16, 16, 16, seed=1).parameters()
        final = result.heads.parameters()
        assert all(np.array_equal(final[name], initial[name]) for name in PARAM_ORDER)

    def test_reports_loss_per_epoch(self, planted_matches):
        """The trace holds one finite mean loss per epoch."""
        result = train(planted_matches, small_config(epochs=3))
        assert len(result.loss_trace) == 3
        assert all(np.isfinite(result.loss_trace))
        assert result.num_batches == 24

    def test_deterministic(self, planted_matches):
        """Two runs with the same seed give identical heads and traces."""
        a = train(planted_matches, small_config())
        b = train(planted_matches, small_config())
        assert a.loss_trace == b.loss_trace
        assert all(
            np.array_equal(a.heads.parameters()[n], b.heads.parameters()[n]) for n in PARAM_ORDER
        )

    def test_loss_decreases_on_planted_data(self, planted_matches):
        """On noise-free planted data the last epoch's loss is below the first."""
        result = train(planted_matches, small_config(epochs=15))
        assert result.loss_trace[-1] < result.loss_trace[0]

    def test_outputs_written(self, planted_matches, tmp_path):
        """Checkpoint and loss trace land where the config says."""
        result = train(
            planted_matches,
            small_config(
                checkpoint_path=tmp_path / "heads.mtac",
                loss_trace_path=tmp_path / "loss_trace.csv",
            ),
        )
        loaded = load_checkpoint(tmp_path / "heads.mtac")
        assert np.array_equal(loaded.text.W1, result.heads.text.W1)
        with (tmp_path / "loss_trace.csv").open(newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["epoch", "mean_loss"]
        assert [int(r[0]) for r in rows[1:]] == [1, 2]
        assert float(rows[2][1]) == result.loss_trace[1]

    def test_starts_from_given_heads(self, planted_matches):
        """initial_heads replaces the seeded initialisation."""
        start = init_heads(16, 8, 8, seed=9)
        result = train(planted_matches, small_config(lr=0.0), initial_heads=start)
        assert np.array_equal(result.heads.visual.W2, start.visual.W2)

    def test_empty_dataset(self):
        """Training needs at least one match."""
        with pytest.raises(DataError):
            train([], small_config())

    def test_heads_must_match_feature_width(self, planted_matches):
        """Heads built for another width are rejected."""
        with pytest.raises(DimensionError):
            train(planted_matches, small_config(), initial_heads=init_heads(8, 8, 8))

    def test_missing_ground_truth(self, make_match):
        """A commentary without t_gt aborts training."""
        with pytest.raises(MissingGroundTruthError):
            train([make_match(t=(10.0,))], small_config(hidden_dim=4, out_dim=4))


def test_write_loss_trace(tmp_path):
    """Loss traces are written as epoch,mean_loss with epochs from 1."""
    path = write_loss_trace([2.5, 1.25], tmp_path / "trace.csv")
    assert path.read_text().splitlines() == ["epoch,mean_loss", "1,2.5", "2,1.25"]
