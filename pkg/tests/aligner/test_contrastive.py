import math

import numpy as np
import pytest
from scipy.special import log_softmax

from commentary_align.aligner.contrastive import affinity, align_loss, label_matrix
from commentary_align.core.errors import DataError, DimensionError, ZeroNormError
from commentary_align.numerics.gradcheck import grad_check


class TestAffinity:
    def test_self_similarity_is_one(self):
        """Identical rows have cosine 1."""
        x = np.array([[0.3, -1.2, 2.0]])
        assert affinity(x, x)[0, 0] == pytest.approx(1.0)

    def test_orthogonal_rows(self):
        """Orthogonal rows have cosine 0."""
        assert affinity(np.array([[1.0, 0.0]]), np.array([[0.0, 3.0]]))[0, 0] == 0.0

    def test_hand_value(self):
        """C = [1, 0] against V = [1, 1] gives 1/√2."""
        value = affinity(np.array([[1.0, 0.0]]), np.array([[1.0, 1.0]]))[0, 0]
        assert value == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_entries_are_bounded(self):
        """Every entry lies in [−1, 1] up to rounding."""
        rng = np.random.default_rng(0)
        A = affinity(rng.standard_normal((6, 5)), rng.standard_normal((9, 5)))
        assert A.shape == (6, 9)
        assert np.all(np.abs(A) <= 1 + 1e-6)

    def test_scale_invariance(self):
        """Scaling a row by λ > 0 leaves the affinity unchanged."""
        rng = np.random.default_rng(1)
        C, V = rng.standard_normal((3, 4)), rng.standard_normal((5, 4))
        scaled = C.copy()
        scaled[1] *= 7.5
        np.testing.assert_allclose(affinity(scaled, V), affinity(C, V), atol=1e-12)

    def test_zero_row_is_named(self):
        """A zero-norm frame row raises with its index."""
        V = np.ones((4, 2))
        V[3] = 0.0
        with pytest.raises(ZeroNormError) as excinfo:
            affinity(np.ones((1, 2)), V)
        assert (excinfo.value.side, excinfo.value.row) == ("frame", 3)

    def test_width_mismatch(self):
        """C and V must share their embedding width."""
        with pytest.raises(DimensionError):
            affinity(np.ones((1, 2)), np.ones((1, 3)))


class TestAlignLoss:
    def test_single_candidate_has_zero_loss(self):
        """With one candidate that is positive the loss is exactly 0."""
        loss, grad = align_loss(np.array([[0.37]]), np.array([[1]]))
        assert loss == 0.0
        assert grad[0, 0] == 0.0

    def test_two_candidates(self):
        """Â = [1, 0] with the first positive gives log(1 + e⁻¹)."""
        loss, _ = align_loss(np.array([[1.0, 0.0]]), np.array([[1, 0]]))
        assert abs(loss - math.log(1 + math.exp(-1))) < 1e-9

    @pytest.mark.parametrize("s", [-0.8, 0.0, 0.5, 1.0])
    def test_multi_positive_row(self, s):
        """Two positives among three equal scores give −log(2/3) for any score."""
        loss, _ = align_loss(np.full((1, 3), s), np.array([[1, 1, 0]]))
        assert abs(loss - (-math.log(2 / 3))) < 1e-9

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_softmax_cross_entropy(self, seed):
        """Single-positive rows agree with softmax cross-entropy to 1e-10."""
        rng = np.random.default_rng(seed)
        k, n = 5, 12
        A = rng.uniform(-1, 1, size=(k, n))
        targets = rng.integers(n, size=k)

        loss, _ = align_loss(A, label_matrix(targets, n))
        reference = -np.mean(log_softmax(A, axis=1)[np.arange(k), targets])
        assert abs(loss - reference) < 1e-10
        assert loss >= 0.0

    def test_gradient_matches_finite_differences(self):
        """dL/dÂ agrees with finite differences."""
        rng = np.random.default_rng(3)
        Y = np.zeros((3, 6), dtype=bool)
        Y[0, 1] = Y[1, 4] = Y[2, 0] = Y[2, 5] = True

        def loss_fn(params):
            loss, dA = align_loss(params["A"], Y)
            return loss, {"A": dA}

        error = grad_check(loss_fn, {"A": rng.uniform(-1, 1, size=(3, 6))})
        assert error < 1e-6

    def test_row_without_positive(self):
        """A label row without a positive is named in the error."""
        Y = np.array([[1, 0], [0, 0]])
        with pytest.raises(DataError, match="row 1"):
            align_loss(np.zeros((2, 2)), Y)

    def test_shape_mismatch(self):
        """Affinity and labels must have the same shape."""
        with pytest.raises(DimensionError):
            align_loss(np.zeros((2, 3)), np.ones((2, 2)))


class TestLabelMatrix:
    def test_one_positive_per_row(self):
        """label_matrix marks exactly the given column of each row."""
        Y = label_matrix([2, 0], 4)
        assert Y.dtype == bool
        np.testing.assert_array_equal(Y.sum(axis=1), [1, 1])
        assert Y[0, 2] and Y[1, 0]
