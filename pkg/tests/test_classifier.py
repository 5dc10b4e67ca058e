"""Probe training, scoring, and the checkpoint format."""

import math
import struct

import numpy as np
import pytest

from hexaug import (CorruptionError, EmbeddingDataset, FormatError,
                    ImbalanceSpec, LinearModel, ShapeError, TrainConfig,
                    ValidationError, evaluate, forward_logits, load_model,
                    loss_and_grad, predict, save_model, softmax, train)
from tests.conftest import make_dataset


def numeric_gradient(model, X, y, l2, eps=1e-6):
    """Central finite differences over every parameter."""
    gw = np.zeros_like(model.W)
    gb = np.zeros_like(model.b)
    for idx in np.ndindex(*model.W.shape):
        Wp, Wm = model.W.copy(), model.W.copy()
        Wp[idx] += eps
        Wm[idx] -= eps
        lp, _ = loss_and_grad(LinearModel(Wp, model.b), X, y, l2)
        lm, _ = loss_and_grad(LinearModel(Wm, model.b), X, y, l2)
        gw[idx] = (lp - lm) / (2 * eps)
    for i in range(model.k):
        bp, bm = model.b.copy(), model.b.copy()
        bp[i] += eps
        bm[i] -= eps
        lp, _ = loss_and_grad(LinearModel(model.W, bp), X, y, l2)
        lm, _ = loss_and_grad(LinearModel(model.W, bm), X, y, l2)
        gb[i] = (lp - lm) / (2 * eps)
    return gw, gb


class TestLossAndGradient:
    def test_zero_model_loss_is_log_k(self, rng):
        for k in (2, 5, 9):
            X = rng.standard_normal((12, 4))
            y = rng.integers(0, k, size=12)
            loss, _ = loss_and_grad(LinearModel.zeros(k, 4), X, y, l2=0.0)
            assert abs(loss - math.log(k)) < 1e-12

    def test_gradient_matches_finite_differences(self, rng):
        model = LinearModel(0.3 * rng.standard_normal((3, 5)),
                            0.1 * rng.standard_normal(3))
        X = rng.standard_normal((10, 5))
        y = rng.integers(0, 3, size=10)
        _, (gw, gb) = loss_and_grad(model, X, y, l2=0.01)
        nw, nb = numeric_gradient(model, X, y, l2=0.01)
        np.testing.assert_allclose(gw, nw, rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(gb, nb, rtol=1e-6, atol=1e-9)

    def test_l2_term_uses_half_coefficient(self, rng):
        model = LinearModel(rng.standard_normal((2, 3)), np.zeros(2))
        X = rng.standard_normal((6, 3))
        y = rng.integers(0, 2, size=6)
        l0, _ = loss_and_grad(model, X, y, l2=0.0)
        l1, _ = loss_and_grad(model, X, y, l2=0.5)
        assert abs((l1 - l0) - 0.25 * np.square(model.W).sum()) < 1e-12

    def test_shape_errors(self, rng):
        model = LinearModel.zeros(2, 3)
        with pytest.raises(ShapeError):
            loss_and_grad(model, np.zeros((0, 3)), np.zeros(0, np.int64), 0.0)
        with pytest.raises(ShapeError):
            loss_and_grad(model, np.zeros((2, 4)), np.array([0, 1]), 0.0)
        with pytest.raises(ShapeError):
            loss_and_grad(model, np.zeros((2, 3)), np.array([0, 5]), 0.0)


class TestSoftmax:
    def test_rows_sum_to_one(self, rng):
        p = softmax(rng.standard_normal((20, 6)))
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
        assert p.min() > 0

    def test_shift_invariance(self, rng):
        z = rng.standard_normal(7)
        np.testing.assert_allclose(softmax(z), softmax(z + 123.0), atol=1e-12)

    def test_extreme_logits_do_not_overflow(self):
        p = softmax(np.array([1000.0, 0.0, -1000.0]))
        assert np.isfinite(p).all()
        assert abs(p[0] - 1.0) < 1e-12


class TestTraining:
    def test_separable_toy_reaches_full_accuracy(self, rng):
        ds = make_dataset(rng, k=3, d=4, counts=[15, 15, 15],
                          spread=0.1, mean_scale=10.0)
        model, losses = train(ds, TrainConfig(epochs=40, seed=0))
        preds = predict(model, ds.vectors)
        assert (preds == ds.labels).all()
        assert losses.shape == (40,)
        assert losses[-1] < losses[0]

    def test_bit_exact_reruns(self, rng):
        ds = make_dataset(rng, k=3, counts=[10, 10, 10])
        cfg = TrainConfig(epochs=5, seed=4)
        m1, h1 = train(ds, cfg)
        m2, h2 = train(ds, cfg)
        assert m1.W.tobytes() == m2.W.tobytes()
        assert m1.b.tobytes() == m2.b.tobytes()
        assert h1.tobytes() == h2.tobytes()

    def test_seed_changes_shuffle(self, rng):
        ds = make_dataset(rng, k=3, counts=[10, 10, 10], spread=2.0)
        m1, _ = train(ds, TrainConfig(epochs=5, seed=0, batch_size=8))
        m2, _ = train(ds, TrainConfig(epochs=5, seed=1, batch_size=8))
        assert not np.array_equal(m1.W, m2.W)

    def test_random_init_is_seeded(self, rng):
        ds = make_dataset(rng, k=2, counts=[8, 8])
        cfg = TrainConfig(epochs=0, init_scale=0.5, seed=9)
        m1, _ = train(ds, cfg)
        m2, _ = train(ds, cfg)
        np.testing.assert_array_equal(m1.W, m2.W)
        assert np.abs(m1.W).max() > 0

    def test_zero_epochs_returns_init(self, rng):
        ds = make_dataset(rng, k=2, counts=[5, 5])
        init = LinearModel(np.ones((2, ds.d)), np.zeros(2))
        model, losses = train(ds, TrainConfig(epochs=0), init=init)
        np.testing.assert_array_equal(model.W, init.W)
        assert losses.size == 0

    def test_incomplete_classes_rejected(self, rng):
        ds = make_dataset(rng, k=3, counts=[5, 0, 5])
        with pytest.raises(ValidationError, match="class-complete"):
            train(ds, TrainConfig(epochs=1))

    def test_init_shape_mismatch(self, rng):
        ds = make_dataset(rng, k=2, counts=[5, 5])
        with pytest.raises(ShapeError):
            train(ds, TrainConfig(), init=LinearModel.zeros(3, ds.d))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValidationError):
            TrainConfig(batch_size=0)
        with pytest.raises(ValidationError):
            TrainConfig(epochs=-1)
        with pytest.raises(ValidationError):
            TrainConfig(l2=-0.1)


class TestPredictAndEvaluate:
    def test_tie_breaks_to_lowest_index(self):
        model = LinearModel.zeros(4, 3)  # all logits identical
        preds = predict(model, np.ones((5, 3)))
        assert preds.tolist() == [0, 0, 0, 0, 0]

    def test_accuracy_manual_oracle(self):
        W = np.array([[1.0, 0.0], [0.0, 1.0]])
        model = LinearModel(W, np.zeros(2))
        vectors = np.array([[2, 0], [0, 2], [2, 0], [0, 2]], np.float32)
        labels = np.array([0, 1, 1, 0])  # half are wrong on purpose
        ds = EmbeddingDataset(vectors, labels, k=2)
        result = evaluate(model, ds)
        assert result.accuracy == 50.0
        assert result.per_class == (50.0, 50.0)
        assert result.n == 4

    def test_restricted_split_accuracies(self):
        model = LinearModel(np.eye(2), np.zeros(2))
        vectors = np.array([[3, 0], [3, 0], [0, 3], [3, 0]], np.float32)
        labels = np.array([0, 0, 1, 1])
        ds = EmbeddingDataset(vectors, labels, k=2)
        spec = ImbalanceSpec(n_few=1, restricted_classes=(1,),
                             n_many_per_class=(2, 2), seed=0)
        result = evaluate(model, ds, spec)
        assert result.acc_restricted == 50.0   # class 1: one of two right
        assert result.acc_unrestricted == 100.0
        assert result.accuracy == 75.0

    def test_per_class_nan_for_absent_class(self, rng):
        model = LinearModel.zeros(3, 4)
        ds = make_dataset(rng, k=3, d=4, counts=[3, 0, 3])
        result = evaluate(model, ds)
        assert math.isnan(result.per_class[1])
        assert result.to_json()["per_class"][1] is None

    def test_dimension_mismatch(self, rng):
        ds = make_dataset(rng, k=2, d=4, counts=[3, 3])
        with pytest.raises(ShapeError):
            evaluate(LinearModel.zeros(2, 5), ds)

    def test_logits_shape_checks(self):
        model = LinearModel.zeros(2, 3)
        assert forward_logits(model, np.zeros(3)).shape == (2,)
        assert forward_logits(model, np.zeros((4, 3))).shape == (4, 2)
        with pytest.raises(ShapeError):
            forward_logits(model, np.zeros((4, 2)))


class TestModelPersistence:
    def test_checkpoint_layout(self, tmp_path):
        model = LinearModel(np.array([[1.5, -2.0]]), np.array([0.25]))
        path = tmp_path / "m.lmd"
        save_model(model, path)
        blob = path.read_bytes()
        assert blob[:4] == b"LMD1"
        assert struct.unpack_from("<II", blob, 4) == (1, 2)
        assert len(blob) == 12 + 4 * 2 + 4
        np.testing.assert_array_equal(
            np.frombuffer(blob, "<f4", count=2, offset=12), [1.5, -2.0])

    def test_round_trip_at_float32_precision(self, rng, tmp_path):
        model = LinearModel(rng.standard_normal((4, 6)),
                            rng.standard_normal(4))
        path = tmp_path / "rt.lmd"
        save_model(model, path)
        back = load_model(path)
        np.testing.assert_allclose(back.W, model.W, rtol=1e-6)
        np.testing.assert_allclose(back.b, model.b, rtol=1e-6)
        assert back.W.dtype == np.float64

    def test_bad_magic_and_truncation(self, tmp_path):
        path = tmp_path / "bad.lmd"
        path.write_bytes(b"XXXX" + bytes(16))
        with pytest.raises(FormatError):
            load_model(path)
        save_model(LinearModel.zeros(2, 2), path)
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(CorruptionError):
            load_model(path)
