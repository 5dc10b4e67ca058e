"""Backend parity and the kernel contract.

The two implementations may order float additions differently, so
cross-backend comparisons use allclose; rerun determinism within one
backend must be bit-exact.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from hexaug import LinearModel, kernels, loss_and_grad


def make_problem(seed, n=60, d=7, k=4, epochs=3):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    y = rng.integers(0, k, size=n, dtype=np.int64)
    order = np.stack([np.random.default_rng((seed, e)).permutation(n)
                      for e in range(epochs)])
    return X, y, order


def run(fn, X, y, order, k, lr=0.1, l2=1e-3, batch_size=16):
    n, d = X.shape
    W = np.zeros((k, d))
    b = np.zeros(k)
    loss_out = np.empty(order.shape[0])
    bad = fn(X, y, W, b, lr, l2, batch_size, order, loss_out)
    return bad, W, b, loss_out


class TestBackendParity:
    def test_both_backends_registered(self):
        impls = kernels.implementations()
        assert "python" in impls
        assert kernels.BACKEND in impls

    @pytest.mark.skipif("compiled" not in kernels.implementations(),
                        reason="compiled backend unavailable")
    def test_compiled_matches_pure(self):
        impls = kernels.implementations()
        for seed in range(5):
            X, y, order = make_problem(seed)
            bad_p, W_p, b_p, loss_p = run(impls["python"], X, y, order, k=4)
            bad_c, W_c, b_c, loss_c = run(impls["compiled"], X, y, order, k=4)
            assert bad_p == bad_c == -1
            np.testing.assert_allclose(W_c, W_p, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(b_c, b_p, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(loss_c, loss_p, rtol=1e-10, atol=1e-12)

    def test_rerun_is_bit_exact_per_backend(self):
        for name, fn in kernels.implementations().items():
            X, y, order = make_problem(3)
            _, W1, b1, loss1 = run(fn, X, y, order, k=4)
            _, W2, b2, loss2 = run(fn, X, y, order, k=4)
            assert W1.tobytes() == W2.tobytes(), name
            assert b1.tobytes() == b2.tobytes(), name
            assert loss1.tobytes() == loss2.tobytes(), name

    def test_read_only_inputs_accepted(self):
        # Dataset arrays arrive non-writeable; the kernel must not
        # require writable X/y/order.
        for name, fn in kernels.implementations().items():
            X, y, order = make_problem(1)
            for arr in (X, y, order):
                arr.flags.writeable = False
            bad, W, b, loss_out = run(fn, X, y, order, k=4)
            assert bad == -1, name


class TestLossSemantics:
    def test_first_step_loss_equals_full_objective_for_one_batch(self):
        # batch_size >= n and one epoch: reported loss is the full-batch
        # objective at the zero model.
        X, y, order = make_problem(7, n=20, epochs=1)
        for name, fn in kernels.implementations().items():
            bad, W, b, loss_out = run(fn, X, y, order, k=4, batch_size=64)
            expected, _ = loss_and_grad(LinearModel.zeros(4, X.shape[1]),
                                        X.astype(np.float32), y, l2=1e-3)
            np.testing.assert_allclose(loss_out[0], expected, rtol=1e-6)

    def test_epoch_loss_is_example_weighted_over_ragged_batches(self):
        # n=5 with batch_size=3 -> batches of 3 and 2 examples; the
        # epoch number must weight them 3/5 and 2/5.
        rng = np.random.default_rng(0)
        X = rng.standard_normal((5, 4))
        y = np.array([0, 1, 2, 0, 1], dtype=np.int64)
        order = np.arange(5, dtype=np.int64)[None, :]
        k, l2 = 3, 0.01
        for name, fn in kernels.implementations().items():
            W = np.zeros((k, 4))
            b = np.zeros(k)
            loss_out = np.empty(1)
            fn(X, y, W, b, 0.05, l2, 3, order, loss_out)

            # oracle: replay the two minibatch objectives by hand
            model = LinearModel.zeros(k, 4)
            l1, (gw, gb) = loss_and_grad(model, X[:3].astype(np.float32),
                                         y[:3], l2)
            W2 = model.W - 0.05 * gw
            b2 = model.b - 0.05 * gb
            l2_loss, _ = loss_and_grad(LinearModel(W2, b2),
                                       X[3:].astype(np.float32), y[3:], l2)
            expected = (3 * l1 + 2 * l2_loss) / 5
            np.testing.assert_allclose(loss_out[0], expected, rtol=1e-6,
                                       err_msg=name)

    def test_updates_match_manual_gradient_step(self):
        X, y, order = make_problem(11, n=8, epochs=1)
        for name, fn in kernels.implementations().items():
            W = np.zeros((4, X.shape[1]))
            b = np.zeros(4)
            loss_out = np.empty(1)
            fn(X, y, W, b, 0.2, 0.05, 64, order, loss_out)
            model = LinearModel.zeros(4, X.shape[1])
            _, (gw, gb) = loss_and_grad(model, X[order[0]].astype(np.float32),
                                        y[order[0]], l2=0.05)
            np.testing.assert_allclose(W, -0.2 * gw, rtol=1e-6, atol=1e-12,
                                       err_msg=name)
            np.testing.assert_allclose(b, -0.2 * gb, rtol=1e-6, atol=1e-12,
                                       err_msg=name)

    def test_non_finite_loss_reports_step_index(self):
        # Colossal inputs with a huge learning rate overflow quickly.
        X = np.full((6, 3), 1e300)
        y = np.zeros(6, dtype=np.int64)
        order = np.arange(6, dtype=np.int64)[None, :].repeat(2, axis=0)
        for name, fn in kernels.implementations().items():
            W = np.zeros((2, 3))
            b = np.zeros(2)
            loss_out = np.zeros(2)
            bad = fn(X, y, W, b, 1e280, 0.0, 3, order, loss_out)
            assert bad >= 0, name


class TestBackendSelection:
    def test_pure_env_forces_python_backend(self):
        env = dict(os.environ, HEXAUG_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from hexaug import kernels; print(kernels.BACKEND)"],
            capture_output=True, text=True, env=env, check=True)
        assert out.stdout.strip() == "python"

    def test_module_binding_matches_backend(self):
        impls = kernels.implementations()
        assert kernels.sgd_epochs is impls[kernels.BACKEND]
