import math

import mpmath
import numpy as np
import pytest

from offlang.errors import ConfigError
from offlang.nn import (
    AdamState,
    LstmParams,
    adam_update,
    bilstm,
    bilstm_backward,
    bilstm_forward,
    dense,
    dense_backward,
    dense_forward,
    dropout,
    gradient_check,
    lstm_step,
    lstm_step_backward,
    lstm_step_forward,
    softmax,
    weighted_bce,
    weighted_cce,
)

RNG = np.random.default_rng(12345)


def random_lstm(d, h, rng):
    return LstmParams(
        W=rng.normal(0, 0.5, (4 * h, d)),
        U=rng.normal(0, 0.5, (4 * h, h)),
        b=rng.normal(0, 0.5, 4 * h),
    )


class TestDense:
    def test_identity(self):
        x = np.array([2.0, -3.0])
        assert np.array_equal(dense(x, np.eye(2), np.zeros(2), "identity"), x)

    def test_relu(self):
        y = dense(np.array([1.0, -1.0]), np.eye(2), np.zeros(2), "relu")
        assert y.tolist() == [1.0, 0.0]

    def test_softmax_symmetry(self):
        y = dense(np.zeros(2), np.eye(2), np.zeros(2), "softmax")
        assert np.allclose(y, [0.5, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(ConfigError):
            dense(np.zeros(3), np.eye(2), np.zeros(2))

    def test_softmax_sums_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            z = rng.normal(0, 5, (4, 7))
            p = softmax(z)
            assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
            assert (p > 0).all()


class TestLstmStep:
    def test_zero_parameters_zero_state(self):
        p = LstmParams(np.zeros((8, 3)), np.zeros((8, 2)), np.zeros(8))
        h, c = lstm_step(p, np.array([5.0, -2.0, 1.0]), np.zeros(2), np.zeros(2))
        assert np.array_equal(h, np.zeros(2))
        assert np.array_equal(c, np.zeros(2))

    def test_saturation_limit(self):
        # input and candidate gates saturated open: c -> 1, h -> o * tanh(1)
        h = 1
        b = np.zeros(4)
        b[0] = 10.0  # input gate
        b[2] = 10.0  # candidate
        p = LstmParams(np.zeros((4, 1)), np.zeros((4, 1)), b)
        h_out, c_out = lstm_step(p, np.zeros(1), np.zeros(1), np.zeros(1))
        assert c_out[0] == pytest.approx(1.0, abs=1e-4)
        assert h_out[0] == pytest.approx(0.5 * math.tanh(1.0), abs=1e-4)

    def test_matches_arbitrary_precision_oracle(self):
        rng = np.random.default_rng(3)
        d, h = 3, 3
        p = random_lstm(d, h, rng)
        x = rng.normal(0, 1, d)
        h_prev = rng.normal(0, 1, h)
        c_prev = rng.normal(0, 1, h)
        h_out, c_out = lstm_step(p, x, h_prev, c_prev)

        mpmath.mp.dps = 50
        sig = lambda v: 1 / (1 + mpmath.exp(-v))
        z = [
            sum(mpmath.mpf(p.W[r, j]) * mpmath.mpf(x[j]) for j in range(d))
            + sum(mpmath.mpf(p.U[r, j]) * mpmath.mpf(h_prev[j]) for j in range(h))
            + mpmath.mpf(p.b[r])
            for r in range(4 * h)
        ]
        for k in range(h):
            i_g = sig(z[k])
            f_g = sig(z[h + k])
            g_g = mpmath.tanh(z[2 * h + k])
            o_g = sig(z[3 * h + k])
            c_ref = f_g * mpmath.mpf(c_prev[k]) + i_g * g_g
            h_ref = o_g * mpmath.tanh(c_ref)
            assert c_out[k] == pytest.approx(float(c_ref), abs=1e-12)
            assert h_out[k] == pytest.approx(float(h_ref), abs=1e-12)


class TestBilstm:
    def test_single_step_is_two_independent_cells(self):
        rng = np.random.default_rng(5)
        p_f = random_lstm(2, 3, rng)
        p_b = random_lstm(2, 3, rng)
        x = rng.normal(0, 1, (1, 2))
        out = bilstm(p_f, p_b, x, true_len=1)
        h_f, _ = lstm_step(p_f, x[0], np.zeros(3), np.zeros(3))
        h_b, _ = lstm_step(p_b, x[0], np.zeros(3), np.zeros(3))
        assert np.allclose(out, np.concatenate([h_f, h_b]), atol=1e-12)

    def test_palindrome_with_shared_params(self):
        rng = np.random.default_rng(6)
        p = random_lstm(2, 3, rng)
        a, b = rng.normal(0, 1, 2), rng.normal(0, 1, 2)
        xs = np.stack([a, b, a])  # palindrome
        out = bilstm(p, p, xs, true_len=3)
        assert np.allclose(out[:3], out[3:], atol=1e-12)

    def test_padding_ignored(self):
        rng = np.random.default_rng(7)
        p_f = random_lstm(2, 3, rng)
        p_b = random_lstm(2, 3, rng)
        xs = rng.normal(0, 1, (5, 2))
        padded = xs.copy()
        padded[3:] = 99.0  # arbitrary padding garbage
        out_truncated = bilstm(p_f, p_b, xs[:3], true_len=3)
        out_padded = bilstm(p_f, p_b, padded, true_len=3)
        assert np.allclose(out_truncated, out_padded, atol=1e-12)

    def test_zero_length_gives_zero_vector(self):
        rng = np.random.default_rng(8)
        p_f = random_lstm(2, 3, rng)
        p_b = random_lstm(2, 3, rng)
        out = bilstm(p_f, p_b, np.ones((4, 2)), true_len=0)
        assert not out.any()

    def test_true_len_above_sequence_rejected(self):
        rng = np.random.default_rng(9)
        p = random_lstm(2, 2, rng)
        with pytest.raises(ValueError):
            bilstm(p, p, np.ones((2, 2)), true_len=3)


class TestLosses:
    def test_bce_half(self):
        assert weighted_bce(0.5, 1, 1.0) == pytest.approx(math.log(2.0), abs=1e-9)

    def test_bce_weighted(self):
        assert weighted_bce(0.9, 1, 2.0) == pytest.approx(-2.0 * math.log(0.9), abs=1e-9)

    def test_bce_exact_prediction(self):
        assert weighted_bce(1.0, 1, 1.0) == pytest.approx(0.0, abs=1e-6)
        assert weighted_bce(0.0, 0, 1.0) == pytest.approx(0.0, abs=1e-6)

    def test_cce_uniform(self):
        p = np.full(3, 1.0 / 3.0)
        assert weighted_cce(p, 0, 1.0) == pytest.approx(math.log(3.0), abs=1e-9)

    def test_cce_confident(self):
        assert weighted_cce(np.array([0.0, 1.0, 0.0]), 1, 1.0) == pytest.approx(0.0, abs=1e-6)

    def test_cce_weighted(self):
        p = np.array([0.7, 0.2, 0.1])
        assert weighted_cce(p, 2, 3.0) == pytest.approx(-3.0 * math.log(0.1), abs=1e-9)


class TestAdam:
    def test_zero_gradient_no_change(self):
        params = {"w": np.array([1.0, 2.0])}
        state = AdamState.for_params(params)
        adam_update(params, {"w": np.zeros(2)}, state, lr=0.1)
        assert np.array_equal(params["w"], [1.0, 2.0])

    def test_first_step_magnitude_is_lr(self):
        params = {"w": np.array([1.0])}
        state = AdamState.for_params(params)
        adam_update(params, {"w": np.array([0.5])}, state, lr=0.001)
        assert params["w"][0] == pytest.approx(1.0 - 0.001, abs=1e-6)
        assert state.t == 1

    def test_deterministic(self):
        def run():
            params = {"w": np.array([1.0, -1.0])}
            state = AdamState.for_params(params)
            for _ in range(3):
                adam_update(params, {"w": np.array([0.3, -0.7])}, state, lr=0.01)
            return params["w"]

        assert np.array_equal(run(), run())


class TestDropout:
    def test_inference_identity(self):
        x = np.ones((5, 5))
        assert np.array_equal(dropout(x, 0.5, training=False, rng=0), x)

    def test_rate_zero_identity(self):
        x = np.ones((5, 5))
        assert np.array_equal(dropout(x, 0.0, training=True, rng=0), x)

    def test_rate_one_rejected(self):
        with pytest.raises(ValueError):
            dropout(np.ones(3), 1.0)

    def test_unbiased_mean(self):
        x = np.ones(100_000)
        y = dropout(x, 0.2, training=True, rng=np.random.default_rng(0))
        assert abs(y.mean() - 1.0) < 0.01


def loss_through_dense(params, x, y):
    probs, _ = dense_forward(x, params["W"], params["b"], "sigmoid")
    return float(np.mean(weighted_bce(probs[:, 0], y, 1.0)))


def dense_bce_grads(params, x, y):
    """Analytic gradients of loss_through_dense: sigmoid+BCE fuse to p - y."""
    probs, cache = dense_forward(x, params["W"], params["b"], "sigmoid")
    p = probs[:, 0]
    dy = ((p - y) / len(y) / np.clip(p * (1.0 - p), 1e-12, None))[:, None]
    _, dW, db = dense_backward(dy, cache)
    return dW, db


class TestGradientCheck:
    def test_dense_sigmoid_bce(self):
        rng = np.random.default_rng(0)
        params = {"W": rng.normal(0, 0.5, (1, 4)), "b": rng.normal(0, 0.5, 1)}
        x = rng.normal(0, 1, (6, 4))
        y = rng.integers(0, 2, 6).astype(float)
        dW, db = dense_bce_grads(params, x, y)
        err = gradient_check(
            lambda: loss_through_dense(params, x, y), params, {"W": dW, "b": db}, rng=0
        )
        assert err < 1e-4

    def test_lstm_single_step(self):
        rng = np.random.default_rng(1)
        d, h = 3, 2
        p = random_lstm(d, h, rng)
        params = {"W": p.W, "U": p.U, "b": p.b}
        x = rng.normal(0, 1, d)
        h0 = rng.normal(0, 1, h)
        c0 = rng.normal(0, 1, h)
        target = rng.normal(0, 1, h)

        def loss():
            h_out, _ = lstm_step(p, x, h0, c0)
            return float(np.sum((h_out - target) ** 2))

        h_out, c_out, cache = lstm_step_forward(p, x, h0, c0)
        dh = 2.0 * (h_out - target)
        _, _, _, dW, dU, db = lstm_step_backward(dh, np.zeros(h), cache)
        err = gradient_check(loss, params, {"W": dW, "U": dU, "b": db}, rng=1)
        assert err < 1e-4

    def test_bilstm_sequence(self):
        rng = np.random.default_rng(2)
        d, h, T, B = 3, 2, 4, 3
        p_f = random_lstm(d, h, rng)
        p_b = random_lstm(d, h, rng)
        X = rng.normal(0, 1, (B, T, d))
        lengths = np.array([4, 2, 3])
        target = rng.normal(0, 1, (B, 2 * h))
        params = {
            "fwd.W": p_f.W, "fwd.U": p_f.U, "fwd.b": p_f.b,
            "bwd.W": p_b.W, "bwd.U": p_b.U, "bwd.b": p_b.b,
        }

        def loss():
            out, _ = bilstm_forward(p_f, p_b, X, lengths)
            return float(np.sum((out - target) ** 2))

        out, cache = bilstm_forward(p_f, p_b, X, lengths)
        _, grads = bilstm_backward(2.0 * (out - target), cache)
        err = gradient_check(loss, params, grads, rng=2)
        assert err < 1e-4

    def test_corrupted_gradient_detected(self):
        rng = np.random.default_rng(3)
        params = {"W": rng.normal(0, 0.5, (1, 4)), "b": rng.normal(0, 0.5, 1)}
        x = rng.normal(0, 1, (6, 4))
        y = rng.integers(0, 2, 6).astype(float)
        dW, db = dense_bce_grads(params, x, y)
        dW = dW + 0.5  # deliberately wrong
        err = gradient_check(
            lambda: loss_through_dense(params, x, y), params, {"W": dW, "b": db}, rng=3
        )
        assert err > 1e-2

    def test_nonfinite_loss_raises(self):
        params = {"w": np.array([1.0])}

        def loss():
            return float("nan")

        with pytest.raises(ArithmeticError):
            gradient_check(loss, params, {"w": np.array([0.0])}, rng=0)


class TestTrainingSmoke:
    def test_loss_decreases_on_separable_toy_set(self):
        # linearly separable two islands; full-batch Adam on dense+sigmoid
        rng = np.random.default_rng(42)
        n = 40
        X = np.vstack([rng.normal(-2, 0.5, (n, 2)), rng.normal(2, 0.5, (n, 2))])
        y = np.concatenate([np.zeros(n), np.ones(n)])
        params = {"W": rng.uniform(-0.05, 0.05, (1, 2)), "b": np.zeros(1)}
        state = AdamState.for_params(params)
        losses = []
        for _ in range(200):
            probs, cache = dense_forward(X, params["W"], params["b"], "sigmoid")
            loss = float(np.mean(weighted_bce(probs[:, 0], y, 1.0)))
            dlogits = ((probs[:, 0] - y) / len(y))[:, None]
            _, dW, db = dense_backward(
                dlogits / np.clip(probs * (1 - probs), 1e-12, None), cache
            )
            adam_update(params, {"W": dW, "b": db}, state, lr=0.05)
            losses.append(loss)
        assert losses[-1] < losses[0] * 0.2
        assert losses[-1] < 0.1
