import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermocast.rnn import (AdamState, RnnParams, TrainConfig, TrainingError, adam_step, bptt,
                            finite_difference_grad, forward, init_params, mse_loss,
                            relative_error, train)


def random_instance(seed, h, steps):
    rng = np.random.default_rng(seed)
    params = init_params(seed, h)
    params.b_h = rng.normal(0, 0.1, h)
    params.b_o = float(rng.normal(0, 0.1))
    return params, rng.uniform(0, 1, steps), rng.uniform(0, 1, steps)


class TestInit:
    def test_deterministic(self):
        assert init_params(7, 16).to_vector().tobytes() == init_params(7, 16).to_vector().tobytes()

    def test_seed_matters(self):
        assert init_params(1, 16) != init_params(2, 16)

    def test_bounds_exhaustive(self):
        p = init_params(0, 100)
        assert p.w_hh.size == 10000
        for w, fan_in, fan_out in ((p.w_ih, 1, 100), (p.w_hh, 100, 100), (p.w_ho, 100, 1)):
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            assert all(abs(v) <= bound for v in w.ravel())
        assert not p.b_h.any() and p.b_o == 0.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            init_params(0, 0)


class TestForward:
    def test_zero_network(self):
        trace = forward(RnnParams.zeros(5), [0.3, -2.0, 7.0])
        assert not trace.outputs.any()

    def test_eval_masks_and_repeatability(self):
        p = init_params(3, 6)
        a = forward(p, [0.1, 0.5, 0.9], keep_prob=0.3)
        b = forward(p, [0.1, 0.5, 0.9], keep_prob=0.3)
        assert np.all(a.dropout_masks == 1.0)
        assert a.outputs.tobytes() == b.outputs.tobytes()

    def test_hand_unrolled(self):
        p = RnnParams(w_ih=[[0.5], [-1.0]], w_hh=[[0.1, 0.2], [0.3, -0.4]],
                      w_ho=[[1.5, -2.0]], b_h=[0.05, 0.6], b_o=0.25)
        # t=1: a = [0.55, -0.4], h = [0.55, 0], y = 0.825 + 0.25
        # t=2: a = [0.5 + 0.055 + 0.05, -1 + 0.165 + 0.6] = [0.605, -0.235]
        #      h = [0.605, 0], y = 0.9075 + 0.25
        trace = forward(p, [1.0, 1.0])
        assert trace.outputs == pytest.approx([1.075, 1.1575], abs=1e-15)
        assert trace.pre_activations[1] == pytest.approx([0.605, -0.235], abs=1e-15)
        assert not trace.hidden_states[0].any()

    def test_train_mask_values(self):
        trace = forward(init_params(0, 50), np.ones(10), 0.5, "train", np.random.default_rng(0))
        assert set(np.unique(trace.dropout_masks)) == {0.0, 2.0}

    def test_errors(self):
        p = init_params(0, 3)
        with pytest.raises(ValueError):
            forward(p, [])
        with pytest.raises(ValueError):
            forward(p, [1.0], keep_prob=0.0)
        with pytest.raises(ValueError):
            forward(p, [1.0], 0.5, "train")

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(1, 30))
    def test_relu_invariant(self, seed, h, steps):
        rng = np.random.default_rng(seed)
        trace = forward(init_params(seed, h), rng.normal(0, 3, steps), 0.5, "train", rng)
        assert np.all(trace.hidden_states >= 0.0)

    def test_dropout_expectation(self):
        p = init_params(11, 8)
        p.b_h = np.linspace(-0.2, 0.8, 8)
        x = [0.7]
        reference = forward(p, x).hidden_states[1]
        rng = np.random.default_rng(5)
        draws = np.array([forward(p, x, 0.5, "train", rng).hidden_states[1] for _ in range(10_000)])
        mean = draws.mean(axis=0)
        se = draws.std(axis=0, ddof=1) / math.sqrt(len(draws))
        assert np.all(np.abs(mean - reference) <= 3 * se + 1e-15)


class TestLoss:
    def test_examples(self):
        assert mse_loss([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert mse_loss([1.0, 1.0], [0.0, 0.0]) == 1.0

    def test_summation_oracle(self):
        rng = np.random.default_rng(9)
        y, t = rng.normal(size=10), rng.normal(size=10)
        total = 0.0
        for a, b in zip(y, t):
            total += (a - b) * (a - b)
        assert mse_loss(y, t) == pytest.approx(total / 10, abs=1e-12)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            mse_loss([1.0], [1.0, 2.0])


class TestBptt:
    def test_single_step_has_no_recurrent_gradient(self):
        p, x, t = random_instance(0, 5, 1)
        g = bptt(p, forward(p, x), t)
        assert not g.w_hh.any()

    def test_zero_at_targets(self):
        p, x, _ = random_instance(1, 5, 4)
        trace = forward(p, x)
        g = bptt(p, trace, trace.outputs)
        assert not g.to_vector().any()

    def test_matches_finite_differences(self):
        p, x, t = random_instance(2, 8, 6)
        analytic = bptt(p, forward(p, x), t).to_vector()
        numeric = finite_difference_grad(p, x, t, 1e-5).to_vector()
        assert relative_error(analytic, numeric).max() < 1e-5

    def test_matches_finite_differences_with_fixed_masks(self):
        p, x, t = random_instance(4, 6, 5)

        def loss(theta):
            q = RnnParams.from_vector(theta, 6)
            return mse_loss(forward(q, x, 0.5, "train", np.random.default_rng(77)).outputs, t)

        trace = forward(p, x, 0.5, "train", np.random.default_rng(77))
        analytic = bptt(p, trace, t).to_vector()
        theta = p.to_vector()
        numeric = np.empty_like(theta)
        eps = 1e-5
        for i in range(theta.size):
            e = np.zeros_like(theta)
            e[i] = eps
            numeric[i] = (loss(theta + e) - loss(theta - e)) / (2 * eps)
        assert relative_error(analytic, numeric).max() < 1e-5

    def test_shape_mismatch(self):
        p, x, t = random_instance(3, 4, 3)
        with pytest.raises(ValueError):
            bptt(p, forward(p, x), t[:2])
        with pytest.raises(ValueError):
            bptt(init_params(0, 5), forward(p, x), t)


class TestAdam:
    def test_zero_gradient(self):
        p = init_params(0, 4)
        q, s = adam_step(p, RnnParams.zeros(4), 1, 0.001)
        assert q == p
        assert not s.m.any() and not s.v.any()

    def test_moments_decay_under_zero_gradient(self):
        p = init_params(0, 4)
        n = p.to_vector().size
        _, s = adam_step(p, RnnParams.zeros(4), 3, 0.001, AdamState(np.full(n, 0.5), np.full(n, 0.25)))
        assert np.all(s.m == 0.9 * 0.5) and np.all(s.v == 0.999 * 0.25)

    def test_first_step(self):
        p = init_params(0, 3)
        g = RnnParams.from_vector(np.linspace(-2, 2, p.to_vector().size) + 0.01, 3)
        q, _ = adam_step(p, g, 1, 0.001)
        delta = q.to_vector() - p.to_vector()
        gv = g.to_vector()
        # m_hat = g, v_hat = g^2 on the first step, so the move is lr * g / (|g| + eps)
        assert delta == pytest.approx(-0.001 * gv / (np.abs(gv) + 1e-8), abs=1e-15)
        assert np.all(np.sign(delta) == -np.sign(gv))

    def test_stateful(self):
        p = init_params(0, 3)
        g = RnnParams.from_vector(np.ones(p.to_vector().size), 3)
        once, s1 = adam_step(p, g, 1, 0.001)
        twice, _ = adam_step(once, g, 2, 0.001, s1)
        double, _ = adam_step(p, RnnParams.from_vector(2 * g.to_vector(), 3), 1, 0.001)
        assert twice != double

    def test_non_finite_gradient(self):
        p = init_params(0, 3)
        g = RnnParams.zeros(3)
        g.w_hh[1, 2] = np.nan
        with pytest.raises(TrainingError, match="non-finite"):
            adam_step(p, g, 1, 0.001)


class TestTrain:
    def test_config_invariants(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(dropout_keep_prob=1.5)
        assert TrainConfig() == TrainConfig(100, 0.001, 0.5, 1000, 0)

    def test_deterministic(self):
        blocks = np.random.default_rng(0).uniform(0, 1, (3, 24, 2))
        config = TrainConfig(hidden_size=8, epochs=3, seed=5)
        a, b = train(blocks, config), train(blocks, config)
        assert a.losses.tobytes() == b.losses.tobytes()
        assert a.params.to_vector().tobytes() == b.params.to_vector().tobytes()
        assert len(a.losses) == 3

    def test_divergence_is_reported(self):
        blocks = np.full((2, 24, 2), 1e200)
        with pytest.raises(TrainingError) as info:
            train(blocks, TrainConfig(hidden_size=4, epochs=2))
        assert info.value.epoch == 1 and info.value.block == 0

    def test_sinusoid_loss_reduction(self, synthetic_run):
        losses = synthetic_run["report"].losses
        assert len(losses) == 200
        assert losses[-1] < 0.1 * losses[0]
