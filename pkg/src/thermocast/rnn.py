"""Elman recurrent network with ReLU hidden units, trained by BPTT + Adam.

For a scalar input sequence ``x_1..x_T`` and ``h_0 = 0``::

    a_t = w_ih x_t + w_hh h_{t-1} + b_h
    h_t = m_t * relu(a_t)
    y_t = w_ho h_t + b_o

``m_t`` is an inverted-dropout mask (entries 0 or 1/keep_prob) in training
mode and all ones in evaluation mode.  Everything is float64.
"""

import math
import time
from dataclasses import dataclass, field, fields

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

TRAIN = "train"
EVAL = "eval"


class TrainingError(RuntimeError):
    """Non-finite values during optimisation; ``epoch``/``block`` locate it."""

    def __init__(self, message, epoch=None, block=None):
        super().__init__(message)
        self.epoch = epoch
        self.block = block


@dataclass(eq=False)
class RnnParams:
    w_ih: np.ndarray  # (H, 1)
    w_hh: np.ndarray  # (H, H)
    w_ho: np.ndarray  # (1, H)
    b_h: np.ndarray   # (H,)
    b_o: float = 0.0

    def __post_init__(self):
        self.w_ih = np.asarray(self.w_ih, dtype=np.float64)
        self.w_hh = np.asarray(self.w_hh, dtype=np.float64)
        self.w_ho = np.asarray(self.w_ho, dtype=np.float64)
        self.b_h = np.asarray(self.b_h, dtype=np.float64)
        self.b_o = float(self.b_o)
        h = self.hidden_size
        expected = {"w_ih": (h, 1), "w_hh": (h, h), "w_ho": (1, h), "b_h": (h,)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def hidden_size(self):
        return self.w_hh.shape[0]

    @classmethod
    def zeros(cls, hidden_size):
        h = hidden_size
        return cls(np.zeros((h, 1)), np.zeros((h, h)), np.zeros((1, h)), np.zeros(h), 0.0)

    def arrays(self):
        return [self.w_ih, self.w_hh, self.w_ho, self.b_h, np.array([self.b_o])]

    def to_vector(self):
        """All parameters flattened (row-major) into one vector."""
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_vector(cls, vector, hidden_size):
        h = hidden_size
        v = np.asarray(vector, dtype=np.float64)
        if v.size != h * h + 3 * h + 1:
            raise ValueError(f"vector of size {v.size} does not fit hidden_size={h}")
        i = 0
        out = []
        for shape in ((h, 1), (h, h), (1, h), (h,)):
            n = math.prod(shape)
            out.append(v[i:i + n].reshape(shape).copy())
            i += n
        return cls(*out, b_o=float(v[i]))

    def copy(self):
        return RnnParams.from_vector(self.to_vector(), self.hidden_size)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.to_vector())))

    def __eq__(self, other):
        if not isinstance(other, RnnParams):
            return NotImplemented
        return (self.hidden_size == other.hidden_size
                and np.array_equal(self.to_vector(), other.to_vector()))


# gradients have exactly the parameter layout
Gradients = RnnParams


def init_params(seed, hidden_size=100):
    """Xavier-uniform weights, zero biases; deterministic in ``seed``."""
    if hidden_size < 1:
        raise ValueError(f"hidden_size must be >= 1, got {hidden_size}")
    rng = np.random.default_rng(seed)
    h = hidden_size

    def xavier(shape):
        fan_out, fan_in = shape
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=shape)

    return RnnParams(xavier((h, 1)), xavier((h, h)), xavier((1, h)), np.zeros(h), 0.0)


@dataclass(eq=False)
class ForwardTrace:
    inputs: np.ndarray           # (T,)
    pre_activations: np.ndarray  # (T, H)
    hidden_states: np.ndarray    # (T + 1, H); row 0 is h_0
    dropout_masks: np.ndarray    # (T, H)
    outputs: np.ndarray          # (T,)

    @property
    def steps(self):
        return self.inputs.size


def forward(params, inputs, keep_prob=1.0, mode=EVAL, rng=None):
    """Unroll the network over ``inputs``.

    In ``"train"`` mode a fresh dropout mask is drawn from ``rng`` (a numpy
    ``Generator``) at every step; ``"eval"`` ignores ``keep_prob``.
    """
    x = np.asarray(inputs, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("forward needs a non-empty input sequence")
    if mode not in (TRAIN, EVAL):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    if not 0.0 < keep_prob <= 1.0:
        raise ValueError(f"keep_prob must lie in (0, 1], got {keep_prob}")
    steps, h = x.size, params.hidden_size
    w_in = params.w_ih[:, 0]
    w_out = params.w_ho[0]
    pre = np.empty((steps, h))
    hidden = np.zeros((steps + 1, h))
    masks = np.ones((steps, h))
    if mode == TRAIN and keep_prob < 1.0:
        if rng is None:
            raise ValueError("train mode with dropout needs an rng")
        masks = (rng.random((steps, h)) < keep_prob) / keep_prob
    out = np.empty(steps)
    for t in range(steps):
        a = w_in * x[t] + params.w_hh @ hidden[t] + params.b_h
        pre[t] = a
        hidden[t + 1] = masks[t] * np.maximum(a, 0.0)
        out[t] = w_out @ hidden[t + 1] + params.b_o
    return ForwardTrace(x, pre, hidden, masks, out)


def mse_loss(outputs, targets):
    y = np.asarray(outputs, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if y.shape != t.shape:
        raise ValueError(f"length mismatch: {y.size} outputs vs {t.size} targets")
    if y.size == 0:
        raise ValueError("mse_loss needs at least one sample")
    return float(np.mean((y - t) ** 2))


def bptt(params, trace, targets):
    """Exact gradient of ``mse_loss(trace.outputs, targets)``.

    Uses the dropout masks stored in ``trace``; the ReLU derivative at 0 is 0.
    """
    t_all = np.asarray(targets, dtype=np.float64).ravel()
    steps, h = trace.steps, params.hidden_size
    if t_all.size != steps:
        raise ValueError(f"{t_all.size} targets for a trace of {steps} steps")
    if trace.hidden_states.shape != (steps + 1, h):
        raise ValueError("trace does not match the parameter shapes")

    d_out = 2.0 * (trace.outputs - t_all) / steps
    hs = trace.hidden_states[1:]
    g_ho = (d_out @ hs)[None, :]
    g_bo = float(d_out.sum())

    g_ih = np.zeros(h)
    g_hh = np.zeros((h, h))
    g_bh = np.zeros(h)
    w_out = params.w_ho[0]
    w_rec_t = params.w_hh.T
    dh_next = np.zeros(h)
    for t in range(steps - 1, -1, -1):
        dh = w_out * d_out[t] + dh_next
        da = dh * trace.dropout_masks[t] * (trace.pre_activations[t] > 0.0)
        g_ih += da * trace.inputs[t]
        g_hh += np.outer(da, trace.hidden_states[t])
        g_bh += da
        dh_next = w_rec_t @ da
    return Gradients(g_ih[:, None], g_hh, g_ho, g_bh, g_bo)


def loss_at(params, inputs, targets):
    """Evaluation-mode loss; the scalar function the gradient check differentiates."""
    return mse_loss(forward(params, inputs, mode=EVAL).outputs, targets)


def finite_difference_grad(params, inputs, targets, epsilon=1e-5):
    """Central differences of the eval-mode loss, one parameter at a time."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    h = params.hidden_size
    theta = params.to_vector()
    grad = np.empty_like(theta)
    for i in range(theta.size):
        orig = theta[i]
        theta[i] = orig + epsilon
        up = loss_at(RnnParams.from_vector(theta, h), inputs, targets)
        theta[i] = orig - epsilon
        down = loss_at(RnnParams.from_vector(theta, h), inputs, targets)
        theta[i] = orig
        grad[i] = (up - down) / (2.0 * epsilon)
    return Gradients.from_vector(grad, h)


def relative_error(a, b, floor=1e-12):
    """Elementwise ``|a - b| / max(|a|, |b|, floor)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


@dataclass(eq=False)
class AdamState:
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros_like(cls, params):
        n = params.to_vector().size
        return cls(np.zeros(n), np.zeros(n))


def adam_step(params, grads, step_count, learning_rate, state=None):
    """One Adam update; returns new ``(params, state)`` and leaves inputs untouched.

    ``step_count`` is the 1-based index of this update (used for bias correction).
    """
    if step_count < 1:
        raise ValueError("step_count is 1-based")
    g = grads.to_vector()
    if not np.all(np.isfinite(g)):
        bad = int(np.flatnonzero(~np.isfinite(g))[0])
        raise TrainingError(f"non-finite gradient entry at flat index {bad}")
    if state is None:
        state = AdamState.zeros_like(params)
    if state.m.shape != g.shape or state.v.shape != g.shape:
        raise ValueError("moment state does not match parameter shapes")
    m = ADAM_BETA1 * state.m + (1.0 - ADAM_BETA1) * g
    v = ADAM_BETA2 * state.v + (1.0 - ADAM_BETA2) * g * g
    m_hat = m / (1.0 - ADAM_BETA1 ** step_count)
    v_hat = v / (1.0 - ADAM_BETA2 ** step_count)
    theta = params.to_vector() - learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return RnnParams.from_vector(theta, params.hidden_size), AdamState(m, v)


@dataclass(frozen=True)
class TrainConfig:
    hidden_size: int = 100
    learning_rate: float = 0.001
    dropout_keep_prob: float = 0.5
    epochs: int = 1000
    seed: int = 0
    loss: str = "mse"

    def __post_init__(self):
        if int(self.hidden_size) != self.hidden_size or self.hidden_size < 1:
            raise ValueError(f"hidden_size must be a positive integer, got {self.hidden_size}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 < self.dropout_keep_prob <= 1.0:
            raise ValueError(f"dropout_keep_prob must lie in (0, 1], got {self.dropout_keep_prob}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be an integer >= 1, got {self.epochs}")
        if self.loss != "mse":
            raise ValueError("only the 'mse' loss is supported")

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(eq=False)
class TrainReport:
    losses: np.ndarray
    params: RnnParams
    wall_time: float = field(default=0.0, compare=False)

    @property
    def first_loss(self):
        return float(self.losses[0])

    @property
    def final_loss(self):
        return float(self.losses[-1])


def train(dataset, config, callback=None):
    """Fit on ``dataset.train`` (scaled blocks of shape ``(k, T, 2)``).

    Blocks are visited in stored order every epoch, one Adam update per block.
    ``callback(epoch, mean_loss)`` is called after each epoch if given.
    """
    blocks = np.asarray(getattr(dataset, "train", dataset), dtype=np.float64)
    if blocks.ndim != 3 or blocks.shape[0] == 0:
        raise ValueError("training needs a non-empty (k, T, 2) block array")
    started = time.perf_counter()
    params = init_params(config.seed, config.hidden_size)
    # dropout draws get their own stream so changing the init does not shift them
    rng = np.random.default_rng([config.seed, 1])
    state = AdamState.zeros_like(params)
    with np.errstate(over="ignore", invalid="ignore"):
        return _train_loop(blocks, config, params, rng, state, callback, started)


def _train_loop(blocks, config, params, rng, state, callback, started):
    losses = np.empty(config.epochs)
    step = 0
    for epoch in range(config.epochs):
        total = 0.0
        for b, block in enumerate(blocks):
            trace = forward(params, block[:, 0], config.dropout_keep_prob, TRAIN, rng)
            loss = mse_loss(trace.outputs, block[:, 1])
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch + 1}, block {b}",
                                    epoch=epoch + 1, block=b)
            step += 1
            try:
                params, state = adam_step(params, bptt(params, trace, block[:, 1]),
                                          step, config.learning_rate, state)
            except TrainingError as exc:
                raise TrainingError(f"{exc} at epoch {epoch + 1}, block {b}",
                                    epoch=epoch + 1, block=b) from None
            total += loss
        losses[epoch] = total / len(blocks)
        if callback is not None:
            callback(epoch + 1, losses[epoch])
    return TrainReport(losses, params, time.perf_counter() - started)
