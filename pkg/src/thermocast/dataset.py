"""One-step training pairs, 24-hour blocks, chronological split and scaling.

Pairs are stored as an ``(n, 2)`` float array with columns ``(x, y)`` where
``y`` is the next hour's value of ``x``.  A block is a ``(24, 2)`` slice of
consecutive pairs and a block sequence is a ``(k, 24, 2)`` array.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

BLOCK_HOURS = 24
DEFAULT_SPLIT = 0.7


class DatasetError(ValueError):
    pass


def make_pairs(series):
    """Return ``(values[i], values[i+1])`` for every consecutive hour.

    ``series`` may be a :class:`~thermocast.ingest.TemperatureSeries` or any
    1-D sequence of values.
    """
    values = np.asarray(getattr(series, "values", series), dtype=np.float64).ravel()
    if values.size < 2:
        raise DatasetError(f"need at least 2 values to form a pair, got {values.size}")
    return np.column_stack((values[:-1], values[1:]))


def group_blocks(pairs, block_hours=BLOCK_HOURS):
    """Cut pairs into whole blocks; returns ``(blocks, dropped)``.

    The trailing ``dropped`` pairs (fewer than one block) are discarded.
    """
    pairs = np.asarray(pairs, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DatasetError(f"pairs must have shape (n, 2), got {pairs.shape}")
    n_blocks = pairs.shape[0] // block_hours
    used = n_blocks * block_hours
    blocks = pairs[:used].reshape(n_blocks, block_hours, 2).copy()
    return blocks, pairs.shape[0] - used


@dataclass(frozen=True, eq=False)
class SplitDataset:
    train: np.ndarray
    test: np.ndarray
    split_ratio: float = DEFAULT_SPLIT

    @property
    def n_blocks(self):
        return len(self.train) + len(self.test)

    def map(self, fn):
        """Apply ``fn`` to both sides, keeping the split ratio."""
        return SplitDataset(fn(self.train), fn(self.test), self.split_ratio)


def split_index(n_blocks, ratio):
    # decimal arithmetic: in binary floating point 0.7 * 90 = 62.99999999999999
    return math.floor(Fraction(repr(float(ratio))) * n_blocks)


def split_dataset(blocks, ratio=DEFAULT_SPLIT):
    """First ``floor(ratio * n)`` blocks train, the rest test; order is kept."""
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must lie in (0, 1), got {ratio}")
    blocks = np.asarray(blocks, dtype=np.float64)
    n = len(blocks)
    if n == 0:
        raise DatasetError("no blocks to split")
    k = split_index(n, ratio)
    if k == 0:
        raise DatasetError(f"train side empty: floor({ratio} * {n}) = 0")
    if k == n:
        raise DatasetError(f"test side empty: all {n} blocks went to train")
    return SplitDataset(blocks[:k].copy(), blocks[k:].copy(), ratio)


@dataclass(frozen=True)
class Scaler:
    """Min-max map of degrees Celsius onto [0, 1]."""

    min: float
    max: float

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise DatasetError("scaler bounds must be finite")
        if not self.max > self.min:
            raise DatasetError(f"degenerate scaler range: min={self.min}, max={self.max}")

    @property
    def span(self):
        return self.max - self.min

    def scale(self, v):
        return (np.asarray(v, dtype=np.float64) - self.min) / self.span

    def invert(self, s):
        return np.asarray(s, dtype=np.float64) * self.span + self.min


def fit_scaler(train):
    """Fit on the train blocks only, over both x and y values."""
    train = np.asarray(train, dtype=np.float64)
    if train.size == 0:
        raise DatasetError("cannot fit a scaler on an empty train set")
    return Scaler(float(train.min()), float(train.max()))


def scale(scaler, v):
    out = scaler.scale(v)
    return float(out) if out.ndim == 0 else out


def invert_scale(scaler, s):
    out = scaler.invert(s)
    return float(out) if out.ndim == 0 else out


def prepare(series, ratio=DEFAULT_SPLIT, block_hours=BLOCK_HOURS):
    """Run the windowing pipeline: ``(scaled SplitDataset, Scaler, dropped)``."""
    blocks, dropped = group_blocks(make_pairs(series), block_hours)
    raw = split_dataset(blocks, ratio)
    scaler = fit_scaler(raw.train)
    return raw.map(scaler.scale), scaler, dropped
