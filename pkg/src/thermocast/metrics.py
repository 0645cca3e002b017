"""Forecast accuracy metrics.

``mape`` is the mean absolute relative error ``mean(|(P_i - T_i) / T_i|)``
behind ``accuracy_percent``.  It is often labelled MAE, but it is a
percentage error; the absolute error in degrees is ``mae_celsius``.
"""

from dataclasses import dataclass

import numpy as np

#: smallest |T_i| (degC) accepted as a denominator
DENOMINATOR_GUARD = 0.5


class MetricError(ValueError):
    """Raised when a metric cannot be evaluated on the given sequences."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class MetricSummary:
    mape: float
    accuracy_percent: float
    mae_c: float
    n: int

    def __str__(self):
        return (f"n={self.n} mape={self.mape:.6f} "
                f"accuracy_percent={self.accuracy_percent:.4f} "
                f"mae_c={self.mae_c:.4f}")


def _as_pair(predicted, actual):
    p = np.asarray(predicted, dtype=np.float64).ravel()
    t = np.asarray(actual, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise MetricError(f"length mismatch: {p.size} predicted vs {t.size} actual")
    if p.size == 0:
        raise MetricError("metrics need at least one sample")
    return p, t


def mape(predicted, actual, guard=DENOMINATOR_GUARD):
    p, t = _as_pair(predicted, actual)
    small = np.flatnonzero(np.abs(t) < guard)
    if small.size:
        i = int(small[0])
        raise MetricError(
            f"actual value {t[i]!r} at index {i} is within {guard} degC of zero",
            index=i)
    return float(np.mean(np.abs((p - t) / t)))


def accuracy_from_mape(mape):
    return 100.0 * (1.0 - mape)


def accuracy_percent(predicted, actual, guard=DENOMINATOR_GUARD):
    return accuracy_from_mape(mape(predicted, actual, guard))


def mae_celsius(predicted, actual):
    p, t = _as_pair(predicted, actual)
    return float(np.mean(np.abs(p - t)))


def summarize(predicted, actual, guard=DENOMINATOR_GUARD):
    """Compute every metric at once; raises like :func:`mape`."""
    error = mape(predicted, actual, guard)
    return MetricSummary(mape=error,
                         accuracy_percent=accuracy_from_mape(error),
                         mae_c=mae_celsius(predicted, actual),
                         n=int(np.size(predicted)))
