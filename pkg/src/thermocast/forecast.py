"""Autoregressive multi-step forecasting and forecast report CSV files."""

import csv
import io
import math
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np

from .dataset import BLOCK_HOURS
from .ingest import ONE_HOUR
from .metrics import summarize
from .rnn import EVAL, forward

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class ForecastError(RuntimeError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True, eq=False)
class ForecastReport:
    horizon: int
    predicted: np.ndarray
    start: datetime | None = None
    actual: np.ndarray | None = None
    accuracy_percent: float | None = None
    mape: float | None = None
    mae_c: float | None = None

    def __post_init__(self):
        if len(self.predicted) != self.horizon:
            raise ValueError(f"{len(self.predicted)} predictions for horizon {self.horizon}")
        if (self.actual is None) != (self.accuracy_percent is None):
            raise ValueError("accuracy_percent must be present exactly when actual is")

    def timestamps(self):
        if self.start is None:
            raise ValueError("report has no start timestamp")
        return [self.start + k * ONE_HOUR for k in range(self.horizon)]


def predict_next(params, context):
    """Eval-mode output at the last step of ``context`` (scaled units)."""
    context = np.asarray(context, dtype=np.float64).ravel()
    if context.size == 0:
        raise ValueError("predict_next needs a non-empty context")
    return float(forward(params, context, mode=EVAL).outputs[-1])


def rolling_forecast(params, scaler, context, horizon=48, start=None, window=BLOCK_HOURS):
    """Forecast ``horizon`` hours by feeding each prediction back as input.

    ``context`` is in degrees Celsius; only its most recent ``window`` values
    are used at each step.  ``start`` is the timestamp of the first predicted
    hour.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    history = list(scaler.scale(np.asarray(context, dtype=np.float64).ravel()))
    if not history:
        raise ValueError("rolling_forecast needs a non-empty context")
    scaled = np.empty(horizon)
    for k in range(horizon):
        nxt = predict_next(params, history[-window:])
        if not math.isfinite(nxt):
            raise ForecastError(f"non-finite prediction at step {k + 1}", step=k + 1)
        scaled[k] = nxt
        history.append(nxt)
    return ForecastReport(horizon, scaler.invert(scaled), start=start)


def evaluate_forecast(report, actual):
    """Attach metrics against ``actual`` (degrees Celsius)."""
    actual = np.asarray(actual, dtype=np.float64).ravel()
    if actual.size != report.horizon:
        raise ValueError(f"{actual.size} actual values for horizon {report.horizon}")
    s = summarize(report.predicted, actual)
    return replace(report, actual=actual, mape=s.mape,
                   accuracy_percent=s.accuracy_percent, mae_c=s.mae_c)


def report_to_csv(report):
    """``timestamp,predicted_c[,actual_c]`` rows, values written round-trip exact."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    with_actual = report.actual is not None
    w.writerow(["timestamp", "predicted_c"] + (["actual_c"] if with_actual else []))
    for k, ts in enumerate(report.timestamps()):
        row = [ts.strftime(TIMESTAMP_FORMAT), repr(float(report.predicted[k]))]
        if with_actual:
            row.append(repr(float(report.actual[k])))
        w.writerow(row)
    return out.getvalue()


def report_from_csv(text):
    """Parse a report CSV; metrics are recomputed when actuals are present."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValueError("empty report CSV")
    header = [h.strip() for h in rows[0]]
    if header not in (["timestamp", "predicted_c"], ["timestamp", "predicted_c", "actual_c"]):
        raise ValueError(f"unexpected report header {rows[0]!r}")
    if len(rows) < 2:
        raise ValueError("report CSV has no data rows")
    stamps, predicted, actual = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} cells, found {len(row)}")
        try:
            stamps.append(datetime.strptime(row[0].strip(), TIMESTAMP_FORMAT)
                          .replace(tzinfo=timezone.utc))
            predicted.append(float(row[1]))
            if len(header) == 3:
                actual.append(float(row[2]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    for k in range(1, len(stamps)):
        if stamps[k] - stamps[k - 1] != ONE_HOUR:
            raise ValueError(f"line {k + 2}: timestamps are not hourly")
    report = ForecastReport(len(predicted), np.array(predicted), start=stamps[0])
    if actual:
        report = evaluate_forecast(report, actual)
    return report
