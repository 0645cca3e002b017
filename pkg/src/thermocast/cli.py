"""``thermocast`` command line: ingest, train, evaluate, forecast, export-plot."""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from .dataset import BLOCK_HOURS, group_blocks, make_pairs, prepare, split_index
from .forecast import evaluate_forecast, report_from_csv, report_to_csv, rolling_forecast
from .ingest import load_series
from .metrics import summarize
from .model_io import load_model, save_model
from .plot import report_svg
from .rnn import train


class StageError(Exception):
    """An error tagged with the pipeline stage it came from."""

    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage


def _stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, RuntimeError, OSError) as exc:
        raise StageError(stage, exc) from exc


def _require(path, what):
    if not path:
        raise StageError("config", f"{what} path is required")
    return path


def cmd_ingest(run, out=sys.stdout):
    path = _require(run.input_path, "input")
    series = _stage("ingest", load_series, path)
    v = series.values
    m = series.metadata
    print(f"file: {path}", file=out)
    print(f"station: {m.city} ({m.latitude}, {m.longitude}, {m.altitude} m), UTC offset {m.utc_offset:+d}", file=out)
    print(f"records: {len(series)}", file=out)
    print(f"range: {series.start:%Y-%m-%d %H:%M}Z .. {series.end:%Y-%m-%d %H:%M}Z", file=out)
    print("gaps: none", file=out)
    print(f"temperature: min {v.min():.2f} max {v.max():.2f} mean {v.mean():.2f} {m.unit}", file=out)
    return 0


def cmd_train(run, out=sys.stdout):
    path = _require(run.input_path, "input")
    model_path = _require(run.model_path, "model")
    series = _stage("ingest", load_series, path)
    dataset, scaler, dropped = _stage("dataset", prepare, series, run.split_ratio)
    config = _stage("config", run.train_config)
    print(f"blocks: {len(dataset.train)} train, {len(dataset.test)} test, {dropped} trailing pairs dropped",
          file=out)
    report = _stage("train", train, dataset, config)
    _stage("save", save_model, model_path, report.params, scaler, config,
           {"split_ratio": run.split_ratio})
    print(f"epoch 1 loss: {report.first_loss:.6g}", file=out)
    print(f"epoch {config.epochs} loss: {report.final_loss:.6g}", file=out)
    print(f"wall time: {report.wall_time:.2f} s", file=out)
    print(f"model written to {model_path}", file=out)
    return 0


def evaluation_windows(n_blocks, n_train, horizon, context_hours):
    """``(start, length)`` for the forecast window of each test block.

    Test block ``j`` starts at series index ``24 j``; its window runs to the
    horizon or the last test hour, whichever comes first.
    """
    last = BLOCK_HOURS * n_blocks + 1
    windows = []
    for j in range(n_train, n_blocks):
        start = BLOCK_HOURS * j
        if start < context_hours:
            continue
        windows.append((start, min(horizon, last - start)))
    return windows


def cmd_evaluate(run, out=sys.stdout, single_window=False, report_path=None):
    path = _require(run.input_path, "input")
    model_path = _require(run.model_path, "model")
    params, scaler, _, _ = _stage("model", load_model, model_path)
    series = _stage("ingest", load_series, path)
    values = series.values
    blocks, _ = _stage("dataset", group_blocks, _stage("dataset", make_pairs, series))
    n_blocks = len(blocks)
    n_train = split_index(n_blocks, run.split_ratio)
    if not 0 < n_train < n_blocks:
        raise StageError("dataset", f"split {run.split_ratio} of {n_blocks} blocks leaves a side empty")
    windows = evaluation_windows(n_blocks, n_train, run.horizon, run.context_hours)
    if single_window:
        windows = windows[:1]
    if not windows:
        raise StageError("evaluate", "no test window has enough preceding context")
    predicted, actual = [], []
    first = None
    for start, length in windows:
        report = _stage("forecast", rolling_forecast, params, scaler,
                        values[start - run.context_hours:start], length,
                        start=series.timestamp(start), window=run.context_hours)
        truth = values[start:start + length]
        if first is None:
            first = _stage("metrics", evaluate_forecast, report, truth)
        predicted.append(report.predicted)
        actual.append(truth)
    summary = _stage("metrics", summarize, np.concatenate(predicted), np.concatenate(actual))
    print(f"windows: {len(windows)} (horizon {run.horizon} h, context {run.context_hours} h)", file=out)
    print(f"points: {summary.n}", file=out)
    print(f"mape: {summary.mape:.6f}", file=out)
    print(f"accuracy_percent: {summary.accuracy_percent:.4f}", file=out)
    print(f"mae_c: {summary.mae_c:.4f}", file=out)
    if report_path:
        Path(report_path).write_text(report_to_csv(first), encoding="utf-8")
    return 0


def cmd_forecast(run, out=sys.stdout, report_path=None):
    path = _require(run.input_path, "input")
    model_path = _require(run.model_path, "model")
    params, scaler, _, _ = _stage("model", load_model, model_path)
    series = _stage("ingest", load_series, path)
    report = _stage("forecast", rolling_forecast, params, scaler,
                    series.values[-run.context_hours:], run.horizon,
                    start=series.timestamp(len(series)), window=run.context_hours)
    text = report_to_csv(report)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def cmd_export_plot(report_csv, out_path):
    text = _stage("export-plot", Path(_require(report_csv, "report CSV")).read_text, encoding="utf-8")
    report = _stage("export-plot", report_from_csv, text)
    svg = report_svg(report, title=f"{report.horizon}-hour forecast")
    Path(_require(out_path, "output")).write_text(svg, encoding="utf-8")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="thermocast", description="Hourly temperature forecasting with an Elman RNN.")
    p.add_argument("command", choices=["ingest", "train", "evaluate", "forecast", "export-plot"])
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--input", dest="input_path", help="meteoblue CSV (report CSV for export-plot)")
    p.add_argument("--model", dest="model_path", help="model document path")
    p.add_argument("--epochs", type=int)
    p.add_argument("--hidden", dest="hidden_size", type=int)
    p.add_argument("--lr", dest="learning_rate", type=float)
    p.add_argument("--keep-prob", dest="dropout_keep_prob", type=float)
    p.add_argument("--split", dest="split_ratio", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--context", dest="context_hours", type=int)
    p.add_argument("--single-window", action="store_true",
                   help="evaluate only the first test window")
    p.add_argument("--out", help="output file (report CSV or SVG)")
    return p


_RUN_KEYS = ("input_path", "model_path", "epochs", "hidden_size", "learning_rate",
             "dropout_keep_prob", "split_ratio", "horizon", "seed", "context_hours")


def run_config_from_args(args):
    file_values = cfg.load_config_file(args.config) if args.config else {}
    return cfg.resolve(file_values, {k: getattr(args, k) for k in _RUN_KEYS})


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        run = _stage("config", run_config_from_args, args)
        if args.command == "ingest":
            return cmd_ingest(run, out)
        if args.command == "train":
            return cmd_train(run, out)
        if args.command == "evaluate":
            return cmd_evaluate(run, out, args.single_window, args.out)
        if args.command == "forecast":
            return cmd_forecast(run, out, args.out)
        return cmd_export_plot(run.input_path, args.out)
    except StageError as exc:
        print(f"thermocast {args.command}: error {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
