"""Hourly temperature forecasting with a ReLU Elman recurrent network."""

from .dataset import Scaler, SplitDataset, fit_scaler, group_blocks, make_pairs, prepare, split_dataset
from .forecast import ForecastReport, evaluate_forecast, predict_next, rolling_forecast
from .ingest import (IngestError, RawRecord, SeriesMetadata, TemperatureSeries,
                     extract_temperature_series, load_series, parse_meteoblue_csv)
from .metrics import MetricSummary, accuracy_percent, mae_celsius, mape, summarize
from .model_io import load_model, save_model
from .rnn import (RnnParams, TrainConfig, adam_step, bptt, finite_difference_grad, forward,
                  init_params, mse_loss, train)

__version__ = "0.1.0"
