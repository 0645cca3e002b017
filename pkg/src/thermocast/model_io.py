"""Model documents: parameters, scaler and training config as JSON.

Floats are written with Python's shortest round-trip representation, so
``load_model(save_model(...))`` reproduces every double bit for bit.  Keys
are sorted and indentation fixed, so equal models give byte-identical files.
"""

import json
import math

import numpy as np

from .dataset import Scaler
from .rnn import RnnParams, TrainConfig

FORMAT_NAME = "thermocast-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _rows(a):
    return [[float(v) for v in row] for row in np.atleast_2d(a)]


def model_to_dict(params, scaler, config, extra=None):
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "hidden_size": params.hidden_size,
        "w_ih": _rows(params.w_ih),
        "w_hh": _rows(params.w_hh),
        "w_ho": _rows(params.w_ho),
        "b_h": [float(v) for v in params.b_h],
        "b_o": float(params.b_o),
        "scaler": {"min": float(scaler.min), "max": float(scaler.max)},
        "train_config": config.as_dict(),
    }
    if extra:
        doc["extra"] = dict(extra)
    return doc


def dumps_model(params, scaler, config, extra=None):
    if not params.is_finite():
        raise ModelFormatError("refusing to save non-finite parameters")
    return json.dumps(model_to_dict(params, scaler, config, extra),
                      indent=1, sort_keys=True, allow_nan=False) + "\n"


def save_model(path, params, scaler, config, extra=None):
    text = dumps_model(params, scaler, config, extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def loads_model(text):
    """Return ``(params, scaler, config, extra)`` from a model document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a model document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a thermocast model document")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc.get('version')!r} (expected {FORMAT_VERSION})")
    try:
        h = int(doc["hidden_size"])
        params = RnnParams(np.array(doc["w_ih"], dtype=np.float64),
                           np.array(doc["w_hh"], dtype=np.float64),
                           np.array(doc["w_ho"], dtype=np.float64),
                           np.array(doc["b_h"], dtype=np.float64),
                           float(doc["b_o"]))
        scaler = Scaler(float(doc["scaler"]["min"]), float(doc["scaler"]["max"]))
        config = TrainConfig(**doc["train_config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid model document: {exc}") from None
    if params.hidden_size != h:
        raise ModelFormatError(f"hidden_size {h} does not match weight shapes")
    if not all(math.isfinite(v) for v in params.to_vector()):
        raise ModelFormatError("model contains non-finite parameters")
    return params, scaler, config, doc.get("extra", {})


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
