"""Run configuration: documented defaults, ``key = value`` files, CLI overrides.

Precedence is command-line flag > config file > default.
"""

from dataclasses import dataclass, fields, replace

from .rnn import TrainConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    input_path: str | None = None
    model_path: str | None = None
    hidden_size: int = 100
    learning_rate: float = 0.001
    dropout_keep_prob: float = 0.5
    epochs: int = 1000
    split_ratio: float = 0.7
    horizon: int = 48
    seed: int = 0
    context_hours: int = 24

    def __post_init__(self):
        self.train_config()  # validates the shared fields
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.context_hours < 1:
            raise ConfigError(f"context_hours must be >= 1, got {self.context_hours}")

    def train_config(self):
        try:
            return TrainConfig(hidden_size=self.hidden_size, learning_rate=self.learning_rate,
                               dropout_keep_prob=self.dropout_keep_prob, epochs=self.epochs,
                               seed=self.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {int: int, float: float, "int": int, "float": float}


def _cast(key, raw):
    kind = _TYPES[key]
    if kind in _CASTS:
        try:
            return _CASTS[kind](raw)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r} as a number") from None
    return raw


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _cast(key, raw)
    return values


def load_config_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def resolve(file_values=None, overrides=None):
    """Layer file values and then non-``None`` overrides onto the defaults."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return replace(RunConfig(), **merged)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
