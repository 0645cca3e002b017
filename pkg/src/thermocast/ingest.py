"""Reading hourly meteoblue-style CSV exports.

An export starts with named header rows (``LAT``, ``LON``, ``ASL``, ``CITY``,
..., ``UTC OFFSET``), one value per exported variable, followed by a
column-header row beginning with ``Year`` and then one data row per hour::

    Year,Month,Day,Hour,Minute,Temperature (2 m above gnd),...
    2019,10,22,0,0,29.63,0.00,2.28,150.43

Only the temperature column feeds the model; the other columns are parsed so
that corrupted files are caught early.
"""

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

ONE_HOUR = timedelta(hours=1)
TEMPERATURE_RANGE = (-90.0, 60.0)

# canonical key -> spellings seen in exports and transcriptions of them
_HEADER_ALIASES = {
    "LAT": ("LAT",),
    "LON": ("LON", "LOX"),
    "ASL": ("ASL", "ANL", "ALT"),
    "CITY": ("CITY",),
    "DOMAIN": ("DOMAIN",),
    "LEVEL": ("LEVEL", "LOGIC"),
    "NAME": ("NAME",),
    "UNIT": ("UNIT",),
    "AGGREGATION": ("AGGREGATION",),
    "UTC OFFSET": ("UTC OFFSET", "UTC_OFFSET", "UTCOFFSET"),
}
_MANDATORY = ("LAT", "LON", "ASL", "CITY", "NAME", "UNIT", "UTC OFFSET")
_TIME_COLUMNS = ("Year", "Month", "Day", "Hour", "Minute")
_OPTIONAL_COLUMNS = ("precipitation", "wind_speed", "wind_direction")


class IngestError(ValueError):
    """Malformed or unusable input; ``line``/``column``/``index`` locate it."""

    def __init__(self, message, line=None, column=None, index=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.column = column
        self.index = index


@dataclass(frozen=True)
class SeriesMetadata:
    latitude: float
    longitude: float
    altitude: float
    city: str
    utc_offset: int
    variable_name: str = "Temperature"
    unit: str = "°C"

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise IngestError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise IngestError(f"longitude {self.longitude} outside [-180, 180]")
        if not -12 <= self.utc_offset <= 14:
            raise IngestError(f"utc offset {self.utc_offset} outside [-12, 14]")


@dataclass(frozen=True)
class RawRecord:
    year: int
    month: int
    day: int
    hour: int
    minute: int
    temperature: float
    precipitation: float | None = None
    wind_speed: float | None = None
    wind_direction: float | None = None

    def local_time(self):
        return datetime(self.year, self.month, self.day, self.hour, self.minute)


@dataclass(frozen=True, eq=False)
class TemperatureSeries:
    """Gap-free hourly temperatures; ``values[i]`` is at ``start + i`` hours (UTC)."""

    start: datetime
    values: np.ndarray
    metadata: SeriesMetadata

    step = ONE_HOUR

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size == 0:
            raise IngestError("temperature series is empty")
        if not np.all(np.isfinite(values)):
            raise IngestError("temperature series contains non-finite values",
                              index=int(np.flatnonzero(~np.isfinite(values))[0]))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.start.tzinfo is None:
            raise IngestError("series start must be timezone-aware")

    def __len__(self):
        return self.values.size

    def timestamp(self, i):
        return self.start + i * ONE_HOUR

    @property
    def end(self):
        return self.timestamp(len(self) - 1)


def _detect_delimiter(lines):
    for line in lines:
        stripped = line.lstrip("﻿").lstrip()
        if stripped[:4].lower() == "year":
            counts = {d: stripped.count(d) for d in (",", ";", "\t")}
            best = max(counts, key=counts.get)
            if counts[best] == 0:
                raise IngestError("cannot detect delimiter in column-header row")
            return best
    raise IngestError("missing column-header row starting with 'Year'")


def _canonical_header(name):
    key = " ".join(name.strip().upper().split())
    for canonical, spellings in _HEADER_ALIASES.items():
        if key in spellings:
            return canonical
    return None


def _number(cell, cast, line, column):
    try:
        value = cast(cell.strip())
    except ValueError:
        raise IngestError(f"malformed numeric cell {cell!r}", line=line, column=column) from None
    if cast is float and not math.isfinite(value):
        raise IngestError(f"non-finite numeric cell {cell!r}", line=line, column=column)
    return value


def _locate_columns(header, line):
    names = [h.strip() for h in header]
    for i, expected in enumerate(_TIME_COLUMNS):
        if i >= len(names) or names[i].lower() != expected.lower():
            raise IngestError(f"expected column {expected!r} at position {i}", line=line)
    temp = [i for i, h in enumerate(names) if h.lower().startswith("temperature")]
    if not temp:
        raise IngestError("no temperature column in column-header row", line=line)
    columns = {"temperature": temp[0]}
    rest = [i for i in range(len(_TIME_COLUMNS), len(names)) if i != temp[0]]
    for key in _OPTIONAL_COLUMNS:
        lookup = {"precipitation": "precipitation", "wind_speed": "wind speed",
                  "wind_direction": "wind direction"}[key]
        match = [i for i in rest if lookup in names[i].lower()]
        if match:
            columns[key] = match[0]
    # positional fallback for the standard 9-column layout with unusual names
    if len(names) == 9 and temp[0] == 5:
        for key, pos in zip(_OPTIONAL_COLUMNS, (6, 7, 8)):
            columns.setdefault(key, pos)
    return names, columns


def parse_meteoblue_csv(text):
    """Parse an export into ``(SeriesMetadata, [RawRecord, ...])``.

    Comma, semicolon and tab delimiters are accepted; the delimiter is taken
    from the column-header row.  Records are returned in file order.
    """
    lines = text.splitlines()
    delimiter = _detect_delimiter(lines)
    headers = {}
    records = []
    header_row = None
    names = columns = None
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        row[0] = row[0].lstrip("﻿")
        if header_row is None:
            if row[0].strip().lower() == "year":
                header_row = lineno
                names, columns = _locate_columns(row, lineno)
                continue
            canonical = _canonical_header(row[0])
            if canonical is not None and canonical not in headers:
                headers[canonical] = (lineno, row[1:])
            continue
        records.append(_parse_row(row, lineno, names, columns))

    missing = [k for k in _MANDATORY if k not in headers or not _first(headers[k][1])]
    if missing:
        raise IngestError(f"missing mandatory header row(s): {', '.join(missing)}")
    if not records:
        raise IngestError("zero data rows")
    return _metadata(headers, columns["temperature"] - len(_TIME_COLUMNS)), records


def _first(cells, pos=0):
    cells = [c.strip() for c in cells]
    if pos < len(cells) and cells[pos]:
        return cells[pos]
    return next((c for c in cells if c), "")


def _metadata(headers, var_pos):
    def num(key, cast=float):
        line, cells = headers[key]
        return _number(_first(cells, var_pos), cast, line, key)

    line, cells = headers["UTC OFFSET"]
    offset = num("UTC OFFSET")
    if offset != int(offset):
        raise IngestError("utc offset must be whole hours", line=line, column="UTC OFFSET")
    return SeriesMetadata(
        latitude=num("LAT"),
        longitude=num("LON"),
        altitude=num("ASL"),
        city=_first(headers["CITY"][1], var_pos),
        utc_offset=int(offset),
        variable_name=_first(headers["NAME"][1], var_pos),
        unit=_first(headers["UNIT"][1], var_pos),
    )


def _parse_row(row, lineno, names, columns):
    if len(row) < len(names):
        raise IngestError(f"expected {len(names)} cells, found {len(row)}", line=lineno)
    stamp = [_number(row[i], int, lineno, names[i]) for i in range(len(_TIME_COLUMNS))]
    try:
        datetime(*stamp)
    except ValueError as exc:
        raise IngestError(f"invalid date/time: {exc}", line=lineno) from None
    col = columns["temperature"]
    temperature = _number(row[col], float, lineno, names[col])
    lo, hi = TEMPERATURE_RANGE
    if not lo <= temperature <= hi:
        raise IngestError(f"temperature {temperature} outside [{lo}, {hi}] degC",
                          line=lineno, column=names[col])
    extra = {key: _number(row[columns[key]], float, lineno, names[columns[key]])
             for key in _OPTIONAL_COLUMNS if key in columns}
    return RawRecord(*stamp, temperature=temperature, **extra)


def extract_temperature_series(records, metadata):
    """Build a gap-free UTC series from records ordered by local time."""
    if not records:
        raise IngestError("no records to extract")
    offset = timedelta(hours=metadata.utc_offset)
    stamps = [r.local_time() for r in records]
    for i in range(1, len(stamps)):
        delta = stamps[i] - stamps[i - 1]
        if delta <= timedelta(0):
            raise IngestError(f"timestamps not increasing at index {i}", index=i)
        if delta != ONE_HOUR:
            raise IngestError(
                f"gap of {delta} between index {i - 1} ({stamps[i - 1]}) and index {i} ({stamps[i]})",
                index=i)
    start = (stamps[0] - offset).replace(tzinfo=timezone.utc)
    return TemperatureSeries(start=start,
                             values=np.array([r.temperature for r in records], dtype=np.float64),
                             metadata=metadata)


def load_series(path):
    """Read a file and return its :class:`TemperatureSeries`."""
    with open(path, encoding="utf-8") as fh:
        metadata, records = parse_meteoblue_csv(fh.read())
    return extract_temperature_series(records, metadata)


def series_to_csv(series, delimiter=","):
    """Serialize in the export layout with only the temperature column.

    Values are written with ``repr`` so reparsing is bit-exact.
    """
    m = series.metadata
    out = io.StringIO()
    w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    w.writerow(["LAT", repr(m.latitude)])
    w.writerow(["LON", repr(m.longitude)])
    w.writerow(["ASL", repr(m.altitude)])
    w.writerow(["CITY", m.city])
    w.writerow(["NAME", m.variable_name])
    w.writerow(["UNIT", m.unit])
    w.writerow(["UTC OFFSET", str(m.utc_offset)])
    name = m.variable_name if m.variable_name.lower().startswith("temperature") else "Temperature"
    w.writerow([*_TIME_COLUMNS, name])
    local = series.start.replace(tzinfo=None) + timedelta(hours=m.utc_offset)
    for i, v in enumerate(series.values):
        t = local + i * ONE_HOUR
        w.writerow([t.year, t.month, t.day, t.hour, t.minute, repr(float(v))])
    return out.getvalue()
