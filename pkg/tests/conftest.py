from datetime import datetime, timedelta
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

_acceptance_results = []


def synthetic_values(n=1440, noise=0.2, seed=2024):
    """27 + 3 sin(2 pi i / 24) plus uniform noise of the given amplitude."""
    i = np.arange(n)
    rng = np.random.default_rng(seed)
    return 27.0 + 3.0 * np.sin(2 * np.pi * i / 24) + rng.uniform(-noise, noise, n)


def meteoblue_text(values, start=datetime(2019, 10, 22), utc_offset=7, delimiter=","):
    """A 9-column export with the given hourly temperatures."""
    d = delimiter
    lines = [
        d.join(["LAT", "10.7734"] * 1 + ["10.7734"] * 3),
        d.join(["LON"] + ["106.604"] * 4),
        d.join(["ASL"] + ["7.0"] * 4),
        d.join(["CITY"] + ["Synthetic"] * 4),
        d.join(["NAME", "Temperature", "Total Precipitation", "Wind Speed", "Wind Direction"]),
        d.join(["UNIT", "°C", "mm", "km/h", "°"]),
        d.join(["UTC OFFSET"] + [str(utc_offset)] * 4),
        d.join(["Year", "Month", "Day", "Hour", "Minute", "Temperature  [2 m above gnd]",
                "Total Precipitation  [sfc]", "Wind Speed  [10 m above gnd]",
                "Wind Direction  [10 m above gnd]"]),
    ]
    for k, v in enumerate(values):
        t = start + timedelta(hours=k)
        lines.append(d.join(str(x) for x in (t.year, t.month, t.day, t.hour, t.minute,
                                              repr(float(v)), "0.00", "2.00", "90.00")))
    return "\n".join(lines) + "\n"


@pytest.fixture
def hcmc_csv():
    return (DATA / "hcmc_13h.csv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "synthetic.csv"
    path.write_text(meteoblue_text(synthetic_values()), encoding="utf-8")
    return path


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _acceptance_results.append((number, title, item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    by_number = {}
    for number, title, name, outcome in _acceptance_results:
        by_number.setdefault((number, title), []).append(outcome)
    for (number, title), outcomes in sorted(by_number.items()):
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} "
                                    f"({outcomes.count('passed')}/{len(outcomes)} checks)")


@pytest.fixture(scope="session")
def synthetic_run():
    """The synthetic pipeline: H=32, 200 epochs, other settings at their defaults."""
    from thermocast.dataset import prepare
    from thermocast.rnn import TrainConfig, train

    values = synthetic_values()
    dataset, scaler, _ = prepare(values)
    config = TrainConfig(hidden_size=32, epochs=200)
    report = train(dataset, config)
    return {"values": values, "dataset": dataset, "scaler": scaler,
            "config": config, "report": report}
