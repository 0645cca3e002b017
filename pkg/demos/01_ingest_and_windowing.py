"""Read an export, build one-step pairs and 24-hour blocks, split and scale."""

from pathlib import Path

import numpy as np

from thermocast.dataset import fit_scaler, group_blocks, make_pairs, split_dataset
from thermocast.ingest import load_series

HERE = Path(__file__).resolve().parent
series = load_series(HERE.parent / "tests" / "data" / "hcmc_13h.csv")
print(series.metadata.city, series.start, len(series), "hours")
print("temperatures:", series.values)

# each row is (temperature now, temperature one hour later)
pairs = make_pairs(series)
print(pairs[:5])

# 13 hours only make 12 pairs, not a full day; use a longer synthetic series
hours = np.arange(24 * 10 + 1)
values = 27 + 3 * np.sin(2 * np.pi * hours / 24)
blocks, dropped = group_blocks(make_pairs(values))
print(f"{len(blocks)} blocks of 24 pairs, {dropped} pairs left over")

split = split_dataset(blocks, 0.7)
print(f"train {len(split.train)} blocks, test {len(split.test)} blocks")

scaler = fit_scaler(split.train)
print(f"scaler fitted on train only: min {scaler.min:.3f}, max {scaler.max:.3f}")
print("scaled first block x:", np.round(scaler.scale(split.train[0, :, 0]), 3))
