"""Tercile binning of numeric columns into ordinal labels."""
from __future__ import annotations

import math

import numpy as np

from ..errors import UsageError

LEVELS = ("low", "medium", "high")


def bin_numeric(values: list[float], levels: int = 3) -> list[str]:
    """Ordinal labels by empirical terciles; ties take the lower label."""
    if levels != 3:
        raise UsageError("only 3-level binning (low/medium/high) is supported")
    if not values:
        raise UsageError("bin_numeric needs at least one value")
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise UsageError("bin_numeric values must be finite")
    if float(arr.min()) == float(arr.max()):
        return ["medium"] * len(values)
    q1 = float(np.quantile(arr, 1 / 3))
    q2 = float(np.quantile(arr, 2 / 3))
    labels = []
    for v in values:
        if v <= q1:
            labels.append("low")
        elif v <= q2:
            labels.append("medium")
        else:
            labels.append("high")
    return labels


def try_float(text: str) -> float | None:
    """Float value of a cell text, or None; mirrors the numeric-cell parse."""
    cleaned = text.strip().replace(",", "").rstrip("%").strip()
    if not cleaned:
        return None
    try:
        value = float(cleaned)
    except ValueError:
        return None
    return value if math.isfinite(value) else None
