"""Time/probability curves shared by the BDD and Markov analyses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True, eq=False)
class TimeCurve:
    """Probabilities paired with a strictly increasing grid of time bounds."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or values.ndim != 1 or len(times) != len(values):
            raise InputError("times and values must be 1-D sequences of equal length")
        if len(times) == 0:
            raise InputError("a curve needs at least one time point")
        if times[0] < 0 or np.any(np.diff(times) <= 0):
            raise InputError("times must be nonnegative and strictly increasing")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise InputError("probabilities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.times)

    def value_at(self, t: float) -> float:
        idx = np.searchsorted(self.times, t)
        if idx >= len(self.times) or not np.isclose(self.times[idx], t, rtol=0.0, atol=1e-12):
            raise InputError(f"time {t!r} is not on the curve grid")
        return float(self.values[idx])
