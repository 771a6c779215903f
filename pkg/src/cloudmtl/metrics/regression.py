"""Regression metrics over truly-cloudy pixels: MSE and R-squared."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError, MetricUndefinedError, NumericError


def _validate(y: np.ndarray, y_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.ndim != 1 or y.shape != y_hat.shape:
        raise DimensionError(
            f"y {y.shape} and y_hat {y_hat.shape} must be equal-length vectors")
    if y.size == 0:
        raise MetricUndefinedError("regression metric undefined on empty input")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(y_hat))):
        raise NumericError("regression inputs contain non-finite values")
    return y, y_hat


def mse(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Mean squared error."""
    y, y_hat = _validate(y, y_hat)
    d = y - y_hat
    return float(np.mean(d * d))


def r2(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Coefficient of determination: 1 - SSE / SST (SST around the mean).

    A constant truth vector has SST = 0 and no defined value.
    """
    y, y_hat = _validate(y, y_hat)
    sse = float(np.sum((y - y_hat) ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise MetricUndefinedError("R^2 undefined for constant truth")
    return 1.0 - sse / sst
