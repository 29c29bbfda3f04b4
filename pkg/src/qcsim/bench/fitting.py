"""Least-squares runtime models: ``t = a*n + b`` and ``t = alpha * n**beta``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MODELS = ("linear", "power")


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    """A fitted runtime model.

    ``coefficients`` holds ``a, b`` for the linear model and ``alpha, beta``
    for the power model. ``r2`` and ``rmse`` are measured on the raw times so
    the two models can be compared; ``r2_log`` is the power fit's R² in
    log-log space.
    """

    model: str
    coefficients: dict[str, float]
    rmse: float
    r2: float
    r2_log: float | None = None

    def predict(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        c = self.coefficients
        if self.model == "linear":
            return c["a"] * n + c["b"]
        return c["alpha"] * n ** c["beta"]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "coefficients": dict(self.coefficients),
            "rmse": self.rmse,
            "r2": self.r2,
            "r2_log": self.r2_log,
        }


def _r2(y: np.ndarray, pred: np.ndarray) -> float:
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else -math.inf
    return 1.0 - ss_res / ss_tot


def fit_scaling(points: Sequence[tuple[float, float]], model: str = "linear") -> FitResult:
    """Fit runtime points ``(n, seconds)``.

    The linear model is ordinary least squares on ``(n, t)``; the power model is
    least squares on ``(ln n, ln t)`` with ``alpha = exp(intercept)``.

    Raises:
        FitError: With fewer than three points, non-positive times, or
            non-positive ``n`` for the power model.
    """
    if model not in MODELS:
        raise FitError(f"model must be one of {MODELS}, got {model!r}")
    if len(points) < 3:
        raise FitError(f"need at least 3 points, got {len(points)}")
    n = np.array([p[0] for p in points], dtype=float)
    t = np.array([p[1] for p in points], dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise FitError("times must be positive and finite")
    if np.unique(n).size < 2:
        raise FitError("need at least two distinct n values")
    if model == "linear":
        design = np.column_stack([n, np.ones_like(n)])
        (a, b), *_ = np.linalg.lstsq(design, t, rcond=None)
        result = FitResult("linear", {"a": float(a), "b": float(b)}, 0.0, 0.0)
        r2_log = None
    else:
        if np.any(n <= 0):
            raise FitError("power model needs positive n")
        x, y = np.log(n), np.log(t)
        design = np.column_stack([x, np.ones_like(x)])
        (beta, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
        result = FitResult("power", {"alpha": float(math.exp(intercept)), "beta": float(beta)}, 0.0, 0.0)
        r2_log = _r2(y, design @ np.array([beta, intercept]))
    pred = result.predict(n)
    rmse = float(np.sqrt(np.mean((t - pred) ** 2)))
    return FitResult(result.model, result.coefficients, rmse, _r2(t, pred), r2_log)


def best_fit(points: Sequence[tuple[float, float]]) -> tuple[FitResult, dict[str, FitResult]]:
    """Fit both models and return the one with the higher raw-time R²."""
    fits = {m: fit_scaling(points, m) for m in MODELS}
    best = max(fits.values(), key=lambda f: f.r2)
    return best, fits
