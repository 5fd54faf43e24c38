"""Argument checks shared by the estimators and the command line."""
from __future__ import annotations

import math

import numpy as np
from sklearn.utils import check_array

from .geometry import UsageError


def check_points(X) -> np.ndarray:
    """(n, d) float array with n >= 1, d >= 2 and finite coordinates."""
    try:
        return check_array(X, dtype=np.float64, ensure_min_samples=1,
                           ensure_min_features=2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def check_stretch(t, strict: bool = True) -> float:
    """Stretch factor; ``strict`` demands t > 1, otherwise t >= 1."""
    try:
        t = float(t)
    except (TypeError, ValueError):
        raise UsageError(f"stretch {t!r} is not a number") from None
    if not math.isfinite(t) or (t <= 1.0 if strict else t < 1.0):
        raise UsageError(f"stretch t={t} must be {'>' if strict else '>='} 1")
    return t


def check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha={alpha} must lie in (0, 1]")
    return alpha


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name}={value!r} is not an integer") from None
    if out < minimum:
        raise UsageError(f"{name}={out} must be >= {minimum}")
    return out
