"""Input validation helpers shared by the functional and estimator APIs."""

import math

import numpy as np
from sklearn.utils import check_array

from .errors import DomainError


def check_sample(y, min_size=2, name="sample"):
    """Return ``y`` as a 1-d float64 array of finite values.

    Column vectors ``(n, 1)`` are accepted and flattened so the estimators
    slot into sklearn pipelines that hand over 2-d input.
    """
    try:
        arr = check_array(y, ensure_2d=False, dtype=np.float64,
                          ensure_all_finite=True, input_name=name)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if arr.size < min_size:
        raise DomainError(f"{name} needs at least {min_size} observations, got {arr.size}")
    return arr


def check_positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
