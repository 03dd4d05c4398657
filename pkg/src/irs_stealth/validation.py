"""Small input-checking helpers shared by the public functions."""

import numbers

import numpy as np

from .exceptions import ConfigError, InvalidDimensionError


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidDimensionError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidDimensionError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be a positive finite number, got {value}")
    return value


def check_finite(value, name):
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value}")
    return value


def check_probability(value, name, open_interval=False):
    value = float(value)
    if open_interval:
        ok = 0.0 < value < 1.0
    else:
        ok = 0.0 <= value <= 1.0
    if not ok:
        bounds = "(0, 1)" if open_interval else "[0, 1]"
        raise ConfigError(f"{name} must lie in {bounds}, got {value}")
    return value


def as_complex_vector(x, name, length=None):
    """Return ``x`` as a 1-D complex128 array, optionally of a fixed length."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidDimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite entries")
    if length is not None and arr.shape[0] != length:
        raise InvalidDimensionError(f"{name} must have length {length}, got {arr.shape[0]}")
    return arr
