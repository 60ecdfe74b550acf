"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array, check_X_y

from .formula import Spec


def check_binary_array(X, *, name="X", ensure_2d=True) -> np.ndarray:
    """Validate a 0/1 matrix and return it as ``uint8``."""
    X = check_array(X, dtype=None, ensure_2d=ensure_2d, ensure_min_features=0 if not ensure_2d else 1)
    if X.size and not np.isin(X, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0/1 values")
    return X.astype(np.uint8, copy=False)


def check_binary_X_y(X, Y):
    X, Y = check_X_y(X, Y, dtype=None, multi_output=True)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    X = check_binary_array(X)
    Y = check_binary_array(Y, name="Y")
    return X, Y


def check_spec(spec) -> Spec:
    if not isinstance(spec, Spec):
        raise TypeError(f"expected a Spec, got {type(spec).__name__}")
    if set(spec.inputs) & set(spec.outputs):
        raise ValueError("inputs and outputs overlap")
    return spec


def check_positive(name, value, *, allow_zero=False):
    if value is None:
        return
    if value < 0 or (value == 0 and not allow_zero):
        raise ValueError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {value}")
