"""Input validation helpers used by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.exceptions import NotFittedError

_SEED_MASK = (1 << 64) - 1


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={X.ndim}")
    if X.size and not np.isfinite(X).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    return X


def as_float_vector(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got ndim={x.ndim}")
    if x.size and not np.isfinite(x).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    return x


def as_label_vector(y, n_rows: int | None = None, name: str = "y") -> np.ndarray:
    """Coerce to a 1-D int64 label vector, optionally checking its length."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got ndim={y.ndim}")
    if y.dtype.kind not in "iu":
        if y.dtype.kind == "f" and y.size and not np.all(y == np.floor(y)):
            raise ValueError(f"{name} must hold integer class codes")
        y = y.astype(np.int64)
    else:
        y = y.astype(np.int64, copy=False)
    if n_rows is not None and len(y) != n_rows:
        raise ValueError(f"{name} has {len(y)} entries, expected {n_rows}")
    return y


def check_feature_count(X: np.ndarray, expected: int, name: str = "X") -> None:
    if X.shape[1] != expected:
        raise ValueError(
            f"{name} has {X.shape[1]} columns, expected {expected}"
        )


def check_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def rng_from(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for (seed, stream...); accepts negative seeds."""
    words = [int(seed) & _SEED_MASK] + [int(s) & _SEED_MASK for s in stream]
    return np.random.default_rng(np.random.SeedSequence(words))
