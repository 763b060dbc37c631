"""Input validation for complex state arrays.

scikit-learn's ``check_array`` rejects complex input, so the estimators use
these helpers instead.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError, NotNormalizedError, NullVectorError
from .hilbert import NORM_TOLERANCE


def check_states(X, n_features=None, normalize=False, name="X", allow_1d=True) -> np.ndarray:
    """Return ``X`` as a 2-d complex array whose rows are unit vectors.

    A 1-d input is treated as a single state when ``allow_1d`` is set. Rows
    whose norm is off by more than ``NORM_TOLERANCE`` are rejected unless
    ``normalize`` is true, in which case they are rescaled.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric")
    arr = arr.astype(complex)
    if arr.ndim == 1 and allow_1d:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d (n_states, dim), got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} is empty (shape {arr.shape})")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n_features is not None and arr.shape[1] != n_features:
        raise DimensionMismatchError(
            f"{name} has {arr.shape[1]} amplitudes per state, expected {n_features}"
        )
    norms = np.linalg.norm(arr, axis=1)
    if normalize:
        if np.any(norms == 0):
            raise NullVectorError(f"{name} contains a zero vector")
    elif np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
        bad = int(np.argmax(np.abs(norms - 1.0)))
        raise NotNormalizedError(f"{name}[{bad}] is not normalized (norm={norms[bad]:.12g})")
    return arr / norms[:, None]


def check_labels(labels, n, default_prefix="a") -> tuple:
    if labels is None:
        return tuple(f"{default_prefix}{i + 1}" for i in range(n))
    labels = tuple(str(l) for l in labels)
    if len(labels) != n:
        raise ValueError(f"got {len(labels)} labels for {n} states")
    if len(set(labels)) != n:
        raise ValueError("labels must be unique")
    return labels
