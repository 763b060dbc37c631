"""scikit-learn compatible wrappers.

``fit`` takes the measurement states (one per row); ``predict_proba`` and
``transform`` take a batch of object states (one per row). The estimators
support ``get_params``/``set_params``/``clone`` and work inside pipelines.

>>> import numpy as np
>>> est = SequentialBornMeasurement().fit([[1, 0], [0, 1]])
>>> est.transform([[np.sqrt(0.75), 0.5]]).round(2)
array([[0.75, 0.25]])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .born_standard import OrthonormalBasisMeasurement, born_distribution
from .hilbert import ZERO_TOLERANCE, StateVector
from .imprecise import ResolutionMatrix, imprecise_collapse, imprecise_distribution
from .sequential import (
    EXACT_CAP,
    MeasurementDevice,
    marginal_probability,
    measure_exact,
    measure_sampled,
)
from .validation import check_labels, check_states


class SequentialBornMeasurement(TransformerMixin, BaseEstimator):
    """Sequential Born-rule measurement with a (possibly nonorthogonal) device.

    Parameters
    ----------
    labels : sequence of str, optional
        One label per measurement state; defaults to ``a1, a2, ...``.
    mode : {"exact", "sample"}
    n_samples : int
        Monte Carlo samples per object state in ``"sample"`` mode.
    random_state : int or None
        Seed for ``"sample"`` mode and for :meth:`sample`.
    zero_tolerance : float
        Forks at or below this probability are pruned.
    max_exact_states : int
        Largest device enumerated exactly.
    normalize : bool
        Rescale unnormalized inputs instead of rejecting them.

    Attributes
    ----------
    device_ : MeasurementDevice
    labels_ : tuple of str
    n_features_in_ : int
        Hilbert-space dimension.
    """

    def __init__(self, labels=None, mode="exact", n_samples=100_000, random_state=None,
                 zero_tolerance=ZERO_TOLERANCE, max_exact_states=EXACT_CAP, normalize=False):
        self.labels = labels
        self.mode = mode
        self.n_samples = n_samples
        self.random_state = random_state
        self.zero_tolerance = zero_tolerance
        self.max_exact_states = max_exact_states
        self.normalize = normalize

    def fit(self, X, y=None):
        if self.mode not in ("exact", "sample"):
            raise ValueError(f"mode must be 'exact' or 'sample', got {self.mode!r}")
        A = check_states(X, normalize=self.normalize, name="measurement states")
        self.labels_ = check_labels(self.labels, A.shape[0])
        self.device_ = MeasurementDevice(
            [(l, StateVector._trusted(a)) for l, a in zip(self.labels_, A)]
        )
        self.n_features_in_ = A.shape[1]
        return self

    def measure(self, psi):
        """Full outcome distribution for one object state."""
        check_is_fitted(self, "device_")
        row = check_states(psi, self.n_features_in_, self.normalize, name="psi")
        if row.shape[0] != 1:
            raise ValueError("measure takes a single state; use transform for batches")
        return self._measure(StateVector._trusted(row[0]))

    def _measure(self, psi):
        if self.mode == "exact":
            return measure_exact(psi, self.device_, self.zero_tolerance, self.max_exact_states)
        return measure_sampled(psi, self.device_, self.n_samples, self.random_state,
                               self.zero_tolerance)

    def transform(self, X):
        """Marginal affirmative probability of each label, shape (n, n_labels)."""
        check_is_fitted(self, "device_")
        P = check_states(X, self.n_features_in_, self.normalize)
        out = np.empty((P.shape[0], len(self.labels_)))
        for i, row in enumerate(P):
            dist = self._measure(StateVector._trusted(row))
            out[i] = [marginal_probability(dist, l) for l in self.labels_]
        return out

    predict_proba = transform

    def sample(self, X):
        """Draw one outcome per object state as a 0/1 indicator matrix over labels."""
        check_is_fitted(self, "device_")
        P = check_states(X, self.n_features_in_, self.normalize)
        rng = np.random.default_rng(self.random_state)
        out = np.zeros((P.shape[0], len(self.labels_)), dtype=int)
        for i, row in enumerate(P):
            dist = self._measure(StateVector._trusted(row))
            probs = np.array([o.probability for o in dist])
            pick = dist[int(rng.choice(len(dist), p=probs / probs.sum()))]
            out[i] = [l in pick.affirmative_labels for l in self.labels_]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "device_")
        return np.asarray([f"P({l})" for l in self.labels_], dtype=object)


class BornMeasurement(BaseEstimator):
    """Projective measurement in an orthonormal basis.

    ``fit(X, y)`` takes the eigenstates as rows of ``X`` and their eigenvalues
    as ``y`` (defaults to ``0..dim-1``). ``classes_`` holds the distinct
    eigenvalues in first-appearance order.
    """

    def __init__(self, normalize=False):
        self.normalize = normalize

    def fit(self, X, y=None):
        E = check_states(X, normalize=self.normalize, name="eigenstates", allow_1d=False)
        self.basis_ = OrthonormalBasisMeasurement([StateVector._trusted(e) for e in E], y)
        self.classes_ = np.asarray(self.basis_.distinct_eigenvalues())
        self.n_features_in_ = E.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "basis_")
        P = check_states(X, self.n_features_in_, self.normalize)
        out = np.empty((P.shape[0], len(self.classes_)))
        for i, row in enumerate(P):
            probs = born_distribution(StateVector._trusted(row), self.basis_)
            out[i] = [probs[c] for c in self.classes_]
        return out

    def predict(self, X):
        """Most probable eigenvalue per state."""
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def sample(self, X, random_state=None):
        rng = np.random.default_rng(random_state)
        proba = self.predict_proba(X)
        return np.array([self.classes_[rng.choice(len(self.classes_), p=p / p.sum())]
                         for p in proba])


class ImpreciseMeasurement(BaseEstimator):
    """Measurement with resolution amplitudes.

    ``resolution`` is a (n_reported, dim) amplitude matrix whose columns are
    aligned with the eigenstates passed to ``fit``; ``reported_values``
    labels its rows.
    """

    def __init__(self, resolution=None, reported_values=None, normalize=False):
        self.resolution = resolution
        self.reported_values = reported_values
        self.normalize = normalize

    def fit(self, X, y=None):
        E = check_states(X, normalize=self.normalize, name="eigenstates", allow_1d=False)
        self.basis_ = OrthonormalBasisMeasurement([StateVector._trusted(e) for e in E], y)
        amps = np.eye(E.shape[0]) if self.resolution is None else self.resolution
        self.resolution_ = ResolutionMatrix(amps, self.basis_.eigenvalues, self.reported_values)
        self.classes_ = np.asarray(self.resolution_.reported_values)
        self.n_features_in_ = E.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "resolution_")
        P = check_states(X, self.n_features_in_, self.normalize)
        out = np.empty((P.shape[0], len(self.classes_)))
        for i, row in enumerate(P):
            probs = imprecise_distribution(StateVector._trusted(row), self.basis_, self.resolution_)
            out[i] = [probs[c] for c in self.classes_]
        return out

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def collapse(self, psi, reported):
        check_is_fitted(self, "resolution_")
        row = check_states(psi, self.n_features_in_, self.normalize)[0]
        return imprecise_collapse(StateVector._trusted(row), self.basis_, self.resolution_, reported)
