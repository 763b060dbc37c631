"""Imprecise measurement via resolution amplitudes.

A resolution matrix ``Y[r, c]`` is the amplitude for reporting value
``reported_values[r]`` when the true eigenvalue is ``true_values[c]``. Every
column must have unit norm. The identity matrix recovers precise projective
measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .born_standard import OrthonormalBasisMeasurement
from .exceptions import DimensionMismatchError, ImpossibleOutcomeError, ResolutionError
from .hilbert import ZERO_TOLERANCE, StateVector, as_state, normalize

COLUMN_NORM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class ResolutionMatrix:
    true_values: tuple
    reported_values: tuple
    amplitudes: np.ndarray

    def __init__(self, amplitudes, true_values=None, reported_values=None):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.size == 0:
            raise ResolutionError(f"resolution amplitudes must form a 2-d matrix, got shape {amps.shape}")
        n_rep, n_true = amps.shape
        true_values = tuple(float(v) for v in (range(n_true) if true_values is None else true_values))
        reported_values = tuple(
            float(v) for v in (range(n_rep) if reported_values is None else reported_values)
        )
        if len(true_values) != n_true:
            raise ResolutionError(f"{len(true_values)} true values for {n_true} columns")
        if len(reported_values) != n_rep:
            raise ResolutionError(f"{len(reported_values)} reported values for {n_rep} rows")
        if len(set(true_values)) != n_true or len(set(reported_values)) != n_rep:
            raise ResolutionError("true and reported values must each be distinct")
        norms = np.sum(np.abs(amps) ** 2, axis=0)
        for c, norm in enumerate(norms):
            if abs(norm - 1.0) > COLUMN_NORM_TOLERANCE:
                raise ResolutionError(
                    f"column {c} (true value {true_values[c]:g}) has squared norm {norm:.12g}, "
                    "expected 1",
                    column=c,
                )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "true_values", true_values)
        object.__setattr__(self, "reported_values", reported_values)

    @classmethod
    def identity(cls, values):
        values = list(values)
        return cls(np.eye(len(values)), values, values)

    @classmethod
    def from_partition(cls, groups, true_values):
        """0/1 amplitudes reporting ``groups[i][0]`` for every true value in ``groups[i][1]``.

        ``groups`` is a sequence of ``(reported_value, true_values_in_range)``.
        """
        true_values = [float(v) for v in true_values]
        amps = np.zeros((len(groups), len(true_values)))
        for r, (_, members) in enumerate(groups):
            for v in members:
                amps[r, true_values.index(float(v))] = 1.0
        return cls(amps, true_values, [g[0] for g in groups])

    def row(self, reported) -> np.ndarray:
        try:
            return self.amplitudes[self.reported_values.index(float(reported))]
        except ValueError:
            raise KeyError(reported) from None


def _aligned_overlaps(psi: StateVector, basis: OrthonormalBasisMeasurement, Y: ResolutionMatrix):
    """<a|psi> ordered like the columns of Y."""
    if psi.dim != basis.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: state dim {psi.dim} vs basis dim {basis.dim}"
        )
    if len(set(basis.eigenvalues)) != len(basis.eigenvalues):
        raise ResolutionError("imprecise measurement needs a nondegenerate basis")
    if sorted(basis.eigenvalues) != sorted(Y.true_values):
        raise ResolutionError(
            f"resolution true values {Y.true_values} do not match basis eigenvalues "
            f"{basis.eigenvalues}"
        )
    overlaps = basis.matrix.conj() @ psi.amplitudes
    order = [basis.eigenvalues.index(v) for v in Y.true_values]
    return overlaps[order], basis.matrix[order]


def imprecise_distribution(psi, basis: OrthonormalBasisMeasurement, Y: ResolutionMatrix) -> dict:
    """P(reported) = sum_a |Y[reported, a]|^2 |<a|psi>|^2."""
    psi = as_state(psi)
    overlaps, _ = _aligned_overlaps(psi, basis, Y)
    probs = (np.abs(Y.amplitudes) ** 2) @ (np.abs(overlaps) ** 2)
    return {r: float(p) for r, p in zip(Y.reported_values, probs)}


def imprecise_collapse(psi, basis: OrthonormalBasisMeasurement, Y: ResolutionMatrix, reported,
                       zero_tolerance: float = ZERO_TOLERANCE) -> StateVector:
    """Post-measurement state sum_a |a> Y[reported, a] <a|psi> / sqrt(P(reported))."""
    psi = as_state(psi)
    overlaps, eigvecs = _aligned_overlaps(psi, basis, Y)
    row = Y.row(reported)
    coeffs = row * overlaps
    prob = float(np.sum(np.abs(coeffs) ** 2))
    if prob <= zero_tolerance:
        raise ImpossibleOutcomeError(
            f"reported value {reported!r} has probability {prob:.3g} for this state"
        )
    out = coeffs @ eigvecs / np.sqrt(prob)
    return normalize(out)


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    """Sum of the per-reported-value operators, plus the operators themselves.

    ``is_identity`` flags the case where the plain (unweighted) sum is the
    identity, which always happens for a complete 0/1 partition. ``weighted``
    is the eigenvalue-weighted alternative sum_r r * Y_r for comparison.
    """

    matrix: np.ndarray
    projectors: dict
    is_identity: bool
    weighted: np.ndarray


def reduced_operator(basis: OrthonormalBasisMeasurement, Y: ResolutionMatrix) -> ReducedOperator:
    """Build Y_r = sum_a Y[r, a] |a><a| for each reported value and their sum."""
    amps = Y.amplitudes
    if not np.all(np.isclose(amps, 0.0, atol=1e-12) | np.isclose(amps, 1.0, atol=1e-12)):
        raise ResolutionError("reduced operator needs resolution amplitudes equal to 0 or 1")
    sorted_true = sorted(Y.true_values)
    for r, value in enumerate(Y.reported_values):
        members = [sorted_true.index(Y.true_values[c]) for c in np.flatnonzero(amps[r].real > 0.5)]
        if members and max(members) - min(members) + 1 != len(members):
            raise ResolutionError(
                f"reported value {value:g} does not cover a contiguous range of true values"
            )
    # 0/1 entries with unit column norm already force exactly one row per column
    overlapping = np.flatnonzero(np.sum(amps.real > 0.5, axis=0) != 1)
    if overlapping.size:
        raise ResolutionError("reported ranges overlap", column=int(overlapping[0]))

    dim = basis.dim
    if len(Y.true_values) != dim or sorted(basis.eigenvalues) != sorted_true:
        raise ResolutionError("resolution true values do not match basis eigenvalues")
    vecs = {v: s.amplitudes for s, v in zip(basis.eigenstates, basis.eigenvalues)}
    projectors = {}
    for r, value in enumerate(Y.reported_values):
        op = np.zeros((dim, dim), dtype=complex)
        for c, a in enumerate(Y.true_values):
            if amps[r, c] != 0:
                op += amps[r, c] * np.outer(vecs[a], vecs[a].conj())
        projectors[value] = op
    total = sum(projectors.values())
    weighted = sum(value * op for value, op in projectors.items())
    return ReducedOperator(
        matrix=total,
        projectors=projectors,
        is_identity=bool(np.allclose(total, np.eye(dim), atol=1e-12)),
        weighted=weighted,
    )


def orthogonality_metric(Y: ResolutionMatrix) -> float:
    """Largest overlap modulus between two distinct resolution columns.

    0 means every true value is reported distinguishably; 1 means two true
    values are reported with identical statistics.
    """
    amps = Y.amplitudes
    if amps.shape[1] < 2:
        return 0.0
    gram = np.abs(amps.conj().T @ amps)
    np.fill_diagonal(gram, 0.0)
    return float(min(gram.max(), 1.0))
