"""Textbook projective measurement: Born probabilities and von Neumann collapse.

This layer is deliberately independent of the sequential engine so it can be
used as an oracle for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, ImpossibleOutcomeError, NotOrthonormalError
from .hilbert import ZERO_TOLERANCE, StateVector, as_state, normalize

ORTHONORMAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class OrthonormalBasisMeasurement:
    """An observable given directly by its eigenstates and real eigenvalues.

    Repeated eigenvalues form a degenerate eigenspace. Eigenvalues are
    grouped by exact equality, never by numerical closeness.
    """

    eigenstates: tuple
    eigenvalues: tuple

    def __init__(self, eigenstates, eigenvalues=None):
        states = tuple(as_state(s) for s in eigenstates)
        if not states:
            raise NotOrthonormalError("a basis needs at least one eigenstate")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise DimensionMismatchError("eigenstates have differing dimensions")
        if len(states) != dim:
            raise NotOrthonormalError(
                f"{len(states)} eigenstates cannot span a {dim}-dimensional space"
            )
        if eigenvalues is None:
            eigenvalues = range(dim)
        values = tuple(float(v) for v in eigenvalues)
        if len(values) != dim:
            raise ValueError("need exactly one eigenvalue per eigenstate")
        mat = np.stack([s.amplitudes for s in states])
        gram = mat.conj() @ mat.T
        if not np.allclose(gram, np.eye(dim), rtol=0.0, atol=ORTHONORMAL_TOLERANCE):
            raise NotOrthonormalError("eigenstates are not orthonormal")
        object.__setattr__(self, "eigenstates", states)
        object.__setattr__(self, "eigenvalues", values)

    @classmethod
    def standard(cls, eigenvalues=None, dim=None):
        """Computational basis, optionally labeled with ``eigenvalues``."""
        if dim is None:
            if eigenvalues is None:
                raise ValueError("give eigenvalues or dim")
            dim = len(eigenvalues)
        eye = np.eye(dim, dtype=complex)
        return cls([eye[i] for i in range(dim)], eigenvalues)

    @property
    def dim(self) -> int:
        return self.eigenstates[0].dim

    @property
    def matrix(self) -> np.ndarray:
        """Rows are the eigenstates."""
        return np.stack([s.amplitudes for s in self.eigenstates])

    def distinct_eigenvalues(self) -> list:
        seen = []
        for v in self.eigenvalues:
            if v not in seen:
                seen.append(v)
        return seen

    def projector(self, value) -> np.ndarray:
        """P_omega: the projector onto the eigenspace of ``value``."""
        value = float(value)
        cols = [s.amplitudes for s, v in zip(self.eigenstates, self.eigenvalues) if v == value]
        if not cols:
            raise KeyError(value)
        vecs = np.stack(cols, axis=1)
        return vecs @ vecs.conj().T


def _check(psi: StateVector, m: OrthonormalBasisMeasurement):
    if psi.dim != m.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: state dim {psi.dim} vs observable dim {m.dim}"
        )


def born_distribution(psi, m: OrthonormalBasisMeasurement) -> dict:
    """Map each distinct eigenvalue to sum_i |<omega_i|psi>|^2 over its eigenspace."""
    psi = as_state(psi)
    _check(psi, m)
    weights = np.abs(m.matrix.conj() @ psi.amplitudes) ** 2
    out = {v: 0.0 for v in m.distinct_eigenvalues()}
    for v, w in zip(m.eigenvalues, weights):
        out[v] += float(w)
    return out


def collapse_projective(psi, m: OrthonormalBasisMeasurement, value,
                        zero_tolerance: float = ZERO_TOLERANCE) -> StateVector:
    """Reduce ``psi`` onto the eigenspace of ``value`` and renormalize."""
    psi = as_state(psi)
    _check(psi, m)
    projected = m.projector(value) @ psi.amplitudes
    prob = float(np.vdot(projected, projected).real)
    if prob <= zero_tolerance:
        raise ImpossibleOutcomeError(
            f"eigenvalue {value!r} has probability {prob:.3g} for this state"
        )
    return normalize(projected)
