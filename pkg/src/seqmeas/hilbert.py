"""Finite-dimensional Hilbert-space primitives.

States are stored as read-only complex numpy arrays wrapped in
:class:`StateVector`. All functions are pure; nothing here mutates its inputs.
"""

from __future__ import annotations

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    NotHermitianError,
    NotNormalizedError,
    NullVectorError,
)

ZERO_TOLERANCE = 1e-12
PHASE_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-10
# amplitudes below this magnitude are skipped when fixing the global phase
CANONICAL_CUTOFF = 1e-9


def _as_complex_vector(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d amplitude sequence, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError("a state needs at least one amplitude")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    return arr


class StateVector:
    """A normalized vector of complex amplitudes.

    Construction rejects vectors whose norm differs from one by more than
    ``NORM_TOLERANCE``; use :func:`normalize` for arbitrary input. The residual
    norm error is divided out so stored amplitudes are unit norm to roundoff.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes):
        arr = _as_complex_vector(amplitudes)
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalizedError(f"state not normalized (norm={norm:.12g})")
        arr = arr / norm
        arr.setflags(write=False)
        self._amps = arr

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "StateVector":
        # skips validation; callers guarantee a unit-norm 1-d complex array
        obj = cls.__new__(cls)
        arr = np.array(arr, dtype=complex)
        arr.setflags(write=False)
        obj._amps = arr
        return obj

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._amps.copy()
        return self._amps.astype(dtype)

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self._amps)

    def __repr__(self):
        body = ", ".join(f"{a:.6g}" for a in self._amps)
        return f"StateVector([{body}])"

    def canonical(self) -> "StateVector":
        return StateVector._trusted(canonical_phase(self._amps))

    def allclose(self, other, atol=1e-12) -> bool:
        """Componentwise comparison; sensitive to global phase."""
        other = as_state(other)
        return self.dim == other.dim and bool(
            np.allclose(self._amps, other.amplitudes, rtol=0.0, atol=atol)
        )


class HermitianOperator:
    """A dim x dim Hermitian matrix (Hamiltonian, projector, reduced operator)."""

    __slots__ = ("_mat",)

    def __init__(self, entries):
        mat = np.asarray(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        if not np.allclose(mat, mat.conj().T, rtol=0.0, atol=HERMITIAN_TOLERANCE):
            raise NotHermitianError("operator is not Hermitian")
        mat = mat.copy()
        mat.setflags(write=False)
        self._mat = mat

    @property
    def entries(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._mat.copy()
        return self._mat.astype(dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_state(value) -> StateVector:
    """Coerce ``value`` to a :class:`StateVector` (validating the norm)."""
    if isinstance(value, StateVector):
        return value
    return StateVector(value)


def _check_dims(u: StateVector, v: StateVector):
    if u.dim != v.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: dimension {u.dim} vs {v.dim}"
        )


def canonical_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate by a global phase so the first significant amplitude is real positive.

    Works on a single vector or on the rows of a 2-d array.
    """
    arr = np.asarray(amplitudes, dtype=complex)
    single = arr.ndim == 1
    rows = arr.reshape(1, -1) if single else arr
    mags = np.abs(rows)
    idx = (mags > CANONICAL_CUTOFF).argmax(axis=1)
    r = np.arange(rows.shape[0])
    pivot_mag = mags[r, idx]
    nonzero = pivot_mag > 0
    phase = np.ones(rows.shape[0], dtype=complex)
    phase[nonzero] = rows[r[nonzero], idx[nonzero]] / pivot_mag[nonzero]
    out = rows * phase.conj()[:, None]
    # exact zero imaginary part on the pivot keeps serialized output stable
    out[r, idx] = np.abs(out[r, idx])
    return out[0] if single else out


def inner_product(u, v) -> complex:
    """Return <u|v>, conjugate-linear in ``u``."""
    u, v = as_state(u), as_state(v)
    _check_dims(u, v)
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def normalize(values, zero_tolerance: float = ZERO_TOLERANCE) -> StateVector:
    arr = _as_complex_vector(values)
    norm = float(np.linalg.norm(arr))
    if norm <= zero_tolerance:
        raise NullVectorError(f"null vector (norm={norm:.3g}) cannot be normalized")
    return StateVector._trusted(arr / norm)


def project_affirmative(psi, a, zero_tolerance: float = ZERO_TOLERANCE):
    """Affirmative fork: collapse onto ``a``.

    Returns ``(probability, collapsed)`` with ``probability = |<a|psi>|^2``.
    ``collapsed`` is the phase-canonical ``a``, or None when the fork is
    impossible.
    """
    psi, a = as_state(psi), as_state(a)
    _check_dims(psi, a)
    prob = min(abs(np.vdot(a.amplitudes, psi.amplitudes)) ** 2, 1.0)
    if prob <= zero_tolerance:
        return prob, None
    return prob, a.canonical()


def project_null(psi, a, zero_tolerance: float = ZERO_TOLERANCE):
    """Null fork: project onto the orthogonal complement of ``a``.

    Returns ``(1 - |<a|psi>|^2, normalize((I - |a><a|) psi))``; the state is
    None when the fork is impossible.
    """
    psi, a = as_state(psi), as_state(a)
    _check_dims(psi, a)
    overlap = np.vdot(a.amplitudes, psi.amplitudes)
    prob = max(1.0 - abs(overlap) ** 2, 0.0)
    if prob <= zero_tolerance:
        return prob, None
    residual = psi.amplitudes - overlap * a.amplitudes
    return prob, StateVector._trusted(residual / np.linalg.norm(residual))


def fidelity(u, v) -> float:
    """|<u|v>|^2."""
    return abs(inner_product(u, v)) ** 2


def phase_equal(u, v, tol: float = PHASE_TOLERANCE) -> bool:
    """True iff ``u`` and ``v`` agree up to a global phase."""
    return fidelity(u, v) >= 1.0 - tol


def evolve_unitary(psi, hamiltonian, t: float) -> StateVector:
    """Apply exp(-i H t) with hbar = 1, via the eigendecomposition of H."""
    psi = as_state(psi)
    if not isinstance(hamiltonian, HermitianOperator):
        hamiltonian = HermitianOperator(hamiltonian)
    if hamiltonian.dim != psi.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: Hamiltonian dim {hamiltonian.dim} vs state dim {psi.dim}"
        )
    energies, vecs = np.linalg.eigh(hamiltonian.entries)
    coeffs = vecs.conj().T @ psi.amplitudes
    out = vecs @ (np.exp(-1j * energies * t) * coeffs)
    return normalize(out)


def random_state(dim: int, seed=None) -> StateVector:
    """Draw a Haar-random pure state.

    ``seed`` may be an integer or a ``numpy.random.Generator``; the same
    integer always yields the same state.
    """
    if int(dim) < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(z)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary matrix via QR of a complex Ginibre matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
