"""Sequential Born rule over every ordering of a device's measurement states.

A device is an ordered, labeled list of (possibly nonorthogonal, possibly
repeated) measurement states. For each ordering of the states, the object
state is passed through the states one at a time; each step forks into an
affirmative branch (collapse onto the measurement state) and a null branch
(projection onto its orthogonal complement). Orderings are weighted
uniformly. A leaf is reported by the set of affirmative labels on its path and
its final state; leaves sharing both are merged into one :class:`Outcome`.

``measure_exact`` enumerates the tree level by level in numpy. Two partial
paths that have used the same labels, affirmed the same labels and carry the
same state have identical futures, so they are merged before expanding the
next level. ``measure_sampled`` walks single random paths instead.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .exceptions import CapacityError, DimensionMismatchError, UnknownLabelError
from .hilbert import (
    PHASE_TOLERANCE,
    ZERO_TOLERANCE,
    StateVector,
    as_state,
    canonical_phase,
    phase_equal,
    project_affirmative,
    project_null,
)

EXACT_CAP = 8
# sampled mode keeps affirmative sets as int64 bitmasks
SAMPLED_CAP = 62
SAMPLE_CHUNK = 1 << 16
# grid used to hash phase-canonical states; far below PHASE_TOLERANCE
_HASH_SCALE = 1e10
# below this many rows, plain Python/dense numpy beats the vectorized machinery
_SMALL_ROWS = 64


@dataclass(frozen=True, eq=False)
class MeasurementDevice:
    """Labeled measurement states defining a (generalized) dynamical variable.

    No orthogonality is required and the same vector may appear under several
    labels.
    """

    states: tuple

    def __init__(self, states):
        if isinstance(states, dict):
            states = states.items()
        pairs = tuple((str(label), as_state(vec)) for label, vec in states)
        if not pairs:
            raise ValueError("a device needs at least one measurement state")
        labels = [p[0] for p in pairs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"device labels must be unique: {labels}")
        dim = pairs[0][1].dim
        for label, vec in pairs:
            if vec.dim != dim:
                raise DimensionMismatchError(
                    f"measurement state {label!r} has dim {vec.dim}, expected {dim}"
                )
        object.__setattr__(self, "states", pairs)

    @classmethod
    def from_vectors(cls, vectors, labels=None):
        vectors = list(vectors)
        if labels is None:
            labels = [f"a{i + 1}" for i in range(len(vectors))]
        return cls(zip(labels, vectors))

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.states)

    @property
    def dim(self) -> int:
        return self.states[0][1].dim

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self):
        return self.size

    def __getitem__(self, label) -> StateVector:
        for name, vec in self.states:
            if name == label:
                return vec
        raise UnknownLabelError(label)

    @property
    def matrix(self) -> np.ndarray:
        """(size, dim) array whose rows are the measurement states."""
        return np.stack([vec.amplitudes for _, vec in self.states])

    def reordered(self, order) -> "MeasurementDevice":
        lookup = dict(self.states)
        return MeasurementDevice([(label, lookup[label]) for label in order])


@dataclass(frozen=True)
class PathRecord:
    """One root-to-leaf path: ordering, fork decisions (True = affirmative),
    probability including the 1/n! ordering weight, and the final state."""

    permutation: tuple
    decisions: tuple
    probability: float
    final_state: StateVector = field(compare=False)

    @property
    def affirmative_labels(self) -> frozenset:
        return frozenset(l for l, d in zip(self.permutation, self.decisions) if d)


@dataclass(frozen=True, eq=False)
class Outcome:
    affirmative_labels: frozenset
    final_state: StateVector
    probability: float


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Every outcome of one measurement, sorted by descending probability.

    ``labels`` lists the producing device's labels in device order; sampled
    distributions also record ``samples`` and ``seed``.
    """

    outcomes: tuple
    labels: tuple
    mode: str = "exact"
    samples: int | None = None
    seed: int | None = None

    def __iter__(self):
        return iter(self.outcomes)

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, i) -> Outcome:
        return self.outcomes[i]

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def total_probability(self) -> float:
        return math.fsum(o.probability for o in self.outcomes)

    def sorted_labels(self, labels) -> tuple:
        """Labels of ``labels`` in device order."""
        order = {l: i for i, l in enumerate(self.labels)}
        return tuple(sorted(labels, key=order.__getitem__))

    def marginal(self, label) -> float:
        return marginal_probability(self, label)

    def find(self, labels, state=None, tol: float = PHASE_TOLERANCE) -> list:
        """Outcomes with exactly these affirmative labels (and final state, if given)."""
        labels = frozenset(labels)
        hits = [o for o in self.outcomes if o.affirmative_labels == labels]
        if state is not None:
            hits = [o for o in hits if phase_equal(o.final_state, state, tol)]
        return hits

    def probability_of(self, labels, state=None, tol: float = PHASE_TOLERANCE) -> float:
        return math.fsum(o.probability for o in self.find(labels, state, tol))

    def metadata(self) -> dict:
        return {
            "labels": list(self.labels),
            "device_size": self.size,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
        }


def _check_inputs(psi, device) -> StateVector:
    psi = as_state(psi)
    if not isinstance(device, MeasurementDevice):
        device = MeasurementDevice(device)
    if psi.dim != device.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: state dim {psi.dim} vs device dim {device.dim}"
        )
    return psi, device


def _hash_keys(masks: np.ndarray, canon: np.ndarray) -> np.ndarray:
    re = np.round(canon.real * _HASH_SCALE).astype(np.int64)
    im = np.round(canon.imag * _HASH_SCALE).astype(np.int64)
    return np.column_stack([masks.reshape(-1, 1), re, im])


def _merge_identical(masks, states, weights, extra=None):
    """Sum weights of rows whose masks (and ``extra`` keys) and hashed states coincide.

    Returns canonicalized representatives in first-occurrence order of the
    sorted keys.
    """
    canon = canonical_phase(states)
    keys = _hash_keys(masks, canon)
    if extra is not None:
        keys = np.column_stack([extra.reshape(-1, 1), keys])
    if keys.shape[0] <= _SMALL_ROWS:
        # np.unique(axis=0) has a high fixed cost; same result via a dict on sorted keys
        rows = [tuple(r) for r in keys.tolist()]
        slot = {}
        for r in sorted(set(rows)):
            slot[r] = len(slot)
        inverse = np.fromiter((slot[r] for r in rows), dtype=np.int64, count=len(rows))
        first = np.full(len(slot), len(rows), dtype=np.int64)
        np.minimum.at(first, inverse, np.arange(len(rows)))
    else:
        _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.ravel()
    summed = np.bincount(inverse, weights=weights, minlength=first.size)
    return first, canon[first], summed


def _projector_embedding(states: np.ndarray) -> np.ndarray:
    """Real coordinates of |s><s| such that squared Euclidean distance equals
    2 (1 - |<u|v>|^2) for unit vectors u, v. Invariant under global phase."""
    d = states.shape[1]
    outer = states[:, :, None] * states[:, None, :].conj()
    iu, ju = np.triu_indices(d, k=1)
    diag = outer[:, np.arange(d), np.arange(d)].real
    off = outer[:, iu, ju] * np.sqrt(2.0)
    return np.column_stack([diag, off.real, off.imag])


def _components(pairs: np.ndarray, m: int) -> np.ndarray:
    """Connected-component ids (numbered in first-row order) of a small edge list."""
    parent = list(range(m))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs.tolist():
        ri, rj = root(i), root(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    ids = {}
    return np.array([ids.setdefault(root(i), len(ids)) for i in range(m)], dtype=np.int64)


def _phase_classes(masks: np.ndarray, states: np.ndarray, tol: float) -> np.ndarray:
    """Class id per row, joining rows with equal masks and phase-equal states."""
    m = states.shape[0]
    if m == 1:
        return np.zeros(1, dtype=np.int64)
    radius = math.sqrt(2.0 * tol) * (1 + 1e-9)
    if m <= _SMALL_ROWS:
        # dense check: ||P_u - P_v||^2 = 2 (1 - |<u|v>|^2)
        gram = np.abs(states @ states.conj().T) ** 2
        linked = (2.0 * (1.0 - gram) <= radius**2) & (masks[:, None] == masks[None, :])
        return _components(np.argwhere(np.triu(linked, k=1)), m)
    embedded = _projector_embedding(states)
    # candidates come from a fixed orthonormal 3-d projection (distances only
    # shrink), and distinct masks sit >= 10 apart on an extra axis
    k = min(3, embedded.shape[1])
    axes = np.linalg.qr(np.random.default_rng(0).standard_normal((embedded.shape[1], k)))[0]
    mask_rank = np.unique(masks, return_inverse=True)[1].ravel() * 10.0
    tree = cKDTree(np.column_stack([embedded @ axes, mask_rank]))
    pairs = tree.query_pairs(r=radius, output_type="ndarray")
    if pairs.size:
        gap = np.linalg.norm(embedded[pairs[:, 0]] - embedded[pairs[:, 1]], axis=1)
        pairs = pairs[(gap <= radius) & (masks[pairs[:, 0]] == masks[pairs[:, 1]])]
    if pairs.size == 0:
        return np.arange(m)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    return connected_components(graph, directed=False)[1]


def _aggregate(masks, states, weights, tol=PHASE_TOLERANCE):
    """Merge leaves into (masks, representative states, total weights).

    Leaves with equal masks whose states are phase-equal within ``tol`` fall in
    one class; the class representative is its heaviest member.
    """
    first, reps, summed = _merge_identical(masks, states, weights)
    rep_masks = masks[first]
    comp = _phase_classes(rep_masks, reps, tol)
    n_classes = int(comp.max()) + 1
    totals = np.bincount(comp, weights=summed, minlength=n_classes)
    # heaviest member per class; ties go to the earliest row
    order = np.lexsort((np.arange(comp.size), -summed, comp))
    starts = np.searchsorted(comp[order], np.arange(n_classes))
    best = order[starts]
    return rep_masks[best], reps[best], totals


def _build_distribution(masks, states, probs, labels, mode, samples=None, seed=None):
    n = len(labels)
    states = canonical_phase(np.atleast_2d(states))
    popcount = np.array([bin(int(m)).count("1") for m in masks])
    # equal-size label sets compare lexicographically by descending bit-reversed mask
    reversed_mask = np.zeros(len(masks), dtype=np.int64)
    for i in range(n):
        reversed_mask |= ((masks >> i) & 1) << (n - 1 - i)
    keys = [np.round(states[:, k].imag, 9) for k in reversed(range(states.shape[1]))]
    keys += [np.round(states[:, k].real, 9) for k in reversed(range(states.shape[1]))]
    keys += [-reversed_mask, popcount, -np.round(probs, 12)]
    order = np.lexsort(keys)

    label_sets = {}
    outcomes = []
    for i in order:
        mask = int(masks[i])
        if mask not in label_sets:
            label_sets[mask] = frozenset(l for b, l in enumerate(labels) if (mask >> b) & 1)
        outcomes.append(Outcome(label_sets[mask], StateVector._trusted(states[i]), float(probs[i])))
    return OutcomeDistribution(tuple(outcomes), tuple(labels), mode=mode, samples=samples, seed=seed)


def _exact_leaves(psi: np.ndarray, basis: np.ndarray, zero_tolerance: float):
    n, d = basis.shape
    affirm = canonical_phase(basis)
    states = psi[None, :].astype(complex)
    prob = np.ones(1)
    used = np.zeros(1, dtype=np.int64)
    aff = np.zeros(1, dtype=np.int64)
    for level in range(n):
        weight = 1.0 / (n - level)
        new_states, new_prob, new_used, new_aff = [], [], [], []
        for j in range(n):
            bit = np.int64(1 << j)
            free = (used & bit) == 0
            if not free.any():
                continue
            s, p = states[free], prob[free] * weight
            u, a = used[free] | bit, aff[free]
            overlap = s @ basis[j].conj()
            p_aff = np.minimum(np.abs(overlap) ** 2, 1.0)
            p_null = np.maximum(1.0 - p_aff, 0.0)

            keep = p_aff > zero_tolerance
            if keep.any():
                new_states.append(np.broadcast_to(affirm[j], (int(keep.sum()), d)))
                new_prob.append(p[keep] * p_aff[keep])
                new_used.append(u[keep])
                new_aff.append(a[keep] | bit)

            keep = p_null > zero_tolerance
            if keep.any():
                rest = s[keep] - overlap[keep, None] * basis[j][None, :]
                rest /= np.linalg.norm(rest, axis=1, keepdims=True)
                new_states.append(rest)
                new_prob.append(p[keep] * p_null[keep])
                new_used.append(u[keep])
                new_aff.append(a[keep])

        states = np.concatenate(new_states)
        prob = np.concatenate(new_prob)
        used = np.concatenate(new_used)
        aff = np.concatenate(new_aff)
        first, states, prob = _merge_identical(aff, states, prob, extra=used)
        used, aff = used[first], aff[first]
    return aff, states, prob


def measure_exact(psi, device, zero_tolerance: float = ZERO_TOLERANCE,
                  max_states: int = EXACT_CAP, tol: float = PHASE_TOLERANCE) -> OutcomeDistribution:
    """Enumerate every ordering and fork of the sequential Born rule.

    Raises :class:`CapacityError` when the device has more than ``max_states``
    states; ``max_states`` may be raised explicitly by the caller.
    """
    psi, device = _check_inputs(psi, device)
    if device.size > max_states:
        raise CapacityError(
            f"exact enumeration is capped at {max_states} measurement states "
            f"(device has {device.size}); use measure_sampled instead"
        )
    if device.size > SAMPLED_CAP:
        raise CapacityError(f"at most {SAMPLED_CAP} measurement states are supported")
    masks, states, probs = _exact_leaves(psi.amplitudes, device.matrix, zero_tolerance)
    masks, states, probs = _aggregate(masks, states, probs, tol)
    return _build_distribution(masks, states, probs, device.labels, "exact")


def _sample_chunk(psi, basis, affirm, count, seed_seq, zero_tolerance):
    rng = np.random.default_rng(seed_seq)
    n, d = basis.shape
    orders = rng.permuted(np.tile(np.arange(n), (count, 1)), axis=1)
    states = np.tile(psi, (count, 1))
    masks = np.zeros(count, dtype=np.int64)
    for step in range(n):
        j = orders[:, step]
        vecs = basis[j]
        overlap = np.einsum("ij,ij->i", vecs.conj(), states)
        p_aff = np.minimum(np.abs(overlap) ** 2, 1.0)
        p_null = np.maximum(1.0 - p_aff, 0.0)
        draw = rng.random(count)
        go_aff = np.where(p_aff <= zero_tolerance, False,
                          np.where(p_null <= zero_tolerance, True, draw < p_aff))
        rest = states - overlap[:, None] * vecs
        norms = np.linalg.norm(rest, axis=1, keepdims=True)
        rest = rest / np.where(norms > 0, norms, 1.0)
        states = np.where(go_aff[:, None], affirm[j], rest)
        masks = masks | np.where(go_aff, np.left_shift(np.int64(1), j.astype(np.int64)), 0)
    first, reps, counts = _merge_identical(masks, states, np.ones(count))
    return masks[first], reps, counts


def measure_sampled(psi, device, samples: int, seed=None, zero_tolerance: float = ZERO_TOLERANCE,
                    threads: int | None = 1, tol: float = PHASE_TOLERANCE) -> OutcomeDistribution:
    """Monte Carlo version of :func:`measure_exact`.

    Each sample draws a uniformly random ordering and follows one path,
    choosing each fork with its branch probability. Samples are split into
    fixed-size chunks seeded from ``seed`` via ``SeedSequence.spawn``, so the
    result does not depend on ``threads``.
    """
    psi, device = _check_inputs(psi, device)
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if device.size > SAMPLED_CAP:
        raise CapacityError(f"at most {SAMPLED_CAP} measurement states are supported")
    basis = device.matrix
    affirm = canonical_phase(basis)
    n_chunks = -(-samples // SAMPLE_CHUNK)
    sizes = [SAMPLE_CHUNK] * (n_chunks - 1) + [samples - SAMPLE_CHUNK * (n_chunks - 1)]
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)

    def work(i):
        return _sample_chunk(psi.amplitudes, basis, affirm, sizes[i], seeds[i], zero_tolerance)

    if threads is not None and threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(n_chunks)))
    else:
        parts = [work(i) for i in range(n_chunks)]
    masks = np.concatenate([p[0] for p in parts])
    states = np.concatenate([p[1] for p in parts])
    counts = np.concatenate([p[2] for p in parts])
    masks, states, counts = _aggregate(masks, states, counts, tol)
    return _build_distribution(masks, states, counts / samples, device.labels, "sampled",
                               samples=samples, seed=seed)


def iter_paths(psi, device, zero_tolerance: float = ZERO_TOLERANCE):
    """Yield every non-pruned :class:`PathRecord`, orderings in sorted-label order.

    This is the slow, readable path-by-path form of the procedure; use it for
    traces and small devices.
    """
    psi, device = _check_inputs(psi, device)
    weight = 1.0 / math.factorial(device.size)
    for order in itertools.permutations(sorted(device.labels)):
        vecs = [device[label] for label in order]

        def walk(state, k, prob, decisions):
            if k == len(vecs):
                yield PathRecord(order, tuple(decisions), prob * weight, state.canonical())
                return
            for affirmative, fork in ((True, project_affirmative), (False, project_null)):
                p, nxt = fork(state, vecs[k], zero_tolerance)
                if nxt is not None:
                    yield from walk(nxt, k + 1, prob * p, decisions + [affirmative])

        yield from walk(psi, 0, 1.0, [])


def marginal_probability(dist: OutcomeDistribution, label) -> float:
    """Total probability that ``label`` is among the affirmative results."""
    if label not in dist.labels:
        raise UnknownLabelError(label)
    return math.fsum(o.probability for o in dist.outcomes if label in o.affirmative_labels)


def match_outcomes(p: OutcomeDistribution, q: OutcomeDistribution, tol: float = PHASE_TOLERANCE):
    """Pair outcomes of ``p`` and ``q`` with equal labels and phase-equal states.

    Returns a list of ``(prob_in_p, prob_in_q, labels)``; an outcome present in
    only one distribution is paired with probability 0.
    """
    pairs = []
    unmatched = list(q.outcomes)
    for o in p.outcomes:
        hit = None
        for k, other in enumerate(unmatched):
            if other.affirmative_labels == o.affirmative_labels and phase_equal(
                other.final_state, o.final_state, tol
            ):
                hit = unmatched.pop(k)
                break
        pairs.append((o.probability, hit.probability if hit else 0.0, o.affirmative_labels))
    pairs.extend((0.0, other.probability, other.affirmative_labels) for other in unmatched)
    return pairs


def total_variation(p: OutcomeDistribution, q: OutcomeDistribution, tol: float = PHASE_TOLERANCE) -> float:
    return 0.5 * math.fsum(abs(a - b) for a, b, _ in match_outcomes(p, q, tol))


def max_outcome_difference(p: OutcomeDistribution, q: OutcomeDistribution,
                           tol: float = PHASE_TOLERANCE) -> float:
    return max((abs(a - b) for a, b, _ in match_outcomes(p, q, tol)), default=0.0)
