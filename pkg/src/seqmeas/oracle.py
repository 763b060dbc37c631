"""Naive reference enumeration of the sequential Born rule.

Written against plain Python lists and ``cmath`` so it shares no arithmetic
with :mod:`seqmeas.sequential`. Instead of renormalizing after each fork it
carries the unnormalized projected amplitudes; the squared norm of a leaf is
then its path probability (before the ordering weight). Nothing is pruned
during the walk; zero-weight leaves are only dropped when the leaves are
merged.
"""

from __future__ import annotations

import itertools
import math

from .exceptions import CapacityError, DimensionMismatchError
from .hilbert import StateVector
from .sequential import MeasurementDevice, Outcome, OutcomeDistribution

ORACLE_CAP = 6
# leaves at or below this weight are roundoff from exactly-zero branches
_EMPTY_LEAF = 1e-15


def _dot(u, v):
    return sum(x.conjugate() * y for x, y in zip(u, v))


def _leaves(psi, vecs):
    """All 2**n unnormalized leaves for one fixed ordering."""
    if not vecs:
        return [((), psi)]
    a = vecs[0]
    c = _dot(a, psi)
    affirmed = [c * x for x in a]
    rejected = [y - c * x for x, y in zip(a, psi)]
    out = []
    for flag, branch in ((True, affirmed), (False, rejected)):
        for flags, leaf in _leaves(branch, vecs[1:]):
            out.append(((flag,) + flags, leaf))
    return out


def _same_ray(u, v, tol):
    nu = math.sqrt(sum(abs(x) ** 2 for x in u))
    nv = math.sqrt(sum(abs(x) ** 2 for x in v))
    return abs(_dot(u, v)) ** 2 / (nu * nv) ** 2 >= 1.0 - tol


def brute_force_oracle(psi, device, tol: float = 1e-9) -> OutcomeDistribution:
    if not isinstance(device, MeasurementDevice):
        device = MeasurementDevice(device)
    n = device.size
    if n > ORACLE_CAP:
        raise CapacityError(f"brute-force oracle handles at most {ORACLE_CAP} states")
    start = [complex(x) for x in (psi.amplitudes if isinstance(psi, StateVector) else psi)]
    if len(start) != device.dim:
        raise DimensionMismatchError(
            f"incompatible spaces: state dim {len(start)} vs device dim {device.dim}"
        )
    table = {label: [complex(x) for x in vec.amplitudes] for label, vec in device.states}
    weight = 1.0 / math.factorial(n)

    merged = []  # [labels, unnormalized representative, probability]
    for order in itertools.permutations(device.labels):
        for flags, leaf in _leaves(start, [table[l] for l in order]):
            p = sum(abs(x) ** 2 for x in leaf) * weight
            if p <= _EMPTY_LEAF:
                continue
            labels = frozenset(l for l, f in zip(order, flags) if f)
            for entry in merged:
                if entry[0] == labels and _same_ray(entry[1], leaf, tol):
                    entry[2] += p
                    break
            else:
                merged.append([labels, leaf, p])

    outcomes = []
    for labels, leaf, p in merged:
        norm = math.sqrt(sum(abs(x) ** 2 for x in leaf))
        outcomes.append(Outcome(labels, StateVector([x / norm for x in leaf]).canonical(), p))
    outcomes.sort(key=lambda o: -o.probability)
    return OutcomeDistribution(tuple(outcomes), device.labels, mode="oracle")
