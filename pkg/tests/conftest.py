import math

import numpy as np
import pytest

from seqmeas import MeasurementDevice, random_state
from seqmeas.hilbert import random_unitary

SQ3_2 = math.sqrt(3) / 2
PSI0 = [SQ3_2, 0.5]


def rad(deg):
    return math.radians(deg)


def random_device(rng, dim, n):
    return MeasurementDevice.from_vectors([random_state(dim, rng) for _ in range(n)])


def random_orthonormal_device(rng, dim):
    U = random_unitary(dim, rng)
    return MeasurementDevice.from_vectors(list(U.T))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
