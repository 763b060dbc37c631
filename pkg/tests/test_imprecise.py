import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqmeas import (
    ImpossibleOutcomeError,
    OrthonormalBasisMeasurement,
    ResolutionError,
    ResolutionMatrix,
    born_distribution,
    collapse_projective,
    imprecise_collapse,
    imprecise_distribution,
    orthogonality_metric,
    phase_equal,
    random_state,
    reduced_operator,
)
from seqmeas.hilbert import random_unitary

from .conftest import PSI0

XY = OrthonormalBasisMeasurement.standard([0, 1])
H = math.sqrt(0.5)
FUZZY = ResolutionMatrix([[H, H], [H, H]], [0, 1], [10, 11])


def random_resolution(rng, n_rep, values):
    M = rng.standard_normal((n_rep, len(values))) + 1j * rng.standard_normal((n_rep, len(values)))
    M /= np.linalg.norm(M, axis=0)
    return ResolutionMatrix(M, values, range(n_rep))


def test_identity_resolution_recovers_born():
    Y = ResolutionMatrix.identity([0, 1])
    assert imprecise_distribution(PSI0, XY, Y) == pytest.approx(born_distribution(PSI0, XY))


def test_fuzzy_resolution_is_uninformative():
    d = imprecise_distribution([1, 0], XY, FUZZY)
    assert d[10] == pytest.approx(0.5, abs=1e-15)
    assert d[11] == pytest.approx(0.5, abs=1e-15)


def test_phases_on_diagonal_do_not_matter():
    for theta in (0.3, 1.9, -2.5):
        Y = ResolutionMatrix(np.diag([cmath.exp(1j * theta), cmath.exp(-2j * theta)]), [0, 1])
        assert imprecise_distribution(PSI0, XY, Y) == pytest.approx(born_distribution(PSI0, XY))


def test_collapse_examples():
    Y = ResolutionMatrix.identity([0, 1])
    assert phase_equal(imprecise_collapse(PSI0, XY, Y, 1), [0, 1])
    out = imprecise_collapse([H, H], XY, FUZZY, 10)
    # sum_a |a> Y <a|psi> / sqrt(P) = (1/2, 1/2) / sqrt(1/2)
    assert out.allclose([H, H])
    born = born_distribution(out, XY)
    assert born[0] == pytest.approx(0.5) and born[1] == pytest.approx(0.5)
    Y = ResolutionMatrix([[0, 1], [1, 0]], [0, 1], [0, 1])
    with pytest.raises(ImpossibleOutcomeError):
        imprecise_collapse([1, 0], XY, Y, 0)


def test_reduced_operator_identity():
    red = reduced_operator(XY, ResolutionMatrix.identity([0, 1]))
    assert np.allclose(red.matrix, np.eye(2))
    assert red.is_identity


def test_reduced_operator_grouping():
    basis = OrthonormalBasisMeasurement.standard([1, 2, 3])
    Y = ResolutionMatrix.from_partition([(1.5, [1, 2]), (3.0, [3])], [1, 2, 3])
    red = reduced_operator(basis, Y)
    assert np.allclose(red.matrix, np.eye(3))
    assert red.is_identity
    assert np.allclose(red.projectors[1.5], np.diag([1, 1, 0]))
    assert np.allclose(red.projectors[3.0], np.diag([0, 0, 1]))
    assert np.allclose(red.weighted, np.diag([1.5, 1.5, 3.0]))


def test_reduced_operator_rejections():
    with pytest.raises(ResolutionError) as err:
        ResolutionMatrix([[1, 0], [0, 0]], [0, 1])
    assert err.value.column == 1
    basis = OrthonormalBasisMeasurement.standard([0, 1])
    with pytest.raises(ResolutionError, match="0 or 1"):
        reduced_operator(basis, FUZZY)
    basis3 = OrthonormalBasisMeasurement.standard([1, 2, 3])
    split = ResolutionMatrix([[1, 0, 1], [0, 1, 0]], [1, 2, 3])
    with pytest.raises(ResolutionError, match="contiguous"):
        reduced_operator(basis3, split)


def test_column_normalization_enforced():
    with pytest.raises(ResolutionError, match="column 0"):
        ResolutionMatrix([[1.1, 0], [0, 1]], [0, 1])


def test_misaligned_values_rejected():
    with pytest.raises(ResolutionError):
        imprecise_distribution(PSI0, XY, ResolutionMatrix.identity([5, 6]))
    degenerate = OrthonormalBasisMeasurement.standard([1, 1])
    with pytest.raises(ResolutionError):
        imprecise_distribution(PSI0, degenerate, ResolutionMatrix.identity([1, 2]))


def test_orthogonality_metric_examples():
    assert orthogonality_metric(ResolutionMatrix.identity([0, 1, 2])) == 0
    assert orthogonality_metric(FUZZY) == pytest.approx(1.0)
    Y = ResolutionMatrix([[1, H], [0, H]], [0, 1])
    assert orthogonality_metric(Y) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert orthogonality_metric(ResolutionMatrix([[1]], [0])) == 0


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_imprecise_probabilities_sum_to_one(seed, dim, n_rep):
    rng = np.random.default_rng(seed)
    basis = OrthonormalBasisMeasurement(list(random_unitary(dim, rng).T))
    Y = random_resolution(rng, n_rep, basis.eigenvalues)
    psi = random_state(dim, rng)
    d = imprecise_distribution(psi, basis, Y)
    assert sum(d.values()) == pytest.approx(1.0, abs=1e-10)
    for r, p in d.items():
        if p > 1e-6:
            out = imprecise_collapse(psi, basis, Y, r)
            assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6))
def test_precise_limit(seed, dim):
    rng = np.random.default_rng(seed)
    basis = OrthonormalBasisMeasurement(list(random_unitary(dim, rng).T))
    Y = ResolutionMatrix(np.diag(np.exp(1j * rng.uniform(0, 6.3, dim))), basis.eigenvalues)
    psi = random_state(dim, rng)
    imp, born = imprecise_distribution(psi, basis, Y), born_distribution(psi, basis)
    for v in born:
        assert imp[v] == pytest.approx(born[v], abs=1e-10)
        if born[v] > 1e-9:
            assert phase_equal(imprecise_collapse(psi, basis, Y, v),
                               collapse_projective(psi, basis, v), 1e-10)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(2, 5))
def test_metric_invariant_under_column_phases(seed, dim):
    rng = np.random.default_rng(seed)
    Y = random_resolution(rng, dim, range(dim))
    phased = ResolutionMatrix(Y.amplitudes * np.exp(1j * rng.uniform(0, 6.3, dim)), range(dim))
    assert orthogonality_metric(phased) == pytest.approx(orthogonality_metric(Y), abs=1e-12)
    assert 0 <= orthogonality_metric(Y) <= 1
