"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are printed
even without ``-s``), or ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
import timeit

import numpy as np
import pytest

from seqmeas import (
    CapacityError,
    MeasurementDevice,
    OrthonormalBasisMeasurement,
    ResolutionMatrix,
    born_distribution,
    brute_force_oracle,
    build_example,
    collapse_projective,
    imprecise_collapse,
    imprecise_distribution,
    marginal_probability,
    measure_exact,
    measure_sampled,
    phase_equal,
    random_state,
    total_variation,
)
from seqmeas.hilbert import random_unitary
from seqmeas.sequential import max_outcome_difference

SIN10, COS10 = math.sin(math.radians(10)), math.cos(math.radians(10))
RESULTS = {}


@pytest.fixture
def report(request):
    """Print one PASS/FAIL line for a criterion, then assert it."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def _report(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        RESULTS[number] = ok
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line, flush=True)
        else:
            print(line, flush=True)
        assert ok, line

    return _report


def _random_nonorthogonal_device(rng, d, n):
    return MeasurementDevice.from_vectors([random_state(d, rng) for _ in range(n)])


def test_01_headline_probability(report):
    s = build_example("3.3")
    dist = measure_exact(s.initial_state, s.device)
    p = dist.probability_of({"a1"}, [COS10, -SIN10])
    per_call = min(timeit.repeat(lambda: measure_exact(s.initial_state, s.device),
                                 number=100, repeat=7)) / 100
    ok = abs(p - 0.36369) <= 5e-5 and per_call < 1e-3
    report(1, "a1 affirmative with final state orthogonal to a2", ok,
           f"p={p:.8f} (target 0.36369 +/- 5e-5), runtime {per_call * 1e3:.3f} ms (< 1 ms)")


def test_02_orthogonal_pair_reproduces_born(report):
    s = build_example("3.1")
    dist = measure_exact(s.initial_state, s.device)
    basis = OrthonormalBasisMeasurement([v for _, v in s.device.states])
    born = born_distribution(s.initial_state, basis)
    got = {o.affirmative_labels: o.probability for o in dist}
    expected = {frozenset({label}): born[float(k)] for k, label in enumerate(s.device.labels)}
    err = max(abs(got.get(k, 0.0) - v) for k, v in expected.items())
    ok = (len(dist) == 2 and set(got) == set(expected) and err <= 1e-12
          and abs(got[frozenset({"a1"})] - 0.75) <= 1e-12
          and abs(got[frozenset({"a2"})] - 0.25) <= 1e-12)
    report(2, "orthogonal pair reduces to Born", ok,
           f"{len(dist)} outcomes, max |diff| vs Born = {err:.2e} (<= 1e-12)")


def test_03_duplicate_states_fire_jointly(report):
    s1, s2 = build_example("3.1"), build_example("3.2")
    d1 = measure_exact(s1.initial_state, s1.device)
    d2 = measure_exact(s2.initial_state, s2.device)
    diffs = [
        abs(marginal_probability(d2, "a1") - marginal_probability(d1, "a1")),
        abs(marginal_probability(d2, "a2") - marginal_probability(d1, "a2")),
        abs(marginal_probability(d2, "a3") - marginal_probability(d1, "a2")),
    ]
    joint = all(("a2" in o.affirmative_labels) == ("a3" in o.affirmative_labels) for o in d2)
    has_pair = any({"a2", "a3"} <= o.affirmative_labels for o in d2)
    ok = max(diffs) <= 1e-12 and joint and has_pair
    report(3, "duplicated state changes no marginal, fires jointly", ok,
           f"max marginal diff {max(diffs):.2e} (<= 1e-12), duplicates only jointly: {joint}")


def test_04_orthonormal_devices_reduce_to_born(report):
    rng = np.random.default_rng(20240401)
    worst, multi = 0.0, 0
    start = time.perf_counter()
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        U = random_unitary(d, rng)
        device = MeasurementDevice.from_vectors(list(U))
        psi = random_state(d, rng)
        dist = measure_exact(psi, device)
        born = np.abs(U.conj() @ psi.amplitudes) ** 2
        for k, label in enumerate(device.labels):
            worst = max(worst, abs(marginal_probability(dist, label) - born[k]))
        multi += sum(len(o.affirmative_labels) > 1 for o in dist)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and multi == 0 and elapsed < 10
    report(4, "1000 orthonormal devices match Born", ok,
           f"max |diff| {worst:.2e} (<= 1e-10), multi-affirmative outcomes {multi}, "
           f"{elapsed:.2f} s (< 10 s)")


def test_05_probabilities_sum_to_one(report):
    rng = np.random.default_rng(7)
    worst = 0.0
    start = time.perf_counter()
    for _ in range(1000):
        d, n = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        dist = measure_exact(random_state(d, rng), _random_nonorthogonal_device(rng, d, n))
        worst = max(worst, abs(math.fsum(o.probability for o in dist) - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60
    report(5, "1000 nonorthogonal devices are normalized", ok,
           f"max |sum - 1| {worst:.2e} (<= 1e-9), {elapsed:.2f} s (< 60 s)")


def test_06_engine_matches_oracle(report):
    cases = [build_example(e) for e in ("3.1", "3.2", "3.3", "3.4", "3.5")]
    pairs = [(s.initial_state, s.device) for s in cases]
    rng = np.random.default_rng(99)
    for _ in range(200):
        d, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        pairs.append((random_state(d, rng), _random_nonorthogonal_device(rng, d, n)))
    worst = 0.0
    for psi, device in pairs:
        worst = max(worst, max_outcome_difference(measure_exact(psi, device),
                                                  brute_force_oracle(psi, device)))
    ok = worst <= 1e-9
    report(6, "exact engine equals brute-force oracle", ok,
           f"{len(pairs)} configs, max per-outcome |diff| {worst:.2e} (<= 1e-9)")


def test_07_sampling_converges(report):
    s = build_example("3.3")
    exact = measure_exact(s.initial_state, s.device)
    start = time.perf_counter()
    first = measure_sampled(s.initial_state, s.device, 10**6, seed=12345)
    elapsed = time.perf_counter() - start
    again = measure_sampled(s.initial_state, s.device, 10**6, seed=12345, threads=4)
    tv = total_variation(first, exact)
    same = [(o.affirmative_labels, o.probability, tuple(o.final_state.amplitudes))
            for o in first] == [(o.affirmative_labels, o.probability,
                                 tuple(o.final_state.amplitudes)) for o in again]
    ok = tv < 0.005 and same and elapsed < 30
    report(7, "Monte Carlo converges to exact", ok,
           f"TV {tv:.5f} (< 0.005), repeat identical: {same}, {elapsed:.2f} s (< 30 s)")


def test_08_identity_resolution_is_precise(report):
    rng = np.random.default_rng(31)
    worst_p, worst_state = 0.0, 0.0
    for _ in range(500):
        d = int(rng.integers(1, 6))
        values = rng.permutation(np.arange(d) * 1.5 - 2.0).tolist()
        basis = OrthonormalBasisMeasurement(list(random_unitary(d, rng)), values)
        Y = ResolutionMatrix.identity(values)
        psi = random_state(d, rng)
        born = born_distribution(psi, basis)
        fuzzy = imprecise_distribution(psi, basis, Y)
        worst_p = max(worst_p, max(abs(fuzzy[v] - born[v]) for v in born))
        for v, p in born.items():
            if p <= 1e-10:
                continue
            a = collapse_projective(psi, basis, v)
            b = imprecise_collapse(psi, basis, Y, v)
            worst_state = max(worst_state, 1.0 - abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
            if not phase_equal(a, b, 1e-10):
                worst_state = max(worst_state, 1.0)
    ok = worst_p <= 1e-10 and worst_state <= 1e-10
    report(8, "identity resolution recovers precise measurement", ok,
           f"500 trials, max |dp| {worst_p:.2e}, max state infidelity {worst_state:.2e} "
           f"(<= 1e-10)")


def test_09_third_state_changes_statistics(report):
    s3, s4 = build_example("3.3"), build_example("3.4")
    d3 = measure_exact(s3.initial_state, s3.device)
    d4 = measure_exact(s4.initial_state, s4.device)
    shift = abs(marginal_probability(d4, "a1") - marginal_probability(d3, "a1"))
    p = sum(o.probability for o in d4
            if "a3" in o.affirmative_labels and "a2" not in o.affirmative_labels)
    ok = shift > 1e-6 and p > 0
    report(9, "a third state shifts a1 and allows a3 without a2", ok,
           f"|dP(a1)| {shift:.6f} (> 1e-6), P(a3 affirmative, a2 null) {p:.6f} (> 0)")


def test_10_capacity(report):
    rng = np.random.default_rng(8)
    device = _random_nonorthogonal_device(rng, 4, 8)
    start = time.perf_counter()
    dist = measure_exact(random_state(4, rng), device)
    elapsed = time.perf_counter() - start
    big = _random_nonorthogonal_device(rng, 4, 9)
    try:
        measure_exact(random_state(4, rng), big)
        message = None
    except CapacityError as exc:
        message = str(exc)
    ok = (elapsed < 60 and abs(dist.total_probability - 1) < 1e-9
          and message is not None and "measure_sampled" in message)
    report(10, "n=8 exact within budget, n=9 redirected to sampling", ok,
           f"n=8,d=4 in {elapsed:.2f} s (< 60 s), {len(dist)} outcomes; "
           f"n=9 -> {'CapacityError' if message else 'no error'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
