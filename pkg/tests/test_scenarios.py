import math

import numpy as np
import pytest

from seqmeas import (
    ChainStage,
    DimensionMismatchError,
    MeasurementDevice,
    build_example,
    chain_run,
    inner_product,
    marginal_probability,
    measure_exact,
    phase_equal,
    rotate_2d,
)
from seqmeas.scenarios import EXAMPLE_IDS

PAULI_X = [[0, 1], [1, 0]]
XY = MeasurementDevice.from_vectors([[1, 0], [0, 1]])


def test_example_devices():
    s31 = build_example("3.1")
    assert inner_product(s31.device["a1"], s31.device["a2"]) == 0
    s32 = build_example(3.2)
    assert inner_product(s32.device["a1"], s32.device["a3"]) == 0
    assert s32.device["a2"].allclose(s32.device["a3"], atol=0)
    s33 = build_example("3.3")
    assert abs(inner_product(s33.device["a1"], s33.device["a2"])) == pytest.approx(
        math.sin(math.radians(10)), abs=1e-15)
    s34 = build_example("3.4")
    assert s34.device.size == 3
    for s in map(build_example, EXAMPLE_IDS):
        assert s.initial_state.allclose([math.sqrt(3) / 2, 0.5])


def test_example_35_deterministic():
    a, b = build_example("3.5", seed=7), build_example("3.5", seed=7)
    for (la, va), (lb, vb) in zip(a.device.states, b.device.states):
        assert la == lb and va.allclose(vb, atol=0)
    c = build_example("3.5", seed=8)
    assert not a.device["a1"].allclose(c.device["a1"])


def test_unknown_example():
    with pytest.raises(ValueError):
        build_example("3.9")


def test_rotate_2d():
    assert rotate_2d([0, 1], 0).allclose([0, 1], atol=0)
    assert phase_equal(rotate_2d([1, 0], 90), [0, 1])
    s, c = math.sin(math.radians(10)), math.cos(math.radians(10))
    assert rotate_2d([0, 1], 10).allclose([s, c])
    with pytest.raises(DimensionMismatchError):
        rotate_2d([1, 0, 0], 10)


def test_example_33_headline_independent_of_rotation_direction():
    plus = build_example("3.3", rotation=10).run()
    minus = build_example("3.3", rotation=-10).run()
    s, c = math.sin(math.radians(10)), math.cos(math.radians(10))
    assert plus.probability_of({"a1"}, [c, -s]) == pytest.approx(0.363692, abs=1e-6)
    assert minus.probability_of({"a1"}, [c, s]) == pytest.approx(0.363692, abs=1e-6)
    # other entries do depend on the direction
    assert plus.probability_of({"a1"}, [1, 0]) != pytest.approx(
        minus.probability_of({"a1"}, [1, 0]), abs=1e-3)


def test_example_34_claims():
    d33, d34 = build_example("3.3").run(), build_example("3.4").run()
    assert abs(marginal_probability(d34, "a1") - marginal_probability(d33, "a1")) > 1e-6
    weaker = [o for o in d34 if "a3" in o.affirmative_labels and "a2" not in o.affirmative_labels]
    assert sum(o.probability for o in weaker) > 0


def test_scenario_runs_are_deterministic():
    for ex in EXAMPLE_IDS:
        a, b = build_example(ex).run(), build_example(ex).run()
        assert [o.probability for o in a] == [o.probability for o in b]


def test_chain_repeated_measurement():
    for seed in range(5):
        trace = chain_run([math.sqrt(3) / 2, 0.5], [ChainStage(XY), ChainStage(XY)], seed=seed)
        first, second = trace[0].outcome, trace[1].outcome
        assert second.affirmative_labels == first.affirmative_labels
        assert second.probability == pytest.approx(1.0)
        assert len(trace[1].distribution) == 1


def test_chain_null_then_complement():
    only_x = MeasurementDevice.from_vectors([[1, 0]])
    only_y = MeasurementDevice.from_vectors([[0, 1]], labels=["b1"])
    trace = chain_run([0, 1], [ChainStage(only_x), ChainStage(only_y)], seed=0)
    assert trace[0].outcome.affirmative_labels == frozenset()
    assert trace[1].outcome.affirmative_labels == {"b1"}
    assert trace[1].outcome.probability == pytest.approx(1.0)


def test_chain_with_evolution_flips_statistics():
    stages = [ChainStage(XY), ChainStage(XY, np.array(PAULI_X), math.pi / 2)]
    for seed in range(5):
        trace = chain_run([math.sqrt(3) / 2, 0.5], stages, seed=seed)
        first = trace[0].outcome.affirmative_labels
        flipped = {"a1": "a2", "a2": "a1"}[next(iter(first))]
        assert trace[1].outcome.affirmative_labels == {flipped}
        assert trace[1].outcome.probability == pytest.approx(1.0)


def test_chain_exact_mode_mixture():
    stages = [ChainStage(XY), ChainStage(XY, np.array(PAULI_X), math.pi / 2)]
    trace = chain_run([math.sqrt(3) / 2, 0.5], stages, mode="exact")
    second = trace[1].distribution
    assert marginal_probability(second, "a2") == pytest.approx(0.75, abs=1e-12)
    assert marginal_probability(second, "a1") == pytest.approx(0.25, abs=1e-12)
    assert second.total_probability == pytest.approx(1.0)


def test_chain_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        chain_run([1, 0, 0], [ChainStage(XY)])


def test_chain_sampled_stage():
    trace = chain_run([1, 0], [ChainStage(XY)], seed=1, samples=1000)
    assert trace[0].distribution.mode == "sampled"
    assert trace[0].outcome.affirmative_labels == {"a1"}
