"""Ready-made measurement scenarios and chained measurements.

All two-dimensional examples start from the object state
(sqrt(3)/2, 1/2) in the (x, y) basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatchError
from .hilbert import (
    HermitianOperator,
    StateVector,
    as_state,
    evolve_unitary,
    phase_equal,
    random_state,
)
from .sequential import (
    EXACT_CAP,
    MeasurementDevice,
    Outcome,
    OutcomeDistribution,
    measure_exact,
    measure_sampled,
)

EXAMPLE_IDS = ("3.1", "3.2", "3.3", "3.4", "3.5")
INITIAL_STATE = StateVector([math.sqrt(3) / 2, 0.5])


@dataclass(frozen=True)
class Scenario:
    name: str
    initial_state: StateVector
    device: MeasurementDevice
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.initial_state.dim != self.device.dim:
            raise DimensionMismatchError(
                f"initial state dim {self.initial_state.dim} vs device dim {self.device.dim}"
            )

    def run(self, mode=None, samples=None, seed=None, threads=1) -> OutcomeDistribution:
        mode = mode or self.options.get("mode", "exact")
        tol = self.options.get("tolerance", 1e-12)
        if mode == "exact":
            return measure_exact(self.initial_state, self.device, zero_tolerance=tol)
        if mode in ("sample", "sampled"):
            samples = samples or self.options.get("samples", 100_000)
            seed = self.options.get("seed") if seed is None else seed
            return measure_sampled(self.initial_state, self.device, samples, seed,
                                   zero_tolerance=tol, threads=threads)
        raise ValueError(f"unknown mode {mode!r}")


def rotate_2d(v, degrees: float) -> StateVector:
    """Rotate a real 2-d state by ``degrees``; positive angles turn (0, 1) toward (1, 0)."""
    v = as_state(v)
    if v.dim != 2:
        raise DimensionMismatchError(f"rotate_2d needs a 2-dimensional state, got dim {v.dim}")
    if np.any(np.abs(v.amplitudes.imag) > 1e-12):
        raise ValueError("rotate_2d needs real amplitudes")
    th = math.radians(degrees)
    c, s = math.cos(th), math.sin(th)
    x, y = v.amplitudes.real
    # exact zeros for the axis-aligned angles keep 3.1/3.2 exactly orthogonal
    return StateVector([c * x + s * y, -s * x + c * y])


X_STATE = StateVector([1.0, 0.0])
Y_STATE = StateVector([0.0, 1.0])


def build_example(example_id, rotation: float = 10.0, theta3: float = 20.0,
                  n_states: int = 6, seed: int = 0) -> Scenario:
    """Build one of the worked examples.

    ``rotation`` is the angle of a2 away from y in 3.3/3.4, ``theta3`` the
    angle of the extra state in 3.4, and ``n_states``/``seed`` configure the
    Haar-random device of 3.5.
    """
    key = str(example_id)
    if key not in EXAMPLE_IDS:
        raise ValueError(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLE_IDS)}")
    if key == "3.1":
        states = [("a1", X_STATE), ("a2", Y_STATE)]
        options = {}
    elif key == "3.2":
        states = [("a1", X_STATE), ("a2", Y_STATE), ("a3", Y_STATE)]
        options = {}
    elif key == "3.3":
        states = [("a1", X_STATE), ("a2", rotate_2d(Y_STATE, rotation))]
        options = {"rotation": rotation}
    elif key == "3.4":
        states = [
            ("a1", X_STATE),
            ("a2", rotate_2d(Y_STATE, rotation)),
            ("a3", rotate_2d(Y_STATE, theta3)),
        ]
        options = {"rotation": rotation, "theta3": theta3}
    else:
        rng = np.random.default_rng(seed)
        states = [(f"a{i + 1}", random_state(2, rng)) for i in range(n_states)]
        options = {"seed": seed, "n_states": n_states}
        if n_states > EXACT_CAP:
            options["mode"] = "sample"
    return Scenario(f"example-{key}", INITIAL_STATE, MeasurementDevice(states), options)


@dataclass(frozen=True)
class ChainStage:
    """A device, optionally preceded by Schrodinger evolution for ``time``."""

    device: MeasurementDevice
    hamiltonian: HermitianOperator | None = None
    time: float = 0.0


@dataclass(frozen=True, eq=False)
class StageRecord:
    """What one stage saw and produced.

    In ``sample`` mode ``incoming`` is the single state entering the stage and
    ``outcome`` the drawn result. In ``exact`` mode ``incoming`` is the list of
    ``(weight, state)`` branches and ``outcome`` is None; ``distribution`` is
    then the weighted mixture over all branches.
    """

    distribution: OutcomeDistribution
    incoming: object
    outcome: Outcome | None = None


def _evolve(state, stage: ChainStage):
    if stage.hamiltonian is None or stage.time == 0:
        return state
    return evolve_unitary(state, stage.hamiltonian, stage.time)


def _mixture(parts, labels, tol=1e-9) -> OutcomeDistribution:
    merged = []
    for weight, dist in parts:
        for o in dist:
            for k, m in enumerate(merged):
                if m.affirmative_labels == o.affirmative_labels and phase_equal(
                    m.final_state, o.final_state, tol
                ):
                    merged[k] = Outcome(m.affirmative_labels, m.final_state,
                                        m.probability + weight * o.probability)
                    break
            else:
                merged.append(Outcome(o.affirmative_labels, o.final_state, weight * o.probability))
    merged.sort(key=lambda o: -o.probability)
    return OutcomeDistribution(tuple(merged), tuple(labels), mode="exact")


def chain_run(psi, stages, mode: str = "sample", seed=None, samples: int | None = None,
              prune: float = 1e-12) -> list:
    """Measure ``psi`` with several devices in succession.

    ``sample`` mode draws one outcome per stage (the stage's distribution is
    exact unless ``samples`` is given) and feeds its final state forward.
    ``exact`` mode carries every branch forward with its weight.
    """
    psi = as_state(psi)
    stages = [s if isinstance(s, ChainStage) else ChainStage(*s) for s in stages]
    for k, stage in enumerate(stages):
        if stage.device.dim != psi.dim:
            raise DimensionMismatchError(
                f"stage {k} device dim {stage.device.dim} vs state dim {psi.dim}"
            )
    trace = []
    if mode == "sample":
        rng = np.random.default_rng(seed)
        state = psi
        for stage in stages:
            state = _evolve(state, stage)
            if samples:
                dist = measure_sampled(state, stage.device, samples, int(rng.integers(2**63)))
            else:
                dist = measure_exact(state, stage.device)
            probs = np.array([o.probability for o in dist])
            pick = dist[int(rng.choice(len(probs), p=probs / probs.sum()))]
            trace.append(StageRecord(dist, state, pick))
            state = pick.final_state
        return trace
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    branches = [(1.0, psi)]
    for stage in stages:
        branches = [(w, _evolve(s, stage)) for w, s in branches]
        parts = [(w, measure_exact(s, stage.device)) for w, s in branches]
        dist = _mixture(parts, stage.device.labels)
        trace.append(StageRecord(dist, branches))
        branches = [(o.probability, o.final_state) for o in dist if o.probability > prune]
        # merge branches that landed on the same state
        merged = []
        for w, s in branches:
            for k, (w2, s2) in enumerate(merged):
                if phase_equal(s, s2):
                    merged[k] = (w + w2, s2)
                    break
            else:
                merged.append((w, s))
        branches = merged
    return trace
