"""Scenario config documents and distribution serialization.

Config (UTF-8 JSON)::

    {
      "dimension": 2,
      "initial_state": [[0.866025403784, 0], [0.5, 0]],
      "measurement_states": [{"label": "a1", "amplitudes": [[1, 0], [0, 0]]}, ...],
      "resolution_matrix": {"true_values": [...], "reported_values": [...],
                            "amplitudes": [[[re, im], ...], ...]},      # optional
      "options": {"tolerance": 1e-12, "mode": "exact", "samples": 100000, "seed": 0}
    }

Complex numbers are ``[re, im]`` pairs; a bare real number is also accepted.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .exceptions import ConfigError, DimensionMismatchError, NotNormalizedError
from .hilbert import StateVector
from .imprecise import ResolutionMatrix
from .scenarios import Scenario
from .sequential import MeasurementDevice, OutcomeDistribution

# loaded states may carry rounding from a text file
INPUT_NORM_TOLERANCE = 1e-8
SIGNIFICANT_DIGITS = 12

_OPTION_DEFAULTS = {"tolerance": 1e-12, "mode": "exact", "samples": 100_000, "seed": None}


def _complex(value, where):
    if isinstance(value, bool):
        raise ConfigError(where, "expected a number or [re, im] pair")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(where, "expected a number or [re, im] pair")


def _vector(value, where, dim=None):
    if not isinstance(value, list) or not value:
        raise ConfigError(where, "expected a non-empty list of amplitudes")
    arr = np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(value)])
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"{where}: expected {dim} amplitudes, got {arr.size}")
    return arr


def _state(arr, where, normalize_input):
    norm = float(np.linalg.norm(arr))
    if norm == 0:
        raise NotNormalizedError(f"{where}: state not normalized (zero vector)")
    if not normalize_input and abs(norm - 1.0) > INPUT_NORM_TOLERANCE:
        raise NotNormalizedError(f"{where}: state not normalized (norm={norm:.12g})")
    return StateVector._trusted(arr / norm)


def parse_config(doc: dict, normalize_input: bool = False) -> dict:
    """Validate a config mapping.

    Returns a dict with ``initial_state``, ``device`` (or None when no
    measurement states are listed), ``resolution`` (or None) and ``options``.
    Structural problems raise :class:`ConfigError`; unnormalized states raise
    :class:`NotNormalizedError` unless ``normalize_input`` is set.
    """
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    dim = doc.get("dimension")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError("dimension", "expected a positive integer")
    if "initial_state" not in doc:
        raise ConfigError("initial_state", "missing")
    psi = _vector(doc["initial_state"], "initial_state", dim)

    raw_states = doc.get("measurement_states", [])
    if not isinstance(raw_states, list):
        raise ConfigError("measurement_states", "expected a list")
    entries = []
    for i, item in enumerate(raw_states):
        where = f"measurement_states[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(where, "expected an object with label and amplitudes")
        label = item.get("label", f"a{i + 1}")
        if not isinstance(label, str) or not label:
            raise ConfigError(f"{where}.label", "expected a non-empty string")
        if "amplitudes" not in item:
            raise ConfigError(f"{where}.amplitudes", "missing")
        entries.append((label, _vector(item["amplitudes"], f"{where}.amplitudes", dim), where))
    labels = [e[0] for e in entries]
    if len(set(labels)) != len(labels):
        raise ConfigError("measurement_states", "labels must be unique")

    options = dict(_OPTION_DEFAULTS)
    raw_opts = doc.get("options", {})
    if not isinstance(raw_opts, dict):
        raise ConfigError("options", "expected an object")
    for key, value in raw_opts.items():
        if key not in _OPTION_DEFAULTS:
            raise ConfigError(f"options.{key}", "unknown option")
        options[key] = value
    tol = options["tolerance"]
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not 0 <= tol < 1:
        raise ConfigError("options.tolerance", "expected a number in [0, 1)")
    if options["mode"] not in ("exact", "sample"):
        raise ConfigError("options.mode", 'expected "exact" or "sample"')
    samples = options["samples"]
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise ConfigError("options.samples", "expected a positive integer")
    seed = options["seed"]
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        raise ConfigError("options.seed", "expected a non-negative integer")

    resolution = None
    if doc.get("resolution_matrix") is not None:
        resolution = _resolution(doc["resolution_matrix"])

    initial = _state(psi, "initial_state", normalize_input)
    device = None
    if entries:
        device = MeasurementDevice(
            [(label, _state(vec, where, normalize_input)) for label, vec, where in entries]
        )
    return {"initial_state": initial, "device": device, "resolution": resolution,
            "options": options}


def _resolution(raw) -> ResolutionMatrix:
    where = "resolution_matrix"
    if not isinstance(raw, dict):
        raise ConfigError(where, "expected an object")
    rows = raw.get("amplitudes")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError(f"{where}.amplitudes", "expected a list of rows")
    width = len(rows[0])
    matrix = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ConfigError(f"{where}.amplitudes[{r}]", f"expected {width} entries")
        matrix.append([_complex(x, f"{where}.amplitudes[{r}][{c}]") for c, x in enumerate(row)])
    for key in ("true_values", "reported_values"):
        vals = raw.get(key)
        if vals is not None and (
            not isinstance(vals, list)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals)
        ):
            raise ConfigError(f"{where}.{key}", "expected a list of numbers")
    true_values = raw.get("true_values")
    reported_values = raw.get("reported_values")
    if true_values is not None and len(true_values) != width:
        raise ConfigError(f"{where}.true_values", f"expected {width} values")
    if reported_values is not None and len(reported_values) != len(rows):
        raise ConfigError(f"{where}.reported_values", f"expected {len(rows)} values")
    # column normalization is a domain check, left to ResolutionMatrix
    return ResolutionMatrix(matrix, true_values, reported_values)


def load_config(path, normalize_input: bool = False) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return parse_config(doc, normalize_input)


def scenario_from_config(doc: dict, normalize_input: bool = False, name: str = "config") -> Scenario:
    parsed = parse_config(doc, normalize_input)
    if parsed["device"] is None:
        raise ConfigError("measurement_states", "at least one measurement state is required")
    if parsed["device"].dim != parsed["initial_state"].dim:
        raise DimensionMismatchError("device and initial state dimensions differ")
    return Scenario(name, parsed["initial_state"], parsed["device"], parsed["options"])


def _pair(z) -> list:
    return [fmt_float(z.real), fmt_float(z.imag)]


def scenario_to_config(scenario: Scenario) -> dict:
    opts = {k: scenario.options[k] for k in _OPTION_DEFAULTS if k in scenario.options}
    return {
        "dimension": scenario.initial_state.dim,
        "initial_state": [_pair(z) for z in scenario.initial_state.amplitudes],
        "measurement_states": [
            {"label": label, "amplitudes": [_pair(z) for z in vec.amplitudes]}
            for label, vec in scenario.device.states
        ],
        "options": opts,
    }


def fmt_float(x: float) -> float:
    """Round to 12 significant digits; folds -0.0 into 0.0."""
    x = float(f"{float(x):.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if x == 0 else x


def distribution_to_dict(dist: OutcomeDistribution) -> dict:
    outcomes = []
    for o in dist:
        outcomes.append({
            "labels": list(dist.sorted_labels(o.affirmative_labels)),
            "probability": fmt_float(o.probability),
            "final_state": [_pair(z) for z in o.final_state.amplitudes],
        })
    return {"metadata": dist.metadata(), "outcomes": outcomes}


def dumps_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def distribution_to_json(dist: OutcomeDistribution) -> str:
    return dumps_json(distribution_to_dict(dist))


def distribution_to_csv(dist: OutcomeDistribution) -> str:
    """One row per outcome; labels joined with ';' and amplitudes flattened."""
    data = distribution_to_dict(dist)
    dim = len(data["outcomes"][0]["final_state"]) if data["outcomes"] else 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["labels", "probability"]
    for k in range(dim):
        header += [f"re_{k}", f"im_{k}"]
    writer.writerow(header)
    for o in data["outcomes"]:
        row = [";".join(o["labels"]), repr(o["probability"])]
        for re, im in o["final_state"]:
            row += [repr(re), repr(im)]
        writer.writerow(row)
    return buf.getvalue()


def read_csv_probabilities(text: str) -> list:
    """Parse ``distribution_to_csv`` output back into (labels, probability, state)."""
    rows = list(csv.reader(io.StringIO(text)))
    out = []
    for row in rows[1:]:
        labels = [l for l in row[0].split(";") if l]
        amps = [complex(float(row[i]), float(row[i + 1])) for i in range(2, len(row), 2)]
        out.append((labels, float(row[1]), amps))
    return out
