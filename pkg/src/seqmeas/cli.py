"""Command-line entry point: ``seqmeas example|measure|imprecise``.

Exit codes: 0 success, 1 domain error, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as cfg
from .born_standard import OrthonormalBasisMeasurement
from .exceptions import ConfigError, SeqmeasError
from .imprecise import imprecise_collapse, imprecise_distribution
from .scenarios import EXAMPLE_IDS, build_example
from .svg import render_svg

SEED_ENV = "SEQMEAS_SEED"


class UsageError(Exception):
    pass


def _seed(args):
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be a non-negative integer, got {raw!r}") from None
    if value < 0:
        raise UsageError(f"{SEED_ENV} must be a non-negative integer, got {raw!r}")
    return value


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(dist, fmt):
    return cfg.distribution_to_csv(dist) if fmt == "csv" else cfg.distribution_to_json(dist)


def _run(scenario, args, seed):
    mode = "sample" if args.samples else scenario.options.get("mode", "exact")
    dist = scenario.run(mode=mode, samples=args.samples, seed=seed, threads=args.threads)
    _emit(_render(dist, args.format), args.output)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(scenario.initial_state, scenario.device, dist))
    return 0


def cmd_example(args) -> int:
    seed = _seed(args)
    scenario = build_example(args.id, rotation=args.rotation, theta3=args.theta3,
                             n_states=args.n_states, seed=0 if seed is None else seed)
    return _run(scenario, args, seed)


def cmd_measure(args) -> int:
    doc = _read_json(args.config)
    scenario = cfg.scenario_from_config(doc, normalize_input=args.normalize)
    seed = _seed(args)
    if seed is None:
        seed = scenario.options.get("seed")
    return _run(scenario, args, seed)


def cmd_imprecise(args) -> int:
    doc = _read_json(args.config)
    parsed = cfg.parse_config(doc, normalize_input=args.normalize)
    Y = parsed["resolution"]
    if Y is None:
        raise ConfigError("resolution_matrix", "missing")
    psi = parsed["initial_state"]
    if parsed["device"] is not None:
        basis = OrthonormalBasisMeasurement(
            [vec for _, vec in parsed["device"].states], Y.true_values
        )
    else:
        basis = OrthonormalBasisMeasurement.standard(Y.true_values)
    table = imprecise_distribution(psi, basis, Y)
    if args.reported is not None:
        if args.reported not in table:
            raise UsageError(f"--reported {args.reported:g} is not one of {list(table)}")
        chosen = [args.reported]
    else:
        chosen = [r for r, p in table.items() if p > parsed["options"]["tolerance"]]
    post = []
    for r in chosen:
        state = imprecise_collapse(psi, basis, Y, r).canonical()
        post.append({"reported": cfg.fmt_float(r),
                     "state": [[cfg.fmt_float(z.real), cfg.fmt_float(z.imag)]
                               for z in state.amplitudes]})
    payload = {
        "probabilities": [{"reported": cfg.fmt_float(r), "probability": cfg.fmt_float(p)}
                          for r, p in table.items()],
        "post_measurement": post,
    }
    _emit(cfg.dumps_json(payload), args.output)
    return 0


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmeas",
        description="Sequential Born-rule measurement simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.add_argument("--svg", help="also write a 2-d vector diagram to this path")
        p.add_argument("--samples", type=_positive_int,
                       help="Monte Carlo sample count (switches to sampled mode)")
        p.add_argument("--seed", type=_nonneg_int,
                       help=f"random seed (fallback: ${SEED_ENV})")
        p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                       help="worker threads for sampling; results do not depend on it")

    ex = sub.add_parser("example", help="run one of the built-in examples")
    ex.add_argument("id", choices=EXAMPLE_IDS)
    ex.add_argument("--rotation", type=float, default=10.0,
                    help="angle in degrees of a2 away from y (3.3, 3.4)")
    ex.add_argument("--theta3", type=float, default=20.0,
                    help="angle in degrees of a3 away from y (3.4)")
    ex.add_argument("--n-states", type=_positive_int, default=6,
                    help="number of random measurement states (3.5)")
    outputs(ex)
    ex.set_defaults(func=cmd_example)

    me = sub.add_parser("measure", help="run a scenario config file")
    me.add_argument("config")
    me.add_argument("--normalize", action="store_true",
                    help="normalize input states instead of rejecting them")
    outputs(me)
    me.set_defaults(func=cmd_measure)

    im = sub.add_parser("imprecise", help="imprecise measurement from a resolution matrix")
    im.add_argument("config")
    im.add_argument("--reported", type=float, help="reported value to collapse on")
    im.add_argument("-o", "--output")
    im.add_argument("--normalize", action="store_true")
    im.set_defaults(func=cmd_imprecise)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"seqmeas: error: {exc}", file=sys.stderr)
        return 2
    except SeqmeasError as exc:
        print(f"seqmeas: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
