"""Command line front end.

Subcommands::

    linoptgates verify MATRIX.json --gate {cs,ns,cs-pair} [--theta DEG] [--tol T]
    linoptgates search {cs,ns} [--theta DEG] --restarts N --seed S [...]
    linoptgates dilate MATRIX.json [--sv-tol T] [--out FILE]
    linoptgates decompose MATRIX.json [--out FILE]
    linoptgates simulate NETWORK.json --input 1,1,0,0 [--output ...]
    linoptgates bounds --restarts N --seed S

Exit codes: 0 success / verification passed, 1 verification failed,
2 malformed input or bad flags.  Every search emits a manifest (full
configuration echo, seed, version, wall time, result digest) sufficient to
reproduce the result bit for bit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__, bounds, dilation, optimize, reck
from .fock import ModeTransform, amplitude, as_fock, output_distribution
from .gates import verify_cs, verify_ns, verify_qubit_pair

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_matrix(path) -> ModeTransform:
    obj = _load_json(path)
    try:
        return ModeTransform.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix file {path}: {exc}") from exc


def _dump(obj, out_path):
    text = json.dumps(obj, indent=1)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _manifest(command: str, config: dict, result_obj: dict, seed, wall_time: float) -> dict:
    digest = hashlib.sha256(
        json.dumps(result_obj, sort_keys=True).encode()).hexdigest()
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(wall_time, 3),
        "results_digest": digest,
    }


def cmd_verify(args) -> int:
    transform = _load_matrix(args.matrix)
    theta = np.deg2rad(args.theta)
    v = transform.matrix
    if args.gate == "cs":
        report = verify_cs(v, theta, tol=args.tol)
    elif args.gate == "ns":
        report = verify_ns(v, tol=args.tol)
    else:
        report = verify_qubit_pair(v, theta, tol=args.tol)
    out = {"gate": args.gate, "theta_deg": args.theta, **report.to_json()}
    out["theta_measured_deg"] = float(np.rad2deg(report.theta_measured))
    _dump(out, args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_search(args) -> int:
    config = optimize.SearchConfig(
        theta=np.deg2rad(args.theta), restarts=args.restarts, seed=args.seed,
        real_only=args.real, branch=args.branch)
    t0 = time.time()
    if args.gate == "cs":
        result = optimize.search_cs(config)
    else:
        result = optimize.search_ns(args.modes, config)
    wall = time.time() - t0
    result_obj = result.to_json()
    payload = {
        "result": result_obj,
        "manifest": _manifest("search " + args.gate, config.to_json(),
                              result_obj, args.seed, wall),
    }
    _dump(payload, args.out)
    if args.out:
        print(f"search {args.gate}: objective {result.objective:.9f} "
              f"(passed: {result.verification.passed}) -> {args.out}")
    return EXIT_PASS if result.verification.passed else EXIT_FAIL


def cmd_dilate(args) -> int:
    transform = _load_matrix(args.matrix)
    v = transform.matrix
    lam = dilation.max_singular_value(v)
    rescaled = False
    if 1.0 < lam <= 1.0 + args.sv_tol:
        v = v / lam
        rescaled = True
    try:
        result = dilation.dilate(v, unit_sv_tol=args.sv_tol)
    except dilation.MaxSingularValueExceeded as exc:
        raise InputError(str(exc)) from exc
    out = {
        "m": result.unitary.m,
        "extra_modes": result.extra_modes,
        "lambda": lam,
        "rescaled": rescaled,
        "unitary": result.unitary.to_json(),
    }
    _dump(out, args.out)
    return EXIT_PASS


def cmd_decompose(args) -> int:
    transform = _load_matrix(args.matrix)
    try:
        network = reck.decompose(transform, tol=args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = network.to_json()
    out["beamsplitters"] = network.beamsplitter_count()
    _dump(out, args.out)
    return EXIT_PASS


def _parse_state(text):
    try:
        return as_fock(int(k) for k in text.split(","))
    except ValueError as exc:
        raise InputError(f"malformed state {text!r}: {exc}") from exc


def cmd_simulate(args) -> int:
    network = reck.InterferometerNetwork.from_json(_load_json(args.network))
    transform = reck.recompose(network)
    state = _parse_state(args.input)
    out = {"m": transform.m, "input": list(state)}
    if args.output:
        target = _parse_state(args.output)
        amp = amplitude(transform, state, target)
        out["output"] = list(target)
        out["amplitude"] = [amp.real, amp.imag]
        out["probability"] = abs(amp) ** 2
    else:
        dist = output_distribution(transform, state)
        out["distribution"] = [
            {"state": list(s), "probability": p}
            for s, p in sorted(dist.items()) if p > 1e-15
        ]
    _dump(out, args.out)
    return EXIT_PASS


def cmd_bounds(args) -> int:
    t0 = time.time()
    state, overlap = bounds.maximize_bell_overlap(restarts=args.restarts, seed=args.seed)
    wall = time.time() - t0
    result_obj = {
        "max_overlap": overlap,
        "max_overlap_squared": overlap ** 2,
        "achieving_state": state.to_json(),
        "reference_overlap": 1.0 / np.sqrt(2.0),
    }
    payload = {
        "result": result_obj,
        "manifest": _manifest("bounds", {"restarts": args.restarts, "seed": args.seed},
                              result_obj, args.seed, wall),
    }
    _dump(payload, args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linoptgates",
        description="Post-selected linear-optics gates: verify, search, decompose.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a gate matrix against its conditions")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--gate", choices=("cs", "ns", "cs-pair"), default="cs")
    p.add_argument("--theta", type=float, default=180.0, help="phase in degrees")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="optimize a gate by random restarts")
    p.add_argument("gate", choices=("cs", "ns"))
    p.add_argument("--theta", type=float, default=180.0, help="phase in degrees")
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", type=int, default=3, help="mode count for ns")
    p.add_argument("--real", action="store_true", help="restrict to real parameters")
    p.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("dilate", help="extend a contraction to a unitary")
    p.add_argument("matrix")
    p.add_argument("--sv-tol", type=float, default=dilation.UNIT_SV_THRESHOLD,
                   help="treat singular values this close to 1 as exactly 1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("decompose", help="factor a unitary into beamsplitters")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", help="propagate a Fock state through a network")
    p.add_argument("network", help="network JSON file")
    p.add_argument("--input", required=True, help="comma-separated occupations")
    p.add_argument("--output", default=None, help="single output state to project on")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="maximize product-state Bell overlap")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
