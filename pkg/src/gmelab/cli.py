"""Command-line interface: ``gmelab <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .estimator import estimate
from .fixtures import rho4_css_reference
from .gilbert import GilbertConfig
from .negativity import aggregate_g3pe, negativity, tripartite_negativity
from .operators import DensityMatrix, NumericalError
from .partitions import Bipartition, PartySpec, SeparabilityClass, enumerate_bipartitions
from .pipeline import analyze, gnuplot_script, sweep_csv, sweep_theta
from .states import (
    STATE_NAMES,
    build_state,
    maximally_mixed_state,
    protocol_ghz_to_w,
    protocol_w_to_ghz,
    separable_control,
)
from .witness import witness_from_css

log = logging.getLogger("gmelab")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
EXTRA_STATES = ("maxmixed", "separable-control")
REFERENCE_CSS = "reference-rho4"


class InputError(ValueError):
    pass


# -- argument helpers ----------------------------------------------------------


def build_named(name: str, args) -> tuple[DensityMatrix, PartySpec]:
    if name == "maxmixed":
        s = maximally_mixed_state(args.n if args.n is not None else 3)
    elif name == "separable-control":
        s = separable_control()
    else:
        params = {}
        if args.theta is not None:
            params["theta"] = args.theta
        if args.n is not None:
            params["n"] = args.n
        if getattr(args, "variant", None):
            params["variant"] = args.variant
        s = build_state(name, **params)
    return s.rho, s.spec


def resolve_state(arg: str, args) -> tuple[DensityMatrix, PartySpec, str]:
    """A state file path or a built-in state name."""
    path = Path(arg)
    if path.is_file():
        rho, spec, name = io.load_state(path)
        name = name or path.name
    elif arg in STATE_NAMES or arg in EXTRA_STATES:
        rho, spec = build_named(arg, args)
        name = arg
    else:
        raise InputError(f"{arg!r} is neither a state file nor a known state ({', '.join(STATE_NAMES + EXTRA_STATES)})")
    if getattr(args, "grouping", None):
        spec = spec.with_grouping(args.grouping)
    return rho, spec, name


def parse_class(tokens: list[str] | None, spec: PartySpec) -> SeparabilityClass:
    if not tokens:
        return SeparabilityClass.biseparable()
    kind = tokens[0]
    if kind in ("separable", "fully-separable") and len(tokens) == 1:
        return SeparabilityClass.fully_separable()
    if kind == "biseparable" and len(tokens) == 1:
        return SeparabilityClass.biseparable()
    if kind == "cut" and len(tokens) == 2:
        return SeparabilityClass.single_cut(Bipartition.parse(tokens[1], spec.group_labels))
    raise InputError("--class takes 'separable', 'biseparable' or 'cut <A|BC>'")


def make_config(args) -> GilbertConfig:
    return GilbertConfig(
        max_corrections=args.max_corrections,
        max_trials=args.max_trials,
        record_interval=args.record_interval,
        rng_seed=args.seed,
        target_distance=args.target_distance,
    )


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=float, help="theta for theta, rho1, rho3")
    p.add_argument("--n", type=int, help="qubit count for ghz and maxmixed")
    p.add_argument("--variant", choices=["orthonormal", "printed"], help="PAC matrix variant for rho3")
    p.add_argument("--grouping", choices=["party", "particle"], help="override the locality grouping")


def _run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--class", dest="cls", nargs="+", metavar="CLASS", help="separable | biseparable | cut <A|BC>")
    p.add_argument("--max-corrections", type=int, default=1000)
    p.add_argument("--max-trials", type=int, default=100_000_000)
    p.add_argument("--record-interval", type=int, default=50)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-distance", type=float)
    p.add_argument("--check-samples", type=int, default=10_000, help="witness positivity samples (0 = skip)")


# -- subcommands ---------------------------------------------------------------


def cmd_state(args) -> int:
    rho, spec = build_named(args.name, args)
    if args.grouping:
        spec = spec.with_grouping(args.grouping)
    emit(io.dumps_state(rho, spec, args.name), args.out)
    return EXIT_OK


def cmd_gilbert(args) -> int:
    rho, spec, name = resolve_state(args.state, args)
    cls = parse_class(args.cls, spec)
    wcls = parse_class(args.witness_class, spec) if args.witness_class else None
    initial = None
    if args.initial_css:
        initial = rho4_css_reference() if args.initial_css == REFERENCE_CSS else io.load_state(args.initial_css)[0]
    result = analyze(
        rho, spec, cls, make_config(args), args.restarts, wcls, check_samples=args.check_samples, initial_css=initial
    )
    if args.history:
        Path(args.history).write_text(io.history_csv(result.run.history))
    emit(io.dumps_json(result.report(name, include_css=not args.no_css)), args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    rho, spec, name = resolve_state(args.state, args)
    cls = parse_class(args.cls, spec)
    if args.css == REFERENCE_CSS:
        css = rho4_css_reference()
    else:
        css = io.load_state(args.css)[0].matrix
    if css.shape != rho.matrix.shape:
        raise InputError(f"css shape {css.shape} does not match state shape {rho.matrix.shape}")
    rep = witness_from_css(rho.matrix, css, cls, spec, args.restarts, args.seed, check_samples=args.check_samples)
    emit(io.dumps_json({"state": name, **rep.to_json()}), args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    res = estimate(io.read_history(args.history_csv))
    emit(io.dumps_json(res.to_json()), args.out)
    return EXIT_OK


def cmd_negativity(args) -> int:
    rho, spec, name = resolve_state(args.state, args)
    cuts = [Bipartition.parse(c, spec.group_labels) for c in args.cut] if args.cut else enumerate_bipartitions(spec)
    data = {"state": name, "grouping": spec.grouping.value, "per_cut": {c.label: negativity(rho, c, spec) for c in cuts}}
    if len(spec.groups) == 3:
        data["tripartite"] = tripartite_negativity(rho, spec).combined
    emit(io.dumps_json(data), args.out)
    return EXIT_OK


def cmd_g3pe(args) -> int:
    rho, spec, name = resolve_state(args.state, args)
    value = aggregate_g3pe(rho, spec, mode=args.mode)
    emit(io.dumps_json({"state": name, "mode": args.mode, "g3pe": value}), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    rows = sweep_theta(
        args.start,
        args.stop,
        args.steps,
        make_config(args),
        args.restarts,
        variant=args.variant or "orthonormal",
        check_samples=args.check_samples,
    )
    emit(sweep_csv(rows), args.out)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_script(args.out or "sweep.csv"))
    return EXIT_OK


def _fraction(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def cmd_protocols(args) -> int:
    out = {}
    for key, res in (("w_to_ghz", protocol_w_to_ghz()), ("ghz_to_w", protocol_ghz_to_w())):
        out[key] = {
            "prob": res.success_prob,
            "exact": _fraction(res.exact_prob),
            "fidelities": [b.fidelity for b in res.branches],
            "branches": [
                {"outcome": b.outcome, "prob": b.probability, "fidelity": b.fidelity, "correction": b.correction}
                for b in res.branches
            ],
        }
    emit(io.dumps_json(out), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmelab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="write a named state as JSON")
    p.add_argument("name", choices=STATE_NAMES + EXTRA_STATES)
    _state_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("gilbert", help="closest-separable-state run with witness and estimate")
    p.add_argument("state", help="state file or built-in state name")
    _state_args(p)
    _run_args(p)
    p.add_argument("--witness-class", nargs="+", help="class for lambda (default: the run class)")
    p.add_argument("--initial-css", help=f"state file or '{REFERENCE_CSS}' to start from")
    p.add_argument("--out", help="report JSON (default stdout)")
    p.add_argument("--history", help="history CSV path")
    p.add_argument("--no-css", action="store_true", help="omit the css matrix from the report")
    p.set_defaults(func=cmd_gilbert)

    p = sub.add_parser("witness", help="witness from a given css approximation")
    p.add_argument("state")
    _state_args(p)
    p.add_argument("--css", required=True, help=f"state file or '{REFERENCE_CSS}'")
    p.add_argument("--class", dest="cls", nargs="+", metavar="CLASS")
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-samples", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("estimate", help="distance estimate from a history CSV")
    p.add_argument("history_csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("negativity", help="partial-transpose negativities")
    p.add_argument("state")
    _state_args(p)
    p.add_argument("--cut", action="append", help="restrict to this cut (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_negativity)

    p = sub.add_parser("g3pe", help="three-particle aggregate negativity")
    p.add_argument("state")
    _state_args(p)
    p.add_argument("--mode", choices=["within", "cross"], default="within")
    p.add_argument("--out")
    p.set_defaults(func=cmd_g3pe)

    p = sub.add_parser("sweep", help="theta sweep of rho3 (CSV)")
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("--to", dest="stop", type=float, default=float(np.pi / 2))
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--variant", choices=["orthonormal", "printed"])
    _run_args(p)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--gnuplot", help="also write a gnuplot script here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("protocols", help="W <-> GHZ conversion checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_protocols)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
