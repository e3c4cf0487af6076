"""Command-line entry point: analyze, pstar, sweep, detect, sample, fit.

Exit codes: 0 success, 1 runtime error (one-line diagnostic on stderr),
2 usage error (argparse usage text on stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Sequence

from .cone import (Regime, Verdict, active_facets, classify_regime, cone_dimension, facet_hyperplanes,
                   incidence_matrix)
from .cyclecover import format_edge_list, has_cycle_cover, parse_edge_list
from .experiments import (DEFAULT_TRIALS, SweepConfig, fit_record, rate_report, read_sweep_csv,
                          run_sweep, write_outputs)
from .graphon import (GraphonFormatError, StepGraphon, concentration_vector, format_rational,
                      load_graphon, skeleton_graph)
from .rng import RngStream, derive_trial_seed
from .stochastic import DEFAULT_PSTAR_SAMPLES, default_workers, estimate_p_star, graphon_label, sample_graph

MAX_SEED = 2**64 - 1


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonnegative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


def _seed(text: str) -> int:
    v = _nonnegative(text)
    if v > MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


_RANGE = re.compile(r"^(\d+)\.\.(\d+)(?::(\d+))?$")


def parse_n_list(text: str) -> tuple[int, ...]:
    """``a,b,c`` or ``a..b:step`` (inclusive; step defaults to 1)."""
    m = _RANGE.match(text.strip())
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        step = int(m.group(3)) if m.group(3) else 1
        if step < 1 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        values = tuple(range(lo, hi + 1, step))
    else:
        try:
            values = tuple(int(p) for p in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad n-list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"n-list entries must be positive: {text!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"n-list must be strictly increasing: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphon-cycles",
                                     description="Cycle covers of graphs sampled from step-graphons.")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress per-n progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def graphon_arg(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("--graphon", required=required, help="catalog name (fig1, a..k) or graphon JSON path")

    def seed_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=_seed, default=42, help="master seed (u64)")

    def threads_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--threads", type=_positive, default=None, help="worker processes (default: available cores)")

    p = sub.add_parser("analyze", help="regime report and facets as JSON")
    graphon_arg(p)

    p = sub.add_parser("pstar", help="Monte-Carlo estimate of p*")
    graphon_arg(p)
    p.add_argument("--samples", type=_positive, default=DEFAULT_PSTAR_SAMPLES)
    seed_arg(p)
    threads_arg(p)

    p = sub.add_parser("sweep", help="empirical cycle-cover probabilities over n, with a rate fit")
    graphon_arg(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n-list", type=parse_n_list)
    group.add_argument("--n", type=_positive)
    p.add_argument("--trials", type=_positive, default=DEFAULT_TRIALS)
    p.add_argument("--samples", type=_positive, default=DEFAULT_PSTAR_SAMPLES,
                   help="p* samples when the regime needs one")
    seed_arg(p)
    threads_arg(p)
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("detect", help="cycle-cover verdict for an edge-list file")
    p.add_argument("file", help="edge-list path, or - for stdin")
    p.add_argument("--witness", action="store_true", help="print the cycles of a cover")

    p = sub.add_parser("sample", help="edge list of one sampled graph")
    graphon_arg(p)
    p.add_argument("--n", type=_nonnegative, required=True)
    seed_arg(p)

    p = sub.add_parser("fit", help="rate fits from a sweep CSV")
    p.add_argument("csv", type=Path)
    graphon_arg(p, required=False)
    p.add_argument("--samples", type=_positive, default=DEFAULT_PSTAR_SAMPLES)
    seed_arg(p)
    threads_arg(p)
    return parser


def parse_command(argv: Sequence[str]) -> argparse.Namespace:
    """Parse argv; usage errors raise SystemExit(2) after printing usage."""
    return build_parser().parse_args(list(argv))


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def analyze_report(w: StepGraphon) -> dict:
    s = skeleton_graph(w)
    xstar = concentration_vector(w)
    report = classify_regime(w)
    z = incidence_matrix(s)
    member = report.membership
    facets = None
    if s.q >= 2:
        fs = facet_hyperplanes(z)
        active = None
        if member.verdict is not Verdict.OUTSIDE:
            active = list(active_facets(fs, xstar).active)
        facets = {"normals": [[str(v) for v in nv] for nv in fs.normals], "active": active}
    return {
        "graphon": w.name,
        "q": w.q,
        "x_star": [format_rational(v) for v in xstar],
        "skeleton_edges": [list(e) for e in s.sorted_edges],
        "cone_dimension": cone_dimension(z),
        "condA": report.condA,
        "condBprime": report.condBprime,
        "condB": report.condB,
        "regime": report.regime.value,
        "predicted_rate": report.predicted_rate.value,
        "membership": {
            "verdict": member.verdict.value,
            "coefficients": None if member.coefficients is None
            else [format_rational(c) for c in member.coefficients],
            "separator": None if member.separator is None else [str(v) for v in member.separator],
        },
        "facets": facets,
    }


def _pstar_for(w: StepGraphon, args: argparse.Namespace):
    if classify_regime(w).regime is not Regime.ITEM4:
        return None
    return estimate_p_star(w, args.samples, args.seed, args.threads)


def _summary(graphon: str, fit) -> str:
    return (f"{graphon} {fit.coordinates.value}: slope={fit.slope:.6g} intercept={fit.intercept:.6g} "
            f"points={fit.points_used} residual_rms={fit.residual_rms:.3g}")


def execute(args: argparse.Namespace) -> int:
    if getattr(args, "threads", 1) is None:
        args.threads = default_workers()
    cmd = args.command

    if cmd == "analyze":
        _dump(analyze_report(load_graphon(args.graphon)))

    elif cmd == "pstar":
        w = load_graphon(args.graphon)
        est = estimate_p_star(w, args.samples, args.seed, args.threads)
        _dump({"graphon": w.name, "regime": classify_regime(w).regime.value,
               "p_star_mean": est.mean, "stderr": est.stderr, "samples": est.samples, "seed": args.seed})

    elif cmd == "sweep":
        w = load_graphon(args.graphon)
        n_list = args.n_list if args.n_list is not None else (args.n,)
        config = SweepConfig(w.name, n_list, args.trials, args.seed, args.threads, None)
        result = run_sweep(config, w)
        fits = []
        try:
            fits.append((w.name, rate_report(w, result, _pstar_for(w, args)).fit))
        except ValueError as exc:
            print(f"fit skipped: {exc}", file=sys.stderr)
        write_outputs([result], fits, args.out)
        for name, fit in fits:
            print(_summary(name, fit))

    elif cmd == "detect":
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
        g = parse_edge_list(text)
        verdict = has_cycle_cover(g, witness=args.witness)
        print(f"cycle cover: {'yes' if verdict.exists else 'no'}")
        print(f"method: {verdict.method.value}")
        if verdict.witness:
            for cyc in verdict.witness:
                print("cycle: " + " ".join(map(str, cyc)))

    elif cmd == "sample":
        w = load_graphon(args.graphon)
        # same stream as trial 0 of a sweep at this n
        rng = RngStream(derive_trial_seed(args.seed, [graphon_label(w), args.n, 0]))
        sys.stdout.write(format_edge_list(sample_graph(w, args.n, rng)))

    elif cmd == "fit":
        records = []
        for sweep in read_sweep_csv(args.csv.read_text(encoding="utf-8")):
            w = load_graphon(args.graphon if args.graphon else sweep.graphon)
            records.append(fit_record(sweep.graphon, rate_report(w, sweep, _pstar_for(w, args)).fit))
        _dump(records)
    return 0


def _configure_logging(quiet: bool) -> None:
    logger = logging.getLogger("graphon_cycles")
    for h in list(logger.handlers):
        logger.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.WARNING if quiet else logging.INFO)
    logger.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_command(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.quiet)
    try:
        return execute(args)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
    except (ValueError, OSError, GraphonFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1
