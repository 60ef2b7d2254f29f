"""``capgen`` command line.

Exit status: 0 on success, 2 on usage errors (bad flags or an invalid
combination of them), 1 on runtime errors (I/O, malformed input).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import platform
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .capacity import validate_capacities
from .evaluation import (
    DEFAULT_BINS,
    MIN_SYMMETRY_SAMPLES,
    Metric,
    bench,
    empirical_centroid,
    exact_centroid,
    kl_by_cardinality,
    kl_table,
    symmetry_report,
)
from .exact import MAX_COUNT_N, MAX_TABLE_N, count_extensions
from .generators import GENERATORS, check_method, generate_batch
from .io import dump_report, read_capacities, write_csv, write_jsonl
from .lattice import LatticeError, full_mask, parse_subset
from .rng import DEFAULT_SEED
from .structure import analyze, full_top_view
from .twolayer import TwoLayerView

CHUNK = 1000


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit nonnegative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="capgen", description="Random generation of capacities (fuzzy measures).")
    p.add_argument("--version", action="version", version=f"capgen {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_required=True):
        sp.add_argument("--n", type=_positive, required=n_required, help="size of the ground set")
        sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
        sp.add_argument("--out", default="-", help="output path (default: stdout)")

    g = sub.add_parser("generate", help="write random capacities")
    common(g)
    g.add_argument("--method", default="twolayer", choices=sorted(GENERATORS))
    g.add_argument("--count", type=_positive, default=1)
    g.add_argument("--markov-steps", type=_positive, default=None, help="chain length (default (2**n-2)**3)")
    g.add_argument("--format", default="csv", choices=["csv", "jsonl"])

    e = sub.add_parser("eval", help="score a capacity file against the uniform distribution")
    e.add_argument("input", help="CSV or JSONL capacity file")
    e.add_argument("--n", type=_positive, default=None, help="expected ground set size")
    e.add_argument("--bins", type=_positive, default=DEFAULT_BINS)
    e.add_argument("--threshold", type=float, default=0.02, help="KS threshold for the symmetry checks")
    e.add_argument("--out", default="-")
    e.add_argument("--format", default="json-report", choices=["json-report"])

    c = sub.add_parser("count", help="exact number of linear extensions of the subset lattice")
    c.add_argument("--n", type=_positive, required=True)

    b = sub.add_parser("bench", help="time the generators")
    common(b)
    b.add_argument("--method", default="twolayer,markov", help="comma-separated generator names")
    b.add_argument("--count", type=_positive, default=10000)
    b.add_argument("--markov-steps", type=_positive, default=None)
    b.add_argument("--format", default="table", choices=["table", "json-report"])

    a = sub.add_parser("analyze-structure", help="profiles, flags and class of a two-layer view")
    a.add_argument("--n", type=_positive, required=True)
    a.add_argument("--upper", default=None, help="upper layer, e.g. 123,124 (default: all (n-1)-sets)")
    a.add_argument("--lower", default=None, help="lower layer, e.g. 23,24 (default: all (n-2)-sets)")
    a.add_argument("--out", default="-")
    a.add_argument("--format", default="json-report", choices=["json-report"])
    return p


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def cmd_generate(args) -> int:
    try:
        check_method(args.method, args.n)
    except (KeyError, ValueError, LookupError, RuntimeError) as e:
        raise UsageError(str(e)) from None
    with _open_out(args.out) as fh:
        for start in range(0, args.count, CHUNK):
            m = min(CHUNK, args.count - start)
            values = generate_batch(args.method, args.n, m, args.seed, args.markov_steps, start=start)
            if args.format == "csv":
                write_csv(fh, values, header=start == 0)
            else:
                write_jsonl(fh, values, args.n, args.seed, start=start)
    return 0


def eval_report(values: np.ndarray, n: int, bins: int = DEFAULT_BINS, threshold: float = 0.02) -> dict:
    """Everything ``capgen eval`` reports, as a JSON-ready dict."""
    ok = validate_capacities(values, n)
    report: dict = {
        "n": n,
        "sample_count": int(values.shape[0]),
        "invalid_count": int((~ok).sum()),
        "config": {"bins": bins, "threshold": threshold},
    }
    if n <= MAX_TABLE_N:
        ref = exact_centroid(n)
        emp = empirical_centroid(values, ref)
        report["centroid"] = {
            "reference": "exact",
            "coordinates": emp.to_dict()["coordinates"],
            "exact": ref.to_dict()["coordinates"],
            "squared_error": emp.squared_error,
        }
        table = kl_table(values, bins)
        report["kl"] = {
            "per_subset": [Metric("kl_exact_vs_sample", s, v).to_dict() for s, v in table.items()],
            "mean_by_cardinality": {str(c): v for c, v in kl_by_cardinality(table).items()},
        }
    else:
        report["centroid"] = {"reference": None, "coordinates": empirical_centroid(values).to_dict()["coordinates"]}
    if values.shape[0] >= MIN_SYMMETRY_SAMPLES:
        sym = symmetry_report(values, threshold)
        report["symmetry"] = {
            "max_distance": sym.max_distance,
            "pass": sym.passed,
            "metrics": [m.to_dict() for m in sym.metrics()],
        }
    else:
        report["symmetry"] = {"skipped": f"needs at least {MIN_SYMMETRY_SAMPLES} samples"}
    return report


def cmd_eval(args) -> int:
    _require(args.bins >= 2, "--bins must be at least 2")
    values, n = read_capacities(args.input)
    if args.n is not None and args.n != n:
        raise ValueError(f"file holds capacities for n={n}, expected n={args.n}")
    report = eval_report(values, n, args.bins, args.threshold)
    report["config"]["input"] = args.input
    with _open_out(args.out) as fh:
        dump_report(fh, report)
    return 0


def cmd_count(args) -> int:
    _require(args.n <= MAX_COUNT_N, f"exact counts are available for n <= {MAX_COUNT_N}")
    print(count_extensions(args.n))
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    _require(bool(methods), "no methods given")
    for m in methods:
        try:
            check_method(m, args.n)
        except (KeyError, ValueError, LookupError, RuntimeError) as e:
            raise UsageError(str(e)) from None
    rows = bench(methods, args.n, args.count, seed=args.seed, markov_steps=args.markov_steps)
    machine = f"{platform.python_implementation()} {platform.python_version()} on {platform.machine()} {platform.system()}"
    report = {
        "machine": machine,
        "date": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "seed": args.seed,
        "markov_steps": args.markov_steps,
        "rows": [r.to_dict() for r in rows],
    }
    with _open_out(args.out) as fh:
        if args.format == "json-report":
            dump_report(fh, report)
        else:
            fh.write(f"# {machine}\n")
            fh.write(f"{'method':<12}{'n':>3}{'count':>8}{'wall [s]':>12}{'per sample [us]':>18}\n")
            for r in rows:
                fh.write(f"{r.method:<12}{r.n:>3}{r.count:>8}{r.wall_seconds:>12.3f}{r.per_sample_seconds * 1e6:>18.1f}\n")
            fh.write(json.dumps(report) + "\n")
    return 0


def _parse_layer(text: str, n: int) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            s = parse_subset(tok)
            if not 0 < s < full_mask(n):
                raise UsageError(f"{tok} is not a nonempty proper subset of 1..{n}")
            out.append(s)
    return out


def cmd_analyze(args) -> int:
    try:
        if args.upper is None and args.lower is None:
            _require(args.n >= 2, "the default view needs n >= 2")
            view = full_top_view(args.n, args.n - 1)
        else:
            _require(args.upper is not None, "--upper is required with --lower")
            upper = _parse_layer(args.upper, args.n)
            lower = _parse_layer(args.lower or "", args.n)
            _require(bool(upper), "upper layer is empty")
            view = TwoLayerView(args.n, upper, lower)
    except LatticeError as e:
        raise UsageError(str(e)) from None
    report = analyze(view)
    report["n"] = args.n
    with _open_out(args.out) as fh:
        dump_report(fh, report)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "eval": cmd_eval,
    "count": cmd_count,
    "bench": cmd_bench,
    "analyze-structure": cmd_analyze,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"capgen {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, LookupError) as e:
        print(f"capgen {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
