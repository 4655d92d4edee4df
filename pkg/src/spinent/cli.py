"""Command-line interface: sweeps, Haar baselines, nearest-W, selftest.

Exit codes: 0 success, 1 runtime failure (e.g. exclusion threshold
exceeded), 2 usage error.  All randomness flows from --seed; there is no
entropy fallback.  Identical invocations produce byte-identical output
files for any --threads value.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, montecarlo, selftest
from .model import KIND_LABELS, InteractionKind
from .montecarlo import SweepConfig

THREE_QUBIT_KINDS = tuple(k.value for k in InteractionKind if k.n_qubits == 3)


def parse_sigma_grid(text: str) -> tuple[float, ...]:
    """Grid grammar: "lo:hi:log|lin:points", a single value, or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError("expected lo:hi:log|lin:points")
        lo, hi = float(parts[0]), float(parts[1])
        scale = parts[2]
        points = int(parts[3])
        if points < 2:
            raise ValueError("a sigma range needs at least 2 points")
        if not (hi > lo):
            raise ValueError("sigma range needs hi > lo")
        if scale == "log":
            if lo <= 0:
                raise ValueError("log grid needs lo > 0")
            return tuple(float(s) for s in np.geomspace(lo, hi, points))
        if scale == "lin":
            return tuple(float(s) for s in np.linspace(lo, hi, points))
        raise ValueError(f"unknown scale {scale!r}, expected log or lin")
    values = tuple(float(s) for s in text.split(","))
    if any(v < 0 for v in values):
        raise ValueError("sigma values must be >= 0")
    return values


def _add_common(parser: argparse.ArgumentParser, with_threads: bool = True) -> None:
    parser.add_argument("--samples", type=int, default=50_000, help="samples per grid point")
    parser.add_argument("--seed", type=int, required=True, help="master seed (required)")
    if with_threads:
        parser.add_argument("--threads", type=int, default=0, help="worker hint (0 = auto)")
    parser.add_argument("--out", required=True, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinent",
        description="Ground-state entanglement statistics of randomly interacting qubits",
    )
    parser.add_argument("--version", action="version", version=f"spinent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep over sigma", **fmt)
    p_sweep.add_argument("--kind", required=True, choices=KIND_LABELS)
    p_sweep.add_argument(
        "--quantity",
        required=True,
        help="comma list, e.g. concurrence | tangle,total_concurrence,c13",
    )
    p_sweep.add_argument(
        "--sigma", required=True, help="grid lo:hi:log|lin:points, value, or comma list"
    )
    _add_common(p_sweep)

    p_haar = sub.add_parser("haar-ref", help="Haar-random baseline statistics", **fmt)
    p_haar.add_argument("--qubits", type=int, required=True, choices=(2, 3))
    _add_common(p_haar, with_threads=False)

    p_nw = sub.add_parser("nearest-w", help="nearest zero-tangle overlap experiment", **fmt)
    p_nw.add_argument("--kind", required=True, choices=THREE_QUBIT_KINDS)
    p_nw.add_argument("--sigma", type=float, required=True)
    _add_common(p_nw)
    p_nw.add_argument(
        "--summary-out",
        default=None,
        help="summary CSV path (default: <out> with _summary suffix)",
    )

    sub.add_parser("selftest", help="run the fast invariant suite")
    return parser


def _echo_config(args: argparse.Namespace) -> None:
    items = ", ".join(f"{k}={v}" for k, v in sorted(vars(args).items()) if k != "command")
    print(f"[spinent] {args.command}: {items}", file=sys.stderr)


def _progress(index: int, total: int, sigma: float, rows) -> None:
    head = rows[0]
    print(
        f"[spinent] sigma={sigma:g} ({index + 1}/{total}) "
        f"{head.quantity} mean={head.mean:.6g} n={head.n_samples}",
        file=sys.stderr,
    )


def _cmd_sweep(args, parser: argparse.ArgumentParser) -> int:
    kind = InteractionKind.from_label(args.kind)
    try:
        grid = parse_sigma_grid(args.sigma)
    except ValueError as exc:
        parser.error(f"--sigma: {exc}")
    if args.samples < 1:
        parser.error("--samples must be >= 1")
    if args.seed < 0:
        parser.error("--seed must be a non-negative 64-bit integer")
    quantities = tuple(q.strip() for q in args.quantity.split(",") if q.strip())
    try:
        config = SweepConfig(
            kind=kind,
            sigma_grid=grid,
            n_samples=args.samples,
            master_seed=args.seed,
            quantities=quantities,
            worker_count_hint=args.threads,
        )
    except ValueError as exc:
        parser.error(f"--quantity/--sigma: {exc}")
    _echo_config(args)
    try:
        result = montecarlo.run_sweep(config, progress=_progress)
    except montecarlo.SweepAbort as exc:
        print(f"[spinent] aborted: {exc}", file=sys.stderr)
        return 1
    montecarlo.write_csv(result, args.out)
    return 0


def _cmd_haar_ref(args, parser: argparse.ArgumentParser) -> int:
    if args.samples < 1:
        parser.error("--samples must be >= 1")
    if args.seed < 0:
        parser.error("--seed must be a non-negative 64-bit integer")
    _echo_config(args)
    result = montecarlo.haar_reference(args.qubits, args.samples, args.seed)
    montecarlo.write_csv(result, args.out)
    return 0


def _cmd_nearest_w(args, parser: argparse.ArgumentParser) -> int:
    kind = InteractionKind.from_label(args.kind)
    if args.samples < 1:
        parser.error("--samples must be >= 1")
    if args.seed < 0:
        parser.error("--seed must be a non-negative 64-bit integer")
    if not args.sigma > 0:
        parser.error("--sigma must be > 0")
    _echo_config(args)
    try:
        exp = montecarlo.run_nearest_w(
            kind,
            args.sigma,
            args.samples,
            args.seed,
            worker_count_hint=args.threads,
        )
    except montecarlo.SweepAbort as exc:
        print(f"[spinent] aborted: {exc}", file=sys.stderr)
        return 1
    montecarlo.write_histogram_csv(montecarlo.overlap_histogram(exp.overlaps), args.out)
    summary_path = args.summary_out
    if summary_path is None:
        stem, dot, ext = args.out.rpartition(".")
        summary_path = f"{stem}_summary.{ext}" if dot else f"{args.out}_summary"
    montecarlo.write_nearest_w_summary(exp, summary_path)
    print(
        f"[spinent] nearest-w: p>0.98 fraction {exp.fraction_high_overlap:.4f}, "
        f"tau<min two-tangle fraction {exp.fraction_tau_below:.4f}, "
        f"nonconverged {exp.nonconverged_count}, degenerate {exp.degenerate_count}",
        file=sys.stderr,
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args, parser)
    if args.command == "haar-ref":
        return _cmd_haar_ref(args, parser)
    if args.command == "nearest-w":
        return _cmd_nearest_w(args, parser)
    if args.command == "selftest":
        return 0 if selftest.run_selftest() else 1
    parser.error(f"unknown command {args.command!r}")  # pragma: no cover
    return 2


if __name__ == "__main__":
    sys.exit(main())
