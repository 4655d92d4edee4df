"""Deterministic Monte Carlo sweep engine with CSV persistence.

Reproducibility
---------------
Sample k of grid point s draws all of its randomness from the stream
``derive_stream(master_seed, (s << 32) | k)``, so adding grid points or
changing the worker count never perturbs other samples.  Work is split
into fixed-size chunks regardless of the worker count; per-sample values
are stored by sample index and reduced afterwards through a fixed binary
merge tree over fixed-size blocks.  The resulting CSV is byte-identical
for any number of workers.

Excluded samples are never imputed: ground states whose spectral gap is
below the degeneracy threshold, and optimizer non-convergences for the
nearest-W overlap, are counted in dedicated columns and left out of the
statistics.  A sweep aborts if exclusions exceed 0.1% of samples.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entanglement import THREE_QUBIT_QUANTITIES, evaluate_quantities
from .linalg import DEGENERACY_GAP
from .model import InteractionKind, ModelSpec, build_hamiltonian_batch
from .nearest_w import DEFAULT_CONFIG, OptimizerConfig, nearest_zero_tangle_batch
from .rmt import BankSlice, StreamBank, derive_stream, sample_haar_batch

CHUNK_SIZE = 4096  # samples per work unit (fixed: not tied to workers)
# The batched optimizer amortizes its per-iteration overhead over rows,
# so nearest-W work units are larger.
NEAREST_W_CHUNK_SIZE = 8192
BLOCK_SIZE = 1024  # leaf size of the reduction tree
MAX_EXCLUDED_FRACTION = 1e-3

TWO_QUBIT_QUANTITIES = ("concurrence",)

CSV_HEADER = (
    "kind,quantity,sigma,n_samples,mean,std,stderr,"
    "master_seed,degenerate_count,nonconverged_count"
)
HISTOGRAM_HEADER = "bin_low,bin_high,count"
HISTOGRAM_BINS = np.linspace(0.9, 1.0, 51)
SUMMARY_HEADER = (
    "kind,sigma,n_samples,fraction_overlap_gt_0.98,"
    "fraction_tau_lt_min_two_tangle,nonconverged_count,degenerate_count,master_seed"
)


class SweepAbort(RuntimeError):
    """Too many samples were excluded; results would be untrustworthy."""


class CsvFormatError(ValueError):
    """A persisted results file does not match the expected format."""


# ---------------------------------------------------------------------------
# running statistics
# ---------------------------------------------------------------------------


@dataclass
class Accumulator:
    """Single-pass mean/variance accumulator (Welford, Chan merge)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "Accumulator":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(np.mean(values))
        m2 = float(np.sum((values - mean) ** 2))
        return cls(int(values.size), mean, m2)

    @property
    def std(self) -> float:
        """Population standard deviation sqrt(<x^2> - <x>^2)."""
        if self.count == 0:
            return 0.0
        return math.sqrt(max(self.m2 / self.count, 0.0))

    @property
    def stderr(self) -> float:
        if self.count == 0:
            return 0.0
        return self.std / math.sqrt(self.count)


def merge(a: Accumulator, b: Accumulator) -> Accumulator:
    """Exact parallel merge; order-independent up to roundoff."""
    if a.count == 0:
        return Accumulator(b.count, b.mean, b.m2)
    if b.count == 0:
        return Accumulator(a.count, a.mean, a.m2)
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / count)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / count)
    return Accumulator(count, mean, m2)


def _reduce_tree(values: np.ndarray, keep: np.ndarray) -> Accumulator:
    """Blockwise accumulation merged in a fixed binary tree by block index."""
    n = values.shape[0]
    leaves = [
        Accumulator.from_values(values[lo : lo + BLOCK_SIZE][keep[lo : lo + BLOCK_SIZE]])
        for lo in range(0, n, BLOCK_SIZE)
    ]
    if not leaves:
        return Accumulator()
    while len(leaves) > 1:
        nxt = [
            merge(leaves[i], leaves[i + 1]) if i + 1 < len(leaves) else leaves[i]
            for i in range(0, len(leaves), 2)
        ]
        leaves = nxt
    return leaves[0]


# ---------------------------------------------------------------------------
# sweep configuration and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    kind: InteractionKind
    sigma_grid: tuple[float, ...]
    n_samples: int
    master_seed: int
    quantities: tuple[str, ...]
    worker_count_hint: int = 0
    optimizer: OptimizerConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if not self.sigma_grid:
            raise ValueError("sigma_grid must not be empty")
        for s in self.sigma_grid:
            if not (s >= 0.0 and np.isfinite(s)):
                raise ValueError(f"sigma values must be >= 0 and finite, got {s}")
        if not 1 <= self.n_samples < 2**32:
            raise ValueError("n_samples must be in [1, 2^32)")
        if len(self.sigma_grid) >= 2**31:
            raise ValueError("sigma grid too large")
        if not self.quantities:
            raise ValueError("quantities must not be empty")
        if len(set(self.quantities)) != len(self.quantities):
            raise ValueError("duplicate quantities")
        allowed = (
            TWO_QUBIT_QUANTITIES
            if self.kind.n_qubits == 2
            else THREE_QUBIT_QUANTITIES + ("nearest_w_overlap",)
        )
        for q in self.quantities:
            if q not in allowed:
                raise ValueError(
                    f"quantity {q!r} is not valid for kind {self.kind.label!r}"
                )


@dataclass(frozen=True)
class SweepRow:
    kind: str
    quantity: str
    sigma: float
    n_samples: int
    mean: float
    std: float
    stderr: float
    master_seed: int
    degenerate_count: int
    nonconverged_count: int


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def select(self, kind: str | None = None, quantity: str | None = None):
        return [
            r
            for r in self.rows
            if (kind is None or r.kind == kind)
            and (quantity is None or r.quantity == quantity)
        ]


def _resolve_workers(hint: int) -> int:
    if hint and hint > 0:
        return hint
    return min(8, os.cpu_count() or 1)


def _phase_fix_batch(states: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(states), axis=1)
    piv = states[np.arange(states.shape[0]), idx]
    return states * (piv.conj() / np.abs(piv))[:, None]


def _eigh_with_failures(hams: np.ndarray):
    """Batched eigh; solver failures become per-sample exclusions.

    Returns (w, u, failed) where failed rows carry placeholder values.
    """
    n, d = hams.shape[0], hams.shape[1]
    failed = np.zeros(n, dtype=bool)
    try:
        w, u = np.linalg.eigh(hams)
        return w, u, failed
    except np.linalg.LinAlgError:
        pass
    w = np.zeros((n, d))
    u = np.zeros((n, d, d), dtype=complex)
    u[:, np.arange(d), np.arange(d)] = 1.0  # placeholder basis vectors
    for i in range(n):
        try:
            w[i], u[i] = np.linalg.eigh(hams[i])
        except np.linalg.LinAlgError:
            failed[i] = True
    return w, u, failed


def _point_chunk(config: SweepConfig, sigma: float, sigma_index: int, lo: int, hi: int):
    """Values and exclusion flags for samples [lo, hi) of one grid point."""
    spec = ModelSpec(config.kind, sigma)
    indices = [(sigma_index << 32) | k for k in range(lo, hi)]
    if "nearest_w_overlap" in config.quantities:
        # The optimizer continues drawing (random starts) from each
        # sample's stream, so real stream objects are needed here.
        streams = [derive_stream(config.master_seed, i) for i in indices]
    else:
        streams = BankSlice(StreamBank(config.master_seed), indices)
    hams = build_hamiltonian_batch(spec, streams)
    w, u, failed = _eigh_with_failures(hams)
    degenerate = ((w[:, 1] - w[:, 0]) < DEGENERACY_GAP) & ~failed
    states = _phase_fix_batch(np.ascontiguousarray(u[:, :, 0]))
    plain = [q for q in config.quantities if q != "nearest_w_overlap"]
    values = evaluate_quantities(states, plain)
    opt_nonconv = np.zeros(hi - lo, dtype=bool)
    if "nearest_w_overlap" in config.quantities:
        _, overlap, _, _, conv = nearest_zero_tangle_batch(
            states, streams, config.optimizer
        )
        values["nearest_w_overlap"] = overlap
        opt_nonconv = ~conv
    return lo, values, degenerate, failed, opt_nonconv


def _sweep_point(config: SweepConfig, sigma: float, sigma_index: int, pool) -> list[SweepRow]:
    n = config.n_samples
    values = {q: np.empty(n) for q in config.quantities}
    degenerate = np.zeros(n, dtype=bool)
    eig_failed = np.zeros(n, dtype=bool)
    opt_nonconv = np.zeros(n, dtype=bool)
    spans = [(lo, min(lo + CHUNK_SIZE, n)) for lo in range(0, n, CHUNK_SIZE)]
    futures = [
        pool.submit(_point_chunk, config, sigma, sigma_index, lo, hi) for lo, hi in spans
    ]
    for fut in futures:
        lo, vals, deg, failed, nonconv = fut.result()
        hi = lo + deg.shape[0]
        degenerate[lo:hi] = deg
        eig_failed[lo:hi] = failed
        opt_nonconv[lo:hi] = nonconv
        for q in config.quantities:
            values[q][lo:hi] = vals[q]

    n_deg = int(degenerate.sum())
    n_failed = int(eig_failed.sum())
    n_opt = int((opt_nonconv & ~degenerate & ~eig_failed).sum())
    if n_deg + n_failed + n_opt > MAX_EXCLUDED_FRACTION * n:
        raise SweepAbort(
            f"{n_deg} degenerate + {n_failed + n_opt} non-converged samples out of {n} "
            f"at sigma={sigma} exceed the {MAX_EXCLUDED_FRACTION:.1%} threshold"
        )

    rows = []
    for q in config.quantities:
        keep = ~degenerate & ~eig_failed
        nonconv_count = n_failed
        if q == "nearest_w_overlap":
            keep = keep & ~opt_nonconv
            nonconv_count = n_failed + n_opt
        acc = _reduce_tree(values[q], keep)
        rows.append(
            SweepRow(
                kind=config.kind.label,
                quantity=q,
                sigma=float(sigma),
                n_samples=acc.count,
                mean=acc.mean,
                std=acc.std,
                stderr=acc.stderr,
                master_seed=config.master_seed,
                degenerate_count=n_deg,
                nonconverged_count=nonconv_count,
            )
        )
    return rows


def run_sweep(config: SweepConfig, progress=None) -> SweepResult:
    """Full sweep over the sigma grid; deterministic for a fixed config."""
    rows: list[SweepRow] = []
    workers = _resolve_workers(config.worker_count_hint)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for s_idx, sigma in enumerate(config.sigma_grid):
            point_rows = _sweep_point(config, sigma, s_idx, pool)
            rows.extend(point_rows)
            if progress is not None:
                progress(s_idx, len(config.sigma_grid), sigma, point_rows)
    return SweepResult(rows)


# ---------------------------------------------------------------------------
# Haar baselines
# ---------------------------------------------------------------------------


def haar_reference(n_qubits: int, n_samples: int, master_seed: int) -> SweepResult:
    """Reference statistics over Haar-random states (kind column: "haar")."""
    if n_qubits not in (2, 3):
        raise ValueError(f"n_qubits must be 2 or 3, got {n_qubits}")
    if not 1 <= n_samples < 2**32:
        raise ValueError("n_samples must be in [1, 2^32)")
    rng = derive_stream(master_seed, 0)
    states = sample_haar_batch(2**n_qubits, rng, n_samples)
    quantities = ("concurrence",) if n_qubits == 2 else ("tangle", "total_concurrence")
    values = evaluate_quantities(states, quantities)
    keep = np.ones(n_samples, dtype=bool)
    rows = []
    for q in quantities:
        acc = _reduce_tree(values[q], keep)
        rows.append(
            SweepRow(
                kind="haar",
                quantity=q,
                sigma=0.0,
                n_samples=acc.count,
                mean=acc.mean,
                std=acc.std,
                stderr=acc.stderr,
                master_seed=master_seed,
                degenerate_count=0,
                nonconverged_count=0,
            )
        )
    return SweepResult(rows)


# ---------------------------------------------------------------------------
# nearest-W experiment
# ---------------------------------------------------------------------------


@dataclass
class NearestWExperiment:
    kind: str
    sigma: float
    master_seed: int
    n_samples: int
    overlaps: np.ndarray  # per retained converged sample (else nan)
    converged: np.ndarray
    degenerate: np.ndarray
    tau_below_min_pair: np.ndarray
    fraction_high_overlap: float  # p > 0.98, over retained samples
    fraction_tau_below: float  # tau < min pair two-tangle, over converged
    nonconverged_count: int
    degenerate_count: int


def _nearest_w_chunk(
    kind: InteractionKind, sigma: float, seed: int, lo: int, hi: int, opt: OptimizerConfig
):
    spec = ModelSpec(kind, sigma)
    streams = [derive_stream(seed, k) for k in range(lo, hi)]
    hams = build_hamiltonian_batch(spec, streams)
    w, u = np.linalg.eigh(hams)
    degenerate = (w[:, 1] - w[:, 0]) < DEGENERACY_GAP
    states = _phase_fix_batch(np.ascontiguousarray(u[:, :, 0]))
    phi, overlap, tau_res, _, conv = nearest_zero_tangle_batch(states, streams, opt)
    # The tau-vs-two-tangle comparison characterizes the nearest states:
    # a W-class phi_N has all pair concurrences well above sqrt(tau).
    pairs = evaluate_quantities(phi, ("c12", "c13", "c23"))
    min_two_tangle = np.minimum(
        np.minimum(pairs["c12"] ** 2, pairs["c13"] ** 2), pairs["c23"] ** 2
    )
    tau_below = tau_res < min_two_tangle
    return lo, overlap, conv, degenerate, tau_below


def run_nearest_w(
    kind: InteractionKind,
    sigma: float,
    n_samples: int,
    master_seed: int,
    optimizer: OptimizerConfig = DEFAULT_CONFIG,
    worker_count_hint: int = 0,
) -> NearestWExperiment:
    """Ground states of one (kind, sigma) point and their nearest-W overlaps.

    The tau-vs-two-tangle fraction counts converged samples whose
    nearest state satisfies tau(phi_N) < min{C12^2, C13^2, C23^2}(phi_N),
    i.e. whose nearest zero-tangle state is genuinely W-class rather
    than close to biseparable.
    """
    if kind.n_qubits != 3:
        raise ValueError("nearest-W experiment requires a three-qubit kind")
    if not (sigma > 0.0 and np.isfinite(sigma)):
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 1 <= n_samples < 2**32:
        raise ValueError("n_samples must be in [1, 2^32)")
    overlaps = np.empty(n_samples)
    converged = np.zeros(n_samples, dtype=bool)
    degenerate = np.zeros(n_samples, dtype=bool)
    tau_below = np.zeros(n_samples, dtype=bool)
    spans = [
        (lo, min(lo + NEAREST_W_CHUNK_SIZE, n_samples))
        for lo in range(0, n_samples, NEAREST_W_CHUNK_SIZE)
    ]
    with ThreadPoolExecutor(max_workers=_resolve_workers(worker_count_hint)) as pool:
        futures = [
            pool.submit(_nearest_w_chunk, kind, sigma, master_seed, lo, hi, optimizer)
            for lo, hi in spans
        ]
        for fut in futures:
            lo, ov, conv, deg, below = fut.result()
            hi = lo + ov.shape[0]
            overlaps[lo:hi] = ov
            converged[lo:hi] = conv
            degenerate[lo:hi] = deg
            tau_below[lo:hi] = below

    retained = ~degenerate
    ok = retained & converged
    n_retained = int(retained.sum())
    n_conv = int(ok.sum())
    n_deg = int(degenerate.sum())
    n_nonconv = n_retained - n_conv
    overlaps = np.where(ok, overlaps, np.nan)
    frac_high = float((ok & (overlaps > 0.98)).sum() / n_retained) if n_retained else 0.0
    frac_below = float((ok & tau_below).sum() / n_conv) if n_conv else 0.0
    return NearestWExperiment(
        kind=kind.label,
        sigma=float(sigma),
        master_seed=master_seed,
        n_samples=n_samples,
        overlaps=overlaps,
        converged=converged,
        degenerate=degenerate,
        tau_below_min_pair=tau_below,
        fraction_high_overlap=frac_high,
        fraction_tau_below=frac_below,
        nonconverged_count=n_nonconv,
        degenerate_count=n_deg,
    )


def overlap_histogram(overlaps: np.ndarray) -> list[tuple[float, float, int]]:
    """50 uniform bins over [0.9, 1.0] plus a leading underflow row."""
    vals = np.asarray(overlaps, dtype=float)
    vals = vals[np.isfinite(vals)]
    counts, _ = np.histogram(vals, bins=HISTOGRAM_BINS)
    rows = [(0.0, float(HISTOGRAM_BINS[0]), int((vals < HISTOGRAM_BINS[0]).sum()))]
    rows.extend(
        (float(HISTOGRAM_BINS[i]), float(HISTOGRAM_BINS[i + 1]), int(counts[i]))
        for i in range(len(counts))
    )
    return rows


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(result: SweepResult, path) -> None:
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(
            f"{r.kind},{r.quantity},{_fmt(r.sigma)},{r.n_samples},"
            f"{_fmt(r.mean)},{_fmt(r.std)},{_fmt(r.stderr)},"
            f"{r.master_seed},{r.degenerate_count},{r.nonconverged_count}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> SweepResult:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise CsvFormatError(f"{path}: line 1: expected header {CSV_HEADER!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 10:
            raise CsvFormatError(f"{path}: line {i}: expected 10 columns, got {len(parts)}")
        try:
            rows.append(
                SweepRow(
                    kind=parts[0],
                    quantity=parts[1],
                    sigma=float(parts[2]),
                    n_samples=int(parts[3]),
                    mean=float(parts[4]),
                    std=float(parts[5]),
                    stderr=float(parts[6]),
                    master_seed=int(parts[7]),
                    degenerate_count=int(parts[8]),
                    nonconverged_count=int(parts[9]),
                )
            )
        except ValueError as exc:
            raise CsvFormatError(f"{path}: line {i}: {exc}") from exc
    return SweepResult(rows)


def write_histogram_csv(rows, path) -> None:
    lines = [HISTOGRAM_HEADER]
    lines.extend(f"{_fmt(lo)},{_fmt(hi)},{count}" for lo, hi, count in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_histogram_csv(path) -> list[tuple[float, float, int]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != HISTOGRAM_HEADER:
        raise CsvFormatError(f"{path}: line 1: expected header {HISTOGRAM_HEADER!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise CsvFormatError(f"{path}: line {i}: expected 3 columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise CsvFormatError(f"{path}: line {i}: {exc}") from exc
    return rows


def write_nearest_w_summary(exp: NearestWExperiment, path) -> None:
    line = (
        f"{exp.kind},{_fmt(exp.sigma)},{exp.n_samples},"
        f"{_fmt(exp.fraction_high_overlap)},{_fmt(exp.fraction_tau_below)},"
        f"{exp.nonconverged_count},{exp.degenerate_count},{exp.master_seed}"
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n" + line + "\n")
