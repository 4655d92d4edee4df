"""Readers for the sweep and histogram CSV formats.

The formats are the engine's wire contract:

    kind,quantity,sigma,n_samples,mean,std,stderr,master_seed,degenerate_count,nonconverged_count

for sweep and Haar-reference results (kind "haar" marks baseline rows),
and ``bin_low,bin_high,count`` for overlap histograms.
"""

from __future__ import annotations

from dataclasses import dataclass

SWEEP_COLUMNS = (
    "kind",
    "quantity",
    "sigma",
    "n_samples",
    "mean",
    "std",
    "stderr",
    "master_seed",
    "degenerate_count",
    "nonconverged_count",
)
HISTOGRAM_COLUMNS = ("bin_low", "bin_high", "count")


class FigureDataError(ValueError):
    """An input CSV does not match the expected wire format."""


@dataclass(frozen=True)
class SweepPoint:
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


def _check_header(path, line: str, expected) -> None:
    got = line.split(",")
    missing = [c for c in expected if c not in got]
    if missing:
        raise FigureDataError(f"{path}: missing column(s): {', '.join(missing)}")
    if list(got) != list(expected):
        raise FigureDataError(
            f"{path}: header must be exactly {','.join(expected)!r}, got {line!r}"
        )


def read_sweep_csv(path) -> list[SweepPoint]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FigureDataError(f"{path}: empty file")
    _check_header(path, lines[0], SWEEP_COLUMNS)
    points = []
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(SWEEP_COLUMNS):
            raise FigureDataError(
                f"{path}: line {i}: expected {len(SWEEP_COLUMNS)} columns, got {len(parts)}"
            )
        try:
            points.append(
                SweepPoint(
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
            raise FigureDataError(f"{path}: line {i}: {exc}") from exc
    return points


def read_histogram_csv(path) -> list[tuple[float, float, int]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FigureDataError(f"{path}: empty file")
    _check_header(path, lines[0], HISTOGRAM_COLUMNS)
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise FigureDataError(f"{path}: line {i}: expected 3 columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise FigureDataError(f"{path}: line {i}: {exc}") from exc
    if not rows:
        raise FigureDataError(f"{path}: no histogram rows")
    return rows
