"""Figure definitions and rendering.

Sweep figures show the mean (with standard-error bars) in panel (a) and
the standard deviation in panel (b), both against sigma on a log axis,
one curve per interaction kind.  Haar baseline rows (kind "haar") are
drawn as horizontal reference lines.  fig9 is the nearest-W overlap
histogram on [0.9, 1.0] with its underflow bin reported in the corner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .csvio import FigureDataError, read_histogram_csv, read_sweep_csv  # noqa: E402

KIND_STYLE = {
    "two-i": dict(color="tab:red", marker="s", label="separable pair"),
    "two-ii": dict(color="tab:blue", marker="o", label="joint pair"),
    "I": dict(color="tab:red", marker="s", label="I (fully separable)"),
    "II": dict(color="tab:green", marker="^", label="II (partially separable)"),
    "III": dict(color="tab:blue", marker="o", label="III (non-separable)"),
    "a": dict(color="tab:blue", marker="o", label="a (joint bonds)"),
    "b": dict(color="tab:red", marker="s", label="b (separable bonds)"),
    "c": dict(color="tab:purple", marker="^", label="c (symmetric)"),
}

QUANTITY_LABEL = {
    "concurrence": r"$\langle C\rangle$",
    "tangle": r"$\langle\tau\rangle$",
    "total_concurrence": r"$\langle C_t\rangle$",
    "c13": r"$\langle C_{13}\rangle$",
    "c1_23": r"$\langle C_{1|23}\rangle$",
}


@dataclass(frozen=True)
class SweepFigureDef:
    quantities: tuple[str, ...]
    kinds: tuple[str, ...]
    panels: tuple[str, ...] = ("mean", "std")
    haar_required: bool = False
    log_y: bool = False


FIGURE_DEFS = {
    "fig1": SweepFigureDef(("concurrence",), ("two-i", "two-ii"), haar_required=True),
    "fig3": SweepFigureDef(("tangle",), ("I", "II", "III"), haar_required=True, log_y=True),
    "fig4": SweepFigureDef(("total_concurrence",), ("I", "II", "III")),
    "fig6": SweepFigureDef(("tangle",), ("a", "b", "c"), log_y=True),
    "fig7": SweepFigureDef(("c13",), ("a", "b"), log_y=True),
    "fig8": SweepFigureDef(("c1_23", "c13"), ("c",)),
}
FIGURE_IDS = tuple(FIGURE_DEFS) + ("fig9",)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise FigureDataError(
                f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}"
            )
        if not self.inputs:
            raise FigureDataError("at least one input CSV is required")


def _load_points(paths):
    points = []
    for path in paths:
        points.extend(read_sweep_csv(path))
    return points


def _series(points, kind, quantity):
    rows = sorted(
        (p for p in points if p.kind == kind and p.quantity == quantity),
        key=lambda p: p.sigma,
    )
    return rows


def _render_sweep(figure_id: str, spec: FigureSpec):
    fdef = FIGURE_DEFS[figure_id]
    points = _load_points(spec.inputs)
    n_panels = len(fdef.panels)
    fig, axes = plt.subplots(1, n_panels, figsize=(5.2 * n_panels, 4.0), squeeze=False)
    axes = axes[0]

    for quantity in fdef.quantities:
        for kind in fdef.kinds:
            rows = _series(points, kind, quantity)
            if not rows:
                raise FigureDataError(
                    f"{figure_id}: no rows for kind {kind!r}, quantity {quantity!r} "
                    f"in {', '.join(spec.inputs)}"
                )
            style = dict(KIND_STYLE.get(kind, {}))
            if len(fdef.quantities) > 1:
                style["label"] = f"{QUANTITY_LABEL.get(quantity, quantity)}"
                style.pop("color", None)
            sigmas = [p.sigma for p in rows]
            for ax, panel in zip(axes, fdef.panels):
                if panel == "mean":
                    ax.errorbar(
                        sigmas,
                        [p.mean for p in rows],
                        yerr=[p.stderr for p in rows],
                        ms=4,
                        lw=1.2,
                        capsize=2,
                        **style,
                    )
                else:
                    ax.plot(sigmas, [p.std for p in rows], ms=4, lw=1.2, **style)

    haar = [p for p in points if p.kind == "haar" and p.quantity in fdef.quantities]
    if fdef.haar_required and not haar:
        raise FigureDataError(
            f"{figure_id}: Haar reference rows (kind 'haar') are required"
        )
    for p in haar:
        for ax, panel in zip(axes, fdef.panels):
            ax.axhline(
                p.mean if panel == "mean" else p.std,
                color="gray",
                ls="--",
                lw=1.0,
                label="Haar",
            )

    labels = " / ".join(QUANTITY_LABEL.get(q, q) for q in fdef.quantities)
    for ax, panel in zip(axes, fdef.panels):
        ax.set_xscale("log")
        if fdef.log_y and panel == "mean":
            ax.set_yscale("log")
        ax.set_xlabel(r"$\sigma$")
        ax.set_ylabel(labels if panel == "mean" else r"$\delta$")
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _render_histogram(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise FigureDataError("fig9 takes exactly one histogram CSV")
    rows = read_histogram_csv(spec.inputs[0])
    underflow = [r for r in rows if r[1] <= rows[-1][0] and r[0] == 0.0]
    bins = [r for r in rows if r not in underflow]
    if not bins:
        raise FigureDataError("fig9: no histogram bins")
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    lefts = [r[0] for r in bins]
    widths = [r[1] - r[0] for r in bins]
    counts = [r[2] for r in bins]
    ax.bar(lefts, counts, width=widths, align="edge", color="tab:blue", edgecolor="white")
    ax.set_xlim(bins[0][0], bins[-1][1])
    ax.set_xlabel(r"overlap $p$")
    ax.set_ylabel("counts")
    if underflow:
        ax.text(
            0.02,
            0.95,
            f"$p < {bins[0][0]:g}$: {underflow[0][2]}",
            transform=ax.transAxes,
            va="top",
            fontsize=8,
        )
    fig.tight_layout()
    return fig


def render(spec: FigureSpec):
    """Render one figure; returns the matplotlib Figure and writes PNG."""
    if spec.figure_id == "fig9":
        fig = _render_histogram(spec)
    else:
        fig = _render_sweep(spec.figure_id, spec)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return fig
