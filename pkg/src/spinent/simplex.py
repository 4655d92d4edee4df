"""Batched derivative-free simplex (Nelder-Mead) minimizer.

Runs one independent simplex search per row of the input.  All updates
are gated by per-row masks, so row i's trajectory depends only on row
i's data: results are identical no matter how rows are grouped into
batches, which the sweep engine relies on for reproducibility.

Standard reflection/expansion/contraction/shrink coefficients
(1, 2, 1/2, 1/2).  The simplex is kept unsorted; each iteration only
locates the best/worst/second-worst vertices and replaces the worst in
place, which avoids re-permuting the vertex arrays.  The objective must
be vectorized: ``objective(points: (m, dim), rows: (m,) int) -> (m,)``
where ``rows`` are row indices into the original batch (for
row-dependent objectives).
"""

from __future__ import annotations

import numpy as np

ALPHA = 1.0  # reflection
GAMMA = 2.0  # expansion
RHO = 0.5  # contraction
SHRINK = 0.5


def nelder_mead_batch(
    objective,
    x0: np.ndarray,
    *,
    step: float = 0.05,
    f_tol: float = 1e-12,
    x_tol: float = 1e-8,
    max_iter: int = 400,
    budget: np.ndarray | None = None,
):
    """Minimize per-row; returns (x_best, f_best, evals) arrays.

    ``budget`` caps objective evaluations per row; a row is frozen once
    its count reaches the cap (it may overshoot by at most one iteration,
    i.e. dim + 2 evaluations).  Rows also stop when both the function
    spread and the simplex extent fall below f_tol / x_tol.
    """
    x0 = np.asarray(x0, dtype=float)
    n, dim = x0.shape
    nv = dim + 1
    evals_out = np.zeros(n, dtype=np.int64)
    x_out = np.empty_like(x0)
    f_out = np.empty(n)
    if budget is None:
        cap = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    else:
        cap = np.asarray(budget, dtype=np.int64).copy()

    simplex = np.repeat(x0[:, None, :], nv, axis=1)
    for i in range(dim):
        simplex[:, i + 1, i] += step
    fvals = np.empty((n, nv))
    orig = np.arange(n)  # working row -> original row
    for v in range(nv):
        fvals[:, v] = objective(simplex[:, v, :], orig)
    evals = np.full(n, nv, dtype=np.int64)
    vsum = simplex.sum(axis=1)  # maintained incrementally

    active = np.ones(n, dtype=bool)

    def retire(mask: np.ndarray) -> None:
        """Write finished rows to the outputs."""
        rows = np.nonzero(mask)[0]
        if rows.size:
            ib = np.argmin(fvals[rows], axis=1)
            x_out[orig[rows]] = simplex[rows, ib]
            f_out[orig[rows]] = fvals[rows, ib]
            evals_out[orig[rows]] = evals[rows]

    def eval_where(points: np.ndarray, mask: np.ndarray) -> np.ndarray:
        out = np.full(active.shape[0], np.inf)
        if mask.any():
            rows = np.nonzero(mask)[0]
            out[rows] = objective(points[rows], orig[rows])
            evals[rows] += 1
        return out

    for _ in range(max_iter):
        done = active & (evals >= cap)
        retire(done)
        active &= ~done
        if not active.any():
            break
        # Compact the working arrays once most rows have finished, so
        # frozen rows stop paying the per-iteration bookkeeping.
        if active.sum() * 2 < active.shape[0]:
            retire(active)  # provisional; overwritten when they finish
            keep = np.nonzero(active)[0]
            simplex = simplex[keep]
            fvals = fvals[keep]
            vsum = vsum[keep]
            evals = evals[keep]
            cap = cap[keep]
            orig = orig[keep]
            active = np.ones(keep.size, dtype=bool)
        m = active.shape[0]
        rows_m = np.arange(m)

        iworst = np.argmax(fvals, axis=1)
        ibest = np.argmin(fvals, axis=1)
        f_worst = fvals[rows_m, iworst]
        f_best = fvals[rows_m, ibest]
        masked = fvals.copy()
        masked[rows_m, iworst] = -np.inf
        f_second = masked.max(axis=1)
        worst = simplex[rows_m, iworst]
        best = simplex[rows_m, ibest]

        spread_x = np.max(np.abs(simplex - best[:, None, :]), axis=(1, 2))
        done = active & (f_worst - f_best <= f_tol) & (spread_x <= x_tol)
        retire(done)
        active &= ~done
        if not active.any():
            break

        centroid = (vsum - worst) / dim
        xr = centroid + ALPHA * (centroid - worst)
        fr = eval_where(xr, active)

        expand = active & (fr < f_best)
        xe = centroid + GAMMA * (xr - centroid)
        fe = eval_where(xe, expand)
        use_e = expand & (fe < fr)

        out_con = active & (fr >= f_second) & (fr < f_worst)
        xoc = centroid + RHO * (xr - centroid)
        foc = eval_where(xoc, out_con)
        acc_oc = out_con & (foc <= fr)

        in_con = active & (fr >= f_worst)
        xic = centroid - RHO * (centroid - worst)
        fic = eval_where(xic, in_con)
        acc_ic = in_con & (fic < f_worst)

        shrink = (out_con & ~acc_oc) | (in_con & ~acc_ic)
        replace = active & ~shrink

        new_x = np.where(use_e[:, None], xe, xr)
        new_f = np.where(use_e, fe, fr)
        new_x = np.where(acc_oc[:, None], xoc, new_x)
        new_f = np.where(acc_oc, foc, new_f)
        new_x = np.where(acc_ic[:, None], xic, new_x)
        new_f = np.where(acc_ic, fic, new_f)

        rows = np.nonzero(replace)[0]
        if rows.size:
            vsum[rows] += new_x[rows] - simplex[rows, iworst[rows]]
            simplex[rows, iworst[rows]] = new_x[rows]
            fvals[rows, iworst[rows]] = new_f[rows]

        rows = np.nonzero(shrink)[0]
        if rows.size:
            sub = simplex[rows]
            anchor = sub[np.arange(rows.size), ibest[rows]][:, None, :]
            sub = anchor + SHRINK * (sub - anchor)
            # the anchor vertex itself is unchanged; re-evaluate the rest
            fsub = objective(sub.reshape(-1, dim), np.repeat(orig[rows], nv))
            fsub = fsub.reshape(rows.size, nv)
            fsub[np.arange(rows.size), ibest[rows]] = fvals[rows, ibest[rows]]
            simplex[rows] = sub
            fvals[rows] = fsub
            vsum[rows] = sub.sum(axis=1)
            evals[rows] += dim

    retire(active)
    return x_out, f_out, evals_out
