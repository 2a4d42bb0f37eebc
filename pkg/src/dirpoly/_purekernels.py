"""NumPy fallback kernels for torus/line evaluation and coordinate ascent.

These mirror the compiled kernels in :mod:`dirpoly._kernels` exactly in
semantics (same evaluation counts, same visit order, same golden-section
recipe), so budgets and search trajectories agree across backends; only
float round-off may differ (vectorized reductions associate differently
than the C loops).

Torus polynomials arrive in CSR form: term ``t`` has amplitude ``amps[t]``
and phase ``sum_i exps[i] * z[cols[i]]`` over ``i`` in
``indptr[t]..indptr[t+1]``.  Rows must be non-empty (the constant term, if
present, carries an explicit zero-exponent entry).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_TWO_PI = 2.0 * math.pi
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_LINE_CHUNK_BUDGET = 2_000_000  # scalar ops per chunk in the line scan


def _phases(indptr: np.ndarray, cols: np.ndarray, exps: np.ndarray,
            z: np.ndarray) -> np.ndarray:
    """Per-term phase ``<a(n), z>`` reduced mod 1.

    Reducing before the multiplication by ``2 pi`` keeps the sin/cos
    arguments small even when exponent vectors are large.
    """
    contrib = exps * z[cols]
    return np.mod(np.add.reduceat(contrib, indptr[:-1]), 1.0)


def torus_eval(amps: np.ndarray, indptr: np.ndarray, cols: np.ndarray,
               exps: np.ndarray, z: np.ndarray) -> complex:
    """``Q(z) = sum_t amps[t] e^(2 pi i <a_t, z>)``."""
    ph = _phases(indptr, cols, exps, np.asarray(z, dtype=np.float64))
    return complex(np.sum(amps * np.exp(1j * _TWO_PI * ph)))


def torus_batch_max(amps: np.ndarray, indptr: np.ndarray, cols: np.ndarray,
                    exps: np.ndarray, zb: np.ndarray) -> tuple[float, int]:
    """Max of ``|Q|`` over the rows of ``zb``; returns (value, row index)."""
    n_rows = zb.shape[0]
    best_val, best_row = -1.0, -1
    rows_per_chunk = max(1, _LINE_CHUNK_BUDGET // max(1, cols.size))
    for lo in range(0, n_rows, rows_per_chunk):
        chunk = zb[lo : lo + rows_per_chunk]
        contrib = chunk[:, cols] * exps
        ph = np.mod(np.add.reduceat(contrib, indptr[:-1], axis=1), 1.0)
        vals = np.abs(np.exp(1j * _TWO_PI * ph) @ amps)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_row = float(vals[k]), lo + k
    return best_val, best_row


def line_scan_max(amps: np.ndarray, logn: np.ndarray, t0: float, dt: float,
                  count: int) -> tuple[float, int]:
    """Max of ``|sum_n amps_n e^(-i t log n)|`` over ``t = t0 + k dt``.

    Returns ``(value, k)`` for the best grid index ``k in 0..count-1``.
    """
    best_val, best_k = -1.0, -1
    rows_per_chunk = max(1, _LINE_CHUNK_BUDGET // max(1, logn.size))
    for lo in range(0, count, rows_per_chunk):
        hi = min(lo + rows_per_chunk, count)
        ts = t0 + dt * np.arange(lo, hi, dtype=np.float64)
        vals = np.abs(np.exp(-1j * np.outer(ts, logn)) @ amps)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_k = float(vals[k]), lo + k
    return best_val, best_k


def _axis_values(amps: np.ndarray, ph0: np.ndarray, ej: np.ndarray,
                 xs: np.ndarray) -> np.ndarray:
    """``|Q|`` along coordinate ``j``: phases ``ph0 + ej * x`` for each x."""
    ph = np.mod(ph0[None, :] + np.outer(xs, ej), 1.0)
    return np.abs(np.exp(1j * _TWO_PI * ph) @ amps)


def coordinate_ascent(amps: np.ndarray, indptr: np.ndarray, cols: np.ndarray,
                      exps: np.ndarray, z0: np.ndarray, budget: int,
                      grid_size: int, refine_iters: int,
                      ) -> tuple[float, np.ndarray, int]:
    """Cyclic coordinate ascent for ``|Q|`` on the torus.

    Protocol (identical across backends, every ``|Q|`` evaluation costs one
    unit of budget):

    1. evaluate the start point;
    2. sweep coordinates ``j = 0..tau-1`` in order; per coordinate, scan the
       ``grid_size`` points ``g/grid_size``, then golden-section refine the
       interval of width ``2/grid_size`` around the best scanned point
       (2 bracketing evaluations plus ``refine_iters`` steps), accept the
       best candidate if it strictly improves;
    3. repeat sweeps until one makes no improvement or budget runs out.

    Returns ``(best value, best z, evaluations used)``.
    """
    tau = z0.size
    z = np.array(z0, dtype=np.float64)
    evals = 0

    def full_eval(point: np.ndarray) -> float:
        return abs(torus_eval(amps, indptr, cols, exps, point))

    f = full_eval(z)
    evals += 1
    best_val, best_z = f, z.copy()
    if evals >= budget or tau == 0:
        return best_val, best_z, evals

    row_of = np.repeat(np.arange(amps.size), np.diff(indptr))
    grid = np.arange(grid_size, dtype=np.float64) / grid_size
    improved = True
    while improved and evals < budget:
        improved = False
        for j in range(tau):
            if evals >= budget:
                break
            # decompose the phase: ph0 excludes z_j, ej holds its exponents
            zj = z[j]
            z[j] = 0.0
            ph0 = _phases(indptr, cols, exps, z)
            z[j] = zj
            ej = np.zeros(amps.size)
            sel = cols == j  # each CSR row holds distinct columns
            ej[row_of[sel]] = exps[sel]
            cand_x, cand_f = zj, f
            # grid pass (vectorized but budget-capped)
            take = min(grid_size, budget - evals)
            if take > 0:
                vals = _axis_values(amps, ph0, ej, grid[:take])
                evals += take
                k = int(np.argmax(vals))
                if vals[k] > cand_f:
                    cand_f, cand_x = float(vals[k]), float(grid[k])
            # golden-section refinement around the best candidate
            a = cand_x - 1.0 / grid_size
            b = cand_x + 1.0 / grid_size
            x1 = b - (b - a) * _INV_PHI
            x2 = a + (b - a) * _INV_PHI
            f1 = f2 = None
            if evals < budget:
                f1 = float(_axis_values(amps, ph0, ej, np.array([x1]))[0])
                evals += 1
                if f1 > cand_f:
                    cand_f, cand_x = f1, x1
            if evals < budget and f1 is not None:
                f2 = float(_axis_values(amps, ph0, ej, np.array([x2]))[0])
                evals += 1
                if f2 > cand_f:
                    cand_f, cand_x = f2, x2
            if f1 is not None and f2 is not None:
                for _ in range(refine_iters):
                    if evals >= budget:
                        break
                    if f1 < f2:
                        a, x1, f1 = x1, x2, f2
                        x2 = a + (b - a) * _INV_PHI
                        f2 = float(_axis_values(amps, ph0, ej, np.array([x2]))[0])
                        evals += 1
                        if f2 > cand_f:
                            cand_f, cand_x = f2, x2
                    else:
                        b, x2, f2 = x2, x1, f1
                        x1 = b - (b - a) * _INV_PHI
                        f1 = float(_axis_values(amps, ph0, ej, np.array([x1]))[0])
                        evals += 1
                        if f1 > cand_f:
                            cand_f, cand_x = f1, x1
            if cand_f > f:
                z[j] = cand_x % 1.0
                f = cand_f
                improved = True
                if f > best_val:
                    best_val, best_z = f, z.copy()
    return best_val, best_z, evals
