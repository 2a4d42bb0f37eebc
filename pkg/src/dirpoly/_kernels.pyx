# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: torus/line evaluation and cyclic coordinate ascent.

Semantics (evaluation counts, visit order, golden-section recipe) mirror
:mod:`dirpoly._purekernels` exactly; see that module for the protocol
documentation.  Only round-off may differ between the backends: the C loops
accumulate sequentially while NumPy reduces pairwise.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt, floor

BACKEND = "compiled"

cdef double TWO_PI = 6.283185307179586476925287
cdef double INV_PHI = 0.6180339887498948482045868



cdef inline double _eval_abs(double[::1] amps, long[::1] indptr,
                             long[::1] cols, double[::1] exps,
                             double[:] z) noexcept nogil:
    cdef Py_ssize_t t, i, T = amps.shape[0]
    cdef double ph, c, re = 0.0, im = 0.0
    for t in range(T):
        ph = 0.0
        for i in range(indptr[t], indptr[t + 1]):
            ph += exps[i] * z[cols[i]]
        c = TWO_PI * (ph - floor(ph))
        re += amps[t] * cos(c)
        im += amps[t] * sin(c)
    return sqrt(re * re + im * im)


cdef inline double _axis_abs(double[::1] amps, double[::1] ph0,
                             double[::1] ej, double x) noexcept nogil:
    cdef Py_ssize_t t, T = amps.shape[0]
    cdef double c, re = 0.0, im = 0.0
    for t in range(T):
        c = ph0[t] + ej[t] * x
        c = TWO_PI * (c - floor(c))
        re += amps[t] * cos(c)
        im += amps[t] * sin(c)
    return sqrt(re * re + im * im)


def torus_eval(double[::1] amps, long[::1] indptr, long[::1] cols,
               double[::1] exps, double[::1] z):
    """``Q(z) = sum_t amps[t] e^(2 pi i <a_t, z>)``."""
    cdef Py_ssize_t t, i, T = amps.shape[0]
    cdef double ph, c, re = 0.0, im = 0.0
    for t in range(T):
        ph = 0.0
        for i in range(indptr[t], indptr[t + 1]):
            ph += exps[i] * z[cols[i]]
        c = TWO_PI * (ph - floor(ph))
        re += amps[t] * cos(c)
        im += amps[t] * sin(c)
    return complex(re, im)


def torus_batch_max(double[::1] amps, long[::1] indptr, long[::1] cols,
                    double[::1] exps, double[:, ::1] zb):
    """Max of ``|Q|`` over the rows of ``zb``; returns (value, row index)."""
    cdef Py_ssize_t r, R = zb.shape[0]
    cdef double v, best = -1.0
    cdef Py_ssize_t besti = -1
    for r in range(R):
        v = _eval_abs(amps, indptr, cols, exps, zb[r])
        if v > best:
            best = v
            besti = r
    return float(best), int(besti)


def line_scan_max(double[::1] amps, double[::1] logn, double t0, double dt,
                  long count):
    """Max of ``|sum_n amps_n e^(-i t log n)|`` over ``t = t0 + k dt``.

    Phases advance by incremental complex rotation, re-anchored exactly
    every 4096 steps so accumulated round-off stays near machine precision.
    """
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef long k
    cdef double t, v, re, im, nr, ni
    cdef double best = -1.0
    cdef long bestk = -1
    rot_re_a = np.empty(n)
    rot_im_a = np.empty(n)
    cur_re_a = np.empty(n)
    cur_im_a = np.empty(n)
    cdef double[::1] rot_re = rot_re_a, rot_im = rot_im_a
    cdef double[::1] cur_re = cur_re_a, cur_im = cur_im_a
    with nogil:
        for i in range(n):
            rot_re[i] = cos(dt * logn[i])
            rot_im[i] = -sin(dt * logn[i])
        for k in range(count):
            if k % 4096 == 0:
                t = t0 + k * dt
                for i in range(n):
                    cur_re[i] = cos(t * logn[i])
                    cur_im[i] = -sin(t * logn[i])
            re = 0.0
            im = 0.0
            for i in range(n):
                re += amps[i] * cur_re[i]
                im += amps[i] * cur_im[i]
            v = sqrt(re * re + im * im)
            if v > best:
                best = v
                bestk = k
            for i in range(n):
                nr = cur_re[i] * rot_re[i] - cur_im[i] * rot_im[i]
                ni = cur_re[i] * rot_im[i] + cur_im[i] * rot_re[i]
                cur_re[i] = nr
                cur_im[i] = ni
    return float(best), int(bestk)


def coordinate_ascent(double[::1] amps, long[::1] indptr, long[::1] cols,
                      double[::1] exps, double[::1] z0, long budget,
                      int grid_size, int refine_iters):
    """Cyclic coordinate ascent for ``|Q|``; see the pure backend docstring."""
    cdef Py_ssize_t t, i, c, T = amps.shape[0]
    cdef Py_ssize_t j, tau = z0.shape[0]
    cdef long evals = 0
    cdef int g, it
    cdef bint improved, have1, have2
    cdef double f, best_val, zj, ph, e, x, v
    cdef double cand_x, cand_f, a, b, x1, x2, f1, f2
    z_a = np.array(z0, dtype=np.float64)
    cdef double[::1] z = z_a
    ph0_a = np.empty(T)
    ej_a = np.empty(T)
    cdef double[::1] ph0 = ph0_a, ej = ej_a

    f = _eval_abs(amps, indptr, cols, exps, z)
    evals += 1
    best_val = f
    best_z = z_a.copy()
    if evals >= budget or tau == 0:
        return float(best_val), best_z, int(evals)

    improved = True
    while improved and evals < budget:
        improved = False
        for j in range(tau):
            if evals >= budget:
                break
            zj = z[j]
            z[j] = 0.0
            for t in range(T):
                ph = 0.0
                e = 0.0
                for i in range(indptr[t], indptr[t + 1]):
                    c = cols[i]
                    if c == j:
                        e = exps[i]
                    else:
                        ph += exps[i] * z[c]
                ph0[t] = ph
                ej[t] = e
            z[j] = zj
            cand_x = zj
            cand_f = f
            for g in range(grid_size):
                if evals >= budget:
                    break
                x = g / (<double> grid_size)
                v = _axis_abs(amps, ph0, ej, x)
                evals += 1
                if v > cand_f:
                    cand_f = v
                    cand_x = x
            a = cand_x - 1.0 / grid_size
            b = cand_x + 1.0 / grid_size
            x1 = b - (b - a) * INV_PHI
            x2 = a + (b - a) * INV_PHI
            f1 = 0.0
            f2 = 0.0
            have1 = False
            have2 = False
            if evals < budget:
                f1 = _axis_abs(amps, ph0, ej, x1)
                evals += 1
                have1 = True
                if f1 > cand_f:
                    cand_f = f1
                    cand_x = x1
            if evals < budget and have1:
                f2 = _axis_abs(amps, ph0, ej, x2)
                evals += 1
                have2 = True
                if f2 > cand_f:
                    cand_f = f2
                    cand_x = x2
            if have1 and have2:
                for it in range(refine_iters):
                    if evals >= budget:
                        break
                    if f1 < f2:
                        a = x1
                        x1 = x2
                        f1 = f2
                        x2 = a + (b - a) * INV_PHI
                        f2 = _axis_abs(amps, ph0, ej, x2)
                        evals += 1
                        if f2 > cand_f:
                            cand_f = f2
                            cand_x = x2
                    else:
                        b = x2
                        x2 = x1
                        f2 = f1
                        x1 = b - (b - a) * INV_PHI
                        f1 = _axis_abs(amps, ph0, ej, x1)
                        evals += 1
                        if f1 > cand_f:
                            cand_f = f1
                            cand_x = x1
            if cand_f > f:
                z[j] = cand_x - floor(cand_x)
                f = cand_f
                improved = True
                if f > best_val:
                    best_val = f
                    best_z = z_a.copy()
    return float(best_val), best_z, int(evals)
