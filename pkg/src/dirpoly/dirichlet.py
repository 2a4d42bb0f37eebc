"""Dirichlet polynomials, their torus form, and the Kronecker diagnostic.

A polynomial ``D(sigma + it) = sum_{n<=N} coeff_n n^(-sigma) e^(-it log n)``
with ``coeff_n = eps_n d(n)`` is carried in sparse form (zero weights are
dropped from the support).  Writing each support point as
``n = prod p_j^(a_j(n))`` gives the torus form

    ``Q(z) = sum_n coeff_n n^(-sigma) e^(2 pi i <a(n), z>)``,

and the two sides agree exactly at the matched points
``z_j = -t log(p_j) / (2 pi) mod 1``.  Suprema over t (the line) and over
the full torus coincide by Kronecker's theorem; :func:`kronecker_gap`
measures how close a finite line grid and a sampled torus get at desk scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .arith import PrimeTable, factorize
from .errors import InvalidArgument, TableTooSmall
from .weights import WeightSpec, parse_weight, weight_values

POLY_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class DirichletPoly:
    """Sparse Dirichlet polynomial ``sum coeff_n n^(-sigma - it)``.

    ``n_values`` is the ascending support (zero-weight n omitted) and
    ``coeffs[i]`` the signed coefficient ``eps_n d(n)`` at ``n_values[i]``.
    ``noise_meta`` is ``(kind, seed)`` for random coefficients or
    ``"deterministic"`` when all signs are +1.
    """

    N: int
    sigma: float
    n_values: np.ndarray
    coeffs: np.ndarray
    weight_id: str
    noise_meta: tuple[str, int] | str

    @property
    def line_amplitudes(self) -> np.ndarray:
        """``coeff_n n^(-sigma)``, the amplitudes seen on the line."""
        return self.coeffs * self.n_values.astype(np.float64) ** (-self.sigma)

    @property
    def trivial_upper(self) -> float:
        """Triangle-inequality bound ``sum |coeff_n| n^(-sigma)``."""
        return float(np.sum(np.abs(self.line_amplitudes)))


def build_poly(
    N: int,
    sigma: float,
    spec: WeightSpec,
    noise,
    table: PrimeTable,
) -> DirichletPoly:
    """Assemble the polynomial with coefficients ``noise_n * d(n)``.

    ``noise`` is a draw with a ``values`` vector of length >= N (see
    :func:`dirpoly.estimate.draw_noise`) or ``None`` for all-ones
    coefficients.  Integers with ``d(n) = 0`` are dropped from the support.
    """
    if N < 1:
        raise InvalidArgument(f"build_poly needs N >= 1, got {N}")
    if not 0.0 <= sigma <= 0.5:
        raise InvalidArgument(f"sigma must be in [0, 1/2], got {sigma}")
    vals = weight_values(spec, N, table)[1:]  # d(1..N)
    if noise is None:
        eps = np.ones(N)
        meta: tuple[str, int] | str = "deterministic"
    else:
        if len(noise.values) < N:
            raise InvalidArgument(
                f"noise draw has {len(noise.values)} values, need >= {N}"
            )
        eps = np.asarray(noise.values[:N], dtype=np.float64)
        meta = (noise.kind, noise.seed)
    support = np.flatnonzero(vals != 0.0) + 1
    coeffs = (eps * vals)[support - 1]
    return DirichletPoly(
        N=N,
        sigma=float(sigma),
        n_values=support.astype(np.int64),
        coeffs=coeffs,
        weight_id=spec.text(),
        noise_meta=meta,
    )


def restrict_support(poly: DirichletPoly, ns: Sequence[int]) -> DirichletPoly:
    """Keep only the support points that are also in ``ns``."""
    keep = np.isin(poly.n_values, np.asarray(ns, dtype=np.int64))
    return DirichletPoly(
        N=poly.N,
        sigma=poly.sigma,
        n_values=poly.n_values[keep],
        coeffs=poly.coeffs[keep],
        weight_id=poly.weight_id,
        noise_meta=poly.noise_meta,
    )


def eval_line(poly: DirichletPoly, t: float) -> complex:
    """``D(sigma + it)`` as an exact finite sum."""
    ns = poly.n_values.astype(np.float64)
    return complex(np.sum(poly.line_amplitudes * np.exp(-1j * t * np.log(ns))))


# ---------------------------------------------------------------------------
# torus form
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TorusPoly:
    """CSR form of ``Q(z)``: term ``i`` has amplitude ``amps[i]`` and phase
    ``<a(n_i), z> = sum exps[k] * z[cols[k]]`` over its CSR row.

    Frequency vectors are stored sparse; ``cols`` holds 0-based prime
    indices (rank - 1).  The ``n = 1`` term carries one explicit
    zero-exponent entry so every row is non-empty.
    """

    tau: int
    sigma: float
    n_values: np.ndarray
    amps: np.ndarray
    indptr: np.ndarray
    cols: np.ndarray
    exps: np.ndarray

    @property
    def trivial_upper(self) -> float:
        return float(np.sum(np.abs(self.amps)))

    def freq_vector(self, i: int) -> np.ndarray:
        """Dense exponent vector a(n) of term ``i`` (length tau)."""
        a = np.zeros(self.tau, dtype=np.int64)
        for k in range(self.indptr[i], self.indptr[i + 1]):
            a[self.cols[k]] += int(self.exps[k])
        return a

    def terms(self) -> Iterator[tuple[float, list[tuple[int, int]], int]]:
        """Yield ``(amplitude, [(prime index, exponent), ...], n)`` per term."""
        for i, n in enumerate(self.n_values.tolist()):
            pairs = [
                (int(self.cols[k]) + 1, int(self.exps[k]))
                for k in range(self.indptr[i], self.indptr[i + 1])
                if self.exps[k] != 0.0
            ]
            yield float(self.amps[i]), pairs, n


def to_torus(poly: DirichletPoly, tau: int, table: PrimeTable) -> TorusPoly:
    """Rewrite the polynomial over the first ``tau`` prime frequencies.

    Every support point must factor over ``p_1..p_tau``; the offending ``n``
    is named otherwise.  ``tau = 0`` is allowed only for the constant
    polynomial (support ``{1}``).
    """
    if tau < 0:
        raise InvalidArgument(f"tau must be >= 0, got {tau}")
    if tau > table.pi:
        raise TableTooSmall(f"tau={tau} exceeds the table's {table.pi} primes")
    amps = poly.line_amplitudes
    indptr = [0]
    cols: list[int] = []
    exps: list[float] = []
    for n in poly.n_values.tolist():
        if n == 1:
            if tau == 0:
                indptr.append(len(cols))
                continue
            cols.append(0)
            exps.append(0.0)
            indptr.append(len(cols))
            continue
        fac = factorize(n, table)
        top = fac.factors[-1][0]
        if top > tau:
            raise InvalidArgument(
                f"support point n={n} has prime factor p_{top}="
                f"{table.prime(top)} beyond tau={tau}"
            )
        for j, a in fac.factors:
            cols.append(j - 1)
            exps.append(float(a))
        indptr.append(len(cols))
    return TorusPoly(
        tau=tau,
        sigma=poly.sigma,
        n_values=poly.n_values.copy(),
        amps=amps,
        indptr=np.asarray(indptr, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        exps=np.asarray(exps, dtype=np.float64),
    )


def eval_torus(tp: TorusPoly, z: Sequence[float]) -> complex:
    """``Q(z)`` as an exact finite sum (requires ``len(z) == tau``)."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (tp.tau,):
        raise InvalidArgument(f"z has shape {z.shape}, expected ({tp.tau},)")
    if tp.tau == 0 or tp.amps.size == 0:
        return complex(np.sum(tp.amps))
    return kernels.torus_eval(tp.amps, tp.indptr, tp.cols, tp.exps, z)


def matched_point(t: float, tau: int, table: PrimeTable) -> np.ndarray:
    """The torus image ``z_j = -t log(p_j)/(2 pi) mod 1`` of a line point."""
    ps = table.primes[:tau].astype(np.float64)
    return np.mod(-t * np.log(ps) / (2.0 * math.pi), 1.0)


# ---------------------------------------------------------------------------
# Kronecker diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KroneckerGap:
    """Line-grid supremum next to a sampled torus supremum.

    ``sup_line <= sup_torus_sampled + eps`` always holds (the best line
    point's torus image is part of the sample); ``gap`` and
    ``relative_gap`` measure how much the sampled torus exceeds the line
    grid, i.e. how much of the torus the line grid has not yet visited.
    """

    sup_line: float
    t_best: float
    sup_torus_sampled: float
    gap: float
    relative_gap: float
    grid_points: int
    z_budget: int


_BATCH_ROWS = 65536


def kronecker_gap(
    poly: DirichletPoly,
    tau: int,
    t_grid: tuple[float, float],
    z_budget: int,
    seed: int,
    table: PrimeTable,
) -> KroneckerGap:
    """Compare the line supremum on a grid with a sampled torus supremum.

    ``t_grid = (t_max, step)`` scans ``t = 0, step, ..., <= t_max``.  The
    torus sample consists of ``z_budget`` uniform points (drawn from a
    PCG64 generator seeded with ``seed``, in fixed-size batches so nested
    budgets sample nested point sets) plus the image of the best grid
    point.  Guidance: useful for tau small (say <= 6); in high dimension
    uniform sampling is too sparse to say anything.
    """
    t_max, step = t_grid
    if t_max < 0 or step <= 0:
        raise InvalidArgument(f"bad t grid (t_max={t_max}, step={step})")
    if z_budget < 0:
        raise InvalidArgument(f"z_budget must be >= 0, got {z_budget}")
    tp = to_torus(poly, tau, table)
    logn = np.log(poly.n_values.astype(np.float64))
    count = int(math.floor(t_max / step)) + 1
    amps = poly.line_amplitudes
    sup_line, k_best = kernels.line_scan_max(amps, logn, 0.0, step, count)
    t_best = step * k_best
    # the best grid point's torus image makes the containment one-sided
    best = abs(eval_torus(tp, matched_point(t_best, tau, table)))
    rng = np.random.Generator(np.random.PCG64(seed))
    remaining = z_budget
    while remaining > 0:
        rows = min(_BATCH_ROWS, remaining)
        zb = rng.random((rows, tau))
        val, _ = kernels.torus_batch_max(tp.amps, tp.indptr, tp.cols, tp.exps, zb)
        best = max(best, val)
        remaining -= rows
    gap = best - sup_line
    rel = gap / best if best > 0 else 0.0
    return KroneckerGap(
        sup_line=float(sup_line),
        t_best=float(t_best),
        sup_torus_sampled=float(best),
        gap=float(gap),
        relative_gap=float(rel),
        grid_points=count,
        z_budget=z_budget,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def poly_to_json(poly: DirichletPoly) -> str:
    """Serialize to a versioned JSON document (sparse coefficients)."""
    doc = {
        "format_version": POLY_FORMAT_VERSION,
        "N": poly.N,
        "sigma": poly.sigma,
        "weight_id": poly.weight_id,
        "noise_meta": list(poly.noise_meta)
        if isinstance(poly.noise_meta, tuple)
        else poly.noise_meta,
        "coeffs": {str(int(n)): float(c)
                   for n, c in zip(poly.n_values, poly.coeffs)},
    }
    return json.dumps(doc, sort_keys=True)


def poly_from_json(text: str) -> DirichletPoly:
    """Inverse of :func:`poly_to_json`."""
    doc = json.loads(text)
    if doc.get("format_version") != POLY_FORMAT_VERSION:
        raise InvalidArgument(
            f"unsupported polynomial format {doc.get('format_version')!r}"
        )
    items = sorted((int(k), float(v)) for k, v in doc["coeffs"].items())
    meta = doc["noise_meta"]
    return DirichletPoly(
        N=int(doc["N"]),
        sigma=float(doc["sigma"]),
        n_values=np.asarray([n for n, _ in items], dtype=np.int64),
        coeffs=np.asarray([c for _, c in items], dtype=np.float64),
        weight_id=doc["weight_id"],
        noise_meta=(meta[0], int(meta[1])) if isinstance(meta, list) else meta,
    )
