"""Stochastic layer: noise draws, supremum search, and Monte-Carlo E sup.

Every estimate produced here is a *certified lower bound* for the quantity
it approximates: searched torus values are actual evaluations, the sign-set
value is a closed form that a brute-force enumeration reproduces exactly,
and Monte-Carlo means over such values are therefore downward-biased
estimates of ``E sup_t |D(sigma + it)|``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arith import PrimeTable, enumerate_smooth
from .decomp import LowerBoundSets, build_lower_sets
from .dirichlet import DirichletPoly, TorusPoly, build_poly, restrict_support, to_torus
from .errors import InvalidArgument
from .weights import WeightSpec, weight_values

#: Identifies the random pipeline: numpy PCG64 streams, seeds mixed with
#: splitmix64, gaussians via the polar-free Box-Muller transform below.
GENERATOR_ID = "pcg64+splitmix64+boxmuller/v1"

#: Sharp constant in the L1-L2 norm comparison for random signs:
#: E|sum eps_n a_n| >= 2^(-1/2) (sum a_n^2)^(1/2).
KHINTCHINE_CONSTANT = 2.0 ** -0.5

_MASK64 = (1 << 64) - 1

# coordinate-ascent shape shared by all searches (see kernels)
_GRID_SIZE = 64
_REFINE_ITERS = 16


def splitmix64(x: int) -> int:
    """One step of the splitmix64 output function (64-bit avalanche)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Derive a per-task 64-bit seed: ``splitmix64(master + splitmix64(index))``."""
    return splitmix64((master_seed + splitmix64(index)) & _MASK64)


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NoiseDraw:
    """A reproducible draw of N noise values (index i holds the value for
    n = i + 1).  Reconstructable from ``(kind, seed, N)`` and
    :data:`GENERATOR_ID`."""

    kind: str
    seed: int
    values: np.ndarray


def draw_noise(kind: str, seed: int, N: int) -> NoiseDraw:
    """Draw ``N`` iid noise values from a PCG64 stream seeded with ``seed``.

    rademacher: one uniform bit per value, mapped to {-1, +1}.
    gaussian: Box-Muller on uniform pairs -- with ``u = rng.random(2*m)``,
    ``r_k = sqrt(-2 log(1 - u[2k]))`` and the pair
    ``(r_k cos(2 pi u[2k+1]), r_k sin(2 pi u[2k+1]))`` gives values
    ``2k, 2k+1`` (the last value is dropped for odd N).
    """
    if N < 1:
        raise InvalidArgument(f"draw_noise needs N >= 1, got {N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "rademacher":
        vals = 2.0 * rng.integers(0, 2, size=N).astype(np.float64) - 1.0
    elif kind == "gaussian":
        m = (N + 1) // 2
        u = rng.random(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * math.pi * u[1::2]
        vals = np.empty(2 * m)
        vals[0::2] = r * np.cos(theta)
        vals[1::2] = r * np.sin(theta)
        vals = vals[:N]
    else:
        raise InvalidArgument(f"unknown noise kind {kind!r}")
    return NoiseDraw(kind=kind, seed=int(seed), values=vals)


# ---------------------------------------------------------------------------
# supremum search
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SupEstimate:
    """A certified lower bound for ``sup_z |Q(z)|``.

    ``certified_lower`` is an actual evaluation ``|Q(best_point)|``; the
    only upper bound ever claimed is the triangle-inequality
    ``trivial_upper``.
    """

    certified_lower: float
    trivial_upper: float
    best_point: np.ndarray
    evaluations_used: int
    method: str


def _restart_budget(budget: int, restarts: int, r: int) -> int:
    # allocation is monotone in budget per restart, so enlarging the
    # total budget never shrinks any restart's own search
    return budget // restarts + (1 if r < budget % restarts else 0)


def sup_torus_search(
    tp: TorusPoly, budget: int, restarts: int, seed: int
) -> SupEstimate:
    """Coordinate-ascent search for ``sup_z |Q(z)|`` under an evaluation budget.

    Restart 0 starts from ``z = 0``; later restarts start from uniform
    points drawn lazily in restart order from a PCG64 stream, so results
    with a larger budget refine (never undercut) those with a smaller one.
    Each coordinate visit scans a 64-point grid and golden-section refines.
    """
    if not budget >= restarts >= 1:
        raise InvalidArgument(
            f"need budget >= restarts >= 1, got budget={budget}, restarts={restarts}"
        )
    method = (
        f"coordinate-ascent(grid={_GRID_SIZE},refine={_REFINE_ITERS},"
        f"restarts={restarts},backend={kernels.backend_name()})"
    )
    if tp.tau == 0 or tp.amps.size == 0:
        val = abs(float(np.sum(tp.amps)))
        return SupEstimate(
            certified_lower=val,
            trivial_upper=tp.trivial_upper,
            best_point=np.zeros(0),
            evaluations_used=1,
            method="constant-term",
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    best_val = -math.inf
    best_z = np.zeros(tp.tau)
    used_total = 0
    for r in range(restarts):
        alloc = _restart_budget(budget, restarts, r)
        if alloc == 0:
            continue
        z0 = np.zeros(tp.tau) if r == 0 else rng.random(tp.tau)
        val, z, used = kernels.coordinate_ascent(
            tp.amps, tp.indptr, tp.cols, tp.exps,
            z0, alloc, _GRID_SIZE, _REFINE_ITERS,
        )
        used_total += used
        if val > best_val:
            best_val, best_z = val, z
    return SupEstimate(
        certified_lower=float(best_val),
        trivial_upper=tp.trivial_upper,
        best_point=best_z,
        evaluations_used=used_total,
        method=method,
    )


# ---------------------------------------------------------------------------
# closed-form sign-set value and analytic lower bounds
# ---------------------------------------------------------------------------


def sup_exact_Z(
    poly: DirichletPoly, lbs: LowerBoundSets, table: PrimeTable
) -> float:
    """Exact supremum of the L_j-restricted polynomial over the sign set.

    Members of ``L_j`` contain ``p_j`` exactly once and no other prime of
    rank ``> tau//2``, so at a sign point (``z_j in {0, 1/2}`` on the upper
    half, zero elsewhere) the restricted polynomial is
    ``sum_j (+-1) B_j`` with real block sums
    ``B_j = sum_{n in L_j} coeff_n n^(-sigma)``.  Choosing each sign to
    align gives the exact supremum ``sum_j |B_j|``.
    """
    coeff_of = dict(zip(poly.n_values.tolist(), poly.coeffs.tolist()))
    total = 0.0
    for j in sorted(lbs.L):
        block = 0.0
        for n in lbs.L[j].tolist():
            c = coeff_of.get(n)
            if c is not None:
                block += c * n ** (-poly.sigma)
        total += abs(block)
    return total


def khintchine_lower(
    spec: WeightSpec, N: int, sigma: float, tau: int, table: PrimeTable
) -> float:
    """Analytic lower bound ``2^(-1/2) sum_j (sum_{n in L_j} d_n^2 n^(-2s))^(1/2)``
    for ``E sup_t |D(sigma+it)|`` (one L2 block per upper-half prime index)."""
    if tau < 2:
        raise InvalidArgument(f"khintchine_lower needs tau >= 2, got {tau}")
    lbs = build_lower_sets(N, tau, table)
    d = weight_values(spec, N, table)
    total = 0.0
    for j in sorted(lbs.L):
        ns = lbs.L[j]
        dn = d[ns]
        total += math.sqrt(float(np.sum(dn * dn * ns.astype(np.float64) ** (-2.0 * sigma))))
    return KHINTCHINE_CONSTANT * total


def bohr_lower_sum(
    K: frozenset[int] | set[int], N: int, sigma: float, table: PrimeTable
) -> float:
    """``sum p^(-sigma)`` over primes ``p <= N`` whose 1-based rank is not
    in ``K`` -- the coprime-case lower-bound sum, up to an absolute constant
    that is tracked symbolically (comparisons using this are ratio-based)."""
    if N > table.limit:
        raise InvalidArgument(f"N={N} exceeds table limit {table.limit}")
    total = 0.0
    for rank, p in enumerate(table.primes.tolist(), start=1):
        if p > N:
            break
        if rank not in K:
            total += float(p) ** -sigma
    return total


# ---------------------------------------------------------------------------
# Monte-Carlo E sup
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MCResult:
    """Monte-Carlo estimate of ``E sup_t |D|`` from certified per-replica
    lower bounds (hence ``bias = "downward"``): each replica's value is
    ``max(searched |Q|, exact sign-set value)`` for its own noise draw."""

    mean: float
    stderr: float
    replicas: int
    per_replica: tuple[dict, ...]
    master_seed: int
    generator_id: str = GENERATOR_ID
    bias: str = "downward"
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "mean": self.mean,
            "stderr": self.stderr,
            "replicas": self.replicas,
            "per_replica": list(self.per_replica),
            "master_seed": self.master_seed,
            "generator_id": self.generator_id,
            "bias": self.bias,
            "config": self.config,
        }
        return json.dumps(doc, sort_keys=True)


def smooth_support_poly(
    spec: WeightSpec,
    N: int,
    sigma: float,
    tau: int,
    noise,
    table: PrimeTable,
) -> DirichletPoly:
    """Build the polynomial over n <= N whose prime factors all have rank
    <= tau (the full support when tau = pi(N))."""
    poly = build_poly(N, sigma, spec, noise, table)
    if tau >= table.pi_of(min(N, table.limit)):
        return poly
    if tau == 0:
        return restrict_support(poly, [1])
    ns = enumerate_smooth(N, table.prime(tau), table)
    return restrict_support(poly, ns)


def mc_esup(
    spec: WeightSpec,
    N: int,
    sigma: float,
    tau: int,
    noise_kind: str,
    replicas: int,
    budget: int,
    master_seed: int,
    table: PrimeTable,
    restarts: int = 4,
) -> MCResult:
    """Monte-Carlo estimate of ``E sup_t |D(sigma+it)|``.

    Replica ``r`` draws noise with seed ``mix_seed(master_seed, 2r)`` and
    searches with seed ``mix_seed(master_seed, 2r+1)``; its value is the
    larger of the searched torus value and the exact sign-set value, each a
    true lower bound for that draw's supremum.  The support is the
    ``p_tau``-smooth part of ``1..N``.  Replicas are independent (any
    execution order gives the same result); the reduction runs in replica
    order.
    """
    if replicas < 2:
        raise InvalidArgument(f"mc_esup needs replicas >= 2, got {replicas}")
    if budget < 1:
        raise InvalidArgument(f"budget must be >= 1, got {budget}")
    restarts = max(1, min(restarts, budget))

    base = smooth_support_poly(spec, N, sigma, tau, None, table)
    tp0 = to_torus(base, tau, table)
    base_amps = base.line_amplitudes
    support_idx = base.n_values - 1  # noise value index for each term

    # sign-set blocks resolved to positions in the support once
    blocks: list[np.ndarray] = []
    if tau >= 2 and N >= 2:
        lbs = build_lower_sets(N, tau, table)
        for j in sorted(lbs.L):
            members = lbs.L[j][np.isin(lbs.L[j], base.n_values)]
            blocks.append(np.searchsorted(base.n_values, members))

    values = np.empty(replicas)
    summaries = []
    for r in range(replicas):
        noise_seed = mix_seed(master_seed, 2 * r)
        search_seed = mix_seed(master_seed, 2 * r + 1)
        eps = draw_noise(noise_kind, noise_seed, N).values
        amps = base_amps * eps[support_idx]
        tp = TorusPoly(
            tau=tp0.tau, sigma=tp0.sigma, n_values=tp0.n_values,
            amps=amps, indptr=tp0.indptr, cols=tp0.cols, exps=tp0.exps,
        )
        est = sup_torus_search(tp, budget, restarts, search_seed)
        exact_z = 0.0
        for pos in blocks:
            exact_z += abs(float(np.sum(amps[pos])))
        value = max(est.certified_lower, exact_z)
        values[r] = value
        summaries.append({
            "replica": r,
            "value": value,
            "search_lower": est.certified_lower,
            "exact_sign_set": exact_z,
            "evaluations_used": est.evaluations_used,
        })
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(replicas))
    return MCResult(
        mean=mean,
        stderr=stderr,
        replicas=replicas,
        per_replica=tuple(summaries),
        master_seed=int(master_seed),
        config={
            "weight": spec.text(),
            "N": N,
            "sigma": sigma,
            "tau": tau,
            "noise_kind": noise_kind,
            "budget": budget,
            "restarts": restarts,
        },
    )
