"""Largest-prime-factor cells and the lower-bound index sets.

The integers ``2..N`` are partitioned into *cells* ``E_j = {n : P^+(n) = p_j}``
indexed by the rank ``j`` of the largest prime factor.  On top of the cells:

* ``split_cells`` separates the first ``nu`` cells from the rest (the
  head/tail split used by the truncated envelopes);
* ``build_lower_sets`` constructs, for ``tau//2 < j <= tau``, the sets
  ``L_j = {p_j * n~ : n~ <= N/p_j, P^+(n~) <= p_{tau//2}}`` whose disjoint
  frequency structure powers the closed-form sign-set supremum;
* ``enumerate_sign_patterns`` lists the torus points with ``z_j in {0, 1/2}``
  on the upper half of the indices (all other coordinates zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arith import PrimeTable, enumerate_smooth, largest_prime_factor_sieve
from .errors import InvalidArgument, ResourceLimit, TableTooSmall
from .weights import WeightSpec, weight_values

SIGN_PATTERN_CAP = 2**24


@dataclass(frozen=True, eq=False)
class CellDecomposition:
    """Partition of ``2..N`` by largest-prime-factor rank.

    ``cells[j]`` is the ascending array of the members of ``E_j`` for
    ``1 <= j <= tau_max = pi(N)`` (every cell is non-empty: it contains at
    least ``p_j``).  ``support`` lists the cell indices on which the weight
    is not identically zero, and ``tau_d`` is the largest of them (0 when
    the weight vanishes on every cell).
    """

    N: int
    tau_max: int
    cells: dict[int, np.ndarray]
    support: tuple[int, ...]
    tau_d: int


def build_cells(N: int, spec: WeightSpec, table: PrimeTable) -> CellDecomposition:
    """Decompose ``2..N`` into largest-prime-factor cells under ``spec``."""
    if N < 2:
        raise InvalidArgument(f"build_cells needs N >= 2, got {N}")
    if N > table.limit:
        raise TableTooSmall(f"cells to {N} need a table with limit >= {N}")
    lpf = largest_prime_factor_sieve(N, table)
    ranks = np.searchsorted(table.primes, lpf[2:]) + 1  # rank of P^+(n), n>=2
    ns = np.arange(2, N + 1, dtype=np.int64)
    order = np.argsort(ranks, kind="stable")  # cells ascending, members sorted
    sorted_ranks = ranks[order]
    sorted_ns = ns[order]
    boundaries = np.searchsorted(sorted_ranks, np.arange(1, sorted_ranks[-1] + 2))
    cells: dict[int, np.ndarray] = {}
    for j in range(1, int(sorted_ranks[-1]) + 1):
        lo, hi = boundaries[j - 1], boundaries[j]
        if lo < hi:
            cells[j] = sorted_ns[lo:hi]
    tau_max = table.pi_of(N)
    vals = weight_values(spec, N, table)
    support = tuple(j for j, members in cells.items() if np.any(vals[members] != 0))
    tau_d = max(support, default=0)
    return CellDecomposition(
        N=N, tau_max=tau_max, cells=cells, support=support, tau_d=tau_d
    )


def split_cells(
    dec: CellDecomposition, nu: int
) -> tuple[np.ndarray, np.ndarray]:
    """Split ``2..N`` into cells ``<= nu`` (head) and ``> nu`` (tail).

    Returns ``(head, tail)`` as ascending arrays; their union with ``{1}``
    missing is exactly ``2..N``.
    """
    if not 1 <= nu <= dec.tau_max:
        raise InvalidArgument(
            f"split index {nu} outside 1..{dec.tau_max} for N={dec.N}"
        )
    head = [dec.cells[j] for j in dec.cells if j <= nu]
    tail = [dec.cells[j] for j in dec.cells if j > nu]
    cat = lambda parts: (
        np.sort(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)
    )
    return cat(head), cat(tail)


@dataclass(frozen=True, eq=False)
class LowerBoundSets:
    """The disjoint sub-cells ``L_j`` for ``tau//2 < j <= tau``.

    ``cutoff_rank = tau//2`` is the smoothness rank: members of ``L_j`` are
    ``p_j`` times a ``p_{tau//2}``-smooth integer ``<= N/p_j`` (for
    ``tau = 2, 3`` the cutoff rank is 1 and the smooth part is a power of 2,
    resp. of 2 with p_1-smoothness).  ``half = ceil(tau/2)`` is the number
    of sets.
    """

    N: int
    tau: int
    cutoff_rank: int
    half: int
    L: dict[int, np.ndarray]


def build_lower_sets(N: int, tau: int, table: PrimeTable) -> LowerBoundSets:
    """Build the lower-bound sets ``L_j`` for ``tau//2 < j <= tau``."""
    if N < 2:
        raise InvalidArgument(f"build_lower_sets needs N >= 2, got {N}")
    pi_n = table.pi_of(min(N, table.limit))
    if not 2 <= tau <= pi_n:
        raise InvalidArgument(f"tau={tau} outside 2..pi(N)={pi_n} for N={N}")
    cutoff_rank = tau // 2
    smooth_bound = table.prime(cutoff_rank)
    L: dict[int, np.ndarray] = {}
    for j in range(cutoff_rank + 1, tau + 1):
        p = table.prime(j)
        base = enumerate_smooth(N // p, smooth_bound, table)
        L[j] = p * base
    return LowerBoundSets(
        N=N, tau=tau, cutoff_rank=cutoff_rank, half=tau - cutoff_rank, L=L
    )


@dataclass(frozen=True)
class SignPattern:
    """A torus point with ``z_j in {0, 1/2}`` on indices ``tau//2 < j <= tau``.

    ``half_indices`` is the sorted tuple of indices where ``z_j = 1/2``;
    every other coordinate is zero.
    """

    tau: int
    half_indices: tuple[int, ...]

    def z_vector(self) -> np.ndarray:
        z = np.zeros(self.tau)
        for j in self.half_indices:
            z[j - 1] = 0.5
        return z


def count_sign_patterns(tau: int) -> int:
    """``2^(tau - tau//2)``, the size of the sign set for this tau."""
    if tau < 1:
        raise InvalidArgument(f"tau must be >= 1, got {tau}")
    return 2 ** (tau - tau // 2)


def enumerate_sign_patterns(
    tau: int, cap: int = SIGN_PATTERN_CAP
) -> Iterator[SignPattern]:
    """Yield all sign patterns for ``tau`` in lexicographic order.

    Order is lexicographic over the membership vector of the indices
    ``tau//2 + 1, ..., tau`` (so the all-zero pattern comes first and the
    smallest index is the most significant bit).  Raises ``ResourceLimit``
    when the pattern count exceeds ``cap``.
    """
    total = count_sign_patterns(tau)
    if total > cap:
        raise ResourceLimit(f"{total} sign patterns exceed the cap {cap}")
    indices = list(range(tau // 2 + 1, tau + 1))
    m = len(indices)
    for mask in range(total):
        chosen = tuple(
            indices[k] for k in range(m) if (mask >> (m - 1 - k)) & 1
        )
        yield SignPattern(tau=tau, half_indices=chosen)


def tail_prime_indices(N: int, tau: int, table: PrimeTable) -> frozenset[int]:
    """Indices of the primes in ``(p_tau, N]``: the set ``{tau+1..pi(N)}``."""
    pi_n = table.pi_of(N)
    if not 0 <= tau <= pi_n:
        raise InvalidArgument(f"tau={tau} outside 0..pi(N)={pi_n}")
    return frozenset(range(tau + 1, pi_n + 1))
