"""Prime tables, factorization, smooth numbers, and classical constants.

Everything downstream (weights, cell decompositions, polynomial frequency
vectors) is built on the :class:`PrimeTable` produced here.  Conventions used
throughout the package:

* primes are indexed 1-based: ``p_1 = 2, p_2 = 3, ...``;
* ``P^+(n)`` denotes the largest prime factor of ``n``, with ``P^+(1) = 1``;
* a *y-smooth* integer is an ``n`` with ``P^+(n) <= y`` (so ``1`` is y-smooth
  for every ``y >= 1``);
* all logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DivergentFactor, InvalidArgument, ResourceLimit, TableTooSmall

# Meissel-Mertens constant: sum_{p<=x} 1/p = log log x + C_MERTENS + o(1).
# Standard decimal expansion (OEIS A077761), 20 correct digits.
MERTENS_CONSTANT = 0.26149721284764278375

# Euler-Mascheroni constant (OEIS A001620), 20 correct digits.
EULER_GAMMA = 0.57721566490153286061

# Default cap for smooth-number enumerations; see enumerate_smooth.
SMOOTH_ENUMERATION_CAP = 10**8


# ---------------------------------------------------------------------------
# prime tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes up to ``limit`` plus a smallest-prime-factor sieve.

    ``primes`` is sorted ascending; ``primes[j-1]`` is the j-th prime (the
    package uses 1-based prime indices everywhere).  ``spf[n]`` holds the
    smallest prime factor of ``n`` for composite ``n <= limit`` and ``0`` when
    ``n`` is ``0``, ``1``, or prime (a composite always has a prime factor at
    most ``sqrt(limit)``, so only those primes are sieved).
    """

    limit: int
    primes: np.ndarray
    spf: np.ndarray = field(repr=False)

    @property
    def pi(self) -> int:
        """Number of primes ``<= limit``."""
        return int(self.primes.size)

    def prime(self, j: int) -> int:
        """Return the j-th prime (1-based)."""
        if not 1 <= j <= self.pi:
            raise InvalidArgument(f"prime index {j} outside 1..{self.pi}")
        return int(self.primes[j - 1])

    def rank(self, p: int) -> int:
        """Return j with ``p_j == p``, or raise if ``p`` is not in the table."""
        j = int(np.searchsorted(self.primes, p))
        if j >= self.pi or self.primes[j] != p:
            raise InvalidArgument(f"{p} is not a prime <= {self.limit}")
        return j + 1

    def pi_of(self, x: float) -> int:
        """Number of primes ``<= x`` (requires ``x <= limit``)."""
        if x > self.limit:
            raise TableTooSmall(f"pi({x}) needs a table past limit={self.limit}")
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))

    def is_prime(self, n: int) -> bool:
        if not 1 <= n <= self.limit:
            raise TableTooSmall(f"primality of {n} not covered by limit={self.limit}")
        return n >= 2 and self.spf[n] == 0


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to ``limit`` (``limit >= 2``).

    Also records, for every composite ``n <= limit``, its smallest prime
    factor, which makes later factorizations a chain of O(log n) lookups.
    """
    if limit < 2:
        raise InvalidArgument(f"sieve limit must be >= 2, got {limit}")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:  # p is prime
            block = spf[p * p :: p]
            block[block == 0] = p
    is_comp = spf != 0
    is_comp[:2] = True
    primes = np.flatnonzero(~is_comp).astype(np.int64)
    return PrimeTable(limit=limit, primes=primes, spf=spf)


def largest_prime_factor_sieve(N: int, table: PrimeTable) -> np.ndarray:
    """Vector ``lpf`` with ``lpf[n] = P^+(n)`` for ``0 <= n <= N``.

    ``lpf[0] = 0`` and ``lpf[1] = 1`` by convention.  Built by one slice
    assignment per prime (ascending, so larger primes overwrite smaller ones).
    """
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if N > table.limit:
        raise TableTooSmall(f"P^+ sieve to {N} needs limit >= {N}")
    lpf = np.zeros(N + 1, dtype=np.int64)
    lpf[1] = 1
    for p in table.primes:
        if p > N:
            break
        lpf[p::p] = p
    return lpf


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``n = prod p_{j_i}^{a_i}``.

    ``factors`` lists ``(j, a)`` pairs with 1-based prime indices ``j``
    ascending and exponents ``a >= 1``.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        """Number of distinct prime factors."""
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        """Number of prime factors with multiplicity."""
        return sum(a for _, a in self.factors)

    def primes(self, table: PrimeTable) -> tuple[int, ...]:
        return tuple(table.prime(j) for j, _ in self.factors)


def factorize(n: int, table: PrimeTable) -> Factorization:
    """Factor ``n >= 1``, certifying every prime factor against the table.

    For ``n <= table.limit`` this walks the smallest-prime-factor chain.
    Larger ``n`` are trial-divided by the table's primes; if a remainder
    bigger than ``table.limit`` survives, the table cannot certify its
    primality (for ``n > limit**2`` it may even be composite), so
    ``TableTooSmall`` is raised.
    """
    if n < 1:
        raise InvalidArgument(f"factorize needs n >= 1, got {n}")
    pairs: list[tuple[int, int]] = []
    if n <= table.limit:
        m = n
        spf = table.spf
        while m > 1:
            p = int(spf[m])
            if p == 0:  # m itself is prime
                p = m
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            pairs.append((table.rank(p), a))
        return Factorization(n=n, factors=tuple(sorted(pairs)))
    m = n
    for p in table.primes:
        if p * p > m:
            break
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            pairs.append((table.rank(int(p)), a))
    if m > 1:
        if m > table.limit:
            raise TableTooSmall(
                f"{n} has a factor {m} beyond the certified range "
                f"(limit={table.limit})"
            )
        pairs.append((table.rank(m), 1))
    return Factorization(n=n, factors=tuple(sorted(pairs)))


def p_plus(n: int, table: PrimeTable) -> int:
    """Largest prime factor ``P^+(n)``, with ``P^+(1) = 1``."""
    if n == 1:
        return 1
    fac = factorize(n, table)
    return table.prime(fac.factors[-1][0])


# ---------------------------------------------------------------------------
# smooth numbers
# ---------------------------------------------------------------------------


def enumerate_smooth(
    x: float,
    y: float,
    table: PrimeTable,
    cap: int = SMOOTH_ENUMERATION_CAP,
) -> np.ndarray:
    """Ascending array of all y-smooth integers ``n <= x``.

    Generated by depth-first multiplication over primes ``<= y`` (never by
    scanning ``1..x``), so the cost is proportional to the output size
    ``Psi(x, y)``.  Raises ``ResourceLimit`` if more than ``cap`` values would
    be produced.  ``1`` is always included (``x >= 1`` required).
    """
    if x < 1:
        raise InvalidArgument(f"enumerate_smooth needs x >= 1, got {x}")
    if y < 1:
        raise InvalidArgument(f"enumerate_smooth needs y >= 1, got {y}")
    if y > table.limit:
        raise TableTooSmall(f"smoothness bound {y} exceeds limit={table.limit}")
    xi = math.floor(x)
    ps = [int(p) for p in table.primes[table.primes <= min(y, xi)]]
    out: list[int] = [1]

    def grow(start: int, val: int) -> None:
        for k in range(start, len(ps)):
            nxt = val * ps[k]
            if nxt > xi:
                break  # primes ascend, so later branches only get bigger
            if len(out) >= cap:
                raise ResourceLimit(
                    f"more than {cap} {y}-smooth integers <= {x}"
                )
            out.append(nxt)
            grow(k, nxt)

    grow(0, 1)
    return np.sort(np.asarray(out, dtype=np.int64))


@dataclass(frozen=True)
class SmoothStats:
    """Count and harmonic sums of the y-smooth integers up to x."""

    x: float
    y: float
    count: int
    harmonic_sums: dict[float, float]


def smooth_harmonic_sum(x: float, y: float, beta: float, table: PrimeTable) -> float:
    """``sum n^-beta`` over y-smooth ``n <= x``."""
    ns = enumerate_smooth(x, y, table)
    return float(np.sum(ns.astype(np.float64) ** (-beta)))


def smooth_stats(
    x: float,
    y: float,
    betas: Sequence[float],
    table: PrimeTable,
) -> SmoothStats:
    """Count y-smooth ``n <= x`` and their harmonic sums for each beta."""
    ns = enumerate_smooth(x, y, table).astype(np.float64)
    sums = {float(b): float(np.sum(ns ** (-float(b)))) for b in betas}
    return SmoothStats(x=x, y=y, count=int(ns.size), harmonic_sums=sums)


# ---------------------------------------------------------------------------
# Dickman's function
# ---------------------------------------------------------------------------

_DICKMAN_STEP = 1e-4
_dickman_grid: np.ndarray = np.ones(int(round(1.0 / _DICKMAN_STEP)) + 1)


def _extend_dickman_grid(u_max: float) -> None:
    """Extend the cached midpoint-rule grid for rho to cover ``u_max``.

    rho solves ``u rho'(u) = -rho(u-1)`` with ``rho = 1`` on ``[0, 1]``.  The
    grid advances with the midpoint rule
    ``rho(u+h) = rho(u) - h * rho(u+h/2-1)/(u+h/2)`` using the average of the
    two neighbouring grid values for the half-step lookback (the lookback
    index ``u + h/2 - 1`` always falls exactly between grid points).  With
    ``h = 1e-4`` the accumulated error is far below 1e-8 on moderate ranges.
    """
    global _dickman_grid
    h = _DICKMAN_STEP
    per_unit = int(round(1.0 / h))
    needed = int(math.ceil(u_max / h)) + 1
    if needed <= _dickman_grid.size:
        return
    grid = list(_dickman_grid)
    while len(grid) < needed:
        k = len(grid) - 1  # current top index; u = k*h >= 1
        u = k * h
        back = k - per_unit  # index of u - 1
        rho_mid = 0.5 * (grid[back] + grid[back + 1])
        grid.append(grid[k] - h * rho_mid / (u + 0.5 * h))
    _dickman_grid = np.asarray(grid)


def dickman_rho(u: float) -> float:
    """Dickman's function rho(u) (density of smooth numbers).

    ``rho(u) = 1`` for ``0 <= u <= 1`` and ``u rho'(u) = -rho(u-1)`` beyond;
    values come from a cached fixed-step midpoint integration with linear
    interpolation between grid points.
    """
    if u < 0:
        raise InvalidArgument(f"dickman_rho needs u >= 0, got {u}")
    if u <= 1.0:
        return 1.0
    _extend_dickman_grid(u)
    pos = u / _DICKMAN_STEP
    k = min(int(pos), _dickman_grid.size - 2)
    frac = pos - k
    return float((1.0 - frac) * _dickman_grid[k] + frac * _dickman_grid[k + 1])


# ---------------------------------------------------------------------------
# prime sums and products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MertensCheck:
    """Reciprocal prime sum with its asymptotic reference and error budget."""

    value: float  # sum_{p <= x} 1/p
    reference: float  # log log x + Mertens constant
    tolerance: float  # 5 / log x, a safe explicit error bound for x >= 2

    @property
    def within(self) -> bool:
        return abs(self.value - self.reference) < self.tolerance


def mertens_prime_sum(x: float, table: PrimeTable) -> MertensCheck:
    """``sum_{p <= x} 1/p`` against ``log log x + C_MERTENS`` (x >= 2)."""
    if x < 2:
        raise InvalidArgument(f"mertens_prime_sum needs x >= 2, got {x}")
    if x > table.limit:
        raise TableTooSmall(f"prime sum to {x} needs limit >= {x}")
    ps = table.primes[table.primes <= x].astype(np.float64)
    value = float(np.sum(1.0 / ps))
    lx = math.log(x)
    return MertensCheck(
        value=value,
        reference=math.log(lx) + MERTENS_CONSTANT,
        tolerance=5.0 / lx,
    )


def euler_weighted_product(
    tau: int,
    lam: float,
    sign: str = "-",
    exponent_form: str = "linear",
    table: PrimeTable | None = None,
) -> float:
    """Truncated Euler product over the first ``tau`` primes.

    ``exponent_form="linear"`` gives ``prod_{j<=tau} (1 -/+ lam/p_j)^-1`` and
    ``exponent_form="power"`` gives ``prod_{j<=tau} (1 -/+ p_j^-lam)^-1``;
    ``sign`` selects the minus (default) or plus variant.  The minus variants
    require ``lam < 2`` (linear) resp. ``lam > 0`` (power), otherwise the
    first factor is infinite or negative and ``DivergentFactor`` is raised.
    An empty product (``tau == 0``) is 1.
    """
    if tau < 0:
        raise InvalidArgument(f"tau must be >= 0, got {tau}")
    if sign not in ("-", "+"):
        raise InvalidArgument(f"sign must be '-' or '+', got {sign!r}")
    if exponent_form not in ("linear", "power"):
        raise InvalidArgument(f"unknown exponent_form {exponent_form!r}")
    if tau == 0:
        return 1.0
    if table is None or table.pi < tau:
        table = sieve_primes(nth_prime_bound(tau))
    ps = table.primes[:tau].astype(np.float64)
    if exponent_form == "linear":
        if sign == "-" and not lam < 2.0:
            raise DivergentFactor(
                f"linear factor (1 - {lam}/2)^-1 diverges for lam >= 2"
            )
        terms = lam / ps
    else:
        if sign == "-" and not lam > 0.0:
            raise DivergentFactor(
                f"power factor (1 - p^-{lam})^-1 diverges for lam <= 0"
            )
        terms = ps ** (-lam)
    factors = 1.0 - terms if sign == "-" else 1.0 + terms
    if np.any(factors <= 0.0):
        raise DivergentFactor("a product factor is zero or negative")
    return float(np.exp(-np.sum(np.log(factors))))


def nth_prime_bound(j: int) -> int:
    """An integer upper bound for the j-th prime (Rosser-type, crude is fine)."""
    if j < 1:
        raise InvalidArgument(f"prime index must be >= 1, got {j}")
    if j < 6:
        return 13
    x = float(j)
    return int(math.ceil(x * (math.log(x) + math.log(math.log(x))))) + 1


# ---------------------------------------------------------------------------
# coprime counts and sums
# ---------------------------------------------------------------------------


def _coprime_mask(x: int, K: Iterable[int], table: PrimeTable) -> np.ndarray:
    """Boolean mask over 0..x of integers coprime to all primes p_j, j in K."""
    mask = np.ones(x + 1, dtype=bool)
    mask[0] = False
    for j in sorted(set(int(j) for j in K)):
        p = table.prime(j)
        if p <= x:
            mask[p::p] = False
    return mask


@dataclass(frozen=True)
class CoprimeCount:
    """Exact coprime count next to its elementary sieve upper estimate."""

    count: int
    product_bound: float  # x * prod_{j in K, p_j <= x} (1 - 1/p_j)


def coprime_count(x: int, K: Iterable[int], table: PrimeTable) -> CoprimeCount:
    """Count ``1 <= k <= x`` divisible by no ``p_j`` with ``j in K``.

    ``K`` holds 1-based prime indices.  Also returns the first-order sieve
    estimate ``x * prod (1 - 1/p_j)`` over the ``p_j <= x``.
    """
    if x < 1:
        raise InvalidArgument(f"coprime_count needs x >= 1, got {x}")
    if x > table.limit:
        raise TableTooSmall(f"coprime sieve to {x} needs limit >= {x}")
    mask = _coprime_mask(x, K, table)
    prod = 1.0
    for j in sorted(set(int(j) for j in K)):
        p = table.prime(j)
        if p <= x:
            prod *= 1.0 - 1.0 / p
    return CoprimeCount(count=int(np.count_nonzero(mask)), product_bound=x * prod)


def coprime_harmonic_sum(
    x: int, K: Iterable[int], beta: float, table: PrimeTable
) -> float:
    """``sum k^-beta`` over ``1 <= k <= x`` coprime to all ``p_j``, j in K."""
    if x < 1:
        raise InvalidArgument(f"coprime_harmonic_sum needs x >= 1, got {x}")
    if x > table.limit:
        raise TableTooSmall(f"coprime sieve to {x} needs limit >= {x}")
    mask = _coprime_mask(x, K, table)
    ks = np.flatnonzero(mask).astype(np.float64)
    return float(np.sum(ks ** (-beta)))


# ---------------------------------------------------------------------------
# asymptotic cross-checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticCheck:
    """A computed quantity against its asymptotic main term."""

    lhs: float
    rhs: float
    u: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def residual_over_u(self) -> float:
        return self.residual / self.u


def smooth_harmonic_asymptotic_check(
    x: float, y: float, table: PrimeTable
) -> AsymptoticCheck:
    """Compare ``sum 1/n`` over y-smooth ``n <= x`` with ``e^gamma log y``.

    For ``x = y^u`` with fixed ``u`` the sum tends to ``e^gamma * log y``
    (up to an O(u)-sized correction, reported via ``residual_over_u``).
    """
    if y < 2:
        raise InvalidArgument(f"asymptotic check needs y >= 2, got {y}")
    if x < y:
        raise InvalidArgument(f"asymptotic check needs x >= y, got x={x} y={y}")
    lhs = smooth_harmonic_sum(x, y, 1.0, table)
    rhs = math.exp(EULER_GAMMA) * math.log(y)
    return AsymptoticCheck(lhs=lhs, rhs=rhs, u=math.log(x) / math.log(y))
