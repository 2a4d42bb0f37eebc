"""Theoretical growth envelopes for ``E sup_t |D(sigma+it)|``.

Every envelope sets its (unknowable) absolute constant to 1 and carries a
``constant_symbol`` instead, so consumers compare ratios across parameters
rather than absolute values.  Logarithms are natural throughout, and
iterated-log expressions demand arguments large enough (>= 16, resp. >= 3)
that ``log log`` stays positive rather than silently clamping.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arith import PrimeTable, euler_weighted_product
from .errors import ConditionViolated, InvalidArgument
from .weights import (
    WeightSpec,
    characteristic_sums,
    check_condition,
    weight_values,
)

LARGE_TAU = "large_tau"
MID_TAU = "mid_tau"
SMALL_TAU = "small_tau"


def _loglog(x: float) -> float:
    return math.log(math.log(x))


def tau_boundaries(N: int) -> tuple[float, float]:
    """The two thresholds ``(N/(log N loglog N))^(1/2)`` and
    ``(N loglog N / log N)^(1/2)`` separating the tau regimes."""
    if N < 16:
        raise InvalidArgument(f"boundaries need N >= 16 (loglog > 0), got {N}")
    ln = math.log(N)
    lnln = _loglog(N)
    return math.sqrt(N / (ln * lnln)), math.sqrt(N * lnln / ln)


@dataclass(frozen=True)
class Regime:
    """Which of the three tau ranges a configuration falls in."""

    case_id: str
    b_low: float
    b_high: float
    N: int
    tau: int


def classify_regime(N: int, tau: int, table: PrimeTable) -> Regime:
    """Place ``tau`` among {small, mid, large}; boundary ties go upward."""
    b_low, b_high = tau_boundaries(N)
    pi_n = table.pi_of(min(N, table.limit))
    if not 1 <= tau <= pi_n:
        raise InvalidArgument(f"tau={tau} outside 1..pi(N)={pi_n}")
    if tau >= b_high:
        case = LARGE_TAU
    elif tau >= b_low:
        case = MID_TAU
    else:
        case = SMALL_TAU
    return Regime(case_id=case, b_low=b_low, b_high=b_high, N=N, tau=tau)


@dataclass(frozen=True)
class BoundEnvelope:
    """A bound value together with its multiplicative decomposition.

    ``value`` is exactly the product of ``components``; the suppressed
    absolute constant is named in ``constant_symbol``.
    """

    value: float
    components: dict[str, float]
    constant_symbol: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "value": self.value,
                "components": self.components,
                "constant_symbol": self.constant_symbol,
            },
            sort_keys=True,
        )


def _envelope(components: dict[str, float], symbol: str) -> BoundEnvelope:
    value = 1.0
    for v in components.values():
        value *= v
    return BoundEnvelope(value=value, components=components,
                         constant_symbol=symbol)


def envelope_baseline(
    N: int,
    sigma: float,
    spec: WeightSpec,
    table: PrimeTable,
    with_extra: bool = False,
) -> BoundEnvelope:
    """The all-tau envelope ``N^(1-sigma) D2~(N) / log N``.

    With ``with_extra`` the weight must satisfy the mean-square power
    condition (fitted exponent below ``1/(1+sqrt 5)``); the ``D2~`` factor
    is then absorbed into the constant, leaving ``N^(1-sigma)/log N``.
    """
    if N < 2:
        raise InvalidArgument(f"need N >= 2, got {N}")
    if not 0.0 <= sigma <= 0.5:
        raise InvalidArgument(f"sigma must be in [0, 1/2], got {sigma}")
    if with_extra:
        report = check_condition(spec, "mean_square_power", N, table)
        if not report.holds:
            b = report.fitted_constants.get("b")
            raise ConditionViolated(
                f"mean-square exponent b={b} is not below 1/(1+sqrt(5))"
            )
        return _envelope(
            {"N^(1-sigma)": N ** (1.0 - sigma), "1/log(N)": 1.0 / math.log(N)},
            "C_sigma_d",
        )
    cs = characteristic_sums(spec, N, table)
    return _envelope(
        {
            "N^(1-sigma)": N ** (1.0 - sigma),
            "D2_tilde(N)": cs.D2_tilde,
            "1/log(N)": 1.0 / math.log(N),
        },
        "C_sigma_d",
    )


def envelope_by_tau(
    N: int, sigma: float, tau: int, spec: WeightSpec, table: PrimeTable
) -> BoundEnvelope:
    """The tau-sensitive envelope ``D2~(N) * B(N, sigma, tau)``.

    ``B`` is ``N^(1/2-s) (tau/log N)^(1/2)`` for large tau,
    ``N^(3/4-s) (loglog N)^(1/4) (log N)^(-3/4)`` for mid tau, and
    ``N^(1/2-s) (tau loglog tau / log tau)^(1/2)`` for small tau
    (which therefore needs tau >= 3).
    """
    if not 0.0 <= sigma < 0.5:
        raise InvalidArgument(f"sigma must be in [0, 1/2), got {sigma}")
    regime = classify_regime(N, tau, table)
    cs = characteristic_sums(spec, N, table)
    ln = math.log(N)
    if regime.case_id == LARGE_TAU:
        comps = {
            "D2_tilde(N)": cs.D2_tilde,
            "N^(1/2-sigma)": N ** (0.5 - sigma),
            "(tau/log N)^(1/2)": math.sqrt(tau / ln),
        }
    elif regime.case_id == MID_TAU:
        comps = {
            "D2_tilde(N)": cs.D2_tilde,
            "N^(3/4-sigma)": N ** (0.75 - sigma),
            "(loglog N)^(1/4)": _loglog(N) ** 0.25,
            "(log N)^(-3/4)": ln ** -0.75,
        }
    else:
        if tau < 3:
            raise InvalidArgument(
                f"small-tau case needs tau >= 3 (loglog > 0), got {tau}"
            )
        comps = {
            "D2_tilde(N)": cs.D2_tilde,
            "N^(1/2-sigma)": N ** (0.5 - sigma),
            "(tau loglog tau/log tau)^(1/2)": math.sqrt(
                tau * _loglog(tau) / math.log(tau)
            ),
        }
    return _envelope(comps, "C_sigma_lambda")


def envelope_small_tau(
    tau: int, sigma: float, table: PrimeTable | None = None
) -> tuple[BoundEnvelope, BoundEnvelope]:
    """Two-sided envelope for few-frequency polynomials, as (lower, upper).

    For ``sigma < 1/2`` both sides carry the weighted Euler product
    ``Pi = prod_{j<=tau} (1 - p_j^(-2 sigma))^(-1)``:
    lower ``Pi^(1/2) tau^(1-s) / (log tau)^s``, upper
    ``Pi^(1/2) tau^(3/2-2s) / (log tau)^(2s)``.  At ``sigma = 1/2`` the
    pair degenerates to ``tau^(1/2)`` and ``tau^(1/2) (loglog tau)^(1/2)``
    (requiring ``tau >= 16`` so the iterated log is >= 1).
    """
    if not 0.0 < sigma <= 0.5:
        raise InvalidArgument(f"sigma must be in (0, 1/2], got {sigma}")
    if tau < 3:
        raise InvalidArgument(f"need tau >= 3, got {tau}")
    if sigma == 0.5:
        if tau < 16:
            raise InvalidArgument(
                f"sigma = 1/2 needs tau >= 16 (loglog >= 1), got {tau}"
            )
        lower = _envelope({"tau^(1/2)": math.sqrt(tau)}, "C_1")
        upper = _envelope(
            {
                "tau^(1/2)": math.sqrt(tau),
                "(loglog tau)^(1/2)": math.sqrt(_loglog(tau)),
            },
            "C_2",
        )
        return lower, upper
    pi_half = math.sqrt(
        euler_weighted_product(tau, 2.0 * sigma, "-", "power", table)
    )
    lntau = math.log(tau)
    lower = _envelope(
        {
            "Pi^(1/2)": pi_half,
            "tau^(1-sigma)": tau ** (1.0 - sigma),
            "(log tau)^(-sigma)": lntau ** -sigma,
        },
        "c_sigma",
    )
    upper = _envelope(
        {
            "Pi^(1/2)": pi_half,
            "tau^(3/2-2sigma)": tau ** (1.5 - 2.0 * sigma),
            "(log tau)^(-2sigma)": lntau ** (-2.0 * sigma),
        },
        "C_sigma",
    )
    return lower, upper


def envelope_coprime(
    N: int,
    sigma: float,
    nu: int,
    K: frozenset[int] | set[int],
    table: PrimeTable,
) -> BoundEnvelope:
    """Envelope for weights vanishing on multiples of the excluded primes:
    ``N^(1/2-s) max(1, sum_{k<=nu, k not in K} 1/p_k)^(1/2)
    sum_{k<=nu, k not in K} p_k^(-1/2)``.

    ``nu`` must stay below the small-tau boundary
    ``(N/(log N loglog N))^(1/2)``.
    """
    if not 0.0 < sigma < 0.5:
        raise InvalidArgument(f"sigma must be in (0, 1/2), got {sigma}")
    if nu < 1:
        raise InvalidArgument(f"need nu >= 1, got {nu}")
    b_low, _ = tau_boundaries(N)
    if nu > b_low:
        raise ConditionViolated(
            f"nu={nu} exceeds the allowed range (<= {b_low:.3f} for N={N})"
        )
    recip = 0.0
    recip_sqrt = 0.0
    for k in range(1, nu + 1):
        if k in K:
            continue
        p = float(table.prime(k))
        recip += 1.0 / p
        recip_sqrt += p ** -0.5
    return _envelope(
        {
            "N^(1/2-sigma)": N ** (0.5 - sigma),
            "max(1, sum 1/p)^(1/2)": math.sqrt(max(1.0, recip)),
            "sum 1/sqrt(p)": recip_sqrt,
        },
        "C_sigma",
    )


# ---------------------------------------------------------------------------
# partial-sum ratio checks
# ---------------------------------------------------------------------------

PARTIAL_SUM_KINDS = ("squares", "line_weight", "squares_alt")


def partial_sum_ratio(
    M: int,
    N: int,
    sigma: float,
    spec: WeightSpec,
    table: PrimeTable,
    kind: str,
) -> float:
    """LHS/RHS (constant set to 1) of one of the partial-sum estimates.

    ``squares`` and ``squares_alt``:
        ``sum_{m<=M} d(m)^2 m^(-2s)``  vs  ``D2~(M)^2 M^(1-2s)``.
    ``line_weight`` (needs ``M <= N/2`` so the right log is positive):
        ``sum_{m<=M} (N/m)^(1/2) log(N/m)^(-1/2) d(m)``  vs
        ``D1~(M) (N M)^(1/2) log(N/M)^(-1/2)``.

    A uniformly bounded ratio over M certifies the existence of the
    suppressed constant.
    """
    if kind not in PARTIAL_SUM_KINDS:
        raise InvalidArgument(f"unknown partial-sum kind {kind!r}")
    if not 1 <= M <= N:
        raise InvalidArgument(f"need 1 <= M <= N, got M={M}, N={N}")
    if not 0.0 < sigma < 0.5:
        raise InvalidArgument(f"sigma must be in (0, 1/2), got {sigma}")
    d = weight_values(spec, M, table)[1:]
    ms = np.arange(1, M + 1, dtype=np.float64)
    cs = characteristic_sums(spec, M, table)
    if kind in ("squares", "squares_alt"):
        lhs = float(np.sum(d * d * ms ** (-2.0 * sigma)))
        rhs = cs.D2_tilde**2 * M ** (1.0 - 2.0 * sigma)
    else:
        if M > N // 2:
            raise InvalidArgument(
                f"line_weight needs M <= N/2, got M={M}, N={N}"
            )
        lhs = float(
            np.sum(np.sqrt(N / ms) * np.log(N / ms) ** -0.5 * d)
        )
        rhs = cs.D1_tilde * math.sqrt(float(N) * M) / math.sqrt(math.log(N / M))
    return lhs / rhs


def optimal_split_index(N: int) -> int:
    """The split index balancing the two tail terms:
    ``round((N / (log N loglog N))^(1/2))``, at least 1."""
    b_low, _ = tau_boundaries(N)
    return max(1, round(b_low))


# ---------------------------------------------------------------------------
# summation-by-parts cross-check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelCheck:
    """Both sides of the summation-by-parts identity."""

    direct: float
    transformed: float

    @property
    def difference(self) -> float:
        return abs(self.direct - self.transformed)


def _adaptive_simpson(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> float:
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, b, fb, m, fm, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + rec(
            m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1
        )

    return rec(a, fa, b, fb, m, fm, whole, tol, 30)


def abel_summation_check(
    a: Sequence[float] | Callable[[int], float],
    b: Callable[[float], float],
    bprime: Callable[[float], float],
    x: float,
) -> AbelCheck:
    """Check ``sum_{n<=x} a_n b(n) = A(x) b(x) - int_1^x A(t) b'(t) dt``.

    ``a`` is a callable ``a(n)`` or a 1-indexed sequence; ``b`` must be
    continuously differentiable on [1, x] with ``bprime`` its exact
    derivative (never finite-differenced here).  The integral is evaluated
    per integer segment (where ``A`` is constant) by adaptive Simpson
    quadrature with total tolerance 1e-9.
    """
    if x < 1:
        raise InvalidArgument(f"need x >= 1, got {x}")
    nx = int(math.floor(x))
    if callable(a):
        an = [float(a(n)) for n in range(1, nx + 1)]
    else:
        if len(a) < nx:
            raise InvalidArgument(f"need {nx} coefficients, got {len(a)}")
        an = [float(a[n - 1]) for n in range(1, nx + 1)]
    direct = sum(c * b(n) for n, c in enumerate(an, start=1))
    partial = np.cumsum(an)
    segments = [(float(n), min(float(n + 1), x)) for n in range(1, nx + 1)
                if n < x]
    tol = 1e-9 / max(1, len(segments))
    integral = 0.0
    for n0, (lo, hi) in enumerate(segments, start=1):
        integral += partial[n0 - 1] * _adaptive_simpson(bprime, lo, hi, tol)
    transformed = float(partial[nx - 1]) * b(x) - integral
    return AbelCheck(direct=direct, transformed=transformed)
