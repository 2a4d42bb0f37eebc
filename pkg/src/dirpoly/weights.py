"""Weight families d(n) and their growth-condition checkers.

A *weight* is a non-negative arithmetic function ``d`` with ``d(1) = 1`` for
every built-in family (user tables may break this; the ``WeightSpec``
flag ``d1_is_one`` records it).  The families:

=====================  =====================================================
``one``                ``d(n) = 1``
``divisor``            number of divisors of ``n``
``lambda_omega``       ``lam ** omega(n)`` (distinct prime factors)
``lambda_big_omega``   ``lam ** Omega(n)`` (prime factors with multiplicity)
``coprime_indicator``  1 if no ``p_j`` with ``j`` in the index set divides n
``truncated_divisor``  number of divisors of ``n`` that are ``<= cutoff``
``exp_log_alpha``      ``exp((log n) ** alpha)``, ``0 < alpha < 1``
``product``            pointwise product of other weights
``custom``             values supplied as a table over ``1..len(values)``
=====================  =====================================================

Prime index sets are always 1-based ranks into the prime table
(``1 -> 2, 2 -> 3, ...``).

The condition checkers (:func:`check_condition`) verify or fit the standard
sub-multiplicative growth hypotheses over an exhaustive finite range; ids and
shapes of the checked inequalities are listed in :data:`CONDITIONS`.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .arith import PrimeTable
from .errors import InvalidArgument, TableTooSmall, UndefinedWeight

FAMILIES = (
    "one",
    "divisor",
    "lambda_omega",
    "lambda_big_omega",
    "coprime_indicator",
    "truncated_divisor",
    "exp_log_alpha",
    "product",
    "custom",
)

# Condition id -> checked inequality (over an exhaustive finite range).
CONDITIONS: dict[str, str] = {
    "submultiplicative": "d(n*m) <= C d(n) d(m) for coprime n, m",
    "prime_step": "d(n) <= C d(n/p) for p | n, and d(p^j) <= C1 lam^j with lam < sqrt(2)",
    "prime_power_poly": "d(k p^j) <= C d(k) j^H",
    "prime_power_ratio": "d(p^a) <= lam d(p^(a-1))",
    "prime_power_geom": "d(p^m) <= lam1 lam2^m with lam2 < 2",
    "mean_square_power": "D2_tilde(m) <= C m^b with b < 1/(1+sqrt(5))",
}

# Growth exponent threshold for the mean-square condition.
MEAN_SQUARE_EXPONENT_LIMIT = 1.0 / (1.0 + math.sqrt(5.0))

_REL_TOL = 1e-12  # slack for float comparisons in condition checks


@dataclass(frozen=True)
class WeightSpec:
    """Immutable description of a weight function.

    Build instances with the named constructors (``WeightSpec.divisor()``,
    ``WeightSpec.lambda_omega(1.5)``, ...) or parse the canonical text form
    with :func:`parse_weight`.
    """

    family: str
    lam: float | None = None
    alpha: float | None = None
    cutoff: int | None = None
    indices: tuple[int, ...] | None = None
    factors: tuple["WeightSpec", ...] | None = None
    values: tuple[float, ...] | None = field(default=None, repr=False)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def one() -> "WeightSpec":
        return WeightSpec(family="one")

    @staticmethod
    def divisor() -> "WeightSpec":
        return WeightSpec(family="divisor")

    @staticmethod
    def lambda_omega(lam: float) -> "WeightSpec":
        if lam <= 0:
            raise InvalidArgument(f"lambda_omega needs lam > 0, got {lam}")
        return WeightSpec(family="lambda_omega", lam=float(lam))

    @staticmethod
    def lambda_big_omega(lam: float) -> "WeightSpec":
        if lam <= 0:
            raise InvalidArgument(f"lambda_big_omega needs lam > 0, got {lam}")
        return WeightSpec(family="lambda_big_omega", lam=float(lam))

    @staticmethod
    def coprime_indicator(indices: Iterable[int]) -> "WeightSpec":
        idx = tuple(sorted(set(int(j) for j in indices)))
        if any(j < 1 for j in idx):
            raise InvalidArgument("prime indices must be >= 1")
        return WeightSpec(family="coprime_indicator", indices=idx)

    @staticmethod
    def truncated_divisor(cutoff: int) -> "WeightSpec":
        if cutoff < 1:
            raise InvalidArgument(f"cutoff must be >= 1, got {cutoff}")
        return WeightSpec(family="truncated_divisor", cutoff=int(cutoff))

    @staticmethod
    def exp_log_alpha(alpha: float) -> "WeightSpec":
        if not 0.0 < alpha < 1.0:
            raise InvalidArgument(f"exp_log_alpha needs 0 < alpha < 1, got {alpha}")
        return WeightSpec(family="exp_log_alpha", alpha=float(alpha))

    @staticmethod
    def product(*factors: "WeightSpec") -> "WeightSpec":
        if len(factors) < 2:
            raise InvalidArgument("product needs at least two factors")
        return WeightSpec(family="product", factors=tuple(factors))

    @staticmethod
    def custom(values: Sequence[float]) -> "WeightSpec":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise InvalidArgument("custom weight needs at least d(1)")
        if any(v < 0 for v in vals):
            raise InvalidArgument("weights must be non-negative")
        return WeightSpec(family="custom", values=vals)

    # -- properties ----------------------------------------------------------

    @property
    def d1_is_one(self) -> bool:
        """True when d(1) == 1 (guaranteed for all built-in families)."""
        if self.family == "custom":
            return self.values[0] == 1.0
        if self.family == "product":
            return all(f.d1_is_one for f in self.factors)
        return True

    def text(self) -> str:
        """Canonical text form (parse_weight round-trips it)."""
        f = self.family
        if f in ("one", "divisor"):
            return f
        if f in ("lambda_omega", "lambda_big_omega"):
            return f"{f}({self.lam:g})"
        if f == "exp_log_alpha":
            return f"{f}({self.alpha:g})"
        if f == "truncated_divisor":
            return f"{f}({self.cutoff})"
        if f == "coprime_indicator":
            return f"coprime_indicator({','.join(str(j) for j in self.indices)})"
        if f == "product":
            return f"product({';'.join(x.text() for x in self.factors)})"
        digest = hashlib.sha256(repr(self.values).encode()).hexdigest()[:12]
        return f"custom(len={len(self.values)},sha256={digest})"


def parse_weight(text: str) -> WeightSpec:
    """Parse the canonical text form of a weight.

    Examples: ``one``, ``divisor``, ``lambda_omega(1.2)``,
    ``coprime_indicator(1,2)``, ``truncated_divisor(100)``,
    ``exp_log_alpha(0.5)``, ``product(divisor;lambda_omega(1.2))``.
    (``custom`` weights carry a value table and have no parseable form; the
    CLI builds them from files.)
    """
    text = text.strip()
    if text in ("one", "divisor"):
        return WeightSpec(family=text)
    m = re.fullmatch(r"(\w+)\((.*)\)", text, flags=re.S)
    if not m:
        raise InvalidArgument(f"cannot parse weight {text!r}")
    name, arg = m.group(1), m.group(2).strip()
    if name == "lambda_omega":
        return WeightSpec.lambda_omega(float(arg))
    if name == "lambda_big_omega":
        return WeightSpec.lambda_big_omega(float(arg))
    if name == "exp_log_alpha":
        return WeightSpec.exp_log_alpha(float(arg))
    if name == "truncated_divisor":
        return WeightSpec.truncated_divisor(int(arg))
    if name == "coprime_indicator":
        idx = [int(s) for s in arg.split(",") if s.strip()] if arg else []
        return WeightSpec.coprime_indicator(idx)
    if name == "product":
        parts = _split_top_level(arg, ";")
        return WeightSpec.product(*(parse_weight(p) for p in parts))
    raise InvalidArgument(f"unknown weight family {name!r}")


def _split_top_level(text: str, sep: str) -> list[str]:
    """Split on ``sep`` ignoring separators nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_weight(spec: WeightSpec, n: int, table: PrimeTable) -> float:
    """Evaluate ``d(n)`` for a single integer ``n >= 1``."""
    if n < 1:
        raise InvalidArgument(f"weights are defined for n >= 1, got {n}")
    f = spec.family
    if f == "one":
        return 1.0
    if f == "custom":
        if n > len(spec.values):
            raise UndefinedWeight(
                f"custom weight has {len(spec.values)} values, asked for d({n})"
            )
        return spec.values[n - 1]
    if f == "product":
        out = 1.0
        for factor in spec.factors:
            out *= eval_weight(factor, n, table)
        return out
    if f == "truncated_divisor":
        return float(sum(1 for k in range(1, min(spec.cutoff, n) + 1) if n % k == 0))
    if f == "exp_log_alpha":
        return math.exp(math.log(n) ** spec.alpha) if n > 1 else 1.0
    if f == "coprime_indicator":
        for j in spec.indices:
            if j <= table.pi and n % table.prime(j) == 0:
                return 0.0
        return 1.0
    # divisor / lambda_omega / lambda_big_omega need the factorization
    from .arith import factorize

    fac = factorize(n, table)
    if f == "divisor":
        out = 1.0
        for _, a in fac.factors:
            out *= a + 1
        return out
    if f == "lambda_omega":
        return spec.lam ** fac.omega
    if f == "lambda_big_omega":
        return spec.lam ** fac.big_omega
    raise InvalidArgument(f"unknown weight family {f!r}")


def weight_values(spec: WeightSpec, M: int, table: PrimeTable) -> np.ndarray:
    """Vector ``vals`` with ``vals[n] = d(n)`` for ``0 <= n <= M``.

    ``vals[0] = 0`` by convention.  Each family is computed by a sieve-style
    vectorized pass, so the cost is ``O(M log M)`` at worst.
    """
    if M < 1:
        raise InvalidArgument(f"weight_values needs M >= 1, got {M}")
    f = spec.family
    if f == "one":
        vals = np.ones(M + 1)
        vals[0] = 0.0
        return vals
    if f == "custom":
        if M > len(spec.values):
            raise UndefinedWeight(
                f"custom weight has {len(spec.values)} values, asked up to {M}"
            )
        vals = np.zeros(M + 1)
        vals[1:] = spec.values[:M]
        return vals
    if f == "product":
        vals = np.ones(M + 1)
        for factor in spec.factors:
            vals *= weight_values(factor, M, table)
        vals[0] = 0.0
        return vals
    if f in ("divisor", "truncated_divisor"):
        top = M if f == "divisor" else min(spec.cutoff, M)
        counts = np.zeros(M + 1)
        for k in range(1, top + 1):
            counts[k::k] += 1.0
        counts[0] = 0.0
        return counts
    if f == "exp_log_alpha":
        ns = np.arange(M + 1, dtype=np.float64)
        ns[0] = 1.0  # placeholder, overwritten below
        vals = np.exp(np.log(ns) ** spec.alpha)
        vals[0] = 0.0
        if M >= 1:
            vals[1] = 1.0
        return vals
    if f == "coprime_indicator":
        vals = np.ones(M + 1)
        vals[0] = 0.0
        for j in spec.indices:
            if j <= table.pi:
                p = table.prime(j)
                if p <= M:
                    vals[p::p] = 0.0
        return vals
    if f in ("lambda_omega", "lambda_big_omega"):
        if M > table.limit:
            raise TableTooSmall(f"weight sieve to {M} needs limit >= {M}")
        counts = np.zeros(M + 1, dtype=np.int64)
        for p in table.primes:
            p = int(p)
            if p > M:
                break
            counts[p::p] += 1
            if f == "lambda_big_omega":
                q = p * p
                while q <= M:
                    counts[q::q] += 1
                    q *= p
        vals = np.asarray(spec.lam, dtype=np.float64) ** counts
        vals[0] = 0.0
        return vals
    raise InvalidArgument(f"unknown weight family {f!r}")


# ---------------------------------------------------------------------------
# characteristic sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacteristicSums:
    """Partial-sum statistics of a weight up to M.

    ``D1 = sum_{n<=M} d(n)``, ``D2 = sum_{n<=M} d(n)^2``,
    ``D1_tilde = max_{m<=M} D1(m)/m`` and
    ``D2_tilde = max_{m<=M} (D2(m)/m)^(1/2)``.
    """

    M: int
    D1: float
    D2: float
    D1_tilde: float
    D2_tilde: float


def characteristic_sums(spec: WeightSpec, M: int, table: PrimeTable) -> CharacteristicSums:
    """Compute the four characteristic sums of ``d`` up to ``M`` in one pass."""
    vals = weight_values(spec, M, table)
    ms = np.arange(M + 1, dtype=np.float64)
    c1 = np.cumsum(vals)
    c2 = np.cumsum(vals * vals)
    d1t = float(np.max(c1[1:] / ms[1:]))
    d2t = float(math.sqrt(np.max(c2[1:] / ms[1:])))
    return CharacteristicSums(
        M=M, D1=float(c1[-1]), D2=float(c2[-1]), D1_tilde=d1t, D2_tilde=d2t
    )


def sup_prime_value(spec: WeightSpec, limit: int, table: PrimeTable) -> float:
    """``max d(p)`` over primes ``p <= limit``."""
    if limit < 2:
        raise InvalidArgument(f"sup_prime_value needs limit >= 2, got {limit}")
    vals = weight_values(spec, limit, table)
    ps = table.primes[table.primes <= limit]
    if ps.size == 0:
        raise InvalidArgument("no primes below the limit")
    return float(np.max(vals[ps]))


def log_power_ratios(
    spec: WeightSpec, N: int, table: PrimeTable
) -> tuple[float, float]:
    """Ratios of the maximal averages to their expected log powers.

    Returns ``(D1_tilde(N) / (log N)^M_d, D2_tilde(N) / (log N)^(M_d^2))``
    where ``M_d = max_{p<=N} d(p)``.  For weights dominated by their prime
    values these ratios stay bounded as N grows.
    """
    if N < 3:
        raise InvalidArgument(f"log_power_ratios needs N >= 3, got {N}")
    md = sup_prime_value(spec, N, table)
    cs = characteristic_sums(spec, N, table)
    ln = math.log(N)
    return (cs.D1_tilde / ln**md, cs.D2_tilde / ln ** (md * md))


# ---------------------------------------------------------------------------
# condition checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of checking one growth condition over an exhaustive range.

    ``witnesses`` lists every violating tuple (tagged with a part name when
    the condition has several clauses), sorted ascending so the first entry
    is the lexicographically smallest violation.  ``holds`` is always
    ``witnesses == ()``.  When a condition caps one of its constants (the
    geometric ratios and the mean-square exponent), breaching the cap in
    fitting mode is reported with the tuple achieving the fitted maximum as
    the witness.  ``fitted_constants`` holds the constants the check ran
    with; keys ending in ``_min`` are the minimal (tight) values measured on
    the range.
    """

    condition_id: str
    checked_range: int
    holds: bool
    fitted_constants: dict[str, float]
    witnesses: tuple[tuple, ...]

    @property
    def witness_count(self) -> int:
        return len(self.witnesses)


def _report(
    cid: str,
    limit: int,
    fitted: dict[str, float],
    witnesses: list[tuple],
) -> ConditionReport:
    witnesses.sort()
    return ConditionReport(
        condition_id=cid,
        checked_range=limit,
        holds=not witnesses,
        fitted_constants={k: float(v) for k, v in fitted.items()},
        witnesses=tuple(witnesses),
    )


def check_condition(
    spec: WeightSpec,
    condition: str,
    limit: int,
    table: PrimeTable,
    params: Mapping[str, float] | None = None,
) -> ConditionReport:
    """Verify or fit a growth condition exhaustively over ``1..limit``.

    Constants supplied in ``params`` are verified as stated; constants left
    out take the condition's default behaviour:

    * ``submultiplicative`` verifies ``C = 1`` (the definition) and also
      reports the tight ``C_min``;
    * ``prime_step``, ``prime_power_ratio`` and ``prime_power_geom`` fit
      their constants tightly (so violations are only structural ones or
      capped-ratio breaches);
    * ``prime_power_poly`` verifies ``C = 2, H = 1`` (the classical choice
      that the divisor function satisfies for every ``k p^j``) and reports
      the tight ``C_min`` for the used ``H``;
    * ``mean_square_power`` normalizes ``C = 1`` and fits the exponent
      ``b``, which must stay below ``1/(1+sqrt(5))``.

    See :data:`CONDITIONS` for the inequality shapes.
    """
    if condition not in CONDITIONS:
        raise InvalidArgument(
            f"unknown condition {condition!r}; expected one of {sorted(CONDITIONS)}"
        )
    if limit < 4:
        raise InvalidArgument(f"condition checks need limit >= 4, got {limit}")
    if limit > table.limit:
        raise TableTooSmall(f"condition check to {limit} needs limit >= {limit}")
    vals = weight_values(spec, limit, table)
    params = dict(params or {})
    if condition == "submultiplicative":
        return _check_submultiplicative(spec, limit, vals, params)
    if condition == "prime_step":
        return _check_prime_step(limit, vals, params, table)
    if condition == "prime_power_poly":
        return _check_prime_power_poly(limit, vals, params, table)
    if condition == "prime_power_ratio":
        return _check_prime_power_ratio(limit, vals, params, table)
    if condition == "prime_power_geom":
        return _check_prime_power_geom(limit, vals, params, table)
    return _check_mean_square_power(limit, vals, params)


def check_all_conditions(
    spec: WeightSpec,
    limit: int,
    table: PrimeTable,
    params: Mapping[str, Mapping[str, float]] | None = None,
) -> dict[str, ConditionReport]:
    """Run every condition check; ``params`` may override per condition id."""
    params = params or {}
    return {
        cid: check_condition(spec, cid, limit, table, params.get(cid))
        for cid in CONDITIONS
    }


def _leq(lhs: float, rhs: float) -> bool:
    """lhs <= rhs with relative float slack."""
    return lhs <= rhs + _REL_TOL * max(1.0, abs(rhs))


def _check_submultiplicative(
    spec: WeightSpec, limit: int, vals: np.ndarray, params: dict
) -> ConditionReport:
    C = float(params.get("C", 1.0))
    worst = 0.0
    witnesses: list[tuple] = []
    for n in range(1, limit + 1):
        dn = vals[n]
        for m in range(n, limit // n + 1):
            if math.gcd(n, m) != 1:
                continue
            lhs = vals[n * m]
            rhs = dn * vals[m]
            if rhs > 0:
                worst = max(worst, lhs / rhs)
                bad = not _leq(lhs, C * rhs)
            else:
                bad = lhs > 0  # 0 <= C*0 fails whenever d(nm) > 0
                if bad:
                    worst = math.inf
            if bad:
                witnesses.append((n, m))
    fitted = {"C": C, "C_min": worst if math.isfinite(worst) else math.inf}
    return _report("submultiplicative", limit, fitted, witnesses)


def _prime_power_tuples(limit: int, table: PrimeTable):
    """Yield (p, j, p^j) with p prime and p^j <= limit, j >= 1."""
    for p in table.primes:
        p = int(p)
        if p > limit:
            break
        q, j = p, 1
        while q <= limit:
            yield p, j, q
            q *= p
            j += 1


def _max_prime_value(limit: int, vals: np.ndarray, table: PrimeTable) -> float:
    ps = table.primes[table.primes <= limit]
    return float(np.max(vals[ps])) if ps.size else 0.0


def _check_prime_step(
    limit: int, vals: np.ndarray, params: dict, table: PrimeTable
) -> ConditionReport:
    sqrt2 = math.sqrt(2.0)
    if "lam" in params and not params["lam"] < sqrt2:
        raise InvalidArgument(
            f"prime_step requires lam < sqrt(2), got {params['lam']}"
        )
    witnesses: list[tuple] = []
    # part A: one-prime steps d(n) <= C d(n/p)
    worst_step = 0.0
    structural: list[tuple] = []
    for p in table.primes:
        p = int(p)
        if p > limit:
            break
        for n in range(p, limit + 1, p):
            lhs, rhs = vals[n], vals[n // p]
            if rhs > 0:
                worst_step = max(worst_step, lhs / rhs)
            elif lhs > 0:
                structural.append(("step", n, p))
    C = float(params.get("C", max(1.0, worst_step)))
    C1 = float(params.get("C1", max(1.0, _max_prime_value(limit, vals, table))))
    # part B: geometric prime powers d(p^j) <= C1 lam^j
    lam_fit, lam_arg = 0.0, None
    for p, j, q in _prime_power_tuples(limit, table):
        if vals[q] > 0:
            cand = (vals[q] / C1) ** (1.0 / j)
            if cand > lam_fit:
                lam_fit, lam_arg = cand, (p, j)
    lam = float(params.get("lam", lam_fit))
    if "lam" not in params and not lam_fit < sqrt2:
        # fitted ratio breaches the cap: report the achieving power
        witnesses.append(("power", *lam_arg))
    # verification passes against the final constants
    for p in table.primes:
        p = int(p)
        if p > limit:
            break
        for n in range(p, limit + 1, p):
            if vals[n // p] > 0 and not _leq(vals[n], C * vals[n // p]):
                witnesses.append(("step", n, p))
    if "lam" in params or "C1" in params:
        for p, j, q in _prime_power_tuples(limit, table):
            if not _leq(vals[q], C1 * lam**j):
                witnesses.append(("power", p, j))
    witnesses.extend(structural)
    fitted = {"C": C, "C1": C1, "lam": lam, "lam_min": lam_fit}
    return _report("prime_step", limit, fitted, witnesses)


def _check_prime_power_poly(
    limit: int, vals: np.ndarray, params: dict, table: PrimeTable
) -> ConditionReport:
    C = float(params.get("C", 2.0))
    H = float(params.get("H", 1.0))
    worst = 0.0
    witnesses: list[tuple] = []
    for p, j, q in _prime_power_tuples(limit, table):
        jh = float(j) ** H
        for k in range(1, limit // q + 1):
            lhs = vals[k * q]
            rhs = vals[k] * jh
            if rhs > 0:
                worst = max(worst, lhs / rhs)
                bad = not _leq(lhs, C * rhs)
            else:
                bad = lhs > 0
                if bad:
                    worst = math.inf
            if bad:
                witnesses.append((k, p, j))
    fitted = {"C": C, "H": H, "C_min": worst}
    return _report("prime_power_poly", limit, fitted, witnesses)


def _check_prime_power_ratio(
    limit: int, vals: np.ndarray, params: dict, table: PrimeTable
) -> ConditionReport:
    worst = 0.0
    structural: list[tuple] = []
    for p, a, q in _prime_power_tuples(limit, table):
        lhs = vals[q]
        rhs = vals[q // p]  # d(p^(a-1)), with d(p^0) = d(1)
        if rhs > 0:
            worst = max(worst, lhs / rhs)
        elif lhs > 0:
            structural.append((p, a))
    lam = float(params.get("lam", worst))
    witnesses = list(structural)
    if "lam" in params:
        for p, a, q in _prime_power_tuples(limit, table):
            if vals[q // p] > 0 and not _leq(vals[q], lam * vals[q // p]):
                witnesses.append((p, a))
    fitted = {"lam": lam, "lam_min": worst}
    return _report("prime_power_ratio", limit, fitted, witnesses)


def _check_prime_power_geom(
    limit: int, vals: np.ndarray, params: dict, table: PrimeTable
) -> ConditionReport:
    if "lam2" in params and not params["lam2"] < 2.0:
        raise InvalidArgument(
            f"prime_power_geom requires lam2 < 2, got {params['lam2']}"
        )
    lam1 = float(params.get("lam1", max(1.0, _max_prime_value(limit, vals, table))))
    lam2_fit, arg = 0.0, None
    for p, m, q in _prime_power_tuples(limit, table):
        if vals[q] > 0:
            cand = (vals[q] / lam1) ** (1.0 / m)
            if cand > lam2_fit:
                lam2_fit, arg = cand, (p, m)
    lam2 = float(params.get("lam2", lam2_fit))
    witnesses: list[tuple] = []
    if "lam2" not in params and not lam2_fit < 2.0:
        witnesses.append(arg)
    if "lam2" in params or "lam1" in params:
        for p, m, q in _prime_power_tuples(limit, table):
            if not _leq(vals[q], lam1 * lam2**m):
                witnesses.append((p, m))
    fitted = {"lam1": lam1, "lam2": lam2, "lam2_min": lam2_fit}
    return _report("prime_power_geom", limit, fitted, witnesses)


def _check_mean_square_power(
    limit: int, vals: np.ndarray, params: dict
) -> ConditionReport:
    """``D2_tilde(m) <= C m^b`` for all ``2 <= m <= limit``.

    ``C`` is a normalization choice and defaults to 1; the smallest workable
    exponent ``b = max_m log(D2_tilde(m)/C)/log(m)`` (clamped at 0) is fitted
    unless supplied.  The condition requires ``b < 1/(1+sqrt(5)) ~= 0.309``;
    a fitted exponent at or above that cap is reported with the achieving
    ``m`` as witness.
    """
    C = float(params.get("C", 1.0))
    if C <= 0:
        raise InvalidArgument(f"mean_square_power needs C > 0, got {C}")
    if "b" in params and not params["b"] < MEAN_SQUARE_EXPONENT_LIMIT:
        raise InvalidArgument(
            f"mean_square_power requires b < {MEAN_SQUARE_EXPONENT_LIMIT:.6f}, "
            f"got {params['b']}"
        )
    ms = np.arange(limit + 1, dtype=np.float64)
    c2 = np.cumsum(vals * vals)
    d2t = np.sqrt(np.maximum.accumulate(c2[1:] / ms[1:]))  # D2_tilde(m), m >= 1
    witnesses: list[tuple] = []
    if "b" in params:
        b = float(params["b"])
        bound = C * ms[2:] ** b
        bad = np.flatnonzero(d2t[1:] > bound * (1.0 + _REL_TOL)) + 2
        witnesses = [(int(m),) for m in bad]
        fitted = {"C": C, "b": b}
        return _report("mean_square_power", limit, fitted, witnesses)
    with np.errstate(divide="ignore"):
        exps = np.log(np.maximum(d2t[1:] / C, 1e-300)) / np.log(ms[2:])
    k = int(np.argmax(exps))
    b = max(0.0, float(exps[k]))
    if not b < MEAN_SQUARE_EXPONENT_LIMIT:
        witnesses.append((k + 2,))
    fitted = {"C": C, "b": b}
    return _report("mean_square_power", limit, fitted, witnesses)
