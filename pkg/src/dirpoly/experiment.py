"""Config-driven experiment runner: scans, growth-exponent fits, CSV export.

A scan walks an ascending list of sizes N, runs the Monte-Carlo supremum
estimate plus every applicable analytic bound at each size, and appends one
JSON record per size to an output file.  Records are fully reproducible
from the config and master seed; only ``wall_time`` varies between runs.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .arith import PrimeTable, sieve_primes
from .bounds import (
    classify_regime,
    envelope_baseline,
    envelope_by_tau,
    envelope_coprime,
    envelope_small_tau,
    optimal_split_index,
)
from .errors import ConditionViolated, DirpolyError, InvalidArgument
from .estimate import bohr_lower_sum, khintchine_lower, mc_esup, mix_seed
from .weights import WeightSpec, parse_weight

FORMAT_VERSION = 1

TAU_RULES = ("full_pi_N", "fixed", "nu_optimal")
NOISE_KINDS = ("rademacher", "gaussian")


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated scan description.

    ``tau_rule`` is ``"full_pi_N"``, ``"nu_optimal"``, or ``"fixed:<k>"``;
    every precondition that can be checked without running (weight text,
    sigma range, ascending sizes, noise kind, replica/budget minimums) is
    validated at construction, so an invalid config never produces partial
    output.
    """

    weight: str
    sigma: float
    N_list: tuple[int, ...]
    tau_rule: str
    noise_kind: str
    replicas: int
    budget: int
    master_seed: int
    output_path: str | None = None

    def __post_init__(self) -> None:
        parse_weight(self.weight)  # raises if malformed
        if not 0.0 <= self.sigma <= 0.5:
            raise InvalidArgument(f"sigma must be in [0, 1/2], got {self.sigma}")
        if not self.N_list:
            raise InvalidArgument("N_list must be non-empty")
        if any(n < 1 for n in self.N_list):
            raise InvalidArgument("N_list entries must be >= 1")
        if list(self.N_list) != sorted(set(self.N_list)):
            raise InvalidArgument("N_list must be strictly ascending")
        rule = self.tau_rule.split(":", 1)[0]
        if rule not in TAU_RULES:
            raise InvalidArgument(f"unknown tau_rule {self.tau_rule!r}")
        if rule == "fixed":
            try:
                k = int(self.tau_rule.split(":", 1)[1])
            except (IndexError, ValueError):
                raise InvalidArgument(
                    f"fixed tau_rule must look like 'fixed:<k>', got {self.tau_rule!r}"
                ) from None
            if k < 0:
                raise InvalidArgument(f"fixed tau must be >= 0, got {k}")
        if self.noise_kind not in NOISE_KINDS:
            raise InvalidArgument(f"unknown noise_kind {self.noise_kind!r}")
        if self.replicas < 2:
            raise InvalidArgument(f"replicas must be >= 2, got {self.replicas}")
        if self.budget < 1:
            raise InvalidArgument(f"budget must be >= 1, got {self.budget}")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidArgument("master_seed must fit in 64 bits")

    @property
    def spec(self) -> WeightSpec:
        return parse_weight(self.weight)

    def echo(self) -> dict:
        doc = asdict(self)
        doc["N_list"] = list(self.N_list)
        return doc

    @classmethod
    def from_mapping(cls, doc: Mapping) -> "ExperimentConfig":
        known = {
            "weight", "sigma", "N_list", "tau_rule", "noise_kind",
            "replicas", "budget", "master_seed", "output_path",
        }
        unknown = set(doc) - known - {"format_version"}
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        missing = known - {"output_path"} - set(doc)
        if missing:
            raise InvalidArgument(f"missing config keys: {sorted(missing)}")
        return cls(
            weight=str(doc["weight"]),
            sigma=float(doc["sigma"]),
            N_list=tuple(int(n) for n in doc["N_list"]),
            tau_rule=str(doc["tau_rule"]),
            noise_kind=str(doc["noise_kind"]),
            replicas=int(doc["replicas"]),
            budget=int(doc["budget"]),
            master_seed=int(doc["master_seed"]),
            output_path=(str(doc["output_path"])
                         if doc.get("output_path") else None),
        )


def resolve_tau(tau_rule: str, N: int, table: PrimeTable) -> int:
    """Apply a tau rule (``full_pi_N``, ``nu_optimal``, ``fixed:<k>``) at one size."""
    pi_n = table.pi_of(min(N, table.limit))
    if tau_rule == "full_pi_N":
        return pi_n
    if tau_rule == "nu_optimal":
        return optimal_split_index(N)
    if tau_rule.split(":", 1)[0] != "fixed":
        raise InvalidArgument(f"unknown tau_rule {tau_rule!r}")
    k = int(tau_rule.split(":", 1)[1])
    if k > pi_n:
        raise InvalidArgument(f"fixed tau={k} exceeds pi({N})={pi_n}")
    return k


def _envelope_doc(env) -> dict:
    return {
        "value": env.value,
        "components": env.components,
        "constant_symbol": env.constant_symbol,
    }


def _scan_record(config: ExperimentConfig, N: int, table: PrimeTable) -> dict:
    spec = config.spec
    tau = resolve_tau(config.tau_rule, N, table)
    seed_n = mix_seed(config.master_seed, N)
    mc = mc_esup(
        spec, N, config.sigma, tau, config.noise_kind,
        config.replicas, config.budget, seed_n, table,
    )
    record: dict = {
        "format_version": FORMAT_VERSION,
        "status": "ok",
        "N": N,
        "tau": tau,
        "config": config.echo(),
        "mc": {
            "mean": mc.mean,
            "stderr": mc.stderr,
            "replicas": mc.replicas,
            "master_seed": mc.master_seed,
            "generator_id": mc.generator_id,
            "bias": mc.bias,
        },
        "regime": None,
        "khintchine_lower": None,
        "bohr_sum": None,
        "envelopes": {},
    }
    if N >= 16:
        record["regime"] = classify_regime(N, tau, table).case_id
    if tau >= 2 and N >= 2:
        record["khintchine_lower"] = khintchine_lower(
            spec, N, config.sigma, tau, table)
    if spec.family == "coprime_indicator":
        record["bohr_sum"] = bohr_lower_sum(
            spec.indices, N, config.sigma, table)
    envelopes: dict = {}
    if N >= 2:
        envelopes["baseline"] = _envelope_doc(
            envelope_baseline(N, config.sigma, spec, table))
    try:
        envelopes["by_tau"] = _envelope_doc(
            envelope_by_tau(N, config.sigma, tau, spec, table))
    except (InvalidArgument, ConditionViolated):
        pass
    try:
        lower, upper = envelope_small_tau(tau, config.sigma, table)
        envelopes["small_tau"] = {
            "lower": _envelope_doc(lower), "upper": _envelope_doc(upper)}
    except (InvalidArgument, ConditionViolated):
        pass
    if spec.family == "coprime_indicator":
        try:
            envelopes["coprime"] = _envelope_doc(envelope_coprime(
                N, config.sigma, optimal_split_index(N), spec.indices, table))
        except (InvalidArgument, ConditionViolated):
            pass
    record["envelopes"] = envelopes
    return record


def run_scan(
    config: ExperimentConfig, table: PrimeTable | None = None
) -> list[dict]:
    """Run the scan, one record per N (failures yield error records).

    Records are returned in N order and, when ``output_path`` is set,
    appended there as JSON lines followed by an integrity pass re-reading
    the file to confirm the append count.
    """
    if table is None or table.limit < max(config.N_list):
        table = sieve_primes(max(max(config.N_list), 4))
    records = []
    for N in config.N_list:
        started = time.perf_counter()
        try:
            record = _scan_record(config, N, table)
        except DirpolyError as exc:
            record = {
                "format_version": FORMAT_VERSION,
                "status": "error",
                "N": N,
                "config": config.echo(),
                "error": f"{type(exc).__name__}: {exc}",
            }
        record["wall_time"] = time.perf_counter() - started
        records.append(record)
    if config.output_path:
        with open(config.output_path, "a", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        with open(config.output_path, "r", encoding="utf-8") as fh:
            total = sum(1 for line in fh if line.strip())
        if total < len(records):
            raise DirpolyError(
                f"integrity check failed: {total} lines on disk, "
                f"expected at least {len(records)}"
            )
    return records


# ---------------------------------------------------------------------------
# growth-exponent fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """Least-squares power-law fit of a record field against N.

    ``raw_slope`` fits the field as recorded; ``detrended_slope`` fits it
    after multiplying by ``log N`` (dividing out the ``1/log N`` factor all
    the envelopes carry).  ``slope``/``intercept``/``r2``/``points`` refer
    to whichever series the caller selected.
    """

    slope: float
    intercept: float
    r2: float
    points: tuple[tuple[float, float], ...]
    raw_slope: float
    detrended_slope: float
    detrend: str


def select_field(record: Mapping, selector: str):
    """Resolve a dotted path like ``mc.mean`` inside a record."""
    node = record
    for part in selector.split("."):
        if not isinstance(node, Mapping) or part not in node:
            return None
        node = node[part]
    return node


def _least_squares(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    if ss_tot <= 1e-300:
        return (0.0, float(np.mean(ys)), 1.0) if ss_res <= 1e-12 else (
            float(slope), float(intercept), 0.0)
    return float(slope), float(intercept), max(0.0, 1.0 - ss_res / ss_tot)


def fit_growth_exponent(
    records: Sequence[Mapping], selector: str, detrend: str = "none"
) -> FitResult:
    """Fit ``log(value) ~ slope * log(N) + intercept`` over a scan.

    ``detrend="log"`` multiplies values by ``log N`` before the selected
    fit.  Records whose selected value is missing or non-positive are
    skipped with a warning; at least 3 usable points are required.
    """
    if detrend not in ("none", "log"):
        raise InvalidArgument(f"detrend must be 'none' or 'log', got {detrend!r}")
    ns, vals = [], []
    for record in records:
        if record.get("status") not in (None, "ok"):
            continue
        value = select_field(record, selector)
        n = record.get("N")
        if value is None or n is None:
            warnings.warn(f"record N={n}: no value at {selector!r}, skipped")
            continue
        if not (isinstance(value, (int, float)) and value > 0):
            warnings.warn(
                f"record N={n}: non-positive value {value!r} at {selector!r}, skipped"
            )
            continue
        ns.append(float(n))
        vals.append(float(value))
    if len(ns) < 3:
        raise InvalidArgument(
            f"need >= 3 records with positive {selector!r} values, got {len(ns)}"
        )
    ns_arr = np.asarray(ns)
    logn = np.log(ns_arr)
    raw = np.log(np.asarray(vals))
    det = raw + np.log(np.log(ns_arr))
    raw_slope, raw_intercept, raw_r2 = _least_squares(logn, raw)
    det_slope, det_intercept, det_r2 = _least_squares(logn, det)
    if detrend == "log":
        slope, intercept, r2, ys = det_slope, det_intercept, det_r2, det
    else:
        slope, intercept, r2, ys = raw_slope, raw_intercept, raw_r2, raw
    return FitResult(
        slope=slope,
        intercept=intercept,
        r2=r2,
        points=tuple(zip(logn.tolist(), ys.tolist())),
        raw_slope=raw_slope,
        detrended_slope=det_slope,
        detrend=detrend,
    )


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_csv(records: Sequence[Mapping], columns: Sequence[str], path: str) -> str:
    """Write selected dotted-path columns of the records as CSV.

    Floats carry 12 significant digits (value-preserving for round-trip
    comparisons at that precision).  A column that resolves in no record is
    rejected; one missing from an individual record yields an empty cell.
    """
    columns = list(columns)
    if not columns:
        raise InvalidArgument("need at least one column")
    if records:
        for col in columns:
            if all(select_field(r, col) is None for r in records):
                raise InvalidArgument(f"unknown column {col!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for record in records:
            writer.writerow(
                [_format_cell(select_field(record, col)) for col in columns]
            )
    return path
