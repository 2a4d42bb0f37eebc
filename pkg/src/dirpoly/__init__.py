"""dirpoly: numerical experiments on random Dirichlet polynomials.

The package studies partial sums ``D(s) = sum_{n<=N} eps_n d(n) n^-s`` where
``eps_n`` are random signs (or Gaussians) and ``d`` is a sub-multiplicative
weight.  It provides:

* prime tables, smooth-number enumeration and classical constants
  (:mod:`dirpoly.arith`);
* weight families and growth-condition checkers (:mod:`dirpoly.weights`);
* the largest-prime-factor cell decomposition used by the lower-bound
  machinery (:mod:`dirpoly.decomp`);
* polynomial construction and the torus (Kronecker) representation
  (:mod:`dirpoly.dirichlet`);
* Monte-Carlo estimation of ``E sup_t |D|`` with certified lower bounds
  (:mod:`dirpoly.estimate`);
* closed-form growth envelopes and partial-summation checks
  (:mod:`dirpoly.bounds`);
* scan/fit/export drivers and the command line (:mod:`dirpoly.experiment`,
  :mod:`dirpoly.cli`).
"""

from .arith import PrimeTable, sieve_primes
from .errors import (
    ConditionViolated,
    DirpolyError,
    DivergentFactor,
    InvalidArgument,
    ResourceLimit,
    TableTooSmall,
    UndefinedWeight,
)
from .weights import WeightSpec, eval_weight, parse_weight

__all__ = [
    "PrimeTable",
    "sieve_primes",
    "WeightSpec",
    "eval_weight",
    "parse_weight",
    "DirpolyError",
    "InvalidArgument",
    "TableTooSmall",
    "ResourceLimit",
    "DivergentFactor",
    "UndefinedWeight",
    "ConditionViolated",
]

__version__ = "0.1.0"
