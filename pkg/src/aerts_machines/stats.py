"""Frequency estimates, binomial z-checks and a one-sample KS uniformity test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError

Z_LEVEL = 3.0
# large-n asymptotic critical value of sqrt(n) * D at alpha = 0.01
KS_CRITICAL_COEFF = 1.63


@dataclass(frozen=True)
class FrequencyEstimate:
    successes: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError("a frequency estimate needs at least one trial")
        if not 0 <= self.successes <= self.trials:
            raise InvalidParameterError(
                f"successes {self.successes} outside [0, {self.trials}]"
            )

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def std_err(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)


def binomial_tolerance(expected: float, trials: int, z: float = Z_LEVEL) -> float:
    return z * math.sqrt(expected * (1.0 - expected) / trials)


def z_check(estimate: FrequencyEstimate, expected: float, z: float = Z_LEVEL) -> bool:
    """Pass iff |p_hat - expected| <= z * sqrt(expected (1 - expected) / n).

    When ``expected`` is exactly 0 or 1 the tolerance collapses to zero, so the
    estimate must match exactly.
    """
    if z <= 0:
        raise InvalidParameterError("z must be positive")
    if not 0.0 <= expected <= 1.0:
        raise InvalidParameterError(f"expected probability {expected!r} outside [0, 1]")
    if expected in (0.0, 1.0):
        return estimate.p_hat == expected
    return abs(estimate.p_hat - expected) <= binomial_tolerance(expected, estimate.trials, z)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float
    n: int

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def ks_uniformity(samples: Sequence[float], lo: float = 0.0, hi: float = 1.0) -> KsResult:
    """One-sample Kolmogorov-Smirnov test against uniform[lo, hi] at alpha ~ 0.01."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidParameterError("KS test needs at least one sample")
    if not lo < hi:
        raise InvalidParameterError(f"need lo < hi, got [{lo}, {hi}]")
    n = x.size
    cdf = np.clip((np.sort(x) - lo) / (hi - lo), 0.0, 1.0)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return KsResult(float(max(d_plus, d_minus)), KS_CRITICAL_COEFF / math.sqrt(n), n)
