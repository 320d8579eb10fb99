"""Monte Carlo estimation primitives: exact binomial intervals, plug-in trace
expectations, and an index-keyed trial runner whose output is identical for
serial and parallel execution at a fixed seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import beta

from ..tensor_core import EinsteinTensor, unfold
from ..spectral import loewner_compare
from ..sampling import SeedStream

__all__ = [
    "TailEstimate",
    "clopper_pearson",
    "tail_estimate",
    "mean_and_stderr",
    "tail_verdict",
    "run_trials",
    "estimate_not_leq_prob",
    "trace_bound",
]

CONFIDENCE = 0.99


def clopper_pearson(k: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Exact binomial confidence interval for k successes out of n."""
    if not 0 <= k <= n or n < 1:
        raise ValueError(f"need 0 <= k <= n with n >= 1, got k={k}, n={n}")
    alpha = 1.0 - confidence
    low = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    high = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return low, high


@dataclass(frozen=True)
class TailEstimate:
    """Bernoulli estimate with an exact 99% interval."""

    p_hat: float
    n_trials: int
    ci_low: float
    ci_high: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1.0):
            raise ValueError("interval must contain p_hat inside [0, 1]")

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def tail_estimate(flags: Sequence[bool], seed: int) -> TailEstimate:
    n = len(flags)
    k = int(sum(bool(b) for b in flags))
    low, high = clopper_pearson(k, n)
    return TailEstimate(p_hat=k / n, n_trials=n, ci_low=low, ci_high=high, seed=seed)


def mean_and_stderr(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no values to average")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def tail_verdict(
    estimate: TailEstimate, rhs: float, rhs_stderr: float
) -> tuple[bool, bool]:
    """(satisfied, vacuous) with combined 3-sigma slack.

    A bound whose right side reaches 1 says nothing about a probability and
    is flagged vacuous; vacuous implies satisfied.
    """
    vacuous = rhs >= 1.0
    slack = 3.0 * (estimate.ci_half_width + rhs_stderr)
    satisfied = vacuous or estimate.p_hat <= rhs + slack
    return satisfied, vacuous


def run_trials(
    n_trials: int,
    seed: int,
    trial_fn: Callable[[int, SeedStream], dict],
    workers: int = 1,
) -> list[dict]:
    """Evaluate ``trial_fn(i, stream_i)`` for i = 0..n-1, ordered by index.

    Each trial draws only from its own counter-based stream, so the records
    are the same for any worker count; the list order is the trial order.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    streams = [SeedStream(seed, i) for i in range(n_trials)]
    if workers <= 1:
        return [trial_fn(i, streams[i]) for i in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(trial_fn, range(n_trials), streams))


def estimate_not_leq_prob(
    sample: Callable[[SeedStream], EinsteinTensor],
    c: EinsteinTensor,
    n_trials: int,
    seed: int,
    tol: float = 1e-9,
    workers: int = 1,
) -> TailEstimate:
    """Fraction of draws X with X not below C in the Loewner order."""

    def trial(i: int, stream: SeedStream) -> dict:
        verdict = loewner_compare(sample(stream), c, tol)
        return {"not_leq": not verdict.holds_leq}

    records = run_trials(n_trials, seed, trial, workers)
    return tail_estimate([r["not_leq"] for r in records], seed)


def trace_bound(
    expr: Callable[[SeedStream], EinsteinTensor],
    c: EinsteinTensor,
    p: float,
    n_trials: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Plug-in estimate of Tr(|X|^p * C^-p) with its standard error."""
    from ..spectral import abs_tensor, power

    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    c_neg_p = unfold(power(c, -p))

    def trial(i: int, stream: SeedStream) -> dict:
        t = expr(stream)
        val = np.trace(unfold(power(abs_tensor(t), p)) @ c_neg_p)
        return {"trace": float(val.real)}

    records = run_trials(n_trials, seed, trial, workers)
    return mean_and_stderr([r["trace"] for r in records])
