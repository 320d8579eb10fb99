"""Estimation primitives: exact intervals, trace bounds on closed-form cases,
and the schedule-independent trial runner."""

import numpy as np
import pytest
from scipy.stats import beta

import tensormeans as tm
from tensormeans.sampling import SeedStream
from tensormeans.verify import (
    TailEstimate,
    clopper_pearson,
    estimate_not_leq_prob,
    run_trials,
    tail_estimate,
    tail_verdict,
    trace_bound,
)


def test_clopper_pearson_edges():
    low, high = clopper_pearson(0, 100)
    assert low == 0.0 and 0 < high < 0.06
    low, high = clopper_pearson(100, 100)
    assert high == 1.0 and low > 0.94
    low, high = clopper_pearson(50, 100)
    assert low < 0.5 < high
    assert low == pytest.approx(float(beta.ppf(0.005, 50, 51)))


def test_clopper_pearson_validation():
    with pytest.raises(ValueError):
        clopper_pearson(5, 4)
    with pytest.raises(ValueError):
        clopper_pearson(-1, 4)


def test_tail_estimate_and_verdict():
    est = tail_estimate([True] * 10 + [False] * 90, seed=0)
    assert est.p_hat == pytest.approx(0.1)
    assert est.ci_low <= 0.1 <= est.ci_high
    satisfied, vacuous = tail_verdict(est, rhs=0.5, rhs_stderr=0.01)
    assert satisfied and not vacuous
    satisfied, vacuous = tail_verdict(est, rhs=1.2, rhs_stderr=0.0)
    assert satisfied and vacuous
    tight = TailEstimate(p_hat=0.5, n_trials=10_000, ci_low=0.49, ci_high=0.51, seed=0)
    satisfied, vacuous = tail_verdict(tight, rhs=0.1, rhs_stderr=0.001)
    assert not satisfied and not vacuous


def test_run_trials_matches_serial_and_parallel():
    def trial(i, stream):
        rng = stream.generator()
        return {"v": float(rng.standard_normal())}

    serial = run_trials(64, seed=5, trial_fn=trial, workers=1)
    threaded = run_trials(64, seed=5, trial_fn=trial, workers=8)
    assert serial == threaded


def test_estimate_not_leq_prob_deterministic_cases():
    c = tm.from_diagonal([1.0, 1.0], [2])
    below = lambda stream: 0.5 * c
    above = lambda stream: 2.0 * c
    assert estimate_not_leq_prob(below, c, 200, seed=1).p_hat == 0.0
    assert estimate_not_leq_prob(above, c, 200, seed=1).p_hat == 1.0


def test_estimate_not_leq_prob_scalar_exponential():
    # Pr(X > 2) for X ~ Exp(1) is e^-2.
    c = tm.from_diagonal([2.0], [1])

    def sample(stream):
        rng = stream.generator()
        return tm.from_diagonal([rng.exponential(1.0)], [1])

    est = estimate_not_leq_prob(sample, c, 10_000, seed=3)
    assert est.ci_low <= np.exp(-2) <= est.ci_high


def test_trace_bound_closed_forms():
    c = tm.from_diagonal([1.0, 1.0, 1.0], [3])
    constant = lambda stream: c
    mean, se = trace_bound(constant, c, p=1.0, n_trials=50, seed=0)
    assert mean == pytest.approx(3.0)  # Tr(C C^-1) = D
    assert se == 0.0
    two_i = tm.from_diagonal([2.0, 2.0, 2.0], [3])
    ident = lambda stream: tm.identity([3])
    mean, _ = trace_bound(ident, two_i, p=2.0, n_trials=10, seed=0)
    assert mean == pytest.approx(3.0 / 4.0)  # D / 4


def test_trace_bound_scalar_exponential():
    # E[X]/2 = 0.5 for X ~ Exp(1), C = 2, p = 1.
    c = tm.from_diagonal([2.0], [1])

    def sample(stream):
        rng = stream.generator()
        return tm.from_diagonal([rng.exponential(1.0)], [1])

    mean, se = trace_bound(sample, c, p=1.0, n_trials=10_000, seed=4)
    assert abs(mean - 0.5) <= 4 * se


def test_trace_bound_rejects_small_p():
    c = tm.identity([2])
    with pytest.raises(ValueError):
        trace_bound(lambda s: c, c, p=0.5, n_trials=5, seed=0)
