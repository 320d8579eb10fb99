"""Theorem verification: Monte Carlo tail estimates, deterministic order
checks, and majorization chains."""

from .estimates import (
    TailEstimate,
    clopper_pearson,
    estimate_not_leq_prob,
    mean_and_stderr,
    run_trials,
    tail_estimate,
    tail_verdict,
    trace_bound,
)
from .checkers import (
    THEOREM_IDS,
    BoundReport,
    CheckConfig,
    ConfigError,
    DeterministicCheck,
    TailCheck,
    check_chebyshev,
    check_corollary_pmi_pmd,
    check_generalized_chebyshev,
    check_markov,
    check_order_lemma,
    check_psi_lemma,
    check_sandwich_tmd,
    check_sandwich_tmi,
    check_tc,
    run_check,
)
from .majorization import (
    check_majorization_corollaries,
    check_majorization_lemma,
    log_majorize,
    majorize,
    weak_log_majorize,
    weak_majorize,
)

__all__ = [
    "TailEstimate",
    "clopper_pearson",
    "estimate_not_leq_prob",
    "mean_and_stderr",
    "run_trials",
    "tail_estimate",
    "tail_verdict",
    "trace_bound",
    "THEOREM_IDS",
    "BoundReport",
    "CheckConfig",
    "ConfigError",
    "DeterministicCheck",
    "TailCheck",
    "check_markov",
    "check_chebyshev",
    "check_generalized_chebyshev",
    "check_order_lemma",
    "check_sandwich_tmi",
    "check_corollary_pmi_pmd",
    "check_sandwich_tmd",
    "check_tc",
    "check_psi_lemma",
    "run_check",
    "check_majorization_lemma",
    "check_majorization_corollaries",
    "weak_majorize",
    "majorize",
    "weak_log_majorize",
    "log_majorize",
]
