"""Eigenvalue majorization predicates and the tail-ordering checkers.

A Loewner chain X <= Y <= Z forces per-index domination of the descending
eigenvalues (Courant-Fischer), which in turn orders the tail probabilities of
partial eigenvalue sums and products at every depth k.  The lemma checker
verifies both facts on constructed chains; the corollary checkers do the same
for the two-sided mean comparisons, reusing the verdict-driving sandwich
elements.

Chain links compare two Bernoulli estimates, so "satisfied" here means the
left probability does not exceed the right beyond the combined 3-sigma slack
of their exact intervals.
"""

from __future__ import annotations

import math
import time
from typing import Sequence

import numpy as np

from ..tensor_core import TensorError, unfold
from ..connections import transform_swap
from ..sampling import sample_loewner_chain, sample_pair_conditioned
from .checkers import (
    BoundReport,
    CheckConfig,
    ConfigError,
    DeterministicCheck,
    TailCheck,
    _det_check,
    _finish,
)
from .estimates import run_trials, tail_estimate
from .relations import tc_cap_sample, tmd_sandwich_sample, tmi_sandwich_sample
from .._backend import F64

__all__ = [
    "weak_majorize",
    "majorize",
    "weak_log_majorize",
    "log_majorize",
    "check_majorization_lemma",
    "check_majorization_corollaries",
]


def _descending(xs: Sequence[float]) -> np.ndarray:
    arr = np.asarray(xs, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise TensorError("majorization needs a nonempty 1-d sequence")
    return np.sort(arr)[::-1]


def _pair(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    a, b = _descending(xs), _descending(ys)
    if a.size != b.size:
        raise TensorError(f"length mismatch: {a.size} vs {b.size}")
    return a, b


def weak_majorize(xs, ys, tol: float = 1e-12) -> bool:
    """Partial sums of xs dominated by those of ys at every depth."""
    a, b = _pair(xs, ys)
    ca, cb = np.cumsum(a), np.cumsum(b)
    scale = np.maximum(np.maximum(np.abs(ca), np.abs(cb)), 1.0)
    return bool(np.all(ca <= cb + tol * scale))


def majorize(xs, ys, tol: float = 1e-12) -> bool:
    """Weak majorization plus equality of the total sums."""
    a, b = _pair(xs, ys)
    if not weak_majorize(a, b, tol):
        return False
    sa, sb = float(a.sum()), float(b.sum())
    return abs(sa - sb) <= tol * max(abs(sa), abs(sb), 1.0)


def weak_log_majorize(xs, ys, tol: float = 1e-12) -> bool:
    """Partial products dominated at every depth; entries must be positive."""
    a, b = _pair(xs, ys)
    if np.any(a <= 0) or np.any(b <= 0):
        raise TensorError("log majorization needs positive entries")
    ca, cb = np.cumsum(np.log(a)), np.cumsum(np.log(b))
    return bool(np.all(ca <= cb + tol * np.maximum(np.abs(cb), 1.0)))


def log_majorize(xs, ys, tol: float = 1e-12) -> bool:
    """Weak log majorization plus equality of the full products."""
    a, b = _pair(xs, ys)
    if not weak_log_majorize(a, b, tol):
        return False
    la, lb = float(np.sum(np.log(a))), float(np.sum(np.log(b)))
    return abs(la - lb) <= tol * max(abs(la), abs(lb), 1.0)


def _chain_link(name: str, left_flags, right_flags, seed: int) -> TailCheck:
    left = tail_estimate(left_flags, seed)
    right = tail_estimate(right_flags, seed)
    slack = 3.0 * (left.ci_half_width + right.ci_half_width)
    vacuous = right.p_hat >= 1.0
    satisfied = vacuous or left.p_hat <= right.p_hat + slack
    return TailCheck(
        name=name,
        estimate=left,
        rhs=right.p_hat,
        rhs_stderr=right.ci_half_width,
        rhs_printed=None,
        satisfied=satisfied,
        vacuous=vacuous,
    )


def _partial_stats(eigs: np.ndarray, k: int) -> tuple[float, float]:
    """(partial sum, partial log-product) over the k largest eigenvalues."""
    top = eigs[:k]
    return float(top.sum()), float(np.sum(np.log(np.clip(top, 1e-300, None))))


def _resolve_k(cfg: CheckConfig) -> int:
    d = cfg.shape.unfold_dim
    k = cfg.k_index if cfg.k_index is not None else max(1, d // 2)
    if not 1 <= k <= d:
        raise ConfigError(f"k must lie in 1..{d}, got {k}")
    return k


def _kappa_defaults(cfg, sums, logs) -> tuple[float, float]:
    # Pin thresholds at the middle quantity's medians so neither tail
    # probability degenerates to 0 or 1.
    if cfg.kappa is not None:
        return float(cfg.kappa), math.log(max(float(cfg.kappa), 1e-300))
    return float(np.median(sums)), float(np.median(logs))


def check_majorization_lemma(cfg: CheckConfig) -> BoundReport:
    """Eigenvalue domination and ordered tail probabilities along a chain."""
    started = time.perf_counter()
    k = _resolve_k(cfg)
    spec = cfg.sampler_spec()

    def trial(i, stream):
        x, y, z = sample_loewner_chain(spec, stream)
        ex = np.linalg.eigvalsh((unfold(x) + unfold(x).conj().T) / 2)[::-1]
        ey = np.linalg.eigvalsh((unfold(y) + unfold(y).conj().T) / 2)[::-1]
        ez = np.linalg.eigvalsh((unfold(z) + unfold(z).conj().T) / 2)[::-1]
        scale = max(abs(ez[0]), 1e-300)
        dom = min(float(np.min(ey - ex)), float(np.min(ez - ey))) / scale
        sx, lx = _partial_stats(ex, k)
        sy, ly = _partial_stats(ey, k)
        sz, lz = _partial_stats(ez, k)
        return {
            "dom_margin": dom,
            "escalated": False,
            "sums": (sx, sy, sz),
            "logs": (lx, ly, lz),
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("majorization_lemma", cfg.parameters())
    report.deterministic.append(
        _det_check("eigenvalue_domination", records, "dom_margin", cfg.tolerance)
    )
    kappa_sum, kappa_log = _kappa_defaults(
        cfg, [r["sums"][1] for r in records], [r["logs"][1] for r in records]
    )
    sums = np.array([r["sums"] for r in records])
    logs = np.array([r["logs"] for r in records])
    for label, values, kap in (("sum", sums, kappa_sum), ("product", logs, kappa_log)):
        flags = values >= kap
        report.tails.append(
            _chain_link(f"{label}_chain_bottom_middle", list(flags[:, 0]), list(flags[:, 1]), cfg.seed)
        )
        report.tails.append(
            _chain_link(f"{label}_chain_middle_top", list(flags[:, 1]), list(flags[:, 2]), cfg.seed)
        )
    report.audit["k"] = k
    report.audit["kappa_sum"] = kappa_sum
    report.audit["kappa_log_product"] = kappa_log
    return _finish(report, started)


def _corollary_family(cfg: CheckConfig) -> str:
    f = cfg.connection_fn()
    if "TMI" in f.classes:
        return "tmi"
    if "TMD" in f.classes:
        return "tmd"
    if "TC" in f.classes:
        return "tc"
    raise ConfigError(f"connection {f.label()} carries no monotonicity class")


def check_majorization_corollaries(cfg: CheckConfig) -> BoundReport:
    """Ordered partial-sum/product tails for the sandwich or cap elements.

    The family follows the connection's declared class: increasing and
    decreasing connections give three-element chains (lower, mid, upper) from
    their verdict-driving sandwich; convex connections give the one-sided cap
    chains in both conditioning modes.
    """
    started = time.perf_counter()
    family = _corollary_family(cfg)
    k = _resolve_k(cfg)
    f = cfg.connection_fn()
    d = cfg.shape.unfold_dim

    def eigs_desc(arr):
        return np.linalg.eigvalsh((arr + arr.conj().T) / 2)[::-1]

    report = BoundReport("majorization_corollaries", cfg.parameters())
    report.audit["family"] = family
    report.audit["k"] = k

    if family in ("tmi", "tmd"):
        mode = "mean_geq_identity" if family == "tmi" else "mean_leq_identity"
        sample_fn = tmi_sandwich_sample if family == "tmi" else tmd_sandwich_sample
        spec = cfg.sampler_spec(mode)

        def trial(i, stream):
            x, y = sample_pair_conditioned(spec, f, stream)
            res = sample_fn(F64, unfold(x), unfold(y), cfg.q, f)
            stats = {}
            for name in ("lower", "mid", "upper"):
                ev = eigs_desc(res.matrices[name])
                stats[name] = _partial_stats(ev, k)
            dom = min(
                float(np.min(eigs_desc(res.matrices["mid"])[:d] - eigs_desc(res.matrices["lower"])[:d])),
                float(np.min(eigs_desc(res.matrices["upper"])[:d] - eigs_desc(res.matrices["mid"])[:d])),
            ) / max(abs(eigs_desc(res.matrices["upper"])[0]), 1e-300)
            return {"stats": stats, "dom_margin": dom, "escalated": False}

        records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
        report.deterministic.append(
            _det_check("element_eigenvalue_domination", records, "dom_margin", cfg.tolerance)
        )
        kappa_sum, kappa_log = _kappa_defaults(
            cfg,
            [r["stats"]["mid"][0] for r in records],
            [r["stats"]["mid"][1] for r in records],
        )
        for label, idx, kap in (("sum", 0, kappa_sum), ("product", 1, kappa_log)):
            flags = {
                name: [r["stats"][name][idx] >= kap for r in records]
                for name in ("lower", "mid", "upper")
            }
            report.tails.append(
                _chain_link(f"{label}_chain_lower_mid", flags["lower"], flags["mid"], cfg.seed)
            )
            report.tails.append(
                _chain_link(f"{label}_chain_mid_upper", flags["mid"], flags["upper"], cfg.seed)
            )
        report.audit["kappa_sum"] = kappa_sum
        report.audit["kappa_log_product"] = kappa_log
        return _finish(report, started)

    # convex family: one-sided chains against the scalar cap, both modes
    spec_leq = cfg.sampler_spec("mean_leq_identity")
    spec_geq = cfg.sampler_spec("mean_geq_identity")

    def leq_trial(i, stream):
        x, y = sample_pair_conditioned(spec_leq, f, stream)
        res = tc_cap_sample(F64, unfold(x), unfold(y), cfg.q, f, "leq")
        ev = eigs_desc(res.matrices["mid"])
        cap_ev = np.full(d, res.scalars["cap"])
        return {
            "mid": _partial_stats(ev, k),
            "cap": _partial_stats(cap_ev, k),
            "escalated": False,
        }

    def geq_trial(i, stream):
        x, y = sample_pair_conditioned(spec_geq, f, stream)
        res = tc_cap_sample(F64, unfold(x), unfold(y), cfg.q, f, "geq")
        ev = eigs_desc(res.matrices["mid"])
        cap_ev = np.full(d, res.scalars["cap"])
        return {
            "mid": _partial_stats(ev, k),
            "cap": _partial_stats(cap_ev, k),
            "escalated": False,
        }

    leq_records = run_trials(cfg.trials, cfg.seed, leq_trial, cfg.workers)
    geq_records = run_trials(cfg.trials, cfg.seed + 1, geq_trial, cfg.workers)
    kappa_sum, kappa_log = _kappa_defaults(
        cfg, [r["mid"][0] for r in leq_records], [r["mid"][1] for r in leq_records]
    )
    for label, idx, kap in (("sum", 0, kappa_sum), ("product", 1, kappa_log)):
        report.tails.append(
            _chain_link(
                f"{label}_chain_mid_cap_leq",
                [r["mid"][idx] >= kap for r in leq_records],
                [r["cap"][idx] >= kap for r in leq_records],
                cfg.seed,
            )
        )
        report.tails.append(
            _chain_link(
                f"{label}_chain_cap_mid_geq",
                [r["cap"][idx] >= kap for r in geq_records],
                [r["mid"][idx] >= kap for r in geq_records],
                cfg.seed + 1,
            )
        )
    report.audit["kappa_sum"] = kappa_sum
    report.audit["kappa_log_product"] = kappa_log
    return _finish(report, started)
