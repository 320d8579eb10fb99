"""Theorem checkers: seeded Monte Carlo tail comparisons plus per-sample
deterministic order checks, reduced into ``BoundReport`` records.

Conventions shared by every checker:

* the primary variant of a relation or right-hand side drives the verdict;
  printed variants (the statements exactly as typeset, where those differ)
  are computed and reported alongside;
* a tail bound is satisfied when p_hat <= rhs + 3 * (CI half-width +
  rhs standard error), and flagged vacuous when rhs >= 1;
* a deterministic relation fails on a sample when its Loewner margin drops
  below -tolerance; margins too close to the float64 noise floor are
  re-checked in exact arithmetic before they may count as failures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..tensor_core import (
    EinsteinTensor,
    Shape,
    TensorError,
    as_shape,
    from_diagonal,
    identity,
    unfold,
)
from ..spectral import abs_tensor, eigen_decompose, power
from ..connections import (
    ConnectionFunction,
    PowerMonotonicity,
    classify_power_monotonicity,
    get_connection,
    is_geodesically_convex,
    transform_swap,
)
from ..sampling import SamplerSpec, SeedStream, sample_loewner_chain, sample_pair_conditioned, sample_pd
from .estimates import (
    TailEstimate,
    mean_and_stderr,
    run_trials,
    tail_estimate,
    tail_verdict,
)
from .relations import (
    checked_sample,
    pmi_pmd_sample,
    psi_lemma_sample,
    tc_cap_sample,
    tmd_sandwich_sample,
    tmi_sandwich_sample,
)

__all__ = [
    "THEOREM_IDS",
    "ConfigError",
    "CheckConfig",
    "DeterministicCheck",
    "TailCheck",
    "BoundReport",
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
]

THEOREM_IDS = (
    "markov",
    "chebyshev",
    "gen_chebyshev",
    "order_lemma",
    "tmi_sandwich",
    "cor_pmi_pmd",
    "tmd_sandwich",
    "tc_bounds",
    "psi_lemma",
    "majorization_lemma",
    "majorization_corollaries",
)


class ConfigError(TensorError):
    """The experiment configuration cannot be executed as given."""


@dataclass
class CheckConfig:
    """One theorem run: sampler, connection, exponents, target and budget."""

    theorem: str
    shape: Shape
    ensemble: str = "wishart"
    connection: str = "arithmetic"
    connection_params: dict = field(default_factory=dict)
    q: float = 2.0
    p: float = 1.0
    trials: int = 500
    seed: int = 0
    tolerance: float = 1e-8
    spectrum_floor: float = 0.05
    target_scale: float | None = None
    target_diagonal: tuple[float, ...] | None = None
    kappa: float | None = None
    k_index: int | None = None
    workers: int = 1
    mp_dps: int = 40

    def __post_init__(self):
        self.shape = as_shape(self.shape)
        if self.theorem not in THEOREM_IDS:
            raise ConfigError(f"unknown theorem {self.theorem!r}; one of {THEOREM_IDS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.q <= 0:
            raise ConfigError("q must be positive")
        if self.p < 1:
            raise ConfigError("p must be >= 1")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")

    def connection_fn(self) -> ConnectionFunction:
        return get_connection(self.connection, **self.connection_params)

    def target(self) -> EinsteinTensor:
        if self.target_diagonal is not None:
            return from_diagonal([complex(v) for v in self.target_diagonal], self.shape)
        scale = self.target_scale
        if scale is None:
            scale = 2.0 * self.shape.unfold_dim
        if scale <= 0:
            raise ConfigError("target scale must be positive")
        return scale * identity(self.shape)

    def sampler_spec(self, normalization: str = "none") -> SamplerSpec:
        return SamplerSpec(
            shape=self.shape,
            ensemble=self.ensemble,
            spectrum_floor=self.spectrum_floor,
            normalization=normalization,
            connection=self.connection if normalization != "none" else None,
        )

    def parameters(self) -> dict:
        return {
            "theorem": self.theorem,
            "shape": list(self.shape.modes),
            "ensemble": self.ensemble,
            "connection": self.connection,
            "connection_params": dict(self.connection_params),
            "q": self.q,
            "p": self.p,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "spectrum_floor": self.spectrum_floor,
            "target_scale": self.target_scale,
            "target_diagonal": list(self.target_diagonal) if self.target_diagonal else None,
            "kappa": self.kappa,
            "k_index": self.k_index,
        }


@dataclass
class DeterministicCheck:
    """Pass/fail tally for one per-sample order relation."""

    name: str
    n_trials: int
    failures: int
    worst_margin: float
    variant: str = "primary"
    escalated: int = 0

    @property
    def pass_rate(self) -> float:
        return 1.0 - self.failures / self.n_trials

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "variant": self.variant,
            "n_trials": self.n_trials,
            "failures": self.failures,
            "pass_rate": self.pass_rate,
            "worst_margin": self.worst_margin,
            "escalated": self.escalated,
        }


@dataclass
class TailCheck:
    """One tail-probability bound: estimate vs trace right-hand side."""

    name: str
    estimate: TailEstimate
    rhs: float
    rhs_stderr: float
    rhs_printed: float | None
    satisfied: bool
    vacuous: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "p_hat": self.estimate.p_hat,
            "ci_low": self.estimate.ci_low,
            "ci_high": self.estimate.ci_high,
            "n_trials": self.estimate.n_trials,
            "rhs": self.rhs,
            "rhs_stderr": self.rhs_stderr,
            "rhs_printed": self.rhs_printed,
            "satisfied": self.satisfied,
            "vacuous": self.vacuous,
        }


@dataclass
class BoundReport:
    """Outcome of one theorem run."""

    theorem_id: str
    parameters: dict
    deterministic: list[DeterministicCheck] = field(default_factory=list)
    tails: list[TailCheck] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    audit: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    @property
    def satisfied(self) -> bool:
        det_ok = all(d.failures == 0 for d in self.deterministic if d.variant == "primary")
        tails_ok = all(t.satisfied for t in self.tails)
        return det_ok and tails_ok

    @property
    def vacuous(self) -> bool:
        return bool(self.tails) and all(t.vacuous for t in self.tails)

    @property
    def pass_rate_deterministic(self) -> float | None:
        rates = [d.pass_rate for d in self.deterministic if d.variant == "primary"]
        return min(rates) if rates else None

    @property
    def primary_tail(self) -> TailCheck | None:
        return self.tails[0] if self.tails else None

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "parameters": self.parameters,
            "deterministic": [d.to_dict() for d in self.deterministic],
            "tails": [t.to_dict() for t in self.tails],
            "satisfied": self.satisfied,
            "vacuous": self.vacuous,
            "pass_rate_deterministic": self.pass_rate_deterministic,
            "notes": list(self.notes),
            "audit": self.audit,
        }


def _not_leq(arr: np.ndarray, c_arr: np.ndarray, tol: float) -> bool:
    """True when arr is not below c_arr in the Loewner order."""
    h = (arr + arr.conj().T) / 2
    hc = (c_arr + c_arr.conj().T) / 2
    w = np.linalg.eigvalsh(hc - h)
    scale = max(
        float(np.max(np.abs(np.linalg.eigvalsh(h)))),
        float(np.max(np.abs(np.linalg.eigvalsh(hc)))),
        1e-300,
    )
    return bool(w[0] < -tol * scale)


def _abs_p_trace(arr: np.ndarray, c_pow: np.ndarray, p: float) -> float:
    """Tr(|arr|^p * c_pow) on unfoldings."""
    w, v = np.linalg.eigh((arr + arr.conj().T) / 2)
    m = (v * (np.abs(w) ** p)) @ v.conj().T
    return float(np.trace(m @ c_pow).real)


def _c_power(c: EinsteinTensor, p: float) -> np.ndarray:
    return unfold(power(c, p))


def _det_check(name, records, key, tol, variant="primary") -> DeterministicCheck:
    margins = [r[key] for r in records]
    escalated = sum(1 for r in records if r.get("escalated", False))
    return DeterministicCheck(
        name=name,
        n_trials=len(records),
        failures=sum(1 for m in margins if not (m >= -tol)),
        worst_margin=float(min(margins)),
        variant=variant,
        escalated=escalated,
    )


def _tail_check(name, flags, rhs_values, seed, rhs_printed_values=None) -> TailCheck:
    est = tail_estimate(flags, seed)
    rhs, rhs_se = mean_and_stderr(rhs_values)
    printed = None
    if rhs_printed_values is not None:
        printed = mean_and_stderr(rhs_printed_values)[0]
    satisfied, vacuous = tail_verdict(est, rhs, rhs_se)
    return TailCheck(
        name=name,
        estimate=est,
        rhs=rhs,
        rhs_stderr=rhs_se,
        rhs_printed=printed,
        satisfied=satisfied,
        vacuous=vacuous,
    )


def _finish(report: BoundReport, started: float) -> BoundReport:
    report.runtime_ms = (time.perf_counter() - started) * 1000.0
    return report


# ---------------------------------------------------------------------------
# Markov / Chebyshev family
# ---------------------------------------------------------------------------

def check_markov(cfg: CheckConfig, sampler: Callable[[SeedStream], EinsteinTensor] | None = None) -> BoundReport:
    """Pr(X not<= A) <= Tr(E[X] A^-1) for X >= 0 almost surely."""
    started = time.perf_counter()
    c = cfg.target()
    c_arr = unfold(c)
    c_inv = _c_power(c, -1.0)
    spec = cfg.sampler_spec()
    draw = sampler or (lambda stream: sample_pd(spec, stream))

    def trial(i, stream):
        x = unfold(draw(stream))
        return {
            "not_leq": _not_leq(x, c_arr, cfg.tolerance),
            "tr": float(np.trace(x @ c_inv).real),
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("markov", cfg.parameters())
    report.tails.append(
        _tail_check("markov_tail", [r["not_leq"] for r in records], [r["tr"] for r in records], cfg.seed)
    )
    return _finish(report, started)


def check_chebyshev(cfg: CheckConfig, sampler=None) -> BoundReport:
    """Pr(X not<= A) <= Tr(E[X^2] A^-2) for Hermitian random X."""
    started = time.perf_counter()
    c = cfg.target()
    c_arr = unfold(c)
    c_m2 = _c_power(c, -2.0)
    spec = cfg.sampler_spec()
    draw = sampler or (lambda stream: sample_pd(spec, stream))

    def trial(i, stream):
        x = unfold(draw(stream))
        return {
            "not_leq": _not_leq(x, c_arr, cfg.tolerance),
            "tr": float(np.trace(x @ x @ c_m2).real),
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("chebyshev", cfg.parameters())
    report.tails.append(
        _tail_check("chebyshev_tail", [r["not_leq"] for r in records], [r["tr"] for r in records], cfg.seed)
    )
    return _finish(report, started)


def check_generalized_chebyshev(cfg: CheckConfig, sampler=None) -> BoundReport:
    """Pr(X not<= A) <= Tr(E[|X|^p] A^-p); the typeset proof's final display
    carries A^{+p}, reported as the printed variant."""
    started = time.perf_counter()
    c = cfg.target()
    c_arr = unfold(c)
    c_mp = _c_power(c, -cfg.p)
    c_pp = _c_power(c, cfg.p)
    spec = cfg.sampler_spec()
    draw = sampler or (lambda stream: sample_pd(spec, stream))

    def trial(i, stream):
        x = unfold(draw(stream))
        return {
            "not_leq": _not_leq(x, c_arr, cfg.tolerance),
            "tr": _abs_p_trace(x, c_mp, cfg.p),
            "tr_printed": _abs_p_trace(x, c_pp, cfg.p),
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("gen_chebyshev", cfg.parameters())
    report.tails.append(
        _tail_check(
            "gen_chebyshev_tail",
            [r["not_leq"] for r in records],
            [r["tr"] for r in records],
            cfg.seed,
            [r["tr_printed"] for r in records],
        )
    )
    return _finish(report, started)


def check_order_lemma(cfg: CheckConfig) -> BoundReport:
    """Chain X <= Y <= Z: Pr(Y not<= C) <= Tr(E[Z^q] C^-q) and
    Pr(X not<= C) <= Tr(E[Y^q] C^-q); the typeset statement prints C^-1,
    reported as the printed variant."""
    started = time.perf_counter()
    if cfg.q < 1:
        raise ConfigError("order lemma needs q >= 1")
    c = cfg.target()
    c_arr = unfold(c)
    c_mq = _c_power(c, -cfg.q)
    c_m1 = _c_power(c, -1.0)
    spec = cfg.sampler_spec()

    def trial(i, stream):
        x, y, z = sample_loewner_chain(spec, stream)
        xw = eigen_decompose(x).eigenvalues
        yw = eigen_decompose(y).eigenvalues
        zw = eigen_decompose(z).eigenvalues
        scale = max(abs(zw[0]), 1e-300)
        dom = min(float(np.min(yw - xw)), float(np.min(zw - yw))) / scale
        xa, ya, za = unfold(x), unfold(y), unfold(z)
        return {
            "chain_margin": dom,
            "escalated": False,
            "y_not_leq": _not_leq(ya, c_arr, cfg.tolerance),
            "x_not_leq": _not_leq(xa, c_arr, cfg.tolerance),
            "tr_zq": _abs_p_trace(za, c_mq, cfg.q),
            "tr_zq_printed": _abs_p_trace(za, c_m1, cfg.q),
            "tr_yq": _abs_p_trace(ya, c_mq, cfg.q),
            "tr_yq_printed": _abs_p_trace(ya, c_m1, cfg.q),
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("order_lemma", cfg.parameters())
    report.deterministic.append(
        _det_check("chain_eigenvalue_domination", records, "chain_margin", cfg.tolerance)
    )
    report.tails.append(
        _tail_check(
            "middle_vs_top",
            [r["y_not_leq"] for r in records],
            [r["tr_zq"] for r in records],
            cfg.seed,
            [r["tr_zq_printed"] for r in records],
        )
    )
    report.tails.append(
        _tail_check(
            "bottom_vs_middle",
            [r["x_not_leq"] for r in records],
            [r["tr_yq"] for r in records],
            cfg.seed,
            [r["tr_yq_printed"] for r in records],
        )
    )
    return _finish(report, started)


# ---------------------------------------------------------------------------
# Sandwich family
# ---------------------------------------------------------------------------

def _sandwich_trial_factory(cfg: CheckConfig, f: ConnectionFunction, mode: str, sample_fn):
    spec = cfg.sampler_spec(mode)
    c = cfg.target()
    c_arr = unfold(c)
    c_mp = _c_power(c, -cfg.p)
    c_m1 = _c_power(c, -1.0)

    def trial(i, stream):
        x, y = sample_pair_conditioned(spec, f, stream)
        res = checked_sample(
            sample_fn,
            unfold(x),
            unfold(y),
            cfg.q,
            f,
            tolerance=cfg.tolerance,
            mp_dps=cfg.mp_dps,
        )
        mid = res.matrices["mid"]
        lower = res.matrices["lower"]
        upper = res.matrices["upper"]
        return {
            "margin_lower": res.margins["lower"],
            "margin_upper": res.margins["upper"],
            "strict_lower": res.strict_margins["lower"],
            "strict_upper": res.strict_margins["upper"],
            "printed_lower": res.printed_margins["lower"],
            "printed_upper": res.printed_margins["upper"],
            "escalated": res.backend != "float64",
            "mid_not_leq": _not_leq(mid, c_arr, cfg.tolerance),
            "lower_not_leq": _not_leq(lower, c_arr, cfg.tolerance),
            "tr_upper_p": _abs_p_trace(upper, c_mp, cfg.p),
            "tr_upper_p_printed": _abs_p_trace(upper, c_m1, cfg.p),
            "tr_mid_p": _abs_p_trace(mid, c_mp, cfg.p),
            "tr_mid_p_printed": _abs_p_trace(mid, c_m1, cfg.p),
            "factor_lower": res.scalars.get("composed_lower"),
            "factor_upper": res.scalars.get("composed_upper"),
            "plain_lower": res.scalars.get("plain_lower"),
            "plain_upper": res.scalars.get("plain_upper"),
        }

    return trial


def _sandwich_report(cfg: CheckConfig, theorem_id: str, records) -> BoundReport:
    report = BoundReport(theorem_id, cfg.parameters())
    report.deterministic.append(_det_check("sandwich_lower", records, "margin_lower", cfg.tolerance))
    report.deterministic.append(_det_check("sandwich_upper", records, "margin_upper", cfg.tolerance))
    report.deterministic.append(
        _det_check("sandwich_lower_strict", records, "strict_lower", cfg.tolerance, variant="strict")
    )
    report.deterministic.append(
        _det_check("sandwich_upper_strict", records, "strict_upper", cfg.tolerance, variant="strict")
    )
    report.deterministic.append(
        _det_check("sandwich_lower_printed", records, "printed_lower", cfg.tolerance, variant="printed")
    )
    report.deterministic.append(
        _det_check("sandwich_upper_printed", records, "printed_upper", cfg.tolerance, variant="printed")
    )
    report.tails.append(
        _tail_check(
            "mid_tail_vs_upper",
            [r["mid_not_leq"] for r in records],
            [r["tr_upper_p"] for r in records],
            cfg.seed,
            [r["tr_upper_p_printed"] for r in records],
        )
    )
    report.tails.append(
        _tail_check(
            "lower_tail_vs_mid",
            [r["lower_not_leq"] for r in records],
            [r["tr_mid_p"] for r in records],
            cfg.seed,
            [r["tr_mid_p_printed"] for r in records],
        )
    )
    report.audit["factors_first_trial"] = {
        k: records[0][k]
        for k in ("factor_lower", "factor_upper", "plain_lower", "plain_upper")
    }
    report.audit["escalated_trials"] = sum(1 for r in records if r["escalated"])
    return report


def check_sandwich_tmi(cfg: CheckConfig) -> BoundReport:
    """Two-sided bound on X^q #_f Y^q for increasing f under X #_f Y >= I."""
    started = time.perf_counter()
    f = cfg.connection_fn()
    if "TMI" not in f.classes:
        raise ConfigError(f"connection {f.label()} is not declared TMI")
    trial = _sandwich_trial_factory(cfg, f, "mean_geq_identity", tmi_sandwich_sample)
    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    return _finish(_sandwich_report(cfg, "tmi_sandwich", records), started)


def check_sandwich_tmd(cfg: CheckConfig) -> BoundReport:
    """Two-sided bound on X^q #_h Y^q for decreasing h under X #_h Y <= I."""
    started = time.perf_counter()
    h = cfg.connection_fn()
    if "TMD" not in h.classes:
        raise ConfigError(f"connection {h.label()} is not declared TMD")
    trial = _sandwich_trial_factory(cfg, h, "mean_leq_identity", tmd_sandwich_sample)
    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = _sandwich_report(cfg, "tmd_sandwich", records)
    report.notes.append(
        "primary sandwich is the reciprocal-connection dual against X^2q with "
        "aux-mean eigenvalue caps; the typeset form is the printed variant"
    )
    return _finish(report, started)


def check_corollary_pmi_pmd(cfg: CheckConfig) -> BoundReport:
    """One-sided relations for power-monotone f, plus their tail bounds."""
    started = time.perf_counter()
    f = cfg.connection_fn()
    kind = classify_power_monotonicity(f)
    if kind is PowerMonotonicity.NEITHER:
        raise ConfigError(
            f"connection {f.label()} is neither pmi nor pmd on the default grids"
        )
    kinds = ("pmi", "pmd") if kind is PowerMonotonicity.BOTH else (kind.value.lower(),)
    spec = cfg.sampler_spec("mean_geq_identity")
    c = cfg.target()
    c_arr = unfold(c)
    c_mp = _c_power(c, -cfg.p)
    c_p1 = _c_power(c, 1.0)

    def trial(i, stream):
        x, y = sample_pair_conditioned(spec, f, stream)
        rec = {"escalated": False}
        for k in kinds:
            res = checked_sample(
                pmi_pmd_sample,
                unfold(x),
                unfold(y),
                cfg.q,
                f,
                k,
                tolerance=cfg.tolerance,
                mp_dps=cfg.mp_dps,
            )
            mid = res.matrices["mid"]
            elt = res.matrices["element"]
            rec[f"{k}_margin"] = res.margins["one_sided"]
            rec[f"{k}_strict"] = res.strict_margins["one_sided"]
            rec[f"{k}_printed"] = res.printed_margins["one_sided"]
            rec["escalated"] = rec["escalated"] or res.backend != "float64"
            if (k == "pmi") == (cfg.q >= 1.0):
                # lower element's tail against the mid expectation
                rec[f"{k}_event"] = _not_leq(elt, c_arr, cfg.tolerance)
                rec[f"{k}_tr"] = _abs_p_trace(mid, c_mp, cfg.p)
                rec[f"{k}_tr_printed"] = _abs_p_trace(mid, c_p1, cfg.p)
            else:
                rec[f"{k}_event"] = _not_leq(mid, c_arr, cfg.tolerance)
                rec[f"{k}_tr"] = _abs_p_trace(elt, c_mp, cfg.p)
                rec[f"{k}_tr_printed"] = _abs_p_trace(elt, c_p1, cfg.p)
        return rec

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("cor_pmi_pmd", cfg.parameters())
    report.notes.append(f"classified {kind.value}")
    for k in kinds:
        report.deterministic.append(
            _det_check(f"{k}_one_sided", records, f"{k}_margin", cfg.tolerance)
        )
        report.deterministic.append(
            _det_check(
                f"{k}_one_sided_strict", records, f"{k}_strict", cfg.tolerance, variant="strict"
            )
        )
        report.deterministic.append(
            _det_check(
                f"{k}_one_sided_printed", records, f"{k}_printed", cfg.tolerance, variant="printed"
            )
        )
        report.tails.append(
            _tail_check(
                f"{k}_tail",
                [r[f"{k}_event"] for r in records],
                [r[f"{k}_tr"] for r in records],
                cfg.seed,
                [r[f"{k}_tr_printed"] for r in records],
            )
        )
    return _finish(report, started)


def check_tc(cfg: CheckConfig) -> BoundReport:
    """Kantorovich-capped bounds for convex g, both conditioning modes.

    The leq pass checks the capped upper bound and its tail; the geq pass
    (seed offset by 1) checks the reversed bound.  The swap-transformed
    corollary runs inside the leq pass on the reversed pair.
    """
    started = time.perf_counter()
    g = cfg.connection_fn()
    if "TC" not in g.classes:
        raise ConfigError(f"connection {g.label()} is not declared TC")
    if cfg.q < 1:
        raise ConfigError("tc bounds need q >= 1")
    h = transform_swap(g)
    c = cfg.target()
    c_arr = unfold(c)
    c_mp = _c_power(c, -cfg.p)
    d = cfg.shape.unfold_dim
    spec_leq = cfg.sampler_spec("mean_leq_identity")
    spec_geq = cfg.sampler_spec("mean_geq_identity")

    def leq_trial(i, stream):
        x, y = sample_pair_conditioned(spec_leq, g, stream)
        mx, my = unfold(x), unfold(y)
        res = checked_sample(
            tc_cap_sample, mx, my, cfg.q, g, "leq",
            tolerance=cfg.tolerance, mp_dps=cfg.mp_dps,
        )
        swap = checked_sample(
            tc_cap_sample, my, mx, cfg.q, h, "leq",
            tolerance=cfg.tolerance, mp_dps=cfg.mp_dps,
        )
        mean_g = res.matrices["mean"]
        mean_h = swap.matrices["mean"]
        swap_scale = max(float(np.abs(np.linalg.eigvalsh(mean_g)).max()), 1e-300)
        swap_identity = float(np.linalg.norm(mean_g - mean_h)) / swap_scale
        mid = res.matrices["mid"]
        cap = res.scalars["cap"]
        return {
            "cap_margin": res.margins["cap"],
            "cap_printed": res.printed_margins["cap"],
            "swap_cap_margin": swap.margins["cap"],
            "swap_identity_gap": -swap_identity,
            "escalated": res.backend != "float64",
            "mid_not_leq": _not_leq(mid, c_arr, cfg.tolerance),
            "tr_cap": cap**cfg.p * float(np.trace(c_mp).real),
            "k1": res.scalars["k1"],
            "k2": res.scalars["k2"],
        }

    def geq_trial(i, stream):
        x, y = sample_pair_conditioned(spec_geq, g, stream)
        res = checked_sample(
            tc_cap_sample, unfold(x), unfold(y), cfg.q, g, "geq",
            tolerance=cfg.tolerance, mp_dps=cfg.mp_dps,
        )
        mid = res.matrices["mid"]
        cap = res.scalars["cap"]
        cap_elt = cap * np.eye(d)
        return {
            "cap_margin": res.margins["cap"],
            "cap_printed": res.printed_margins["cap"],
            "escalated": res.backend != "float64",
            "cap_not_leq": _not_leq(cap_elt, c_arr, cfg.tolerance),
            "tr_mid": _abs_p_trace(mid, c_mp, cfg.p),
        }

    leq_records = run_trials(cfg.trials, cfg.seed, leq_trial, cfg.workers)
    geq_records = run_trials(cfg.trials, cfg.seed + 1, geq_trial, cfg.workers)
    report = BoundReport("tc_bounds", cfg.parameters())
    report.deterministic.append(_det_check("capped_upper", leq_records, "cap_margin", cfg.tolerance))
    report.deterministic.append(
        _det_check("capped_upper_printed", leq_records, "cap_printed", cfg.tolerance, variant="printed")
    )
    report.deterministic.append(
        _det_check("swap_corollary_upper", leq_records, "swap_cap_margin", cfg.tolerance)
    )
    report.deterministic.append(
        _det_check("swap_mean_identity", leq_records, "swap_identity_gap", cfg.tolerance)
    )
    report.deterministic.append(_det_check("capped_lower", geq_records, "cap_margin", cfg.tolerance))
    report.deterministic.append(
        _det_check("capped_lower_printed", geq_records, "cap_printed", cfg.tolerance, variant="printed")
    )
    report.tails.append(
        _tail_check(
            "mid_tail_vs_cap",
            [r["mid_not_leq"] for r in leq_records],
            [r["tr_cap"] for r in leq_records],
            cfg.seed,
        )
    )
    report.tails.append(
        _tail_check(
            "cap_tail_vs_mid",
            [r["cap_not_leq"] for r in geq_records],
            [r["tr_mid"] for r in geq_records],
            cfg.seed + 1,
        )
    )
    report.audit["kantorovich_first_trial"] = {
        "k1": leq_records[0]["k1"],
        "k2": leq_records[0]["k2"],
    }
    report.audit["escalated_trials"] = sum(
        1 for r in leq_records + geq_records if r["escalated"]
    )
    return _finish(report, started)


def check_psi_lemma(cfg: CheckConfig) -> BoundReport:
    """For log-geodesically-convex f: plain lower factor >= 1 and plain upper
    factor capped by the endpoint psi product, per sample."""
    started = time.perf_counter()
    f = cfg.connection_fn()
    if not is_geodesically_convex(f):
        raise ConfigError(
            f"connection {f.label()} is not geodesically convex; the factor "
            "bounds do not apply"
        )
    if cfg.q < 1:
        raise ConfigError("psi lemma needs q >= 1")
    spec = cfg.sampler_spec()
    lemma_tol = 1e-10

    def trial(i, stream):
        rng = stream.generator()
        from ..sampling import _draw_unfold

        mx = _draw_unfold(spec, rng)
        my = _draw_unfold(spec, rng)
        res = psi_lemma_sample(mx, my, cfg.q, f)
        return {
            "lower_margin": res.margins["lower_at_least_one"],
            "upper_margin": res.margins["upper_within_cap"],
            "escalated": False,
            "plain_lower": res.scalars["plain_lower"],
            "plain_upper": res.scalars["plain_upper"],
            "cap": res.scalars["psi_cap_product"],
        }

    records = run_trials(cfg.trials, cfg.seed, trial, cfg.workers)
    report = BoundReport("psi_lemma", cfg.parameters())
    report.deterministic.append(
        _det_check("lower_factor_at_least_one", records, "lower_margin", lemma_tol)
    )
    report.deterministic.append(
        _det_check("upper_factor_within_psi_cap", records, "upper_margin", lemma_tol)
    )
    report.audit["first_trial"] = {
        k: records[0][k] for k in ("plain_lower", "plain_upper", "cap")
    }
    return _finish(report, started)


def run_check(cfg: CheckConfig) -> BoundReport:
    """Dispatch one configured run to its checker."""
    from .majorization import check_majorization_corollaries, check_majorization_lemma

    table = {
        "markov": check_markov,
        "chebyshev": check_chebyshev,
        "gen_chebyshev": check_generalized_chebyshev,
        "order_lemma": check_order_lemma,
        "tmi_sandwich": check_sandwich_tmi,
        "cor_pmi_pmd": check_corollary_pmi_pmd,
        "tmd_sandwich": check_sandwich_tmd,
        "tc_bounds": check_tc,
        "psi_lemma": check_psi_lemma,
        "majorization_lemma": check_majorization_lemma,
        "majorization_corollaries": check_majorization_corollaries,
    }
    return table[cfg.theorem](cfg)
