"""Per-sample deterministic order relations for the theorem checkers.

Each function computes, for one sampled pair, the Loewner margins of a
two-sided (or one-sided) comparison: ``margin = lambda_min(B - A) / scale``
so that ``A <= B`` holds exactly when the margin is >= 0, with ``scale`` the
largest eigenvalue magnitude among the operands.

Every two-sided relation carries three variants:

* ``primary`` — the identity-referenced form the checkers certify:
  composed level factors times lambda_min(M)^q (resp. lambda_max) against
  the identity.  This is the homogenized Ando-Hiai-type comparison; it is
  the strongest version that survives exact-arithmetic spot checks on every
  ensemble at every exponent.
* ``strict``  — the mean-referenced form with lambda^(q-1) scalings.  It is
  exact for commuting operands, holds empirically through q = 2, but admits
  genuine (rare) violations for q > 2; its pass rate is reported, never
  enforced.
* ``printed`` — the statement verbatim as typeset, which additionally swaps
  several min/max extremes; reported only.

All computations run under an injected numeric backend so the same code
serves the float64 fast path and the mpmath re-check; see ``_backend``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .._backend import F64, MPBackend, spectral_danger
from ..bounds import decompose_q
from ..connections import ConnectionFunction, reciprocal_function, transform_swap

__all__ = [
    "SampleMargins",
    "tmi_sandwich_sample",
    "tmd_sandwich_sample",
    "pmi_pmd_sample",
    "tc_cap_sample",
    "psi_lemma_sample",
    "checked_sample",
]


@dataclass
class SampleMargins:
    """Margins and audit numbers for one sample of one relation."""

    margins: dict[str, float]
    printed_margins: dict[str, float]
    backend: str
    strict_margins: dict[str, float] = field(default_factory=dict)
    scalars: dict[str, float] = field(default_factory=dict)
    matrices: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def worst(self) -> float:
        vals = list(self.margins.values())
        return min(vals) if vals else math.inf

    @property
    def worst_printed(self) -> float:
        vals = list(self.printed_margins.values())
        return min(vals) if vals else math.inf

    def all_margin_values(self) -> list[float]:
        return (
            list(self.margins.values())
            + list(self.strict_margins.values())
            + list(self.printed_margins.values())
        )


def _with_backend_precision(fn):
    """Run the whole sample computation at the backend's working precision.

    mpmath matrix products round at the ambient precision, so every step from
    input conversion to the final margin must sit inside one context.
    """

    @functools.wraps(fn)
    def wrapper(be, *args, **kwargs):
        with be.precision():
            return fn(be, *args, **kwargs)

    return wrapper


def _margin(be, a, b) -> float:
    """lambda_min(b - a) normalized by the operand scale; >= 0 means a <= b."""
    wa = be.eigvals(a)
    wb = be.eigvals(b)
    scale = max(abs(wa[0]), abs(wa[-1]), abs(wb[0]), abs(wb[-1]), 1e-300)
    wd = be.eigvals(b - a)
    return float(wd[0]) / float(scale)


def _mean(be, wx, vx, my, fn):
    xh = be.funcm_from(wx, vx, lambda t: t**0.5)
    xmh = be.funcm_from(wx, vx, lambda t: t**-0.5)
    inner = be.herm(be.matmul(xmh, my, xmh))
    return be.herm(be.matmul(xh, be.funcm(inner, fn), xh))


def _powers(be, w, v, q):
    return be.funcm_from(w, v, lambda t, _q=float(q): t**_q)


def _ratio_extremes(fn, q, eigs):
    vals = []
    for lam in eigs:
        lam = max(float(lam), 1e-300)
        vals.append(float(fn(lam**q)) / float(fn(lam)) ** q)
    return min(vals), max(vals)


def _z_eigs(be, wx, vx, wy, vy, n) -> list[list[float]]:
    """Eigenvalues of Z_0..Z_n; the heavy-cancellation part of the pipeline."""
    out = []
    for k in range(1, n + 2):
        e = 2.0 ** (k - 2)
        xm = _powers(be, wx, vx, -e)
        yp = _powers(be, wy, vy, 2.0 ** (k - 1))
        z = be.herm(be.matmul(xm, yp, xm))
        out.append([float(t) for t in be.eigvals(z)])
    return out


def _factors(fn, q, z_eigs) -> dict[str, float]:
    """Plain and composed lower/upper level products from Z spectra."""
    if q >= 1.0:
        dec = decompose_q(q)
        lo, hi = _ratio_extremes(fn, dec.q0, z_eigs[dec.n])
        plain_lo, plain_hi, comp_lo, comp_hi = lo, hi, lo, hi
        for k in range(1, dec.n + 1):
            a, b = _ratio_extremes(fn, 2.0, z_eigs[k - 1])
            plain_lo *= a
            plain_hi *= b
            e = q / 2.0**k
            comp_lo *= a**e
            comp_hi *= b**e
    else:
        lo, hi = _ratio_extremes(fn, q, z_eigs[0])
        plain_lo = comp_lo = lo
        plain_hi = comp_hi = hi
    return {
        "plain_lower": plain_lo,
        "plain_upper": plain_hi,
        "composed_lower": comp_lo,
        "composed_upper": comp_hi,
    }


def _n_levels(q: float) -> int:
    return decompose_q(q).n if q >= 1.0 else 0


@_with_backend_precision
def tmi_sandwich_sample(be, mx, my, q, f: ConnectionFunction) -> SampleMargins:
    """Two-sided comparison of X^q #_f Y^q for increasing f.

    primary:  C_lo * lmin(M)^q * I  <=  mid  <=  C_hi * lmax(M)^q * I
    strict:   C_lo * min(l^(q-1)) * M  <=  mid  <=  C_hi * max(l^(q-1)) * M
    printed:  plain factors with the lambda extremes as typeset.
    """
    mx = be.to_native(mx)
    my = be.to_native(my)
    wx, vx = be.eigh(mx)
    wy, vy = be.eigh(my)
    m = _mean(be, wx, vx, my, f.fn)
    mid = _mean_on_powers(be, wx, vx, wy, vy, q, f.fn)
    wm = be.eigvals(m)
    lmin, lmax = float(wm[0]), float(wm[-1])
    fac = _factors(f.fn, q, _z_eigs(be, wx, vx, wy, vy, _n_levels(q)))
    d = len(wm)
    eye = be.eye(d)
    p_small = min(lmin ** (q - 1.0), lmax ** (q - 1.0))
    p_big = max(lmin ** (q - 1.0), lmax ** (q - 1.0))
    # identity caps: for q >= 1 these are lmin^q and lmax^q; for q < 1 the
    # admissible rescalings mix the extremes (lmax^(q-1) lmin and its mirror)
    lo_cap = fac["composed_lower"] * p_small * lmin
    hi_cap = fac["composed_upper"] * p_big * lmax
    lower = be.scale(lo_cap, eye)
    upper = be.scale(hi_cap, eye)
    margins = {"lower": _margin(be, lower, mid), "upper": _margin(be, mid, upper)}
    strict = {
        "lower": _margin(be, be.scale(fac["composed_lower"] * p_small, m), mid),
        "upper": _margin(be, mid, be.scale(fac["composed_upper"] * p_big, m)),
    }
    if q >= 1.0:
        pr_lower = be.scale(fac["plain_lower"] * lmax ** (q - 1.0), m)
        pr_upper = be.scale(fac["plain_upper"] * lmin ** (q - 1.0), m)
    else:
        pr_lower = be.scale(fac["plain_upper"] * lmax ** (q - 1.0), m)
        pr_upper = be.scale(fac["plain_lower"] * lmin ** (q - 1.0), m)
    printed = {
        "lower": _margin(be, pr_lower, mid),
        "upper": _margin(be, mid, pr_upper),
    }
    out = SampleMargins(
        margins=margins, printed_margins=printed, strict_margins=strict, backend=be.name
    )
    out.scalars = {
        "mean_lambda_min": lmin,
        "mean_lambda_max": lmax,
        "lower_cap": lo_cap,
        "upper_cap": hi_cap,
        "cond_x": float(wx[-1]) / max(float(wx[0]), 1e-300),
        "cond_y": float(wy[-1]) / max(float(wy[0]), 1e-300),
        **fac,
    }
    if be is F64:
        out.matrices = {
            "mean": m,
            "mid": mid,
            "lower": lo_cap * np.eye(d, dtype=np.complex128),
            "upper": hi_cap * np.eye(d, dtype=np.complex128),
        }
    return out


def _mean_on_powers(be, wx, vx, wy, vy, q, fn):
    xq = _powers(be, wx, vx, q)
    yq = _powers(be, wy, vy, q)
    wxq, vxq = be.eigh(xq)
    return _mean(be, wxq, vxq, yq, fn)


@_with_backend_precision
def tmd_sandwich_sample(be, mx, my, q, h: ConnectionFunction) -> SampleMargins:
    """Two-sided comparison for a decreasing connection h.

    With k = 1/h increasing and N = X #_k Y, the identity
    X^q #_h Y^q = X^q (X^q #_k Y^q)^{-1} X^q turns the increasing-case
    comparison for k into the exact dual

    primary:  C_lo(h) * lmax(N)^-q * X^2q  <=  mid  <=  C_hi(h) * lmin(N)^-q * X^2q
    strict:   the same factors against X^(q-1) (X #_h Y) X^(q-1) with
              lambda_N^(1-q) scalings (mean-referenced dual).
    printed:  plain factors times lambda(M)^(q-1) extremes of X #_h Y itself,
              as typeset.

    The level factors of h over Z_0..Z_n are the reciprocals of k's.
    """
    mx = be.to_native(mx)
    my = be.to_native(my)
    wx, vx = be.eigh(mx)
    wy, vy = be.eigh(my)
    k = reciprocal_function(h)
    m = _mean(be, wx, vx, my, h.fn)
    n_mean = _mean(be, wx, vx, my, k.fn)
    mid = _mean_on_powers(be, wx, vx, wy, vy, q, h.fn)
    wn = be.eigvals(n_mean)
    nmin, nmax = float(wn[0]), float(wn[-1])
    wm = be.eigvals(m)
    lmin, lmax = float(wm[0]), float(wm[-1])
    fac = _factors(h.fn, q, _z_eigs(be, wx, vx, wy, vy, _n_levels(q)))
    x2q = _powers(be, wx, vx, 2.0 * q)
    # duals of the increasing-case identity caps for k = 1/h on N
    pn_small = min(nmin ** (q - 1.0), nmax ** (q - 1.0))
    pn_big = max(nmin ** (q - 1.0), nmax ** (q - 1.0))
    lower = be.scale(fac["composed_lower"] / (pn_big * nmax), x2q)
    upper = be.scale(fac["composed_upper"] / (pn_small * nmin), x2q)
    margins = {"lower": _margin(be, lower, mid), "upper": _margin(be, mid, upper)}
    xq1 = _powers(be, wx, vx, q - 1.0)
    w_conj = be.herm(be.matmul(xq1, m, xq1))
    p_small = min(nmin ** (1.0 - q), nmax ** (1.0 - q))
    p_big = max(nmin ** (1.0 - q), nmax ** (1.0 - q))
    strict = {
        "lower": _margin(be, be.scale(fac["composed_lower"] * p_small, w_conj), mid),
        "upper": _margin(be, mid, be.scale(fac["composed_upper"] * p_big, w_conj)),
    }
    pr_lower = be.scale(fac["plain_lower"] * lmax ** (q - 1.0), m)
    pr_upper = be.scale(fac["plain_upper"] * lmin ** (q - 1.0), m)
    printed = {
        "lower": _margin(be, pr_lower, mid),
        "upper": _margin(be, mid, pr_upper),
    }
    out = SampleMargins(
        margins=margins, printed_margins=printed, strict_margins=strict, backend=be.name
    )
    out.scalars = {
        "mean_lambda_min": lmin,
        "mean_lambda_max": lmax,
        "aux_mean_lambda_min": nmin,
        "aux_mean_lambda_max": nmax,
        "cond_x": float(wx[-1]) / max(float(wx[0]), 1e-300),
        "cond_y": float(wy[-1]) / max(float(wy[0]), 1e-300),
        **fac,
    }
    if be is F64:
        out.matrices = {
            "mean": m,
            "mid": mid,
            "lower": np.asarray(lower),
            "upper": np.asarray(upper),
        }
    return out


@_with_backend_precision
def pmi_pmd_sample(be, mx, my, q, f: ConnectionFunction, kind: str) -> SampleMargins:
    """One-sided comparison for a power-monotone connection.

    primary (identity-referenced):
        pmi: lambda_min^q(M) I <= mid for q >= 1, mid <= lambda_max^q(M) I
             for q <= 1;
        pmd: the mirror image.
    strict uses lambda^(q-1)(M) M with the matching extreme; printed uses the
    opposite extreme, as typeset.
    """
    if kind not in ("pmi", "pmd"):
        raise ValueError(f"kind must be pmi or pmd, got {kind!r}")
    mx = be.to_native(mx)
    my = be.to_native(my)
    wx, vx = be.eigh(mx)
    wy, vy = be.eigh(my)
    m = _mean(be, wx, vx, my, f.fn)
    mid = _mean_on_powers(be, wx, vx, wy, vy, q, f.fn)
    wm = be.eigvals(m)
    lmin, lmax = float(wm[0]), float(wm[-1])
    d = len(wm)
    eye = be.eye(d)
    lower_first = (kind == "pmi") == (q >= 1.0)
    if lower_first:
        cap = lmin**q
        elt = be.scale(cap, eye)
        strict_elt = be.scale(lmin ** (q - 1.0), m)
        pr_elt = be.scale(lmax ** (q - 1.0), m)
        margins = {"one_sided": _margin(be, elt, mid)}
        strict = {"one_sided": _margin(be, strict_elt, mid)}
        printed = {"one_sided": _margin(be, pr_elt, mid)}
    else:
        cap = lmax**q
        elt = be.scale(cap, eye)
        strict_elt = be.scale(lmax ** (q - 1.0), m)
        pr_elt = be.scale(lmin ** (q - 1.0), m)
        margins = {"one_sided": _margin(be, mid, elt)}
        strict = {"one_sided": _margin(be, mid, strict_elt)}
        printed = {"one_sided": _margin(be, mid, pr_elt)}
    out = SampleMargins(
        margins=margins, printed_margins=printed, strict_margins=strict, backend=be.name
    )
    out.scalars = {
        "mean_lambda_min": lmin,
        "mean_lambda_max": lmax,
        "cap": cap,
        "cond_x": float(wx[-1]) / max(float(wx[0]), 1e-300),
        "cond_y": float(wy[-1]) / max(float(wy[0]), 1e-300),
    }
    if be is F64:
        out.matrices = {
            "mean": m,
            "mid": mid,
            "element": cap * np.eye(d, dtype=np.complex128),
        }
    return out


def _kantorovich_or_one(m, M, p):
    from ..bounds import _kantorovich_or_one as impl

    return impl(m, M, p)


@_with_backend_precision
def tc_cap_sample(be, mx, my, q, g: ConnectionFunction, mode: str) -> SampleMargins:
    """Scalar-capped comparison for a convex connection g.

    mode "leq" (X #_g Y <= I): mid <= K1 lmin^(1-q)(M) rmax K2 I,
    mode "geq" (X #_g Y >= I): mid >= K1^-1 lmax^(1-q)(M) rmin K2^-1 I,
    with r* the extremes of g(s^q)/g(s)^q over the spectrum of Z_0 and the
    Kantorovich pair built from the second argument's spectrum.  The printed
    variant takes the constants from the first argument, evaluates the ratio
    on the reciprocal spectrum, and omits the K1 reversal on the geq side.
    """
    if mode not in ("leq", "geq"):
        raise ValueError(f"mode must be leq or geq, got {mode!r}")
    mx = be.to_native(mx)
    my = be.to_native(my)
    wx, vx = be.eigh(mx)
    wy, vy = be.eigh(my)
    m = _mean(be, wx, vx, my, g.fn)
    mid = _mean_on_powers(be, wx, vx, wy, vy, q, g.fn)
    wm = be.eigvals(m)
    lmin, lmax = float(wm[0]), float(wm[-1])
    z_eigs = _z_eigs(be, wx, vx, wy, vy, 0)[0]
    rmin, rmax = _ratio_extremes(g.fn, q, z_eigs)
    ymin, ymax = float(wy[0]), float(wy[-1])
    xmin, xmax = float(wx[0]), float(wx[-1])
    k1 = _kantorovich_or_one(1.0 / ymax, 1.0 / ymin, q - 1.0)
    k2 = _kantorovich_or_one(1.0 / ymax, 1.0 / ymin, 2.0 * q - 1.0)
    k1_pr = _kantorovich_or_one(1.0 / xmax, 1.0 / xmin, q - 1.0)
    k2_pr = _kantorovich_or_one(1.0 / xmax, 1.0 / xmin, 2.0 * q - 1.0)
    rmin_pr, rmax_pr = _ratio_extremes(g.fn, q, [1.0 / max(t, 1e-300) for t in z_eigs])
    d = len(wm)
    eye = be.eye(d)
    if mode == "leq":
        cap = k1 * lmin ** (1.0 - q) * rmax * k2
        cap_pr = k1_pr * lmin ** (1.0 - q) * rmax_pr * k2_pr
        margins = {"cap": _margin(be, mid, be.scale(cap, eye))}
        printed = {"cap": _margin(be, mid, be.scale(cap_pr, eye))}
    else:
        cap = lmax ** (1.0 - q) * rmin / (k1 * k2)
        cap_pr = lmin ** (1.0 - q) * rmax_pr / k2_pr
        margins = {"cap": _margin(be, be.scale(cap, eye), mid)}
        printed = {"cap": _margin(be, be.scale(cap_pr, eye), mid)}
    out = SampleMargins(margins=margins, printed_margins=printed, backend=be.name)
    out.scalars = {
        "mean_lambda_min": lmin,
        "mean_lambda_max": lmax,
        "cap": cap,
        "cap_printed": cap_pr,
        "k1": k1,
        "k2": k2,
        "ratio_min": rmin,
        "ratio_max": rmax,
        "cond_x": xmax / max(xmin, 1e-300),
        "cond_y": ymax / max(ymin, 1e-300),
    }
    if be is F64:
        out.matrices = {"mean": m, "mid": mid}
    return out


def psi_lemma_sample(mx, my, q, f: ConnectionFunction) -> SampleMargins:
    """Plain-factor bounds: lower >= 1 and upper <= endpoint psi product.

    Both sides are functions of the same computed spectra, so the comparison
    is immune to the conditioning of the underlying products; no
    high-precision escalation is needed.
    """
    be = F64
    wx, vx = be.eigh(be.to_native(mx))
    wy, vy = be.eigh(be.to_native(my))
    z_eigs = _z_eigs(be, wx, vx, wy, vy, _n_levels(q))
    fac = _factors(f.fn, q, z_eigs)
    dec = decompose_q(q)
    cap = _ratio_extremes(f.fn, dec.q0, [z_eigs[dec.n][0], z_eigs[dec.n][-1]])[1]
    for k in range(1, dec.n + 1):
        cap *= _ratio_extremes(f.fn, 2.0, [z_eigs[k - 1][0], z_eigs[k - 1][-1]])[1]
    margins = {
        "lower_at_least_one": fac["plain_lower"] - 1.0,
        "upper_within_cap": cap - fac["plain_upper"],
    }
    out = SampleMargins(margins=margins, printed_margins={}, backend=be.name)
    out.scalars = {"psi_cap_product": cap, **fac}
    return out


def checked_sample(
    sample_fn: Callable[..., SampleMargins],
    mx: np.ndarray,
    my: np.ndarray,
    q: float,
    conn: ConnectionFunction,
    *args,
    tolerance: float = 1e-8,
    mp_dps: int = 40,
) -> SampleMargins:
    """Run a relation in float64, re-running in mpmath when untrustworthy.

    A margin within the spectral danger band (or non-finite) cannot be
    certified in float64; the sample is then recomputed exactly from its
    float64 entries at ``mp_dps`` digits and the high-precision margins
    replace the fast ones.  Audit matrices from the float64 pass are kept for
    the Monte Carlo statistics either way.
    """
    fast = sample_fn(F64, mx, my, q, conn, *args)
    cond_x = fast.scalars.get("cond_x", 1.0)
    cond_y = fast.scalars.get("cond_y", 1.0)
    danger = spectral_danger(cond_x, cond_y, q, mx.shape[0])
    band = max(danger, 4.0 * tolerance)
    suspicious = any(
        not math.isfinite(v) or abs(v) < band for v in fast.all_margin_values()
    )
    if not suspicious:
        return fast
    slow = sample_fn(MPBackend(mp_dps), mx, my, q, conn, *args)
    fast.margins = slow.margins
    fast.printed_margins = slow.printed_margins
    fast.strict_margins = slow.strict_margins
    fast.backend = slow.backend
    return fast
