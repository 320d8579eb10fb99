"""Scalar bound factors: Kantorovich constants, the dyadic Z sequence,
ratio spectra, sandwich factors and psi caps.

The two-sided mean comparisons use per-level spectral extremes of the
commuting product f(Z^s) f(Z)^{-s}, evaluated as the single scalar map
lambda -> f(lambda^s) / f(lambda)^s on the spectrum of Z; forming the
near-singular operator products explicitly would only lose accuracy.

``SandwichFactors`` carries two variants of the level product: the plain
product of extremes (``lower``/``upper``) and the recursion-faithful product
with level exponents q / 2^k (``composed_lower``/``composed_upper``).  The
plain form is what the psi-cap lemma bounds; the composed form is what the
dyadic argument actually yields, and it is the one the order checkers can
certify sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor_core import EinsteinTensor, TensorError
from .spectral import eigen_decompose, power
from .connections import ConnectionFunction
from ._backend import F64

__all__ = [
    "DyadicDecomposition",
    "RatioExtremes",
    "SandwichLevel",
    "SandwichFactors",
    "KantorovichPair",
    "kantorovich",
    "decompose_q",
    "z_sequence",
    "ratio_spectrum",
    "acute_prod",
    "sandwich_factors",
    "psi_cap",
    "psi_cap_product",
    "kantorovich_pair",
]


def kantorovich(m: float, M: float, p: float) -> float:
    """Kantorovich constant K(m, M, p) for a spectrum in [m, M] and p > 1.

    K = ((p-1)(M^p - m^p) / (p (m M^p - M m^p)))^p
        * (m M^p - M m^p) / ((p-1)(M - m))
    """
    if m <= 0 or m >= M:
        raise TensorError(f"need 0 < m < M, got m={m}, M={M}")
    if p <= 1:
        raise TensorError(f"Kantorovich constant needs p > 1, got p={p}")
    cross = m * M**p - M * m**p
    ratio = (p - 1) * (M**p - m**p) / (p * cross)
    return float(ratio**p * cross / ((p - 1) * (M - m)))


def _kantorovich_or_one(m: float, M: float, p: float, rel_tol: float = 1e-12) -> float:
    # Convention: exponents p <= 1 need no reversal constant, and a point
    # spectrum makes the power map exact; both regimes return 1.
    if p <= 1 or abs(M - m) <= rel_tol * max(abs(M), abs(m)):
        return 1.0
    return kantorovich(m, M, p)


@dataclass(frozen=True)
class DyadicDecomposition:
    """q = 2^n * q0 with q0 in [1, 2); powers of two take the larger n."""

    q: float
    n: int
    q0: float

    def __post_init__(self):
        if not (1.0 <= self.q0 < 2.0):
            raise TensorError(f"q0 must lie in [1,2), got {self.q0}")
        if abs(2.0**self.n * self.q0 - self.q) > 1e-12 * max(self.q, 1.0):
            raise TensorError("decomposition does not reconstruct q")


def decompose_q(q: float) -> DyadicDecomposition:
    if q < 1.0:
        raise TensorError(f"dyadic decomposition needs q >= 1, got {q}")
    n = int(math.floor(math.log2(q)))
    q0 = q / 2.0**n
    # Guard the float boundary so q0 stays inside [1, 2).
    if q0 >= 2.0:
        n += 1
        q0 = q / 2.0**n
    if q0 < 1.0:
        n -= 1
        q0 = q / 2.0**n
    return DyadicDecomposition(q=float(q), n=n, q0=float(q0))


def z_sequence(x: EinsteinTensor, y: EinsteinTensor, n: int) -> list[EinsteinTensor]:
    """Z_0 .. Z_n with Z_{k-1} = X^{-2^{k-2}} Y^{2^{k-1}} X^{-2^{k-2}}.

    Z_0 = X^{-1/2} Y X^{-1/2}; the sequence is invariant under the joint
    rescaling (X, Y) -> (cX, cY).
    """
    if n < 0:
        raise TensorError("need n >= 0")
    out = []
    for k in range(1, n + 2):
        e = 2.0 ** (k - 2)
        xm = power(x, -e)
        out.append(xm @ power(y, 2.0 ** (k - 1)) @ xm)
    # Symmetrize away the multiplication roundoff; each Z_k is PD Hermitian.
    from .tensor_core import fold, unfold

    return [fold(F64.herm(unfold(z)), z.shape) for z in out]


@dataclass(frozen=True)
class RatioExtremes:
    min: float
    max: float


def ratio_spectrum(f: ConnectionFunction, q: float, z: EinsteinTensor) -> RatioExtremes:
    """Extremes of f(lambda^q) / f(lambda)^q over the spectrum of PD z."""
    w = eigen_decompose(z).eigenvalues
    return _ratio_extremes_from_eigs(f, q, w)


def _ratio_extremes_from_eigs(f, q, w) -> RatioExtremes:
    w = np.clip(np.asarray(w, dtype=np.float64), 1e-300, None)
    num = np.asarray(f(w**q), dtype=np.float64)
    den = np.asarray(f(w), dtype=np.float64) ** q
    if np.any(den <= 0) or np.any(num <= 0):
        raise TensorError(f"connection {f.name} not positive on the needed points")
    vals = num / den
    return RatioExtremes(min=float(vals.min()), max=float(vals.max()))


def acute_prod(values) -> float:
    """Product with the empty-sequence convention of 1."""
    return float(math.prod(values))


@dataclass(frozen=True)
class SandwichLevel:
    """Audit record for one level of the dyadic recursion."""

    level: int
    exponent_q: float
    composition_power: float
    z_lambda_min: float
    z_lambda_max: float
    ratio_min: float
    ratio_max: float


@dataclass(frozen=True)
class SandwichFactors:
    """Lower/upper scalar factors for the two-sided mean comparison.

    ``lower``/``upper`` are the plain products over levels; ``composed_lower``
    and ``composed_upper`` raise level k's extremes to q / 2^k, matching the
    dyadic recursion.  For q < 1 all four coincide (single level).
    """

    lower: float
    upper: float
    composed_lower: float
    composed_upper: float
    q: float
    connection: str
    levels: tuple[SandwichLevel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (0 < self.lower <= self.upper):
            raise TensorError("need 0 < lower <= upper")


def sandwich_factors(
    q: float, f: ConnectionFunction, x: EinsteinTensor, y: EinsteinTensor
) -> SandwichFactors:
    """Sandwich factors for the pair (x, y) at exponent q > 0.

    For q >= 1 the factors multiply the q0-level extremes over Z_n with
    the squaring-level extremes over Z_0..Z_{n-1}; for q in (0, 1) they are
    the single-level extremes over Z_0.
    """
    if q <= 0:
        raise TensorError(f"need q > 0, got {q}")
    if q >= 1.0:
        dec = decompose_q(q)
        zs = z_sequence(x, y, dec.n)
        levels = []
        top_w = eigen_decompose(zs[dec.n]).eigenvalues
        top = _ratio_extremes_from_eigs(f, dec.q0, top_w)
        levels.append(
            SandwichLevel(
                level=dec.n,
                exponent_q=dec.q0,
                composition_power=1.0,
                z_lambda_min=float(top_w[-1]),
                z_lambda_max=float(top_w[0]),
                ratio_min=top.min,
                ratio_max=top.max,
            )
        )
        lo = hi = clo = chi = 1.0
        lo, hi = top.min, top.max
        clo, chi = top.min, top.max
        for k in range(1, dec.n + 1):
            w = eigen_decompose(zs[k - 1]).eigenvalues
            ext = _ratio_extremes_from_eigs(f, 2.0, w)
            comp = q / 2.0**k
            levels.append(
                SandwichLevel(
                    level=k - 1,
                    exponent_q=2.0,
                    composition_power=comp,
                    z_lambda_min=float(w[-1]),
                    z_lambda_max=float(w[0]),
                    ratio_min=ext.min,
                    ratio_max=ext.max,
                )
            )
            lo *= ext.min
            hi *= ext.max
            clo *= ext.min**comp
            chi *= ext.max**comp
        return SandwichFactors(
            lower=lo,
            upper=hi,
            composed_lower=clo,
            composed_upper=chi,
            q=float(q),
            connection=f.label(),
            levels=tuple(levels),
        )
    zs = z_sequence(x, y, 0)
    w = eigen_decompose(zs[0]).eigenvalues
    ext = _ratio_extremes_from_eigs(f, q, w)
    level = SandwichLevel(
        level=0,
        exponent_q=float(q),
        composition_power=1.0,
        z_lambda_min=float(w[-1]),
        z_lambda_max=float(w[0]),
        ratio_min=ext.min,
        ratio_max=ext.max,
    )
    return SandwichFactors(
        lower=ext.min,
        upper=ext.max,
        composed_lower=ext.min,
        composed_upper=ext.max,
        q=float(q),
        connection=f.label(),
        levels=(level,),
    )


def psi_cap(q: float, f: ConnectionFunction, z: EinsteinTensor) -> float:
    """max of f(lambda^q)/f(lambda)^q at the two extreme eigenvalues of z."""
    w = eigen_decompose(z).eigenvalues
    ext = _ratio_extremes_from_eigs(f, q, np.asarray([w[-1], w[0]]))
    return ext.max


def psi_cap_product(
    q: float, f: ConnectionFunction, x: EinsteinTensor, y: EinsteinTensor
) -> float:
    """psi(q0, f, Z_n) * prod_k psi(2, f, Z_{k-1}); upper cap for the plain factors."""
    dec = decompose_q(q)
    zs = z_sequence(x, y, dec.n)
    cap = psi_cap(dec.q0, f, zs[dec.n])
    for k in range(1, dec.n + 1):
        cap *= psi_cap(2.0, f, zs[k - 1])
    return cap


@dataclass(frozen=True)
class KantorovichPair:
    """K(1/lmax, 1/lmin, q-1) and K(1/lmax, 1/lmin, 2q-1) for one spectrum.

    Exponents at or below 1 and degenerate spectra use the constant-1
    convention; ``regime_note`` records when that happened.
    """

    k1: float
    k2: float
    q: float
    spectrum_min: float
    spectrum_max: float
    regime_note: str = ""


def kantorovich_pair(t: EinsteinTensor, q: float) -> KantorovichPair:
    """Kantorovich pair built from the spectrum of PD tensor t."""
    if q < 1.0:
        raise TensorError(f"Kantorovich pair needs q >= 1, got {q}")
    w = eigen_decompose(t).eigenvalues
    lmin, lmax = float(w[-1]), float(w[0])
    if lmin <= 0:
        raise TensorError(f"tensor must be PD (lambda_min={lmin:.3e})")
    m, M = 1.0 / lmax, 1.0 / lmin
    notes = []
    if abs(M - m) <= 1e-12 * M:
        notes.append("degenerate spectrum: constants forced to 1")
    if q - 1.0 <= 1.0:
        notes.append(f"exponent q-1={q - 1.0:g} <= 1: K1 = 1 by convention")
    if 2.0 * q - 1.0 <= 1.0:
        notes.append(f"exponent 2q-1={2.0 * q - 1.0:g} <= 1: K2 = 1 by convention")
    return KantorovichPair(
        k1=_kantorovich_or_one(m, M, q - 1.0),
        k2=_kantorovich_or_one(m, M, 2.0 * q - 1.0),
        q=float(q),
        spectrum_min=lmin,
        spectrum_max=lmax,
        regime_note="; ".join(notes),
    )
