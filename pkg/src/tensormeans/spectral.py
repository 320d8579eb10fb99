"""Hermitian eigen-decomposition, functional calculus and the Loewner order.

Every partial-order statement in this package reduces to eigenvalue signs of a
Hermitian difference; this module owns that reduction.  Decompositions run on
the D x D unfolding through LAPACK's Hermitian solver, which is deterministic
for a fixed input, and eigenvalues are reported in descending order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor_core import (
    DEFAULT_TOL,
    EinsteinTensor,
    Shape,
    ShapeMismatchError,
    TensorError,
    fold,
    unfold,
)

__all__ = [
    "EigenSystem",
    "Relation",
    "OrderVerdict",
    "NotHermitianError",
    "SpectrumDomainError",
    "eigen_decompose",
    "apply_function",
    "power",
    "abs_tensor",
    "is_psd",
    "is_pd",
    "loewner_compare",
    "lambda_min",
    "lambda_max",
]

PSD_TOL = 1e-9
# Fractional powers refuse spectra this close to singular; the bound factors
# downstream must stay finite and attributable.
PD_FLOOR_RATIO = 1e-12


class NotHermitianError(TensorError):
    """The operation needs a Hermitian input and the check failed."""


class SpectrumDomainError(TensorError):
    """A scalar map was evaluated outside its domain on some eigenvalue."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class EigenSystem:
    """Descending real eigenvalues and a unitary eigenbasis of the unfolding.

    Column ``eigenbasis[:, i]`` is the unfolded eigentensor for
    ``eigenvalues[i]``; the source is recovered as U diag(w) U^H.
    """

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    source_shape: Shape

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=np.float64)
        v = np.asarray(self.eigenbasis, dtype=np.complex128)
        d = self.source_shape.unfold_dim
        if w.shape != (d,) or v.shape != (d, d):
            raise ShapeMismatchError("eigen data does not match the shape")
        if np.any(np.diff(w) > 0):
            raise TensorError("eigenvalues must be sorted descending")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenbasis", v)

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> EinsteinTensor:
        """Assemble sum_i fn(lambda_i) U_i U_i^H as a tensor."""
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.asarray(fn(self.eigenvalues), dtype=np.float64)
        if vals.shape != self.eigenvalues.shape or not np.all(np.isfinite(vals)):
            bad = _first_bad_eigenvalue(self.eigenvalues, vals)
            raise SpectrumDomainError(
                f"scalar map undefined or non-finite at eigenvalue {bad!r}", bad
            )
        m = (self.eigenbasis * vals) @ self.eigenbasis.conj().T
        return fold(_hermitize(m), self.source_shape)

    def reconstruct(self) -> EinsteinTensor:
        return self.apply(lambda w: w)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def _first_bad_eigenvalue(w: np.ndarray, vals: np.ndarray) -> float:
    if vals.shape != w.shape:
        return float(w[0])
    bad = ~np.isfinite(vals)
    return float(w[bad][0]) if bad.any() else float(w[0])


def _require_hermitian(h: EinsteinTensor, tol: float) -> np.ndarray:
    from .tensor_core import is_hermitian

    if not is_hermitian(h, tol):
        raise NotHermitianError("input tensor is not Hermitian within tolerance")
    return _hermitize(unfold(h))


def eigen_decompose(h: EinsteinTensor, tol: float = DEFAULT_TOL) -> EigenSystem:
    """Hermitian eigen-decomposition of the unfolding, eigenvalues descending."""
    m = _require_hermitian(h, tol)
    w, v = np.linalg.eigh(m)
    return EigenSystem(w[::-1].copy(), v[:, ::-1].copy(), h.shape)


def apply_function(
    h: EinsteinTensor,
    fn: Callable[[np.ndarray], np.ndarray],
    tol: float = DEFAULT_TOL,
) -> EinsteinTensor:
    """Functional calculus: fn applied to the spectrum, basis unchanged."""
    return eigen_decompose(h, tol).apply(fn)


def power(h: EinsteinTensor, q: float, tol: float = DEFAULT_TOL) -> EinsteinTensor:
    """Spectral power h^q.

    Integer q works for any Hermitian input; fractional q requires a positive
    definite spectrum (relative floor ``PD_FLOOR_RATIO``).
    """
    from .tensor_core import identity

    if q == 0:
        return identity(h.shape)
    system = eigen_decompose(h, tol)
    w = system.eigenvalues
    if float(q).is_integer():
        return system.apply(lambda v: v ** float(q))
    top = float(np.max(np.abs(w))) if w.size else 0.0
    if w[-1] <= PD_FLOOR_RATIO * max(top, 1e-300):
        raise SpectrumDomainError(
            f"fractional power {q} needs a positive definite spectrum; "
            f"smallest eigenvalue {w[-1]:.3e}",
            float(w[-1]),
        )
    return system.apply(lambda v: v ** float(q))


def abs_tensor(h: EinsteinTensor, tol: float = DEFAULT_TOL) -> EinsteinTensor:
    """|H| = (H^2)^{1/2} via |lambda| on the spectrum."""
    return apply_function(h, np.abs, tol)


def lambda_min(h: EinsteinTensor, tol: float = DEFAULT_TOL) -> float:
    m = _require_hermitian(h, tol)
    return float(np.linalg.eigvalsh(m)[0])


def lambda_max(h: EinsteinTensor, tol: float = DEFAULT_TOL) -> float:
    m = _require_hermitian(h, tol)
    return float(np.linalg.eigvalsh(m)[-1])


def is_psd(h: EinsteinTensor, tol: float = PSD_TOL) -> bool:
    """lambda_min >= -tol * spectral norm."""
    m = _require_hermitian(h, DEFAULT_TOL)
    w = np.linalg.eigvalsh(m)
    scale = max(abs(w[0]), abs(w[-1]), 1e-300)
    return bool(w[0] >= -tol * scale)


def is_pd(h: EinsteinTensor, tol: float = PSD_TOL) -> bool:
    """lambda_min strictly above tol * spectral norm."""
    m = _require_hermitian(h, DEFAULT_TOL)
    w = np.linalg.eigvalsh(m)
    scale = max(abs(w[0]), abs(w[-1]), 1e-300)
    return bool(w[0] > tol * scale)


class Relation(enum.Enum):
    LEQ = "LEQ"
    GEQ = "GEQ"
    INCOMPARABLE = "INCOMPARABLE"
    EQUAL = "EQUAL"


@dataclass(frozen=True)
class OrderVerdict:
    """Classification of B - A by eigenvalue signs at a relative tolerance.

    ``witness_eigenvalue`` is the extreme eigenvalue of the difference that
    drove the verdict: the most negative one for INCOMPARABLE, the minimum for
    LEQ, the maximum for GEQ, the largest magnitude for EQUAL.
    """

    relation: Relation
    witness_eigenvalue: float
    tolerance: float

    @property
    def holds_leq(self) -> bool:
        return self.relation in (Relation.LEQ, Relation.EQUAL)

    @property
    def holds_geq(self) -> bool:
        return self.relation in (Relation.GEQ, Relation.EQUAL)


def loewner_compare(
    a: EinsteinTensor, b: EinsteinTensor, tol: float = PSD_TOL
) -> OrderVerdict:
    """Decide A <= B, A >= B, equality, or incomparability under the Loewner order."""
    if a.shape != b.shape:
        raise ShapeMismatchError("operands must share a shape")
    ma = _require_hermitian(a, DEFAULT_TOL)
    mb = _require_hermitian(b, DEFAULT_TOL)
    w = np.linalg.eigvalsh(mb - ma)
    scale = max(
        float(np.max(np.abs(np.linalg.eigvalsh(ma)))) if ma.size else 0.0,
        float(np.max(np.abs(np.linalg.eigvalsh(mb)))) if mb.size else 0.0,
        1e-300,
    )
    lo, hi = float(w[0]), float(w[-1])
    slack = tol * scale
    nonneg = lo >= -slack
    nonpos = hi <= slack
    if nonneg and nonpos:
        witness = lo if abs(lo) >= abs(hi) else hi
        return OrderVerdict(Relation.EQUAL, witness, tol)
    if nonneg:
        return OrderVerdict(Relation.LEQ, lo, tol)
    if nonpos:
        return OrderVerdict(Relation.GEQ, hi, tol)
    return OrderVerdict(Relation.INCOMPARABLE, lo, tol)
