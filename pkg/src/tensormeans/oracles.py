"""Brute-force cross-checks, independent of the library's fast paths.

Each oracle recomputes a target quantity through the most naive route
available (nested index loops, scalar formulas, direct cyclic evaluation) so
tests can diff the optimized implementations against something that cannot
share their bugs.
"""

from __future__ import annotations

import itertools

import numpy as np

from .tensor_core import EinsteinTensor, Shape, as_shape
from .connections import ConnectionFunction

__all__ = [
    "naive_einstein_product",
    "naive_trace",
    "naive_inner_product",
    "naive_conjugate_transpose",
    "scalar_mean_formula",
    "diagonal_ratio_extremes",
    "rayleigh_quotient_max",
]


def naive_einstein_product(x: EinsteinTensor, y: EinsteinTensor) -> np.ndarray:
    """Entrywise nested-loop contraction; returns the raw entry array."""
    modes = x.shape.modes
    out = np.zeros(x.shape.full_shape, dtype=np.complex128)
    ranges = [range(m) for m in modes]
    for i_idx in itertools.product(*ranges):
        for k_idx in itertools.product(*ranges):
            acc = 0j
            for j_idx in itertools.product(*ranges):
                acc += x.data[i_idx + j_idx] * y.data[j_idx + k_idx]
            out[i_idx + k_idx] = acc
    return out


def naive_trace(x: EinsteinTensor) -> complex:
    modes = x.shape.modes
    acc = 0j
    for idx in itertools.product(*[range(m) for m in modes]):
        acc += x.data[idx + idx]
    return complex(acc)


def naive_inner_product(x: EinsteinTensor, y: EinsteinTensor) -> complex:
    modes = x.shape.modes
    ranges = [range(m) for m in modes]
    acc = 0j
    for i_idx in itertools.product(*ranges):
        for j_idx in itertools.product(*ranges):
            acc += np.conj(x.data[i_idx + j_idx]) * y.data[i_idx + j_idx]
    return complex(acc)


def naive_conjugate_transpose(x: EinsteinTensor) -> np.ndarray:
    modes = x.shape.modes
    out = np.zeros(x.shape.full_shape, dtype=np.complex128)
    ranges = [range(m) for m in modes]
    for i_idx in itertools.product(*ranges):
        for j_idx in itertools.product(*ranges):
            out[j_idx + i_idx] = np.conj(x.data[i_idx + j_idx])
    return out


def scalar_mean_formula(x: float, y: float, f: ConnectionFunction) -> float:
    """x * f(y / x), the closed-form D = 1 mean."""
    return float(x) * float(f(np.asarray([y / x]))[0])


def diagonal_ratio_extremes(
    f: ConnectionFunction, q: float, diagonal: list[float]
) -> tuple[float, float]:
    """Ratio extremes over an explicitly diagonal spectrum, scalar by scalar."""
    vals = []
    for lam in diagonal:
        num = float(f(np.asarray([lam**q]))[0])
        den = float(f(np.asarray([lam]))[0]) ** q
        vals.append(num / den)
    return min(vals), max(vals)


def rayleigh_quotient_max(
    h: EinsteinTensor, n_directions: int, seed: int
) -> float:
    """Sampled maximum of the Rayleigh quotient; never exceeds lambda_max."""
    d = h.unfold_dim
    m = h.data.reshape(d, d)
    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(n_directions):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        best = max(best, float((v.conj() @ m @ v).real))
    return best
