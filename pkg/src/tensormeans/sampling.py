"""Seeded, reproducible samplers for random positive definite tensors.

Each trial owns a counter-based Philox stream keyed by (master_seed,
trial_index), so trial i's draw never depends on execution order and a fixed
seed reproduces every sample bit-exactly under any degree of parallelism.

Conditioned pair sampling pins an extreme eigenvalue of X #_f Y to exactly 1
by joint rescaling, which leaves Z_0 = X^{-1/2} Y X^{-1/2} (and hence every
ratio-spectrum factor) unchanged and makes the side condition tight.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .tensor_core import EinsteinTensor, Shape, TensorError, as_shape, fold
from .spectral import eigen_decompose
from .connections import ConnectionFunction, perspective_mean
from ._backend import F64

__all__ = [
    "ENSEMBLES",
    "NORMALIZATIONS",
    "SamplerSpec",
    "SeedStream",
    "sample_pd",
    "sample_pair_conditioned",
    "sample_loewner_chain",
]

ENSEMBLES = ("wishart", "diag_uniform", "two_atom", "exp_diag")
NORMALIZATIONS = ("none", "mean_geq_identity", "mean_leq_identity")

DEFAULT_FLOOR = 0.05
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedStream:
    """Pure (master_seed, trial_index) -> random stream map."""

    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if self.trial_index < 0:
            raise TensorError("trial_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        key = (int(self.master_seed) & _MASK64) | (
            (int(self.trial_index) & _MASK64) << 64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, trial_index: int) -> "SeedStream":
        return SeedStream(self.master_seed, trial_index)


@dataclass(frozen=True)
class SamplerSpec:
    """Ensemble plus normalization mode for PD tensor draws.

    ``spectrum_floor`` shifts every draw by floor * I so the standing
    invertibility assumption holds; ``normalization`` other than "none"
    requires a connection name, since it references X #_f Y.
    """

    shape: Shape
    ensemble: str = "wishart"
    spectrum_floor: float = DEFAULT_FLOOR
    normalization: str = "none"
    connection: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "shape", as_shape(self.shape))
        if self.ensemble not in ENSEMBLES:
            raise TensorError(f"unknown ensemble {self.ensemble!r}; one of {ENSEMBLES}")
        if self.normalization not in NORMALIZATIONS:
            raise TensorError(
                f"unknown normalization {self.normalization!r}; one of {NORMALIZATIONS}"
            )
        if self.spectrum_floor < 0:
            raise TensorError("spectrum_floor must be >= 0")
        if self.normalization != "none" and not self.connection:
            raise TensorError("a conditioned sampler needs a connection name")


def _draw_unfold(spec: SamplerSpec, rng: np.random.Generator) -> np.ndarray:
    d = spec.shape.unfold_dim
    floor = spec.spectrum_floor
    if spec.ensemble == "wishart":
        g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
        w = g @ g.conj().T / d + floor * np.eye(d)
        return F64.herm(w)
    if spec.ensemble == "diag_uniform":
        diag = rng.uniform(max(floor, 1e-12), 1.0, size=d)
        return np.diag(diag.astype(np.complex128))
    if spec.ensemble == "two_atom":
        atoms = np.array([max(floor, 1e-3), 1.0])
        diag = atoms[rng.integers(0, 2, size=d)]
        return np.diag(diag.astype(np.complex128))
    if spec.ensemble == "exp_diag":
        diag = rng.exponential(1.0, size=d) + floor
        return np.diag(diag.astype(np.complex128))
    raise TensorError(f"unhandled ensemble {spec.ensemble!r}")


def sample_pd(spec: SamplerSpec, stream: SeedStream) -> EinsteinTensor:
    """One Hermitian PD draw; bit-identical for a fixed (seed, index)."""
    rng = stream.generator()
    return fold(_draw_unfold(spec, rng), spec.shape)


def sample_pair_conditioned(
    spec: SamplerSpec, f: ConnectionFunction, stream: SeedStream
) -> tuple[EinsteinTensor, EinsteinTensor]:
    """PD pair rescaled so X #_f Y touches the identity from the required side.

    geq mode divides both tensors by lambda_min(X #_f Y), leq mode by
    lambda_max; positive homogeneity of the mean makes the pinned eigenvalue
    exactly 1 up to roundoff.
    """
    if spec.normalization == "none":
        raise TensorError("sample_pair_conditioned needs a geq/leq normalization")
    rng = stream.generator()
    x = fold(_draw_unfold(spec, rng), spec.shape)
    y = fold(_draw_unfold(spec, rng), spec.shape)
    mean = perspective_mean(x, y, f).value
    w = eigen_decompose(mean).eigenvalues
    pin = w[-1] if spec.normalization == "mean_geq_identity" else w[0]
    if pin <= 0:
        raise TensorError("drawn mean is not positive definite")
    c = 1.0 / float(pin)
    return c * x, c * y


def sample_loewner_chain(
    spec: SamplerSpec, stream: SeedStream, increment_scale: float = 0.5
) -> tuple[EinsteinTensor, EinsteinTensor, EinsteinTensor]:
    """Triple X <= Y <= Z built from PSD increments of the same ensemble.

    Constructive increments avoid the vanishing acceptance rate a rejection
    sampler would face for Loewner chains.
    """
    rng = stream.generator()
    base = _draw_unfold(spec, rng)
    inc_spec = replace(spec, spectrum_floor=0.0)
    p1 = _draw_unfold(inc_spec, rng) * increment_scale
    p2 = _draw_unfold(inc_spec, rng) * increment_scale
    x = fold(base, spec.shape)
    y = fold(base + p1, spec.shape)
    z = fold(base + p1 + p2, spec.shape)
    return x, y, z


def sampler_from_callable(
    fn: Callable[[np.random.Generator], np.ndarray], shape: Shape
) -> Callable[[SeedStream], EinsteinTensor]:
    """Wrap an unfold-level draw function into a seeded tensor sampler."""

    def sample(stream: SeedStream) -> EinsteinTensor:
        return fold(fn(stream.generator()), shape)

    return sample
