"""Dense even-order complex tensors under the Einstein product.

A tensor of shape I1 x ... x IN x I1 x ... x IN acts as a linear operator on
order-N tensors; contracting the trailing N indices of one factor against the
leading N indices of the other is isomorphic to matrix multiplication of the
D x D unfoldings, D = prod(Ij).  The unfolding fixes a row-major linearization
over (i1..iN) then (j1..jN); every operation here commutes with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Shape",
    "EinsteinTensor",
    "TensorError",
    "ShapeMismatchError",
    "SingularTensorError",
    "identity",
    "zero",
    "from_unfold",
    "from_diagonal",
    "einstein_product",
    "conjugate_transpose",
    "trace",
    "inner_product",
    "unfold",
    "fold",
    "inverse",
    "is_hermitian",
    "is_unitary",
    "frobenius_norm",
    "allclose",
]

DEFAULT_TOL = 1e-10


class TensorError(ValueError):
    """Base class for tensor algebra errors."""


class ShapeMismatchError(TensorError):
    """Operands do not share the operator shape required by the operation."""


class SingularTensorError(TensorError):
    """Inversion of a numerically singular tensor was requested."""

    def __init__(self, message: str, smallest_singular_value: float):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


@dataclass(frozen=True)
class Shape:
    """Mode sizes I1..IN of a square operator tensor."""

    modes: tuple[int, ...]

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if len(modes) < 1:
            raise TensorError("shape needs at least one mode")
        if any(m < 1 for m in modes):
            raise TensorError(f"modes must be positive, got {modes}")
        object.__setattr__(self, "modes", modes)

    @property
    def order(self) -> int:
        return len(self.modes)

    @property
    def unfold_dim(self) -> int:
        d = 1
        for m in self.modes:
            d *= m
        return d

    @property
    def full_shape(self) -> tuple[int, ...]:
        return self.modes + self.modes


def as_shape(shape: Shape | Sequence[int]) -> Shape:
    if isinstance(shape, Shape):
        return shape
    return Shape(tuple(shape))


class EinsteinTensor:
    """Immutable dense tensor over I1 x .. x IN x I1 x .. x IN.

    Entries are stored as a complex128 array with axes ordered
    (i1..iN, j1..jN); ``unfold`` is a plain row-major reshape to D x D.
    """

    __slots__ = ("shape", "_data")

    def __init__(self, shape: Shape | Sequence[int], data: np.ndarray):
        shape = as_shape(shape)
        arr = np.asarray(data, dtype=np.complex128)
        if arr.shape != shape.full_shape:
            raise ShapeMismatchError(
                f"data has shape {arr.shape}, expected {shape.full_shape}"
            )
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise TensorError("tensor entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "_data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("EinsteinTensor is immutable")

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the entries, axes (i1..iN, j1..jN)."""
        return self._data

    @property
    def unfold_dim(self) -> int:
        return self.shape.unfold_dim

    def __add__(self, other: "EinsteinTensor") -> "EinsteinTensor":
        _require_same_shape(self, other)
        return EinsteinTensor(self.shape, self._data + other._data)

    def __sub__(self, other: "EinsteinTensor") -> "EinsteinTensor":
        _require_same_shape(self, other)
        return EinsteinTensor(self.shape, self._data - other._data)

    def __mul__(self, scalar) -> "EinsteinTensor":
        return EinsteinTensor(self.shape, self._data * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "EinsteinTensor":
        return EinsteinTensor(self.shape, self._data / complex(scalar))

    def __neg__(self) -> "EinsteinTensor":
        return EinsteinTensor(self.shape, -self._data)

    def __matmul__(self, other: "EinsteinTensor") -> "EinsteinTensor":
        return einstein_product(self, other)

    def __repr__(self) -> str:
        return f"EinsteinTensor(modes={self.shape.modes}, D={self.unfold_dim})"


def _require_same_shape(x: EinsteinTensor, y: EinsteinTensor) -> None:
    if x.shape != y.shape:
        raise ShapeMismatchError(
            f"incompatible operands: modes {x.shape.modes} vs {y.shape.modes}"
        )


def identity(shape: Shape | Sequence[int]) -> EinsteinTensor:
    """Identity tensor: entry (i1..iN, j1..jN) = prod_k delta(ik, jk)."""
    shape = as_shape(shape)
    d = shape.unfold_dim
    return EinsteinTensor(shape, np.eye(d, dtype=np.complex128).reshape(shape.full_shape))


def zero(shape: Shape | Sequence[int]) -> EinsteinTensor:
    shape = as_shape(shape)
    return EinsteinTensor(shape, np.zeros(shape.full_shape, dtype=np.complex128))


def from_unfold(matrix: np.ndarray, shape: Shape | Sequence[int]) -> EinsteinTensor:
    """Alias of :func:`fold` for readability at call sites."""
    return fold(matrix, shape)


def from_diagonal(values: Iterable[complex], shape: Shape | Sequence[int]) -> EinsteinTensor:
    """Tensor whose unfolding is diag(values)."""
    shape = as_shape(shape)
    vals = np.asarray(list(values), dtype=np.complex128)
    if vals.shape != (shape.unfold_dim,):
        raise ShapeMismatchError(
            f"need {shape.unfold_dim} diagonal values, got {vals.shape}"
        )
    return fold(np.diag(vals), shape)


def unfold(x: EinsteinTensor) -> np.ndarray:
    """Row-major D x D unfolding; an algebra isomorphism onto matrices."""
    d = x.unfold_dim
    return x.data.reshape(d, d).copy()


def fold(matrix: np.ndarray, shape: Shape | Sequence[int]) -> EinsteinTensor:
    """Inverse of :func:`unfold`; exact bijection."""
    shape = as_shape(shape)
    d = shape.unfold_dim
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.shape != (d, d):
        raise ShapeMismatchError(f"matrix has shape {arr.shape}, expected ({d}, {d})")
    return EinsteinTensor(shape, arr.reshape(shape.full_shape))


def einstein_product(x: EinsteinTensor, y: EinsteinTensor) -> EinsteinTensor:
    """Contraction of x's trailing N indices against y's leading N indices."""
    _require_same_shape(x, y)
    n = x.shape.order
    d = x.unfold_dim
    prod = x.data.reshape(d, d) @ y.data.reshape(d, d)
    return EinsteinTensor(x.shape, prod.reshape(x.shape.full_shape))


def conjugate_transpose(x: EinsteinTensor) -> EinsteinTensor:
    """Swap the two index groups and conjugate: (X^H)_{j,i} = conj(x_{i,j})."""
    d = x.unfold_dim
    return fold(x.data.reshape(d, d).conj().T, x.shape)


def trace(x: EinsteinTensor) -> complex:
    """Sum of diagonal entries over matching multi-indices."""
    d = x.unfold_dim
    return complex(np.trace(x.data.reshape(d, d)))


def inner_product(x: EinsteinTensor, y: EinsteinTensor) -> complex:
    """<X, Y> = Tr(X^H * Y)."""
    _require_same_shape(x, y)
    d = x.unfold_dim
    return complex(np.vdot(x.data.reshape(d, d), y.data.reshape(d, d)))


def frobenius_norm(x: EinsteinTensor) -> float:
    return float(np.linalg.norm(x.data))


def inverse(x: EinsteinTensor, tol: float = DEFAULT_TOL) -> EinsteinTensor:
    """Two-sided inverse under the Einstein product.

    Raises
    ------
    SingularTensorError
        When the smallest singular value falls below ``tol`` times the
        largest, carrying that value for diagnosis.
    """
    d = x.unfold_dim
    m = x.data.reshape(d, d)
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] <= tol * svals[0]:
        raise SingularTensorError(
            f"tensor is numerically singular (smallest singular value "
            f"{svals[-1]:.3e}, largest {svals[0]:.3e})",
            smallest_singular_value=float(svals[-1]),
        )
    return fold(np.linalg.inv(m), x.shape)


def is_hermitian(x: EinsteinTensor, tol: float = DEFAULT_TOL) -> bool:
    """True when ||X - X^H||_F <= tol * ||X||_F (zero tensor counts)."""
    d = x.unfold_dim
    m = x.data.reshape(d, d)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return True
    return bool(np.linalg.norm(m - m.conj().T) <= tol * norm)


def is_unitary(x: EinsteinTensor, tol: float = DEFAULT_TOL) -> bool:
    """True when ||X^H * X - I||_F <= tol * D."""
    d = x.unfold_dim
    m = x.data.reshape(d, d)
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(d)) <= tol * d)


def allclose(x: EinsteinTensor, y: EinsteinTensor, tol: float = DEFAULT_TOL) -> bool:
    """Relative Frobenius comparison at ``tol`` (absolute for tiny operands)."""
    _require_same_shape(x, y)
    scale = max(frobenius_norm(x), frobenius_norm(y), 1.0)
    return frobenius_norm(x - y) <= tol * scale
