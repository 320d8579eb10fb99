"""Connection functions and the operator perspective mean.

A connection function is a positive scalar map on (0, inf); it parameterizes
the two-argument mean

    X #_f Y = X^{1/2} f(X^{-1/2} Y X^{-1/2}) X^{1/2}

with the first argument carrying the outer square roots.  Functions are
declared with monotonicity-class metadata (TMI / TMD / TC); the numeric
classifiers below spot-check those declarations but never enforce them.

Connection callables must be written with plain arithmetic operators so they
evaluate on numpy arrays and on mpmath scalars alike; the high-precision
re-check path depends on this.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .tensor_core import EinsteinTensor, TensorError, fold, unfold
from .spectral import SpectrumDomainError
from ._backend import F64

__all__ = [
    "ConnectionFunction",
    "MeanResult",
    "PowerMonotonicity",
    "power_connection",
    "arithmetic",
    "harmonic",
    "reciprocal_power",
    "square_connection",
    "get_connection",
    "register_connection",
    "registry_names",
    "perspective_mean",
    "adjoint_function",
    "transform_swap",
    "classify_power_monotonicity",
    "is_geodesically_convex",
]

TMI = "TMI"
TMD = "TMD"
TC = "TC"

DEFAULT_X_GRID = (0.1, 0.5, 1.0, 2.0, 4.0, 10.0)
DEFAULT_Q_GRID = (1.0, 1.5, 2.0, 3.0)
_CLASSIFY_RTOL = 1e-12


@dataclass(frozen=True)
class ConnectionFunction:
    """A positive scalar map with class metadata.

    ``fn`` receives either a numpy array of positive reals or a single mpmath
    scalar and must stay positive on (0, inf); ``normalized`` asserts f(1)=1.
    """

    name: str
    fn: Callable
    classes: frozenset = frozenset()
    normalized: bool = True
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "classes", frozenset(self.classes))
        object.__setattr__(self, "params", dict(self.params))
        if self.normalized:
            one = float(self.fn(np.asarray([1.0]))[0])
            if abs(one - 1.0) > 1e-12:
                raise TensorError(f"{self.name}: declared normalized but f(1)={one!r}")

    def __call__(self, x):
        return self.fn(x)

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class MeanResult:
    """Perspective mean value plus the identities of its inputs."""

    value: EinsteinTensor
    connection: str
    left_label: str = "X"
    right_label: str = "Y"


def power_connection(alpha: float) -> ConnectionFunction:
    """f(x) = x^alpha; the exact pmi/pmd boundary, TMI for alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise TensorError(f"power connection needs alpha in (0,1], got {alpha}")
    a = float(alpha)
    return ConnectionFunction(
        name="power", fn=lambda x, _a=a: x**_a, classes={TMI}, params={"alpha": a}
    )


def arithmetic() -> ConnectionFunction:
    return ConnectionFunction(name="arithmetic", fn=lambda x: (1 + x) / 2, classes={TMI})


def harmonic() -> ConnectionFunction:
    return ConnectionFunction(name="harmonic", fn=lambda x: 2 * x / (1 + x), classes={TMI})


def reciprocal_power(alpha: float) -> ConnectionFunction:
    """f(x) = x^(-alpha), TMD (and convex) for alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise TensorError(f"reciprocal power needs alpha in (0,1], got {alpha}")
    a = float(alpha)
    return ConnectionFunction(
        name="reciprocal_power",
        fn=lambda x, _a=a: x ** (-_a),
        classes={TMD, TC},
        params={"alpha": a},
    )


def square_connection() -> ConnectionFunction:
    """f(x) = x^2; convex with f(1)=1, the registry's TC sample."""
    return ConnectionFunction(name="square", fn=lambda x: x * x, classes={TC})


_BUILTINS: dict[str, Callable[..., ConnectionFunction]] = {
    "power": power_connection,
    "arithmetic": lambda: arithmetic(),
    "harmonic": lambda: harmonic(),
    "reciprocal_power": reciprocal_power,
    "square": lambda: square_connection(),
}
_CUSTOM: dict[str, ConnectionFunction] = {}


def register_connection(conn: ConnectionFunction) -> None:
    """Add a user-defined connection to the lookup table."""
    _CUSTOM[conn.name] = conn


def registry_names() -> tuple[str, ...]:
    return tuple(sorted(set(_BUILTINS) | set(_CUSTOM)))


def get_connection(name: str, **params) -> ConnectionFunction:
    if name in _CUSTOM and not params:
        return _CUSTOM[name]
    if name not in _BUILTINS:
        raise TensorError(
            f"unknown connection {name!r}; registered: {registry_names()}"
        )
    return _BUILTINS[name](**params)


def perspective_mean(
    x: EinsteinTensor, y: EinsteinTensor, f: ConnectionFunction
) -> MeanResult:
    """X #_f Y for positive definite X, Y of one shape.

    The scalar case D=1 reduces to x*f(y/x); a normalized f gives
    X #_f X = X.
    """
    if x.shape != y.shape:
        raise TensorError("mean needs operands of one shape")
    mx = unfold(x)
    my = unfold(y)
    value = mean_unfolds(mx, my, f)
    return MeanResult(value=fold(value, x.shape), connection=f.label())


def mean_unfolds(mx: np.ndarray, my: np.ndarray, f: ConnectionFunction) -> np.ndarray:
    """Array-level perspective mean on D x D unfoldings (PD inputs)."""
    wx, vx = F64.eigh(mx)
    if wx[0] <= 0:
        raise SpectrumDomainError(
            f"first mean argument is not positive definite (eigenvalue {wx[0]:.3e})",
            float(wx[0]),
        )
    wy = np.linalg.eigvalsh(F64.herm(my))
    if wy[0] <= 0:
        raise SpectrumDomainError(
            f"second mean argument is not positive definite (eigenvalue {wy[0]:.3e})",
            float(wy[0]),
        )
    xh = F64.funcm_from(wx, vx, lambda t: t**0.5)
    xmh = F64.funcm_from(wx, vx, lambda t: t**-0.5)
    inner = F64.herm(xmh @ my @ xmh)
    return F64.herm(xh @ F64.funcm(inner, f.fn) @ xh)


def adjoint_function(f: ConnectionFunction) -> ConnectionFunction:
    """f*(x) = 1 / f(1/x); satisfies X^-1 #_{f*} Y^-1 = (X #_f Y)^-1.

    The adjoint preserves TMI and TMD membership; convexity is not preserved
    in general, so TC is dropped from the metadata.
    """
    kept = f.classes & {TMI, TMD}
    return ConnectionFunction(
        name=f"{f.name}_adjoint",
        fn=lambda x, _f=f.fn: 1 / _f(1 / x),
        classes=kept,
        normalized=f.normalized,
        params=dict(f.params),
    )


def transform_swap(g: ConnectionFunction) -> ConnectionFunction:
    """h(x) = x * g(1/x), the transpose connection with X #_g Y = Y #_h X.

    Convexity survives the transpose (h'' = g''(1/x) / x^3), monotonicity in
    general does not; only TC is carried over.
    """
    kept = g.classes & {TC}
    return ConnectionFunction(
        name=f"{g.name}_swap",
        fn=lambda x, _g=g.fn: x * _g(1 / x),
        classes=kept,
        normalized=g.normalized,
        params=dict(g.params),
    )


def reciprocal_function(h: ConnectionFunction) -> ConnectionFunction:
    """k(x) = 1 / h(x); operator monotone increasing whenever h is TMD."""
    kept = frozenset({TMI}) if TMD in h.classes else frozenset()
    return ConnectionFunction(
        name=f"{h.name}_reciprocal",
        fn=lambda x, _h=h.fn: 1 / _h(x),
        classes=kept,
        normalized=h.normalized,
        params=dict(h.params),
    )


class PowerMonotonicity(enum.Enum):
    PMI = "PMI"
    PMD = "PMD"
    BOTH = "BOTH"
    NEITHER = "NEITHER"


def classify_power_monotonicity(
    f: ConnectionFunction,
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID,
    x_grid: tuple[float, ...] = DEFAULT_X_GRID,
) -> PowerMonotonicity:
    """Grid test of f(x)^q vs f(x^q) for q >= 1.

    PMI when f(x)^q <= f(x^q) everywhere on the grid (up to 1e-12 relative),
    PMD for the reverse, BOTH when equality holds throughout.
    """
    xs = np.asarray(x_grid, dtype=np.float64)
    if np.any(xs <= 0):
        raise TensorError("x grid must be positive")
    if any(q < 1 for q in q_grid):
        raise TensorError("q grid must lie in [1, inf)")
    pmi = pmd = True
    for q in q_grid:
        fq = np.asarray(f(xs**q), dtype=np.float64)
        qf = np.asarray(f(xs), dtype=np.float64) ** q
        pmi &= bool(np.all(qf <= fq * (1 + _CLASSIFY_RTOL) + _CLASSIFY_RTOL))
        pmd &= bool(np.all(fq <= qf * (1 + _CLASSIFY_RTOL) + _CLASSIFY_RTOL))
    if pmi and pmd:
        return PowerMonotonicity.BOTH
    if pmi:
        return PowerMonotonicity.PMI
    if pmd:
        return PowerMonotonicity.PMD
    return PowerMonotonicity.NEITHER


def is_geodesically_convex(
    f: ConnectionFunction, grid: np.ndarray | None = None, tol: float = 1e-10
) -> bool:
    """True when x -> log f(e^x) has nonnegative second central differences."""
    if grid is None:
        grid = np.linspace(-4.0, 4.0, 81)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 3:
        raise TensorError("convexity grid needs at least 3 points")
    grid = np.sort(grid)
    vals = np.log(np.asarray(f(np.exp(grid)), dtype=np.float64))
    second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    return bool(np.all(second >= -tol))


def scalar_mean(x: float, y: float, f: ConnectionFunction) -> float:
    """Closed-form scalar reduction x * f(y/x); oracle for the D=1 case."""
    if x <= 0 or y <= 0:
        raise TensorError("scalar mean needs positive inputs")
    return float(x * float(f(np.asarray([y / x]))[0]))
