"""Interchangeable numeric kernels for per-sample order checks.

The deterministic theorem checks multiply tensors whose condition numbers grow
like (cond X * cond Y)^q; at q around 6 that exceeds what float64 eigensolvers
can certify.  Checkers therefore run every sample through ``F64`` first and
re-run suspicious ones through an ``MPBackend`` built on mpmath, which is exact
ground truth for the float64 sample entries.

Both backends expose the same handful of primitives on D x D Hermitian
matrices; connection functions must be written with plain arithmetic
(``(1 + t) / 2``, ``t ** 0.5``) so one callable serves numpy arrays and mpmath
scalars alike.
"""

from __future__ import annotations

import numpy as np
from mpmath import mp, mpf
from mpmath import matrix as mp_matrix
from mpmath.calculus.optimization import findroot  # noqa: F401  (keeps mpmath eager)
from mpmath import eighe

__all__ = ["F64", "Float64Backend", "MPBackend", "spectral_danger"]

_EIG_CLIP = 1e-300


class Float64Backend:
    """numpy/LAPACK kernels; fast path."""

    name = "float64"

    @staticmethod
    def precision():
        """No-op context; float64 has no adjustable working precision."""
        import contextlib

        return contextlib.nullcontext()

    @staticmethod
    def to_native(a: np.ndarray):
        return np.asarray(a, dtype=np.complex128)

    @staticmethod
    def herm(a):
        return (a + a.conj().T) / 2.0

    @staticmethod
    def matmul(*ms):
        out = ms[0]
        for m in ms[1:]:
            out = out @ m
        return out

    @staticmethod
    def eigvals(a):
        """Ascending real eigenvalues of a Hermitian matrix (list of float)."""
        return [float(v) for v in np.linalg.eigvalsh(Float64Backend.herm(a))]

    @staticmethod
    def eigh(a):
        w, v = np.linalg.eigh(Float64Backend.herm(a))
        return [float(x) for x in w], v

    @staticmethod
    def funcm_from(w, v, fn):
        vals = np.array([float(fn(max(x, _EIG_CLIP))) for x in w])
        return (v * vals) @ v.conj().T

    @classmethod
    def funcm(cls, a, fn):
        w, v = cls.eigh(a)
        return cls.funcm_from(w, v, fn)

    @classmethod
    def powm(cls, a, q):
        return cls.funcm(a, lambda t: t ** float(q))

    @staticmethod
    def eye(d):
        return np.eye(d, dtype=np.complex128)

    @staticmethod
    def scale(c, a):
        return float(c) * a

    @staticmethod
    def real(x):
        return float(x)


class MPBackend:
    """mpmath kernels at a configurable working precision.

    Callers must run the whole per-sample computation inside
    ``backend.precision()``: mpmath matrix products execute at the ambient
    precision, so leaving the context would silently degrade the heavy
    multiplications to the global default.
    """

    name = "mpmath"

    def __init__(self, dps: int = 40):
        self.dps = int(dps)

    def precision(self):
        return mp.workdps(self.dps)

    def to_native(self, a: np.ndarray):
        a = np.asarray(a, dtype=np.complex128)
        d = a.shape[0]
        m = mp_matrix(d, d)
        with mp.workdps(self.dps):
            for i in range(d):
                for j in range(d):
                    m[i, j] = mp.mpc(float(a[i, j].real), float(a[i, j].imag))
        return m

    @staticmethod
    def herm(a):
        d = a.rows
        out = mp_matrix(d, d)
        for i in range(d):
            for j in range(d):
                out[i, j] = (a[i, j] + (a[j, i]).conjugate()) / 2
        return out

    @staticmethod
    def matmul(*ms):
        out = ms[0]
        for m in ms[1:]:
            out = out * m
        return out

    def eigvals(self, a):
        with mp.workdps(self.dps):
            w = eighe(self.herm(a), eigvals_only=True)
            return sorted(float(x) for x in w)

    def eigh(self, a):
        with mp.workdps(self.dps):
            w, v = eighe(self.herm(a))
            return list(w), v

    def funcm_from(self, w, v, fn):
        with mp.workdps(self.dps):
            d = len(w)
            diag = mp_matrix(d, d)
            for i in range(d):
                x = w[i]
                if x < mpf(_EIG_CLIP):
                    x = mpf(_EIG_CLIP)
                diag[i, i] = fn(x)
            return v * diag * v.H

    def funcm(self, a, fn):
        w, v = self.eigh(a)
        return self.funcm_from(w, v, fn)

    def powm(self, a, q):
        qq = mpf(float(q))
        return self.funcm(a, lambda t: t ** qq)

    @staticmethod
    def eye(d):
        out = mp_matrix(d, d)
        for i in range(d):
            out[i, i] = mpf(1)
        return out

    def scale(self, c, a):
        with mp.workdps(self.dps):
            return a * mpf(float(c)) if not hasattr(c, "_mpf_") else a * c

    @staticmethod
    def real(x):
        return float(x)


F64 = Float64Backend()


def spectral_danger(cond_x: float, cond_y: float, q: float, d: int) -> float:
    """Crude bound on the relative eigenvalue error float64 can commit.

    The checks form products whose spectra span (cond X * cond Y)^max(q,1);
    the returned value scales machine epsilon by that factor, the dimension,
    and a generous headroom for error growth across the chained products.
    Margins closer to zero than this cannot be trusted in float64.
    """
    kappa = (max(cond_x, 1.0) * max(cond_y, 1.0)) ** max(float(q), 1.0)
    return 2.3e-16 * kappa * max(d, 1) ** 2 * 512.0
