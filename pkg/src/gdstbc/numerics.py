"""Small dense complex-matrix kernel shared by every other module.

Two arithmetic paths live here.  Floating work (codeword evaluation,
determinants, singular values, decoder metrics) runs on complex128
ndarrays through the thin wrappers below.  Algebraic identities that must
hold with zero tolerance (the cross-group anticommutation check on weight
matrices) go through :class:`GxMat`, which stores real and imaginary
parts as int64 arrays so that products and Hermitian transposes never
round.

Everything here is sized for matrices up to 64x64; none of it aims to be
a general BLAS replacement.  No function mutates its inputs.
"""

from __future__ import annotations

import numpy as np

# Absolute tolerance for algebra whose exact value is representable
# (entries built from 0, +-1, +-i and short products of those).
EXACT_ATOL = 1e-12
# Absolute tolerance for everything else.
FLOAT_ATOL = 1e-9
# Relative threshold of the full-rank decision rule.
RANK_RTOL = 1e-9


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array (copies only when needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def herm(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_cmatrix(a).conj().T


def fro_norm_sq(a) -> float:
    """Squared Frobenius norm, i.e. the sum of squared entry magnitudes."""
    a = np.asarray(a, dtype=np.complex128)
    return float(np.vdot(a, a).real)


def det(a) -> complex:
    """Determinant of a square matrix (partially pivoted elimination)."""
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got {a.shape}")
    return complex(np.linalg.det(a))


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(as_cmatrix(a), compute_uv=False)


def min_singular_value(a) -> float:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    return float(singular_values(a)[-1])


def is_full_rank(a, rtol: float = RANK_RTOL) -> bool:
    """Full-rank rule: smallest singular value > rtol * max(1, largest).

    Matrices fed through this are either exactly singular or well
    conditioned at the scales this package works at, so a single relative
    threshold is enough.
    """
    s = singular_values(a)
    return bool(s[-1] > rtol * max(1.0, float(s[0])))


class GxMat:
    """Matrix over the Gaussian integers, stored as int64 re/im parts.

    Addition, multiplication and Hermitian transposition are closed and
    exact, which is what the weight-matrix verification needs.  Entries
    stay tiny (products of 0, +-1, +-i summed over at most 64 terms), so
    int64 overflow is not a concern.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        re = np.asarray(re, dtype=np.int64)
        im = np.asarray(im, dtype=np.int64)
        if re.shape != im.shape or re.ndim != 2:
            raise ValueError("re and im must be 2-D arrays of the same shape")
        self.re = re
        self.im = im

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GxMat":
        return cls(np.zeros((rows, cols), np.int64), np.zeros((rows, cols), np.int64))

    @classmethod
    def from_complex(cls, a) -> "GxMat":
        """Exact conversion; rejects anything that is not Gaussian-integer valued."""
        a = np.asarray(a, dtype=np.complex128)
        re = np.round(a.real).astype(np.int64)
        im = np.round(a.imag).astype(np.int64)
        if not (np.array_equal(re, a.real) and np.array_equal(im, a.imag)):
            raise ValueError("matrix entries are not Gaussian integers")
        return cls(re, im)

    @property
    def shape(self):
        return self.re.shape

    def to_complex(self) -> np.ndarray:
        return self.re.astype(np.complex128) + 1j * self.im.astype(np.complex128)

    def herm(self) -> "GxMat":
        return GxMat(self.re.T.copy(), -self.im.T.copy())

    def __matmul__(self, other: "GxMat") -> "GxMat":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        re = self.re @ other.re - self.im @ other.im
        im = self.re @ other.im + self.im @ other.re
        return GxMat(re, im)

    def __add__(self, other: "GxMat") -> "GxMat":
        return GxMat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GxMat") -> "GxMat":
        return GxMat(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GxMat":
        return GxMat(-self.re, -self.im)

    def is_zero(self) -> bool:
        return not (self.re.any() or self.im.any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GxMat):
            return NotImplemented
        return np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im)

    def __hash__(self):
        return hash((self.re.tobytes(), self.im.tobytes(), self.shape))

    def __repr__(self):
        return f"GxMat({self.to_complex()!r})"


def anticommutator(a: GxMat, b: GxMat) -> GxMat:
    """a^H b + b^H a, evaluated exactly."""
    return a.herm() @ b + b.herm() @ a
