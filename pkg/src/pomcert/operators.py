"""Dense complex-matrix substrate.

Functions accept anything :func:`numpy.asarray` understands, including the
certified wrappers defined here (they implement ``__array__``).  Residuals
are always max-entry norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EigenFailure, ResidualExceeded, StructuralError

#: Hermiticity / dichotomy certification tolerance.
STRUCTURAL_TOL = 1e-9
#: Eigenvalues within this distance of +-1 are classified as +-1.
EIGEN_CLASS_TOL = 1e-6

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite, square complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise StructuralError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise StructuralError("matrix has non-finite entries")
    return a


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray = field(repr=False)
    hermiticity_residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class DichotomicObservable(HermitianOperator):
    squared_identity_residual: float = 0.0
    trace_magnitude: float = 0.0


def hermitian_residual(m) -> float:
    a = np.asarray(m)
    return max_abs(a - a.conj().T)


def hermitian_from_matrix(m, tol: float = STRUCTURAL_TOL) -> HermitianOperator:
    """Certify ``m`` as Hermitian; raise :class:`ResidualExceeded` otherwise."""
    a = as_matrix(m)
    res = hermitian_residual(a)
    if res > tol:
        raise ResidualExceeded("hermiticity", res, tol)
    a = a.copy()
    a.flags.writeable = False
    return HermitianOperator(a, res)


def dichotomic_from_matrix(m, tol: float = STRUCTURAL_TOL) -> DichotomicObservable:
    """Certify ``m`` as a traceless Hermitian involution."""
    h = hermitian_from_matrix(m, tol)
    a = h.matrix
    sq = max_abs(a @ a - np.eye(h.dim))
    if sq > tol:
        raise ResidualExceeded("dichotomy (B^2 = 1)", sq, tol)
    tr = abs(np.trace(a))
    if tr > tol:
        raise ResidualExceeded("tracelessness", tr, tol)
    return DichotomicObservable(a, h.hermiticity_residual, sq, tr)


def anticommutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"anticommutator of shapes {a.shape} and {b.shape}")
    return a @ b + b @ a


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and column eigenvectors of a Hermitian matrix.

    The input is symmetrised before ``eigh`` so that sub-tolerance
    non-Hermitian noise cannot leak into the spectrum.
    """
    a = as_matrix(a)
    a = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return w, v


def operator_norm(a) -> float:
    """Spectral radius of a Hermitian operator."""
    w, _ = eig_hermitian(a)
    return float(max(abs(w[0]), abs(w[-1])))


def tensor(*ms) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, np.asarray(m))
    return out


def is_unitary(u, tol: float = STRUCTURAL_TOL) -> tuple[bool, float]:
    u = as_matrix(u)
    res = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    return res <= tol, res


def conjugate(u, a) -> np.ndarray:
    """``U A U^dagger``."""
    u = np.asarray(u)
    return u @ np.asarray(a) @ u.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary: QR of a complex Ginibre matrix with phase-fixed R diagonal."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)
