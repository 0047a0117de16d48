"""Dense complex matrix utilities for small dimensions.

Everything here targets matrices of side at most a few thousand (single
copies of dimension <= 7 and their tensor squares), stored as complex128
ndarrays.  All functions return fresh arrays and never mutate inputs.

Vectorization follows the column-stacking convention throughout the
package:

    A = [[a, b],
         [c, d]]      vec(A) = (a, c, b, d)^T

so that vec(A X B) = (B^T kron A) vec(X).
"""

from __future__ import annotations

import numpy as np

from .errors import NotHermitianError

#: default tolerance for structural checks (hermiticity, reconstruction)
STRUCTURAL_TOL = 1e-10
#: default tolerance for optimization-grade comparisons
OPTIMIZATION_TOL = 1e-6

HERMITIAN_TOL = 1e-12


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor (Kronecker) product of two matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(*mats: np.ndarray) -> np.ndarray:
    """Tensor product of several factors, folded left to right.

    The left-to-right order is the canonical recomputation order: repeated
    calls with the same factors are bit-identical.
    """
    if not mats:
        raise ValueError("kron_all needs at least one factor")
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, vec(A)[i + rows*j] = A[i, j]."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for square (or explicitly sized) matrices."""
    v = np.asarray(v).reshape(-1)
    if rows is None:
        rows = int(round(np.sqrt(v.size)))
        if rows * rows != v.size:
            raise ValueError(f"cannot unvec length {v.size} into a square matrix")
    return v.reshape((rows, v.size // rows), order="F")


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest entrywise deviation from H = H^dagger."""
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def require_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``h`` as an array, raising :class:`NotHermitianError` if needed."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian: defect {defect:.3e} > tol {tol:.3e}")
    return h


def hermitian_eigensystem(h: np.ndarray, tol: float = HERMITIAN_TOL):
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v.conj().T`` and
    ``w[0] >= w[1] >= ...``; the columns of ``v`` are the eigenvectors.
    """
    h = require_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def is_psd(h: np.ndarray, tol: float = STRUCTURAL_TOL) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``h`` is >= -tol."""
    h = require_hermitian(h, max(tol, HERMITIAN_TOL))
    if h.shape[0] == 0:
        return True
    return bool(np.linalg.eigvalsh(h)[0] >= -tol)


def min_eigenvalue(h: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    h = require_hermitian(h, tol)
    return float(np.linalg.eigvalsh(h)[0])
