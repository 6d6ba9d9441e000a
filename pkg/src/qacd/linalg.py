"""Dense complex matrix kernel.

Everything downstream works on plain ``numpy`` arrays; this module only adds
the handful of operations the distance formulas need, with the size and
Hermiticity checks done in one place.
"""
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import DomainError, ShapeError, SizeError

HERMITIAN_TOL = 1e-10
MAX_AXIS = 2 ** 16


class HermEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def kron(A, B, max_axis: int = MAX_AXIS) -> np.ndarray:
    """Kronecker product ``A (x) B`` with row index ``i*rB + k``."""
    A = as_matrix(A)
    B = as_matrix(B)
    rows = A.shape[0] * B.shape[0]
    cols = A.shape[1] * B.shape[1]
    if rows > max_axis or cols > max_axis:
        raise SizeError(f"kron result {rows}x{cols} exceeds cap {max_axis} per axis")
    return np.kron(A, B)


def kron_all(mats: Sequence, max_axis: int = MAX_AXIS) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = kron(out, m, max_axis=max_axis)
    return out


def partial_trace(A, local_dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    ``local_dims`` gives the factor dimensions in kron order.  The kept
    factors stay in their original relative order.
    """
    A = as_matrix(A)
    dims = [int(d) for d in local_dims]
    if any(d < 1 for d in dims):
        raise ShapeError("local dimensions must be positive")
    total = int(np.prod(dims))
    if A.shape != (total, total):
        raise ShapeError(f"matrix shape {A.shape} does not match local dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ShapeError(f"keep indices {keep} out of range for {len(dims)} factors")

    n = len(dims)
    T = A.reshape(dims + dims)
    # einsum labels: row factors 0..n-1, column factors n..2n-1; traced
    # factors share the row label.
    row = list(range(n))
    col = [k if k not in keep else n + k for k in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    R = np.einsum(T, row + col, out)
    kd = int(np.prod([dims[k] for k in keep])) if keep else 1
    return R.reshape(kd, kd)


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^dagger B)``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def hs_norm(A) -> float:
    A = np.asarray(A, dtype=complex)
    return float(np.sqrt(np.sum(A.real ** 2 + A.imag ** 2)))


def hermitize(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(A + A^dagger)/2`` after checking ``A`` is Hermitian within ``tol``."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got {A.shape}")
    dev = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if dev > tol:
        raise DomainError(f"matrix is not Hermitian (max |A - A^dagger| = {dev:.3g})")
    return 0.5 * (A + A.conj().T)


def herm_eig(A, tol: float = HERMITIAN_TOL) -> HermEig:
    w, v = np.linalg.eigh(hermitize(A, tol))
    return HermEig(w, v)


def herm_eigvals(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(A, tol))


def trace_norm_herm(A, tol: float = HERMITIAN_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    A = as_matrix(A)
    if not np.any(A):
        return 0.0
    return float(np.sum(np.abs(herm_eigvals(A, tol))))


def op_norm_inf(A, tol: float = HERMITIAN_TOL) -> float:
    """Largest eigenvalue magnitude of a Hermitian matrix."""
    A = as_matrix(A)
    if not np.any(A):
        return 0.0
    return float(np.max(np.abs(herm_eigvals(A, tol))))
