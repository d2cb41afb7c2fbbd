"""Dense linear-algebra primitives used throughout the package.

Everything here is a thin contract layer over LAPACK (through NumPy/SciPy):
symmetric eigendecomposition with a deterministic ordering and sign
convention, a sign-fixed QR factorization suitable for Haar sampling, and an
SPD solver that degrades to minimum-norm least squares instead of failing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numpy.typing import ArrayLike, NDArray

from .errors import (
    NoConvergenceError,
    NonSymmetricError,
    RankDeficientError,
    SingularError,
)

SYMMETRY_RTOL = 1e-10
PIVOT_RTOL = 1e-12
SOLVE_RTOL = 1e-8


def as_matrix(a: ArrayLike, *, square: bool = False, name: str = "matrix") -> NDArray[np.float64]:
    """Validate ``a`` as a finite 2-D float array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_vector(v: ArrayLike, *, name: str = "vector") -> NDArray[np.float64]:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def max_abs(a: ArrayLike) -> float:
    arr = np.asarray(a)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


@dataclass(frozen=True)
class SymEig:
    """Eigenpairs of a symmetric matrix.

    ``eigenvalues`` are sorted in descending order and column ``d`` of
    ``eigenvectors`` pairs with ``eigenvalues[d]``.
    """

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]

    def reconstruct(self) -> NDArray[np.float64]:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def check_symmetric(a: NDArray[np.float64], rtol: float = SYMMETRY_RTOL) -> None:
    scale = max(1.0, max_abs(a))
    asym = max_abs(a - a.T)
    if asym > rtol * scale:
        raise NonSymmetricError(
            f"matrix is not symmetric: max|A - A^T| = {asym:.3e} exceeds {rtol:g} * {scale:.3e}"
        )


def sym_eig(a: ArrayLike) -> SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Ties keep the order LAPACK returns them in. Each eigenvector is signed so
    that its largest-magnitude entry is positive, which makes the output
    reproducible across calls.

    Raises
    ------
    NonSymmetricError
        If ``a`` is not symmetric to a relative tolerance of 1e-10.
    NoConvergenceError
        If the underlying LAPACK driver fails to converge.
    """
    arr = as_matrix(a, square=True)
    check_symmetric(arr)
    sym = 0.5 * (arr + arr.T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergenceError(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    if v.size:
        idx = np.argmax(np.abs(v), axis=0)
        signs = np.sign(v[idx, np.arange(v.shape[1])])
        signs[signs == 0] = 1.0
        v = v * signs
    return SymEig(eigenvalues=w, eigenvectors=v)


def _sign_fixed_qr(a: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.diag(r)
    scale = np.max(np.abs(diag)) if diag.size else 0.0
    if diag.size == 0 or scale == 0.0 or np.min(np.abs(diag)) <= PIVOT_RTOL * scale:
        raise RankDeficientError("matrix is numerically rank deficient")
    signs = np.sign(diag)
    return q * signs, r * signs[:, None]


def qr_orthonormal(a: ArrayLike) -> NDArray[np.float64]:
    """Orthogonal factor of ``a = QR`` with ``diag(R) > 0``.

    Fixing the sign of ``R``'s diagonal makes the factorization unique, so
    applied to a standard Gaussian matrix the result is Haar distributed.
    """
    arr = as_matrix(a, square=True)
    q, _ = _sign_fixed_qr(arr)
    return q


def orthonormal_columns(a: ArrayLike) -> NDArray[np.float64]:
    """Sign-fixed thin QR factor of a tall full-column-rank matrix."""
    arr = as_matrix(a)
    if arr.shape[0] < arr.shape[1]:
        raise RankDeficientError("more columns than rows")
    q, _ = _sign_fixed_qr(arr)
    return q


@dataclass(frozen=True)
class SolveInfo:
    method: str  # "cholesky" or "lstsq"
    relative_residual: float
    condition: float


def solve_spd_info(a: ArrayLike, b: ArrayLike) -> tuple[NDArray[np.float64], SolveInfo]:
    """Like :func:`solve_spd` but also reports how the system was solved."""
    arr = as_matrix(a, square=True)
    rhs = as_vector(b, name="b")
    if rhs.shape[0] != arr.shape[0]:
        raise ValueError(f"shape mismatch: {arr.shape} vs {rhs.shape}")
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros_like(rhs), SolveInfo("cholesky", 0.0, float(np.linalg.cond(arr)))

    sym = 0.5 * (arr + arr.T)
    dmax = float(np.max(np.abs(np.diag(sym))))
    method = "lstsq"
    try:
        c, lower = sla.cho_factor(sym, lower=True, check_finite=False)
        pivots = np.diag(c) ** 2
        if dmax > 0.0 and np.min(pivots) >= PIVOT_RTOL * dmax:
            x = sla.cho_solve((c, lower), rhs, check_finite=False)
            method = "cholesky"
    except np.linalg.LinAlgError:
        pass
    if method == "lstsq":
        x, *_ = np.linalg.lstsq(sym, rhs, rcond=None)

    rel = float(np.linalg.norm(sym @ x - rhs)) / bnorm
    info = SolveInfo(method, rel, float(np.linalg.cond(sym)))
    return x, info


def solve_spd(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Solve ``a x = b`` for symmetric positive (semi-)definite ``a``.

    Uses a Cholesky factorization; when a pivot drops below ``1e-12`` times
    the largest diagonal entry the minimum-norm least-squares solution is
    returned instead.

    Raises
    ------
    SingularError
        If even the least-squares fallback leaves a relative residual above
        ``1e-8``.
    """
    x, info = solve_spd_info(a, b)
    if info.relative_residual > SOLVE_RTOL:
        raise SingularError(
            f"system is singular: relative residual {info.relative_residual:.3e} "
            f"after {info.method} (cond ~ {info.condition:.3e})"
        )
    return x
