"""Krylov subspaces and the two alternative PLS solvers built on them.

``pls_via_restricted_ls`` minimizes ``|y - X b|^2`` over ``K_L(X^T X, X^T y)``
directly; ``pls_via_cg`` runs conjugate gradients on ``X^T X b = X^T y`` from
zero. Both reproduce the NIPALS coefficient path and serve as independent
cross-checks of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import BreakdownError, ZeroVectorError
from .model import CoefficientPath, Dataset, covariance_pair
from .numerics import as_matrix, as_vector, check_symmetric, solve_spd

DROP_RTOL = 1e-10
CURVATURE_RTOL = 1e-14
CG_RESIDUAL_RTOL = 1e-13


@dataclass(frozen=True)
class KrylovBasis:
    """Raw power vectors ``b, Ab, ...`` plus an orthonormal basis of their span.

    ``ortho`` has ``effective_dim <= order`` columns; fewer columns mean the
    subspace became invariant (numerically) before reaching ``order``.
    """

    order: int
    raw_vectors: NDArray[np.float64]
    ortho: NDArray[np.float64]

    @property
    def effective_dim(self) -> int:
        return self.ortho.shape[1]


def _orthogonalize(q: list[NDArray[np.float64]], v: NDArray[np.float64]) -> NDArray[np.float64]:
    # modified Gram-Schmidt, two passes
    for _ in range(2):
        for u in q:
            v = v - (u @ v) * u
    return v


def krylov_basis(a: ArrayLike, b: ArrayLike, order: int) -> KrylovBasis:
    """Build ``K_order(a, b)``.

    The orthonormal basis is grown Arnoldi style: each new candidate is
    ``a`` applied to the newest basis vector (same span as the next power
    ``a^k b``, far better conditioned), orthogonalized twice against the
    current basis and dropped, ending the growth, when less than ``1e-10``
    of its norm survives.
    """
    a = as_matrix(a, square=True)
    check_symmetric(a)
    b = as_vector(b, name="b")
    if order < 1:
        raise ValueError("order must be >= 1")
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        raise ZeroVectorError("Krylov subspace of a zero vector is undefined")

    raw = [b]
    for _ in range(order - 1):
        raw.append(a @ raw[-1])

    q = [b / bnorm]
    for _ in range(order - 1):
        cand = a @ q[-1]
        cnorm = float(np.linalg.norm(cand))
        if cnorm == 0.0:
            break
        v = _orthogonalize(q, cand)
        vnorm = float(np.linalg.norm(v))
        if vnorm < DROP_RTOL * cnorm:
            break
        q.append(v / vnorm)
    return KrylovBasis(order=order, raw_vectors=np.column_stack(raw), ortho=np.column_stack(q))


def restricted_ls(sxx: NDArray[np.float64], sxy: NDArray[np.float64], basis: NDArray[np.float64]) -> NDArray[np.float64]:
    """``B (B^T Sxx B)^{-1} B^T Sxy``: least squares restricted to ``span(B)``."""
    g = basis.T @ sxx @ basis
    g = 0.5 * (g + g.T)
    return basis @ solve_spd(g, basis.T @ sxy)


def pls_via_restricted_ls(d: Dataset, l: int) -> NDArray[np.float64]:
    """PLS coefficients with ``l`` components as Krylov-restricted least squares."""
    if l < 1:
        raise ValueError("l must be >= 1")
    sxx, sxy = covariance_pair(d)
    kb = krylov_basis(sxx, sxy, l)
    return restricted_ls(sxx, sxy, kb.ortho)


def pls_path_via_restricted_ls(d: Dataset, l_max: int) -> CoefficientPath:
    """Restricted least squares for every order 1..l_max, sharing one basis."""
    sxx, sxy = covariance_pair(d)
    kb = krylov_basis(sxx, sxy, l_max)
    betas = [restricted_ls(sxx, sxy, kb.ortho[:, :k]) for k in range(1, kb.effective_dim + 1)]
    stop = None if kb.effective_dim == l_max else "invariant subspace"
    return CoefficientPath(np.asarray(betas), requested=l_max, stop_reason=stop)


def conjugate_gradient(
    a: NDArray[np.float64], b: NDArray[np.float64], steps: int, *, strict: bool = False
) -> CoefficientPath:
    """Plain CG on ``a x = b`` from ``x = 0``; row k of the path is iterate k+1.

    Stops early once the residual falls below ``1e-13 |b|`` (converged) or a
    search direction has curvature ``p^T a p <= 1e-14 |p|^2`` (breakdown,
    raised as :class:`BreakdownError` when ``strict``).
    """
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    bnorm = float(np.linalg.norm(b))
    iterates = []
    stop = None
    for _ in range(steps):
        if np.sqrt(rr) <= CG_RESIDUAL_RTOL * bnorm:
            stop = "converged"
            break
        ap = a @ p
        curv = float(p @ ap)
        if curv <= CURVATURE_RTOL * float(p @ p) * max(1.0, float(np.max(np.abs(a)))):
            if strict:
                raise BreakdownError(f"non-positive curvature {curv:.3e} at step {len(iterates) + 1}")
            stop = "breakdown"
            break
        alpha = rr / curv
        x = x + alpha * p
        r = r - alpha * ap
        rr_new = float(r @ r)
        p = r + (rr_new / rr) * p
        rr = rr_new
        iterates.append(x.copy())
    betas = np.asarray(iterates).reshape(len(iterates), b.shape[0])
    return CoefficientPath(betas, requested=steps, stop_reason=stop)


def pls_via_cg(d: Dataset, l: int, *, strict: bool = False) -> CoefficientPath:
    """PLS coefficient path for 1..l components from CG on the normal equations."""
    if l < 1:
        raise ValueError("l must be >= 1")
    sxx, sxy = covariance_pair(d)
    if not np.any(sxy):
        raise ZeroVectorError("X^T y is zero")
    return conjugate_gradient(sxx, sxy, l, strict=strict)
