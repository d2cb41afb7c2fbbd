"""NIPALS for partial least squares with a scalar response."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateDirectionError, NotCenteredError, SingularError
from .model import CoefficientPath, Dataset

DEGENERATE_RTOL = 1e-12
ROTATION_MAX_COND = 1e12


@dataclass(frozen=True)
class PlsFit:
    """Everything NIPALS extracts from a dataset.

    Matrices store one component per column: ``w_mat`` (D x L) weights,
    ``t_mat`` (N x L) scores, ``p_mat`` (D x L) x-loadings and ``r_mat``
    (D x L) the rotation with ``X @ r_mat == t_mat``. ``q_row`` holds the
    y-loadings and ``d_norms`` the score norms ``|t_l|``.
    """

    w_mat: NDArray[np.float64]
    t_mat: NDArray[np.float64]
    p_mat: NDArray[np.float64]
    q_row: NDArray[np.float64]
    r_mat: NDArray[np.float64]
    d_norms: NDArray[np.float64]
    coefficient_path: CoefficientPath
    x_deflated: NDArray[np.float64]
    x_frobenius: NDArray[np.float64]
    y_residual_norms: NDArray[np.float64]
    requested: int

    @property
    def n_components(self) -> int:
        return self.w_mat.shape[1]

    @property
    def truncated(self) -> bool:
        return self.n_components < self.requested


def rotation(w_mat: NDArray[np.float64], p_mat: NDArray[np.float64]) -> NDArray[np.float64]:
    """``R = W (P^T W)^{-1}``, the directions mapping X onto the scores."""
    w = np.asarray(w_mat, dtype=np.float64)
    p = np.asarray(p_mat, dtype=np.float64)
    m = p.T @ w
    if m.size and np.linalg.cond(m) > ROTATION_MAX_COND:
        raise SingularError("P^T W is numerically singular; too many components extracted")
    # R^T = (P^T W)^{-T} W^T
    return np.linalg.solve(m.T, w.T).T


def nipals_fit(d: Dataset, l_max: int, *, strict: bool = False) -> PlsFit:
    """Extract ``l_max`` PLS components with NIPALS deflation.

    Exactly ``l_max`` iterations are run. If the deflated cross-covariance
    ``X_{l-1}^T y`` collapses below ``1e-12 |X^T y|`` the Krylov space has
    stopped growing; the fit is truncated at the components found so far
    (or :class:`DegenerateDirectionError` is raised when ``strict``).
    """
    if not d.centered:
        raise NotCenteredError("NIPALS requires centered data")
    n, dim = d.x.shape
    if not 1 <= l_max <= dim:
        raise ValueError(f"l_max must be in [1, {dim}], got {l_max}")

    x_l = np.array(d.x, dtype=np.float64, copy=True)
    y = d.y
    y_l = np.array(y, copy=True)
    ref = float(np.linalg.norm(x_l.T @ y))
    if ref == 0.0:
        raise DegenerateDirectionError("X^T y is zero; no PLS direction exists")

    ws, ts, ps, qs = [], [], [], []
    frob = [float(np.linalg.norm(x_l))]
    ynorms = [float(np.linalg.norm(y_l))]
    for l in range(1, l_max + 1):
        g = x_l.T @ y
        gnorm = float(np.linalg.norm(g))
        if gnorm < DEGENERATE_RTOL * ref:
            if strict:
                raise DegenerateDirectionError(
                    f"Krylov space stopped growing after {l - 1} components"
                )
            break
        w = g / gnorm
        t = x_l @ w
        tt = float(t @ t)
        p = x_l.T @ t / tt
        q = float(y @ t) / tt
        x_l = x_l - np.outer(t, p)
        y_l = y_l - q * t
        ws.append(w)
        ts.append(t)
        ps.append(p)
        qs.append(q)
        frob.append(float(np.linalg.norm(x_l)))
        ynorms.append(float(np.linalg.norm(y_l)))

    w_mat = np.column_stack(ws) if ws else np.empty((dim, 0))
    t_mat = np.column_stack(ts) if ts else np.empty((n, 0))
    p_mat = np.column_stack(ps) if ps else np.empty((dim, 0))
    q_row = np.asarray(qs)
    d_norms = np.linalg.norm(t_mat, axis=0)

    betas = []
    for l in range(1, w_mat.shape[1] + 1):
        r_l = rotation(w_mat[:, :l], p_mat[:, :l])
        t_l = t_mat[:, :l]
        betas.append(r_l @ ((t_l.T @ y) / d_norms[:l] ** 2))
    r_mat = rotation(w_mat, p_mat) if ws else np.empty((dim, 0))

    stop = None if len(ws) == l_max else "degenerate direction"
    path = CoefficientPath(
        betas=np.asarray(betas).reshape(len(betas), dim), requested=l_max, stop_reason=stop
    )
    return PlsFit(
        w_mat=w_mat,
        t_mat=t_mat,
        p_mat=p_mat,
        q_row=q_row,
        r_mat=r_mat,
        d_norms=d_norms,
        coefficient_path=path,
        x_deflated=x_l,
        x_frobenius=np.asarray(frob),
        y_residual_norms=np.asarray(ynorms),
        requested=l_max,
    )


def deflated_by_projectors(t_mat: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
    """Apply ``prod_i (I - t_i t_i^T / t_i^T t_i)`` to ``v`` (vector or matrix)."""
    out = np.array(v, dtype=np.float64, copy=True)
    for i in range(t_mat.shape[1]):
        t = t_mat[:, i]
        out = out - np.outer(t, t @ out) / (t @ t) if out.ndim == 2 else out - t * (t @ out) / (t @ t)
    return out


def deflation_reconstruction_check(fit: PlsFit, d: Dataset) -> float:
    """Largest entrywise residual of ``X = T P^T + X_L`` and ``y = T q + y_L``.

    ``y_L`` is rebuilt independently from the product of score projectors.
    """
    t = fit.t_mat
    rx = d.x - t @ fit.p_mat.T - fit.x_deflated
    y_l = deflated_by_projectors(t, d.y)
    ry = d.y - t @ fit.q_row - y_l
    return float(max(np.max(np.abs(rx)), np.max(np.abs(ry))))
