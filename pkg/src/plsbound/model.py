"""Regression data model shared by the solvers and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateResponseError, NotCenteredError
from .numerics import as_matrix, as_vector

CENTER_TOL = 1e-10


def _frozen(a: NDArray[np.float64]) -> NDArray[np.float64]:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Regressor matrix ``x`` (N x D) and response ``y`` (N).

    ``centered`` asserts that every column of ``x`` and ``y`` has zero mean;
    it is checked on construction. ``column_scales`` records the standard
    deviations divided out of ``x`` during preprocessing, if any.
    """

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    centered: bool = True
    column_scales: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        x = as_matrix(self.x, name="x")
        y = as_vector(self.y, name="y")
        n, d = x.shape
        if y.shape[0] != n:
            raise ValueError(f"x has {n} rows but y has {y.shape[0]} entries")
        if n < 2 or d < 1:
            raise ValueError(f"need N >= 2 and D >= 1, got N={n}, D={d}")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))
        if self.column_scales is not None:
            scales = as_vector(self.column_scales, name="column_scales")
            if scales.shape[0] != d:
                raise ValueError("column_scales must have one entry per column")
            object.__setattr__(self, "column_scales", _frozen(scales))
        if self.centered:
            check_centered(x, y)

    @classmethod
    def from_arrays(cls, x: ArrayLike, y: ArrayLike, *, center: bool = True) -> Dataset:
        x = as_matrix(x, name="x")
        y = as_vector(y, name="y")
        if center:
            x = x - x.mean(axis=0)
            y = y - y.mean()
        return cls(x=x, y=y, centered=center)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


def check_centered(x: NDArray[np.float64], y: NDArray[np.float64]) -> None:
    # tolerance scales with the data magnitude; 1e-10 absolute for unit-scale data
    xs = max(1.0, float(np.max(np.abs(x))))
    ys = max(1.0, float(np.max(np.abs(y))))
    xm = float(np.max(np.abs(x.mean(axis=0))))
    ym = abs(float(y.mean()))
    if xm > CENTER_TOL * xs or ym > CENTER_TOL * ys:
        raise NotCenteredError(
            f"data are not centered: max|column mean| = {xm:.3e}, |mean(y)| = {ym:.3e}"
        )


@dataclass(frozen=True)
class CoefficientPath:
    """Coefficient vectors for L = 1..l_max, stored as rows of ``betas``.

    Row ``L - 1`` holds the estimator with ``L`` components. A solver that
    stops early (its Krylov space stopped growing) produces a shorter path;
    :meth:`at` then returns the last computed vector for larger ``L``, which
    is exact because the estimator is constant from that order on.
    """

    betas: NDArray[np.float64]
    requested: int | None = None
    stop_reason: str | None = None

    def __post_init__(self) -> None:
        betas = np.atleast_2d(np.asarray(self.betas, dtype=np.float64))
        object.__setattr__(self, "betas", _frozen(betas))
        if self.requested is None:
            object.__setattr__(self, "requested", betas.shape[0])

    @property
    def l_max(self) -> int:
        return self.betas.shape[0]

    @property
    def truncated(self) -> bool:
        return self.l_max < self.requested

    def at(self, l: int) -> NDArray[np.float64]:
        if l < 1:
            raise ValueError("component count must be >= 1")
        if self.l_max == 0:
            raise ValueError("empty coefficient path")
        return self.betas[min(l, self.l_max) - 1]

    def __len__(self) -> int:
        return self.l_max


@dataclass(frozen=True)
class FitReport:
    method: Literal["pls", "ols", "pcr"]
    coefficients: CoefficientPath
    r2_per_l: NDArray[np.float64]
    residual_norms: NDArray[np.float64]
    notes: list[str] = field(default_factory=list)


def covariance_pair(d: Dataset) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return ``(X^T X, X^T y)`` with no 1/N scaling.

    The Gram matrix is symmetrized by averaging so it equals its transpose
    bit for bit.
    """
    if not d.centered:
        raise NotCenteredError("covariance_pair requires a centered dataset")
    sxx = d.x.T @ d.x
    sxx = 0.5 * (sxx + sxx.T)
    sxy = d.x.T @ d.y
    return sxx, sxy


def r2_score(d: Dataset, beta: ArrayLike) -> float:
    """In-sample coefficient of determination ``1 - |y - X b|^2 / |y|^2``."""
    b = as_vector(beta, name="beta")
    if b.shape[0] != d.d:
        raise ValueError(f"beta has length {b.shape[0]}, expected {d.d}")
    tss = float(d.y @ d.y)
    if tss == 0.0:
        raise DegenerateResponseError("response has zero total sum of squares")
    resid = d.y - d.x @ b
    return 1.0 - float(resid @ resid) / tss
