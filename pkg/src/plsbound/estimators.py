"""OLS and PCR baselines, the Gram-matrix spectrum, and a unified fit facade."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import SingularError
from .model import CoefficientPath, Dataset, FitReport, covariance_pair, r2_score
from .nipals import nipals_fit
from .numerics import SymEig, as_vector, solve_spd, sym_eig

OLS_MIN_RATIO = 1e-10
PCR_MIN_RATIO = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of ``X^T X`` and the coordinates ``xi`` of the OLS
    coefficients in that eigenbasis (``beta_ols = eigenvectors @ xi``)."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]
    xi: NDArray[np.float64]


def ols_fit(d: Dataset, *, eig: SymEig | None = None) -> NDArray[np.float64]:
    """Ordinary least squares ``(X^T X)^{-1} X^T y``.

    Raises
    ------
    SingularError
        If the smallest eigenvalue of ``X^T X`` is below ``1e-10`` times the
        largest.
    """
    sxx, sxy = covariance_pair(d)
    eig = eig if eig is not None else sym_eig(sxx)
    lam = eig.eigenvalues
    if lam[0] <= 0.0 or lam[-1] <= OLS_MIN_RATIO * lam[0]:
        raise SingularError(
            f"X^T X is numerically singular (eigenvalue ratio {lam[-1] / lam[0] if lam[0] > 0 else 0.0:.3e})"
        )
    return solve_spd(sxx, sxy)


def spectrum_of(d: Dataset, beta_ols: ArrayLike, *, eig: SymEig | None = None) -> Spectrum:
    sxx, _ = covariance_pair(d)
    eig = eig if eig is not None else sym_eig(sxx)
    beta = as_vector(beta_ols, name="beta_ols")
    return Spectrum(eig.eigenvalues, eig.eigenvectors, eig.eigenvectors.T @ beta)


@dataclass(frozen=True)
class PcrPath:
    path: CoefficientPath
    skipped: tuple[int, ...]


def pcr_fit(d: Dataset, l: int, *, eig: SymEig | None = None) -> PcrPath:
    """Principal components regression on the top 1..l components.

    ``beta^(k) = sum_{j<=k} u_j (u_j^T X^T y) / lambda_j`` with the
    eigenvectors of ``X^T X`` in descending eigenvalue order. Components whose
    eigenvalue is at most ``1e-12 lambda_1`` are skipped (the path carries the
    previous coefficients forward) and listed in ``skipped`` (1-based).
    """
    if not 1 <= l <= d.d:
        raise ValueError(f"l must be in [1, {d.d}], got {l}")
    sxx, sxy = covariance_pair(d)
    eig = eig if eig is not None else sym_eig(sxx)
    lam, u = eig.eigenvalues, eig.eigenvectors
    beta = np.zeros(d.d)
    betas, skipped = [], []
    for j in range(l):
        if lam[j] <= PCR_MIN_RATIO * lam[0]:
            skipped.append(j + 1)
            warnings.warn(f"PCR component {j + 1} skipped: eigenvalue {lam[j]:.3e} is negligible")
        else:
            beta = beta + u[:, j] * (u[:, j] @ sxy) / lam[j]
        betas.append(beta.copy())
    return PcrPath(CoefficientPath(np.asarray(betas), requested=l), tuple(skipped))


def _report(d: Dataset, method: str, path: CoefficientPath, notes: list[str]) -> FitReport:
    r2 = np.array([r2_score(d, b) for b in path.betas])
    res = np.array([float(np.linalg.norm(d.y - d.x @ b)) for b in path.betas])
    return FitReport(method=method, coefficients=path, r2_per_l=r2, residual_norms=res, notes=notes)


def fit(d: Dataset, method: Literal["pls", "ols", "pcr"], l_max: int | None = None) -> FitReport:
    """Fit ``d`` with one of the three estimators and report in-sample R^2."""
    notes: list[str] = []
    if method == "ols":
        path = CoefficientPath(ols_fit(d)[None, :])
    elif method == "pls":
        l_max = d.d if l_max is None else l_max
        pls = nipals_fit(d, l_max)
        path = pls.coefficient_path
        if pls.truncated:
            notes.append(f"PLS stopped after {pls.n_components} of {l_max} components")
    elif method == "pcr":
        l_max = d.d if l_max is None else l_max
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pcr = pcr_fit(d, l_max)
        path = pcr.path
        if pcr.skipped:
            notes.append(f"PCR skipped negligible components {list(pcr.skipped)}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return _report(d, method, path, notes)
