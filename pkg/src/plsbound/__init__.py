"""Scalar-response PLS regression and its distance to OLS.

PLS coefficients are computed three ways (NIPALS, least squares restricted to
a Krylov subspace, conjugate gradients) and compared against OLS through the
quadratic form ``X^T X``. The moment bound ``C_L`` limits that distance using
the eigenvalues of ``X^T X`` alone.
"""

__version__ = "0.1.0"

from .bounds import (
    bound_series,
    closed_form_c1_c2,
    error_spectrum,
    error_via_polynomial,
    generic_poly_bound,
    hankel_bound,
    mahalanobis_check,
    moments,
    ned,
    sigma_norm_sq,
)
from .estimators import fit, ols_fit, pcr_fit, spectrum_of
from .krylov import krylov_basis, pls_via_cg, pls_via_restricted_ls
from .model import CoefficientPath, Dataset, FitReport, covariance_pair, r2_score
from .nipals import PlsFit, nipals_fit, rotation
from .synth import SCENARIOS, Scenario, generate_problem

__all__ = [
    "CoefficientPath",
    "Dataset",
    "FitReport",
    "PlsFit",
    "SCENARIOS",
    "Scenario",
    "bound_series",
    "closed_form_c1_c2",
    "covariance_pair",
    "error_spectrum",
    "error_via_polynomial",
    "fit",
    "generate_problem",
    "generic_poly_bound",
    "hankel_bound",
    "krylov_basis",
    "mahalanobis_check",
    "moments",
    "ned",
    "nipals_fit",
    "ols_fit",
    "pcr_fit",
    "pls_via_cg",
    "pls_via_restricted_ls",
    "r2_score",
    "rotation",
    "sigma_norm_sq",
    "spectrum_of",
]
