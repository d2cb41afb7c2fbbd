"""Distances between PLS and OLS coefficients and spectral bounds on them.

The squared distance ``|b_pls(L) - b_ols|^2`` in the ``X^T X`` quadratic-form
norm equals a weighted polynomial least-squares residual over the spectrum
of ``X^T X``:

    min over Q of  sum_d Q(lambda_d)^2 lambda_d xi_d^2,   deg Q <= L, Q(0) = -1,

where ``xi`` are the OLS coefficients in the eigenbasis. Dropping the weights
gives a bound that depends on the eigenvalues alone; its minimum is

    C_L = D (1 - c_L^T H_L^{-1} c_L)

with ``H_L`` the Hankel matrix of raw moments ``mu'_2 .. mu'_2L`` and
``c_L = (mu'_1 .. mu'_L)``. The normalized distance ``NED_L`` never exceeds
``C_L``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConstraintViolatedError, DegenerateOLSError, IllConditionedError
from .model import Dataset, covariance_pair
from .numerics import as_matrix, as_vector, solve_spd_info

NED_DENOM_MIN = 1e-14
CLAMP_TOL = 1e-8
DISTINCT_RTOL = 1e-8
DEGENERATE_CV = 1e-12


def sigma_norm_sq(v: ArrayLike, sxx: ArrayLike) -> float:
    """Squared quadratic-form norm ``v^T Sxx v``."""
    v = as_vector(v, name="v")
    sxx = as_matrix(sxx, square=True, name="sxx")
    if sxx.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {sxx.shape} vs {v.shape}")
    return float(v @ sxx @ v)


def ned(beta_pls: ArrayLike, beta_ols: ArrayLike, sxx: ArrayLike) -> float:
    """Normalized estimator difference ``|b - b_ols|_S^2 / |b_ols|_S^2``."""
    b_ols = as_vector(beta_ols, name="beta_ols")
    denom = sigma_norm_sq(b_ols, sxx)
    if denom <= NED_DENOM_MIN:
        raise DegenerateOLSError(f"|beta_ols|_S^2 = {denom:.3e} is too small to normalize by")
    return sigma_norm_sq(as_vector(beta_pls, name="beta_pls") - b_ols, sxx) / denom


def mahalanobis_check(beta: ArrayLike, beta_ols: ArrayLike, d: Dataset, sigma_sq: float) -> float:
    """Squared Mahalanobis distance to the OLS estimate under its covariance
    ``sigma_sq (X^T X)^{-1}``."""
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    sxx, _ = covariance_pair(d)
    diff = as_vector(beta, name="beta") - as_vector(beta_ols, name="beta_ols")
    return sigma_norm_sq(diff, sxx) / sigma_sq


def distinct_eigenvalue_count(lambdas: ArrayLike, rtol: float = DISTINCT_RTOL) -> int:
    """Number of distinct values, merging neighbours closer than ``rtol * max|lambda|``."""
    lam = np.sort(as_vector(lambdas, name="lambdas"))
    if lam.size == 0:
        return 0
    tol = rtol * float(np.max(np.abs(lam)))
    return 1 + int(np.count_nonzero(np.diff(lam) > tol))


def _scaled_powers(s: NDArray[np.float64], degree: int) -> NDArray[np.float64]:
    # columns s^1 .. s^degree
    return np.vander(s, degree + 1, increasing=True)[:, 1:]


def _eval_normalized(coeffs: NDArray[np.float64], s: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.polynomial.polynomial.polyval(s, coeffs)


def _to_normalized(coeffs: NDArray[np.float64], scale: float) -> NDArray[np.float64]:
    return coeffs * scale ** np.arange(coeffs.shape[0])


def _to_raw(coeffs: NDArray[np.float64], scale: float) -> NDArray[np.float64]:
    return coeffs / scale ** np.arange(coeffs.shape[0])


# ---------------------------------------------------------------------------
# weighted (exact) error polynomial


@dataclass(frozen=True)
class ErrorSpectrum:
    """Spectrum, OLS coordinates and the optimal error polynomials ``Q*_L``.

    ``q_star_coeffs[L - 1]`` lists the coefficients of ``Q*_L`` in ascending
    powers of ``t`` (constant term ``-1`` first). ``conditions[L - 1]`` is
    the condition number of the weighted normal system that produced it.
    """

    lambdas: NDArray[np.float64]
    xis: NDArray[np.float64]
    scale: float
    q_star_coeffs: list[NDArray[np.float64]]
    conditions: NDArray[np.float64]

    @property
    def ols_norm_sq(self) -> float:
        return float(np.sum(self.lambdas * self.xis**2))

    @property
    def l_max(self) -> int:
        return len(self.q_star_coeffs)


def error_spectrum(lambdas: ArrayLike, xis: ArrayLike, l_max: int) -> ErrorSpectrum:
    """Fit ``Q*_L`` for L = 1..l_max by weighted polynomial least squares.

    Minimizes ``sum_d (1 - a_1 l_d - ... - a_L l_d^L)^2 l_d xi_d^2`` with
    eigenvalues rescaled by their maximum; the SVD-based solver returns the
    minimum-norm minimizer when the system is rank deficient.
    """
    lam = as_vector(lambdas, name="lambdas")
    xi = as_vector(xis, name="xis")
    if lam.shape != xi.shape:
        raise ValueError("lambdas and xis must have the same length")
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        raise IllConditionedError("all eigenvalues are zero")
    s = lam / scale
    sw = np.sqrt(np.clip(lam * xi**2, 0.0, None))
    coeffs, conds = [], []
    for l in range(1, l_max + 1):
        design = sw[:, None] * _scaled_powers(s, l)
        a, *_ = np.linalg.lstsq(design, sw, rcond=None)
        if not np.all(np.isfinite(a)):
            raise IllConditionedError(f"weighted polynomial fit failed at L={l}")
        sv = np.linalg.svd(design, compute_uv=False)
        conds.append(float((sv[0] / sv[-1]) ** 2) if sv[-1] > 0 else np.inf)
        coeffs.append(_to_raw(np.concatenate(([-1.0], a)), scale))
    return ErrorSpectrum(lam, xi, scale, coeffs, np.asarray(conds))


def _weighted_sum(es: ErrorSpectrum, q_raw: NDArray[np.float64]) -> float:
    q = _eval_normalized(_to_normalized(q_raw, es.scale), es.lambdas / es.scale)
    return float(np.sum(q**2 * es.lambdas * es.xis**2))


def error_via_polynomial(es: ErrorSpectrum, l: int) -> float:
    """``sum_d Q*_L(lambda_d)^2 lambda_d xi_d^2``, the squared PLS-OLS distance."""
    if not 1 <= l <= es.l_max:
        raise ValueError(f"no fitted polynomial for L={l} (have 1..{es.l_max})")
    return _weighted_sum(es, es.q_star_coeffs[l - 1])


def generic_poly_bound(
    q_coeffs: ArrayLike,
    es: ErrorSpectrum,
    mode: Literal["weighted_sum", "h2_times_norm", "h1_times_norm"] = "weighted_sum",
) -> float:
    """Upper bound on the squared PLS-OLS distance from any polynomial with
    ``q(0) = -1`` (coefficients in ascending powers).

    ``weighted_sum`` evaluates the exact objective at ``q``;
    ``h2_times_norm`` uses ``sum_d q(lambda_d)^2`` and ``h1_times_norm``
    uses ``max_d q(lambda_d)^2``, each times ``|b_ols|_S^2``.
    """
    q = as_vector(q_coeffs, name="q_coeffs")
    if q.size == 0 or abs(q[0] + 1.0) > 1e-12:
        raise ConstraintViolatedError(f"polynomial must satisfy q(0) = -1, got {q[0] if q.size else None}")
    if mode == "weighted_sum":
        return _weighted_sum(es, q)
    vals = _eval_normalized(_to_normalized(q, es.scale), es.lambdas / es.scale) ** 2
    if mode == "h2_times_norm":
        return float(np.sum(vals)) * es.ols_norm_sq
    if mode == "h1_times_norm":
        return float(np.max(vals)) * es.ols_norm_sq
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# eigenvalue moments and the Hankel bound


@dataclass(frozen=True)
class MomentSet:
    """Population moments of an eigenvalue sample.

    ``raw_moments[k - 1]`` is ``mu'_k = mean(lambda^k)`` for k = 1..2 l_max.
    ``kappa`` is the non-excess kurtosis ``m4 / sigma^4``, so Pearson's
    inequality reads ``kappa >= 1 + gamma^2``.
    """

    lambdas: NDArray[np.float64]
    raw_moments: NDArray[np.float64]
    d_count: int
    mean: float
    std: float
    cv: float
    gamma: float
    kappa: float
    degenerate: bool

    def raw(self, k: int) -> float:
        return float(self.raw_moments[k - 1])


def moments(lambdas: ArrayLike, l_max: int) -> MomentSet:
    lam = as_vector(lambdas, name="lambdas")
    if lam.size < 1:
        raise ValueError("need at least one eigenvalue")
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    raw = np.array([np.mean(lam**k) for k in range(1, 2 * l_max + 1)])
    mu = float(np.mean(lam))
    dev = lam - mu
    var = float(np.mean(dev**2))
    sigma = np.sqrt(var)
    degenerate = sigma <= DEGENERATE_CV * max(abs(mu), np.finfo(float).tiny)
    if degenerate:
        gamma = kappa = 0.0
        cv = 0.0
    else:
        gamma = float(np.mean(dev**3)) / sigma**3
        kappa = float(np.mean(dev**4)) / sigma**4
        cv = sigma / mu
    return MomentSet(lam, raw, lam.size, mu, float(sigma), float(cv), gamma, kappa, bool(degenerate))


@dataclass(frozen=True)
class HankelBound:
    """Result of minimizing ``h_L(a) = sum_d (-1 + a_1 l_d + ... + a_L l_d^L)^2``.

    ``c_l`` is ``h_L`` evaluated at the computed minimizer ``a_star``, which
    is the bound ``D (1 - c^T H^{-1} c)`` and, being a sum of squares at a
    feasible polynomial, stays a valid upper bound even when ``H`` is badly
    conditioned. ``formula_value`` is the closed expression itself; the
    ``clamped`` flag records that it left ``[0, D]`` by more than 1e-8.
    """

    c_l: float
    a_star: NDArray[np.float64]
    formula_value: float
    condition: float
    clamped: bool
    ill_conditioned: bool
    hankel: NDArray[np.float64] = field(repr=False)
    c_vec: NDArray[np.float64] = field(repr=False)

    def __iter__(self):
        # unpacks as (c_l, a_star)
        return iter((self.c_l, self.a_star))


def hankel_system(ms: MomentSet, l: int) -> tuple[NDArray[np.float64], NDArray[np.float64], float]:
    """``H_L`` and ``c_L`` built from moments of ``lambda / lambda_max``.

    Returns ``(H, c, scale)``; raw moments follow as ``mu'_k = scale^k m_k``.
    """
    scale = float(np.max(np.abs(ms.lambdas)))
    if scale == 0.0:
        raise IllConditionedError("all eigenvalues are zero")
    s = ms.lambdas / scale
    m = np.array([np.mean(s**k) for k in range(1, 2 * l + 1)])
    idx = np.add.outer(np.arange(l), np.arange(l))
    return m[idx + 1], m[:l], scale


def hankel_bound(ms: MomentSet, l: int) -> HankelBound:
    """Moment bound ``C_L`` and the coefficients ``a*`` of the minimizing
    polynomial ``R*_L(t) = -1 + sum_j a*_j t^j``."""
    if l < 1:
        raise ValueError("l must be >= 1")
    d = ms.d_count
    h, c, scale = hankel_system(ms, l)
    a_n, info = solve_spd_info(h, c)
    ill = info.relative_residual > 1e-8
    formula = d * (1.0 - float(c @ a_n))
    s = ms.lambdas / scale
    vander = _scaled_powers(s, l)
    resid = vander @ a_n - 1.0
    value = float(resid @ resid)
    # one orthogonal least-squares correction: H = V^T V / D squares cond(V)
    step, *_ = np.linalg.lstsq(vander, -resid, rcond=None)
    resid_ref = vander @ (a_n + step) - 1.0
    if float(resid_ref @ resid_ref) < value:
        a_n = a_n + step
        value = float(resid_ref @ resid_ref)
    clamped = formula < -CLAMP_TOL or formula > d + CLAMP_TOL
    value = min(max(value, 0.0), float(d))
    return HankelBound(
        c_l=value,
        a_star=_to_raw(np.concatenate(([1.0], a_n)), scale)[1:],
        formula_value=formula,
        condition=info.condition,
        clamped=clamped,
        ill_conditioned=ill,
        hankel=h * scale ** (np.add.outer(np.arange(l), np.arange(l)) + 2),
        c_vec=c * scale ** (np.arange(l) + 1),
    )


@dataclass(frozen=True)
class BoundSeries:
    c_l_values: NDArray[np.float64]
    optimal_coeffs: list[NDArray[np.float64]]
    hankel_condition: NDArray[np.float64]
    clamped: NDArray[np.bool_]
    ill_conditioned: NDArray[np.bool_]


def bound_series(ms: MomentSet, l_max: int) -> BoundSeries:
    """``C_1 .. C_{l_max}``.

    Each value is capped by its predecessor: the optimal polynomial of order
    L - 1 is feasible at order L, so this never weakens the bound and keeps
    the series non-increasing when the Hankel solve loses accuracy.
    """
    vals, coeffs, conds, clamped, ill = [], [], [], [], []
    prev = float(ms.d_count)
    prev_a = np.zeros(0)
    for l in range(1, l_max + 1):
        hb = hankel_bound(ms, l)
        if hb.c_l <= prev:
            prev, prev_a = hb.c_l, hb.a_star
        else:
            prev_a = np.concatenate((prev_a, [0.0]))
        vals.append(prev)
        coeffs.append(prev_a)
        conds.append(hb.condition)
        clamped.append(hb.clamped)
        ill.append(hb.ill_conditioned)
    return BoundSeries(np.asarray(vals), coeffs, np.asarray(conds), np.asarray(clamped), np.asarray(ill))


# ---------------------------------------------------------------------------
# closed forms for one and two components


def closed_form_c1_c2(
    ms: MomentSet, form: Literal["published", "exact"] = "published"
) -> tuple[float, float]:
    """``C_1`` and ``C_2`` from the coefficient of variation, skewness and kurtosis.

    ``C_1 = D cv^2 / (1 + cv^2)`` in both forms. For ``C_2`` the numerator is
    ``D cv^4 (kappa - gamma^2 - 1)``; the denominator is

    * ``published``: ``(k - g^2) cv^4 + (k - 3 - 2g) cv^3 - 2g cv + 1``
    * ``exact``:     ``(k - g^2) cv^4 - 2g cv^3 + (k - 3) cv^2 + 2g cv + 1``

    Only the ``exact`` denominator agrees with ``hankel_bound(ms, 2)`` in
    general; see :func:`closed_form_report`. Degenerate (constant) spectra
    give ``(0, 0)``.
    """
    if ms.degenerate:
        return 0.0, 0.0
    d, cv, g, k = ms.d_count, ms.cv, ms.gamma, ms.kappa
    c1 = d * cv**2 / (1.0 + cv**2)
    num = d * cv**4 * (k - g**2 - 1.0)
    if form == "published":
        den = (k - g**2) * cv**4 + (k - 3.0 - 2.0 * g) * cv**3 - 2.0 * g * cv + 1.0
    elif form == "exact":
        den = (k - g**2) * cv**4 - 2.0 * g * cv**3 + (k - 3.0) * cv**2 + 2.0 * g * cv + 1.0
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(c1), float(num / den)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)


def closed_form_report(ms: MomentSet) -> dict[str, float]:
    """Compare both closed forms with the Hankel route for L = 1, 2."""
    h1 = hankel_bound(ms, 1).c_l
    h2 = hankel_bound(ms, 2).c_l if ms.d_count >= 1 else 0.0
    c1p, c2p = closed_form_c1_c2(ms, "published")
    _, c2e = closed_form_c1_c2(ms, "exact")
    return {
        "hankel_c1": h1,
        "hankel_c2": h2,
        "closed_c1": c1p,
        "published_c2": c2p,
        "exact_c2": c2e,
        "rel_err_c1": _rel(c1p, h1),
        "rel_err_published_c2": _rel(c2p, h2),
        "rel_err_exact_c2": _rel(c2e, h2),
    }
