from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plsbound.errors import DegenerateDirectionError, NotCenteredError
from plsbound.estimators import ols_fit
from plsbound.model import Dataset
from plsbound.nipals import deflated_by_projectors, nipals_fit

from . import oracles
from .conftest import random_problem
from .identities import violations


def test_running_example_one_component(toy_centered):
    exact = oracles.krylov_pls([[1, 0], [0, 2]], [1, 2], 1)
    assert exact == [F(17, 65), F(68, 65)]
    fit = nipals_fit(toy_centered, 1)
    np.testing.assert_allclose(fit.coefficient_path.at(1), [17 / 65, 68 / 65], atol=1e-12)


def test_running_example_two_components_is_ols(toy_centered):
    fit = nipals_fit(toy_centered, 2)
    np.testing.assert_allclose(fit.coefficient_path.at(2), [1.0, 1.0], atol=1e-12)


def test_orthonormal_columns_first_column_response():
    rng = np.random.default_rng(5)
    z = rng.standard_normal((40, 4))
    # columns of Q are combinations of centered columns, so Q is centered too
    q, _ = np.linalg.qr(z - z.mean(axis=0))
    d = Dataset(x=q, y=q[:, 0].copy())
    fit = nipals_fit(d, 1)
    e1 = np.eye(4)[:, 0]
    np.testing.assert_allclose(fit.w_mat[:, 0], e1, atol=1e-12)
    np.testing.assert_allclose(fit.t_mat[:, 0], q @ e1, atol=1e-12)
    np.testing.assert_allclose(fit.r_mat[:, 0], e1, atol=1e-12)
    np.testing.assert_allclose(fit.coefficient_path.at(1), e1, atol=1e-12)
    # deflation removes exactly the first column
    expected = q - np.outer(q[:, 0], e1)
    np.testing.assert_allclose(fit.x_deflated, expected, atol=1e-12)


def test_rotation_single_component():
    d = random_problem(25, 6, 2)
    fit = nipals_fit(d, 1)
    w, p = fit.w_mat[:, 0], fit.p_mat[:, 0]
    np.testing.assert_allclose(fit.r_mat[:, 0], w / (p @ w), rtol=1e-12)


def test_rotation_identity_30_dims():
    d = random_problem(300, 30, 11)
    fit = nipals_fit(d, 5)
    assert np.linalg.norm(d.x @ fit.r_mat - fit.t_mat) <= 1e-8 * np.linalg.norm(fit.t_mat)


def test_full_extraction_empties_x():
    d = random_problem(50, 5, 3)
    fit = nipals_fit(d, 5)
    assert np.linalg.norm(fit.x_deflated) <= 1e-10 * np.linalg.norm(d.x)
    np.testing.assert_allclose(fit.coefficient_path.at(5), ols_fit(d), rtol=1e-9)


def test_y_residual_norms_nonincreasing():
    fit = nipals_fit(random_problem(60, 8, 4), 8)
    assert np.all(np.diff(fit.y_residual_norms) <= 1e-12 * fit.y_residual_norms[0])


def test_deflated_by_projectors_matches_y_residual():
    d = random_problem(40, 5, 8)
    fit = nipals_fit(d, 3)
    y_l = deflated_by_projectors(fit.t_mat, d.y)
    assert np.linalg.norm(y_l) == pytest.approx(fit.y_residual_norms[-1], rel=1e-10)


def test_truncates_when_krylov_space_stops_growing():
    # two distinct eigenvalues: the third direction does not exist
    x = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 2.0]])
    x = np.vstack([x, -x])
    y = x @ np.array([1.0, 1.0, 1.0])
    d = Dataset(x=x, y=y)
    fit = nipals_fit(d, 3)
    assert fit.n_components == 2 and fit.truncated
    assert fit.coefficient_path.stop_reason == "degenerate direction"
    np.testing.assert_allclose(fit.coefficient_path.at(3), [1.0, 1.0, 1.0], atol=1e-12)
    with pytest.raises(DegenerateDirectionError):
        nipals_fit(d, 3, strict=True)


def test_rejects_uncentered(toy):
    with pytest.raises(NotCenteredError):
        nipals_fit(toy, 1)


def test_rejects_bad_l(toy_centered):
    with pytest.raises(ValueError):
        nipals_fit(toy_centered, 3)


@given(
    st.integers(min_value=2, max_value=8),
    st.integers(min_value=0, max_value=10_000),
    st.data(),
)
@settings(max_examples=40, deadline=None)
def test_structural_identities_hold(dim, seed, data):
    d = random_problem(4 * dim + 3, dim, seed)
    l = data.draw(st.integers(min_value=1, max_value=dim))
    assert violations(nipals_fit(d, l), d) == {}
