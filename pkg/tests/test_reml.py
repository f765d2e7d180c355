import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mmbspline import (
    CURRIE_DURBAN,
    MMB,
    DimensionError,
    assemble,
    build_D,
    build_G,
    build_spec,
    coefficients,
    direct_pspline_solve,
    eval_basis,
    profile_loglik,
)
from mmbspline.penalty import band_to_dense
from mmbspline.reml import band_width_for_degree


def instance(seed, n=120, nseg=12, degree=2):
    rng = np.random.default_rng(seed)
    spec = build_spec(0.0, 1.0, nseg, degree)
    x = rng.uniform(0, 1, n)
    y = np.sin(2 * np.pi * x) + 0.3 * rng.normal(size=n)
    return spec, x, y


def dense_designs(spec, x, kind):
    b = eval_basis(spec, x).toarray()
    d = build_D(spec.m).toarray().astype(float)
    dd = d @ d.T
    if kind == MMB:
        return b @ build_G(spec.m).toarray(), b @ d.T, dd @ dd
    return b @ build_G(spec.m).toarray(), b @ d.T @ np.linalg.inv(dd), np.eye(spec.m - 2)


def marginal_reml(y, X, Z, Q, lam):
    """Restricted likelihood of y ~ N(Xb, s2 (I + Z (lam Q)^-1 Z')), s2 profiled out."""
    n, p = X.shape
    H = np.eye(n) + Z @ np.linalg.solve(lam * Q, Z.T)
    hinv_x = np.linalg.solve(H, X)
    hinv_y = np.linalg.solve(H, y)
    beta = np.linalg.solve(X.T @ hinv_x, X.T @ hinv_y)
    r = y - X @ beta
    s2 = r @ np.linalg.solve(H, r) / (n - p)
    return -0.5 * (
        np.linalg.slogdet(H)[1] + np.linalg.slogdet(X.T @ hinv_x)[1] + (n - p) * np.log(s2) + (n - p)
    )


def dense_mme(y, X, Z, Q, lam):
    c = np.block([[Z.T @ Z + lam * Q, Z.T @ X], [X.T @ Z, X.T @ X]])
    sol = np.linalg.solve(c, np.concatenate((Z.T @ y, X.T @ y)))
    return sol, np.linalg.slogdet(c)[1]


@pytest.mark.parametrize("degree", [2, 3])
def test_mmb_bandwidth(degree):
    spec, x, y = instance(0, n=300, nseg=40, degree=degree)
    blocks = assemble(eval_basis(spec, x), y, spec, MMB)
    width = band_width_for_degree(degree)
    assert width == max(degree + 2, 4)
    assert blocks.ztz.shape == (width + 1, spec.m - 2)
    dense = blocks.coefficient_matrix(1.0)[: spec.m - 2, : spec.m - 2]
    i, j = np.nonzero(dense)
    assert np.max(np.abs(i - j)) <= width


def test_mmb_blocks_match_dense_products():
    spec, x, y = instance(1, n=50, nseg=8)
    X, Z, Q = dense_designs(spec, x, MMB)
    blocks = assemble(eval_basis(spec, x), y, spec, MMB)
    assert_allclose(band_to_dense(blocks.ztz), Z.T @ Z, atol=1e-12)
    assert_allclose(blocks.ztx, Z.T @ X, atol=1e-12)
    assert_allclose(blocks.xtx, X.T @ X, atol=1e-12)
    assert_allclose(blocks.zty, Z.T @ y, atol=1e-12)
    assert_allclose(blocks.xty, X.T @ y, atol=1e-12)
    assert_allclose(band_to_dense(blocks.q_band), Q, atol=0)
    assert blocks.yty == pytest.approx(y @ y, rel=1e-14)


def test_cd_blocks_match_dense_products():
    spec, x, y = instance(2, n=60, nseg=10)
    X, Z, _ = dense_designs(spec, x, CURRIE_DURBAN)
    blocks = assemble(eval_basis(spec, x), y, spec, CURRIE_DURBAN)
    assert_allclose(blocks.ztz, Z.T @ Z, atol=1e-10)
    assert_allclose(blocks.ztx, Z.T @ X, atol=1e-10)
    assert_allclose(blocks.zty, Z.T @ y, atol=1e-10)


@pytest.mark.parametrize("kind", [MMB, CURRIE_DURBAN])
@pytest.mark.parametrize("lam", [0.01, 1.0, 100.0])
def test_solution_matches_dense_mme(kind, lam):
    spec, x, y = instance(3, n=40, nseg=6)
    X, Z, Q = dense_designs(spec, x, kind)
    point = profile_loglik(assemble(eval_basis(spec, x), y, spec, kind), lam)
    sol, logdet = dense_mme(y, X, Z, Q, lam)
    assert_allclose(np.concatenate((point.u_hat, point.b_hat)), sol, rtol=1e-10, atol=1e-10)
    assert point.log_det_C == pytest.approx(logdet, abs=1e-8)


@pytest.mark.parametrize("kind", [MMB, CURRIE_DURBAN])
@pytest.mark.parametrize("lam", [1e-3, 0.1, 1.0, 30.0, 1e3])
def test_loglik_matches_marginal_likelihood(kind, lam):
    spec, x, y = instance(4, n=80, nseg=10)
    X, Z, Q = dense_designs(spec, x, kind)
    point = profile_loglik(assemble(eval_basis(spec, x), y, spec, kind), lam)
    assert point.loglik == pytest.approx(marginal_reml(y, X, Z, Q, lam), abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nseg=st.integers(3, 30), degree=st.sampled_from([2, 3]),
       log_lam=st.floats(-3, 3))
def test_transformations_agree(seed, nseg, degree, log_lam):
    spec, x, y = instance(seed, n=100, nseg=nseg, degree=degree)
    basis = eval_basis(spec, x)
    lam = 10.0**log_lam
    pm = profile_loglik(assemble(basis, y, spec, MMB), lam)
    pc = profile_loglik(assemble(basis, y, spec, CURRIE_DURBAN), lam)
    direct = direct_pspline_solve(basis, y, build_D(spec.m), lam)
    scale = np.max(np.abs(direct))
    assert np.max(np.abs(coefficients(pm) - direct)) <= 1e-8 * scale
    assert np.max(np.abs(coefficients(pc) - direct)) <= 1e-8 * scale
    assert pm.loglik - pc.loglik == pytest.approx(0.0, abs=1e-6)
    assert pm.sigma2_hat == pytest.approx(pc.sigma2_hat, rel=1e-8)


def test_likelihood_difference_constant_in_lambda():
    spec, x, y = instance(5, n=200, nseg=30)
    basis = eval_basis(spec, x)
    bm = assemble(basis, y, spec, MMB)
    bc = assemble(basis, y, spec, CURRIE_DURBAN)
    diffs = [profile_loglik(bm, lam).loglik - profile_loglik(bc, lam).loglik for lam in np.logspace(-4, 4, 17)]
    assert np.ptp(diffs) < 1e-6


def test_sigma2_increases_with_lambda():
    spec, x, y = instance(6, n=200, nseg=25)
    blocks = assemble(eval_basis(spec, x), y, spec, MMB)
    s2 = [profile_loglik(blocks, lam).sigma2_hat for lam in np.logspace(-3, 5, 20)]
    assert np.all(np.diff(s2) > 0)


@pytest.mark.parametrize("kind", [MMB, CURRIE_DURBAN])
def test_linear_data_is_fitted_exactly_at_large_lambda(kind):
    spec = build_spec(0.0, 1.0, 15)
    x = np.random.default_rng(7).uniform(0, 1, 100)
    y = 2.0 + 3.0 * x
    point = profile_loglik(assemble(eval_basis(spec, x), y, spec, kind), 1e8)
    fitted = eval_basis(spec, x).dot(coefficients(point))
    assert np.max(np.abs(fitted - y)) < 1e-8
    assert point.degenerate
    assert point.sigma2_hat == 0.0
    assert np.isfinite(point.loglik)


def test_zero_response():
    spec = build_spec(0.0, 1.0, 10)
    x = np.linspace(0, 1, 50)
    point = profile_loglik(assemble(eval_basis(spec, x), np.zeros(50), spec, MMB), 1.0)
    assert_allclose(point.b_hat, 0.0, atol=0)
    assert_allclose(point.u_hat, 0.0, atol=0)
    assert point.degenerate and point.sigma2_hat == 0.0


def test_constant_response_coefficients():
    # a constant lies in the null space of D, so a is constant for every lambda
    spec = build_spec(0.0, 1.0, 10)
    x = np.linspace(0, 1, 50)
    for lam in (0.01, 1.0, 100.0):
        point = profile_loglik(assemble(eval_basis(spec, x), np.full(50, 4.0), spec, MMB), lam)
        assert_allclose(coefficients(point), 4.0, atol=1e-10)
        assert_allclose(point.b_hat, [4.0, 0.0], atol=1e-10)


def test_direct_solve_linear_data():
    spec = build_spec(0.0, 2.0, 8)
    x = np.linspace(0, 2, 40)
    basis = eval_basis(spec, x)
    a = direct_pspline_solve(basis, 1.0 - 0.5 * x, build_D(spec.m), 10.0)
    # quadratic B-spline coefficients of a line are the line at the knot averages
    grev = spec.x_min + (np.arange(spec.m) - 0.5) * spec.h
    assert_allclose(a, 1.0 - 0.5 * grev, atol=1e-10)


def test_coefficients_kind_mismatch():
    spec, x, y = instance(8, n=40, nseg=5)
    point = profile_loglik(assemble(eval_basis(spec, x), y, spec, MMB), 1.0)
    with pytest.raises(ValueError):
        coefficients(point, CURRIE_DURBAN)
    assert_allclose(coefficients(point, "sparse"), coefficients(point))


def test_determinant_identity_across_lambda():
    # log|C| - (m - p) log lam - log|Q| equals log|H| + log|X'H^-1 X| for both kinds
    spec, x, y = instance(9, n=60, nseg=8)
    for kind in (MMB, CURRIE_DURBAN):
        X, Z, Q = dense_designs(spec, x, kind)
        blocks = assemble(eval_basis(spec, x), y, spec, kind)
        for lam in (1e-3, 1.0, 1e3):
            H = np.eye(60) + Z @ np.linalg.solve(lam * Q, Z.T)
            expected = np.linalg.slogdet(H)[1] + np.linalg.slogdet(X.T @ np.linalg.solve(H, X))[1]
            got = profile_loglik(blocks, lam).log_det_C - (spec.m - 2) * np.log(lam) - blocks.log_det_Q
            assert got == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("lam", [0.0, -1.0, np.inf, np.nan])
def test_invalid_lambda(lam):
    spec, x, y = instance(10, n=30, nseg=4)
    blocks = assemble(eval_basis(spec, x), y, spec, MMB)
    with pytest.raises(ValueError):
        profile_loglik(blocks, lam)


def test_assemble_input_checks():
    spec = build_spec(0.0, 1.0, 5)
    basis = eval_basis(spec, np.linspace(0, 1, 10))
    with pytest.raises(DimensionError):
        assemble(basis, np.ones(9), spec)
    with pytest.raises(ValueError):
        assemble(basis, np.full(10, np.nan), spec)
    with pytest.raises(DimensionError):
        assemble(basis, np.ones(10), build_spec(0.0, 1.0, 6))
    with pytest.raises(ValueError):
        assemble(basis, np.ones(10), spec, "qr")
