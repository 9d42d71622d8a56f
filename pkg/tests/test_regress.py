import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lsm_stability import (
    BasisSet,
    InvalidArgumentError,
    RankDeficientError,
    SingularSystemError,
    condition_number,
    design_matrix,
    gram_at_zero,
    simulate,
    singular_values,
    solve,
    solve_normal_equations,
    solve_qr,
    solve_svd,
)
from lsm_stability import SdeModel, TimeGrid
from lsm_stability.regress import Solver, apply_qt, householder_qr

from _oracles import GRADES, clustered_quadratic, random_well_conditioned

INF = float("inf")
OVERDETERMINED = (np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), np.array([1.0, 1.0, 2.0]))


def test_kappa_identity():
    assert condition_number(np.eye(2)) == 1.0


def test_kappa_diagonal():
    assert condition_number(np.array([[3.0, 0.0], [0.0, 1.0]])) == pytest.approx(3.0, rel=1e-15)


def test_kappa_identical_rows_is_infinite():
    assert condition_number(np.array([[1.0, 2.0], [1.0, 2.0]])) == INF


def test_kappa_zero_matrix_rejected():
    with pytest.raises(InvalidArgumentError):
        condition_number(np.zeros((3, 2)))


def test_kappa_single_column():
    assert condition_number(np.array([[2.0], [5.0], [-1.0]])) == 1.0


def test_singular_values_identity():
    assert singular_values(np.eye(3)).tolist() == [1.0, 1.0, 1.0]


def test_singular_values_rank_one_rows():
    f = np.array([1.0, 2.0, 4.0])
    s = singular_values(np.tile(f, (7, 1)))
    assert s[0] == pytest.approx(np.sqrt(7 * f @ f), rel=1e-14)
    assert np.all(s[1:] < 1e-13)


def test_singular_values_all_ones():
    assert singular_values(np.ones((2, 2))) == pytest.approx([2.0, 0.0], abs=1e-15)


def test_singular_values_descending_and_match_gram_eigenvalues():
    A = np.random.default_rng(1).standard_normal((30, 4))
    s = singular_values(A)
    assert np.all(np.diff(s) <= 0)
    np.testing.assert_allclose(s**2, np.sort(np.linalg.eigvalsh(A.T @ A))[::-1], rtol=1e-12)


def test_gram_at_zero_examples():
    assert gram_at_zero(BasisSet("monomial", 2), 1.0).tolist() == [[1.0, 1.0], [1.0, 1.0]]
    g = gram_at_zero(BasisSet("monomial", 2), 2.0)
    assert g.tolist() == [[1.0, 2.0], [2.0, 4.0]]
    assert np.linalg.eigvalsh(g) == pytest.approx([0.0, 5.0], abs=1e-14)
    assert np.linalg.eigvalsh(gram_at_zero(BasisSet("monomial", 3), 1.0)) == pytest.approx([0, 0, 3], abs=1e-14)


def test_gram_at_zero_requires_nonzero_basis():
    # f_1 = 1 for every family, so only a degenerate rescale can make the sum vanish
    with pytest.raises(InvalidArgumentError):
        gram_at_zero(BasisSet("monomial", 2), float("nan"))


@pytest.mark.parametrize("family", ["monomial", "laguerre", "legendre", "chebyshev", "hermite"])
def test_gram_at_zero_times_n_matches_design_matrix(family):
    basis = BasisSet(family, 4)
    ps = simulate(SdeModel(x0=1.7), TimeGrid(1.0, 3), 250, seed=0)
    A = design_matrix(basis, ps, 0).entries
    np.testing.assert_allclose(250 * gram_at_zero(basis, 1.7), A.T @ A, rtol=1e-12)


@pytest.mark.parametrize("fn", [solve_normal_equations, solve_qr, solve_svd])
def test_identity_system(fn):
    sol = fn(np.eye(2), [1.0, 2.0])
    assert sol.coefficients == pytest.approx([1.0, 2.0], abs=1e-15)
    assert sol.residual_norm == pytest.approx(0.0, abs=1e-15)
    assert sol.effective_rank == 2 and sol.kappa == 1.0


@pytest.mark.parametrize("fn", [solve_normal_equations, solve_qr, solve_svd])
def test_consistent_overdetermined_system(fn):
    A, b = OVERDETERMINED
    sol = fn(A, b)
    assert sol.coefficients == pytest.approx([1.0, 1.0], rel=1e-14)
    assert sol.residual_norm < 1e-14
    assert np.allclose(A @ sol.coefficients, b)


def test_normal_equations_singular():
    with pytest.raises(SingularSystemError) as info:
        solve_normal_equations(np.ones((2, 2)), [3.0, -1.0])
    assert info.value.kappa == INF


def test_qr_rank_deficient():
    with pytest.raises(RankDeficientError) as info:
        solve_qr(np.ones((3, 2)), np.ones(3))
    assert info.value.kappa == INF


@pytest.mark.parametrize("fn, exc", [(solve_normal_equations, SingularSystemError), (solve_qr, RankDeficientError)])
def test_underdetermined_is_a_solver_failure(fn, exc):
    with pytest.raises(exc):
        fn(np.array([[1.0, 2.0, 3.0]]), [1.0])


def test_svd_minimum_norm_on_rank_one():
    sol = solve_svd(np.ones((2, 2)), [1.0, 1.0])
    assert sol.coefficients == pytest.approx([0.5, 0.5], rel=1e-14)
    assert sol.effective_rank == 1
    assert sol.kappa == INF
    # in the row space, i.e. orthogonal to the null vector (1, -1)
    assert sol.coefficients @ np.array([1.0, -1.0]) == pytest.approx(0.0, abs=1e-15)


def test_svd_overdetermined_rank():
    sol = solve_svd(*OVERDETERMINED)
    assert sol.effective_rank == 2


def test_svd_zero_matrix():
    sol = solve_svd(np.zeros((3, 2)), [1.0, 2.0, 3.0])
    assert sol.effective_rank == 0 and sol.coefficients.tolist() == [0.0, 0.0]


def test_svd_tolerance_controls_rank():
    A = np.diag([1.0, 1e-6])
    assert solve_svd(A, [1.0, 1.0]).effective_rank == 2
    loose = solve_svd(A, [1.0, 1.0], rank_tolerance=1e-3)
    assert loose.effective_rank == 1
    assert loose.coefficients == pytest.approx([1.0, 0.0])


def test_shape_mismatch():
    with pytest.raises(InvalidArgumentError):
        solve_qr(np.eye(3), [1.0, 2.0])


def test_solve_dispatch():
    A, b = OVERDETERMINED
    for name in ("normal", "qr", "svd"):
        assert solve(A, b, name).solver is Solver(name)


def test_householder_factorization():
    A = np.random.default_rng(2).standard_normal((9, 4))
    V, R = householder_qr(A)
    assert np.allclose(np.tril(R, -1), 0.0)
    # Q^T A = [R; 0]
    qta = np.column_stack([apply_qt(V, A[:, j]) for j in range(4)])
    np.testing.assert_allclose(qta[:4], R, atol=1e-13)
    np.testing.assert_allclose(qta[4:], 0.0, atol=1e-13)
    np.testing.assert_allclose(np.abs(np.diag(R)), np.abs(np.diag(np.linalg.qr(A)[1])), rtol=1e-12)


def test_qr_matches_lapack_lstsq():
    rng = np.random.default_rng(3)
    A, b = rng.standard_normal((50, 5)), rng.standard_normal(50)
    ref = np.linalg.lstsq(A, b, rcond=None)[0]
    np.testing.assert_allclose(solve_qr(A, b).coefficients, ref, rtol=1e-12)


def test_solver_agreement_on_random_well_conditioned():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        A = random_well_conditioned(rng)
        b = rng.standard_normal(200)
        assert condition_number(A) <= 1e3 * (1 + 1e-9)
        x_n = solve_normal_equations(A, b).coefficients
        x_q = solve_qr(A, b).coefficients
        x_s = solve_svd(A, b).coefficients
        for x, y in [(x_n, x_q), (x_n, x_s), (x_q, x_s)]:
            np.testing.assert_allclose(x, y, rtol=1e-8)


matrices = arrays(
    np.float64,
    st.tuples(st.integers(1, 12), st.integers(1, 4)),
    elements=st.integers(-100_000, 100_000).map(lambda i: i / 1000),
)


def _finite_kappa_pair(A, c):
    if not np.any(A):
        return None
    k1, k2 = condition_number(A), condition_number(c * A)
    if k1 == INF or k2 == INF:
        # sigma_min right at the truncation threshold may round either way after scaling
        s = singular_values(A)
        assert s[-1] <= 1.01 * np.finfo(float).eps * max(A.shape) * s[0]
        return None
    return k1, k2


@settings(max_examples=200, deadline=None)
@given(A=matrices, power=st.integers(-10, 10), sign=st.sampled_from([1.0, -1.0]))
def test_kappa_scale_invariance_exact_scaling(A, power, sign):
    pair = _finite_kappa_pair(A, sign * 2.0**power)
    if pair:
        assert pair[1] == pytest.approx(pair[0], rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(A=matrices, c=st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3))
def test_kappa_scale_invariance(A, c):
    pair = _finite_kappa_pair(A, c)
    if pair is None:
        return
    k1, k2 = pair
    # rounding c*A moves sigma_min by ~eps*sigma_max, i.e. kappa by a relative ~kappa*eps
    tol = 1e-12 if k1 <= 1e3 else 10 * k1 * np.finfo(float).eps * max(A.shape)
    assert k2 == pytest.approx(k1, rel=tol)


@settings(max_examples=200, deadline=None)
@given(A=matrices)
def test_singular_values_frobenius(A):
    s = singular_values(A)
    fro2 = float(np.sum(A * A))
    assert float(np.sum(s * s)) == pytest.approx(fro2, rel=1e-10, abs=1e-300)


def test_kappa_is_at_least_one_or_infinite():
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = condition_number(rng.standard_normal((rng.integers(1, 20), rng.integers(1, 5))))
        assert k >= 1.0


def _errors(delta):
    A, b = clustered_quadratic(delta)
    ref = solve_svd(A, b).coefficients
    err = lambda x: np.linalg.norm(x - ref) / np.linalg.norm(ref)
    try:
        normal = err(solve_normal_equations(A, b).coefficients)
    except SingularSystemError:
        normal = INF
    return condition_number(A), normal, err(solve_qr(A, b).coefficients)


def test_normal_equations_degrade_with_kappa():
    rows = [_errors(d) for d in GRADES]
    kappas = [r[0] for r in rows]
    normal_err = [r[1] for r in rows]
    assert all(np.diff(kappas) > 0)
    assert all(np.diff(normal_err) > 0)
    # mildest grade: everyone is accurate
    assert normal_err[0] < 1e-3 and rows[0][2] < 1e-9
    # each grade costs normal equations about kappa^2 growth, QR about kappa
    assert normal_err[2] / rows[2][2] >= 10


def test_svd_succeeds_where_normal_equations_fail():
    A, b = clustered_quadratic(GRADES[-1])
    with pytest.raises(SingularSystemError):
        solve_normal_equations(A, b)
    sol = solve_svd(A, b)
    assert sol.effective_rank == 3
    np.testing.assert_allclose(sol.coefficients, solve_qr(A, b).coefficients, rtol=1e-3)
