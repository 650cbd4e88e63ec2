import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from jordan_spectra.errors import NoConvergence, SingularMatrix
from jordan_spectra.grushin import z_vector
from jordan_spectra.jordan import jordan_block
from jordan_spectra.linalg import (TOL_EIG, TOL_SOLVE, eigen_residuals, eigenvalues, hessenberg,
                                   hs_norm, match_multisets, multiset_distance, operator_norm,
                                   solve_linear)

from conftest import inverse_iteration_residual, random_complex


def test_hs_norm_examples():
    assert hs_norm(np.eye(3)) == pytest.approx(np.sqrt(3))
    assert hs_norm(np.zeros((4, 4))) == 0.0
    assert hs_norm(z_vector(0.5, 3).entries) == pytest.approx(1.3125, rel=1e-14)


def test_solve_examples():
    b = np.array([1 + 2j, -3j, 0.5])
    np.testing.assert_allclose(solve_linear(np.eye(3), b), b)
    np.testing.assert_allclose(solve_linear(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])


def test_solve_recovers_constructed_solution(np_rng):
    m = random_complex(np_rng, 20, 20) + 10 * np.eye(20)
    x0 = random_complex(np_rng, 20)
    x = solve_linear(m, m @ x0)
    assert np.linalg.norm(x - x0) <= 1e-10 * np.linalg.norm(x0)


def test_solve_needs_pivoting():
    m = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(solve_linear(m, [3.0, 5.0]), [5.0, 3.0])


def test_solve_singular():
    with pytest.raises(SingularMatrix):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])


def test_solve_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_linear(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        solve_linear(np.array([[np.nan, 0], [0, 1]]), [1.0, 1.0])


@given(st.integers(1, 12), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_solve_backward_residual(n, seed):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, n, n)
    b = random_complex(rng, n)
    try:
        x = solve_linear(m, b)
    except SingularMatrix:
        return
    assert np.linalg.norm(m @ x - b) <= TOL_SOLVE * hs_norm(m) * np.linalg.norm(x)


def test_eigenvalue_examples():
    np.testing.assert_allclose(sorted(eigenvalues(np.eye(2)).real), [1.0, 1.0])
    companion = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert multiset_distance(eigenvalues(companion), [1.0, -1.0]) < 1e-14
    np.testing.assert_array_equal(eigenvalues(jordan_block(5)), np.zeros(5))
    a = jordan_block(4)
    a[3, 0] = 1 / 16
    assert multiset_distance(eigenvalues(a), [0.5, 0.5j, -0.5, -0.5j]) < 1e-12


def test_eigenvalues_of_scalar_and_triangular():
    assert eigenvalues(np.array([[3 - 1j]]))[0] == 3 - 1j
    t = np.triu(np.arange(1, 17).reshape(4, 4)).astype(complex)
    assert multiset_distance(eigenvalues(t), [1, 6, 11, 16]) < 1e-12


def test_eigenvalues_agree_with_lapack(np_rng):
    for n in (3, 17, 60):
        m = random_complex(np_rng, n, n)
        assert multiset_distance(eigenvalues(m), np.linalg.eigvals(m)) < 1e-10


def test_iteration_cap_raises(monkeypatch):
    from jordan_spectra import linalg
    monkeypatch.setattr(linalg, "QR_MAX_ITER", 0)
    with pytest.raises(NoConvergence) as info:
        eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert info.value.index == 1


@given(arrays(np.float64, (2, 6, 6), elements=st.floats(-10, 10)), st.booleans())
@settings(max_examples=60, deadline=None)
def test_eigen_residual_certificate(parts, balance):
    m = parts[0] + 1j * parts[1]
    lams = eigenvalues(m, balance=balance)
    scale = max(hs_norm(m), 1e-300)
    for lam in lams:
        # sigma_min by SVD, an oracle independent of both kernels
        smin = np.linalg.svd(m - lam * np.eye(6), compute_uv=False)[-1]
        assert smin <= TOL_EIG * scale + 1e-300


def test_residuals_by_inverse_iteration(np_rng):
    m = random_complex(np_rng, 40, 40)
    lams = eigenvalues(m)
    for lam in lams:
        assert inverse_iteration_residual(m, lam) <= TOL_EIG * hs_norm(m)
    assert np.all(eigen_residuals(m, lams) <= TOL_EIG * hs_norm(m))


def test_trace_and_determinant_conservation(np_rng):
    n = 50
    m = random_complex(np_rng, n, n) / np.sqrt(n) + 2 * np.eye(n)
    lams = eigenvalues(m)
    assert abs(lams.sum() - np.trace(m)) <= 1e-8 * hs_norm(m) * n
    det = np.linalg.det(m)
    assert abs(np.prod(lams) - det) <= 1e-6 * abs(det)


def test_similarity_invariance(np_rng):
    n = 12
    m = random_complex(np_rng, n, n)
    p = np.eye(n) + 0.2 * random_complex(np_rng, n, n) / np.sqrt(n)
    conj = p @ m @ np.linalg.inv(p)
    assert multiset_distance(eigenvalues(conj), eigenvalues(m)) <= TOL_EIG * hs_norm(m)


def test_hessenberg_is_unitary_similarity(np_rng):
    m = random_complex(np_rng, 9, 9)
    h = hessenberg(m)
    assert np.all(np.tril(h, -2) == 0)
    assert hs_norm(h) == pytest.approx(hs_norm(m), rel=1e-13)
    assert np.trace(h) == pytest.approx(np.trace(m), rel=1e-13)


def test_operator_norm(np_rng):
    m = random_complex(np_rng, 7, 5)
    assert operator_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-12)
    assert operator_norm(jordan_block(6)) == pytest.approx(1.0)


def test_greedy_matching():
    d = match_multisets([0, 1, 2j], [2j + 1e-3, 0, 1])
    assert sorted(d)[-1] == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        match_multisets([1, 2], [1])


@pytest.mark.parametrize("scale", [1e-300, 1e-160, 1.0, 1e160, 1e300])
def test_hs_norm_is_scale_safe(scale):
    m = np.full((3, 3), 1.0 + 1.0j) * scale
    assert hs_norm(m) == pytest.approx(np.sqrt(18) * scale, rel=1e-14)


@pytest.mark.parametrize("balance", [False, True])
def test_eigenvalues_of_graded_matrix(balance):
    # one unit entry on a floor of 1e-215, so shift discriminants would underflow unscaled
    m = np.full((6, 6), 3.9e-215 * (1 + 1j))
    m[3, 0] = 1.0
    lams = eigenvalues(m, balance=balance)
    assert lams.size == 6
    smin = [np.linalg.svd(m - lam * np.eye(6), compute_uv=False)[-1] for lam in lams]
    assert max(smin) <= TOL_EIG * hs_norm(m)
