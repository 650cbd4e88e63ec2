import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordan_spectra.jordan import (PerturbationSpec, build, error_term, jordan_block,
                                   rank_one_oracle_eigenvalues, rank_one_q, regime_flags,
                                   regime_report, rotation_conjugate)
from jordan_spectra.linalg import eigenvalues, hs_norm, multiset_distance, operator_norm


def test_jordan_block_small():
    np.testing.assert_array_equal(jordan_block(2), [[0, 1], [0, 0]])
    np.testing.assert_array_equal(jordan_block(1), [[0]])
    with pytest.raises(ValueError):
        jordan_block(0)


@pytest.mark.parametrize("n", [2, 5, 40])
def test_jordan_block_norms(n):
    a = jordan_block(n)
    assert hs_norm(a) == pytest.approx(np.sqrt(n - 1))
    assert np.linalg.norm(a, 2) == pytest.approx(1.0)
    assert operator_norm(a) == pytest.approx(1.0)


def test_rank_one_build():
    op = build(PerturbationSpec(n=3, delta=0.1, kind="rank_one"))
    expected = np.zeros((3, 3))
    expected[2, 0] = 1.0
    np.testing.assert_array_equal(op.q, expected)
    np.testing.assert_array_equal(op.a_delta, jordan_block(3) + 0.1 * expected)
    assert op.accepted


def test_spec_validation():
    with pytest.raises(ValueError):
        PerturbationSpec(n=4, delta=0.0)
    with pytest.raises(ValueError):
        PerturbationSpec(n=4, delta=1.0)
    with pytest.raises(ValueError):
        PerturbationSpec(n=1, delta=0.1)
    with pytest.raises(ValueError):
        PerturbationSpec(n=4, delta=0.1, kind="bernoulli")


def test_build_is_deterministic():
    spec = PerturbationSpec(n=8, delta=1e-3, master_seed=42, trial_index=7)
    np.testing.assert_array_equal(build(spec).a_delta, build(spec).a_delta)
    other = PerturbationSpec(n=8, delta=1e-3, master_seed=42, trial_index=8)
    assert not np.array_equal(build(spec).q, build(other).q)


def test_a_delta_is_entrywise_sum():
    op = build(PerturbationSpec(n=6, delta=0.01, master_seed=1))
    np.testing.assert_array_equal(op.a_delta, jordan_block(6) + 0.01 * op.q)
    assert op.accepted == (hs_norm(op.q) <= 2.0 * 6)


def test_oracle_examples():
    assert multiset_distance(rank_one_oracle_eigenvalues(4, 1 / 16), [0.5, 0.5j, -0.5, -0.5j]) < 1e-15
    np.testing.assert_allclose(rank_one_oracle_eigenvalues(1, 0.3), [0.3])
    assert multiset_distance(rank_one_oracle_eigenvalues(2, 0.25), [0.5, -0.5]) < 1e-15


@pytest.mark.parametrize("n", [4, 16, 64])
@pytest.mark.parametrize("delta", [1e-2, 1e-4])
def test_rank_one_matches_oracle(n, delta):
    op = build(PerturbationSpec(n=n, delta=delta, kind="rank_one"))
    err = multiset_distance(eigenvalues(op.a_delta), rank_one_oracle_eigenvalues(n, delta))
    assert err <= 1e-8


def test_rank_one_oracle_is_characteristic_root():
    # det(A0 + delta e_N e_1^* - z) = (-1)^N (z^N - delta), independently via numpy
    n, delta = 7, 0.3
    a = jordan_block(n) + delta * rank_one_q(n)
    for lam in rank_one_oracle_eigenvalues(n, delta):
        assert abs(np.linalg.det(a - lam * np.eye(n))) < 1e-12


def test_regime_examples():
    spec = PerturbationSpec(n=100, delta=1e-8)
    rep = regime_flags(spec, 0.6, q_norm=100.0)
    assert rep.neumann_ok
    assert rep.neumann_param == pytest.approx(2.5e-6)
    assert not regime_flags(PerturbationSpec(n=100, delta=1e-5), 0.3).theorem_ok
    assert regime_report(50, 1e-7, 50.0, 0.0).error_term == 1e-7 * 50 ** 3
    assert error_term(10, 0.01, 0.0) == 0.01 * 1000


def test_regime_default_norm_is_acceptance_radius():
    spec = PerturbationSpec(n=20, delta=1e-3, c1=2.0)
    assert regime_flags(spec, 0.5) == regime_flags(spec, 0.5, q_norm=40.0)
    with pytest.raises(ValueError):
        regime_flags(spec, 1.0)


@given(st.floats(-np.pi, np.pi), st.integers(2, 12), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_rotation_equivariance_matrix_identity(theta, n, seed):
    op = build(PerturbationSpec(n=n, delta=0.05, master_seed=seed))
    d = np.diag(np.exp(1j * theta * np.arange(1, n + 1)))
    lhs = np.exp(1j * theta) * d @ op.a_delta @ np.linalg.inv(d)
    rhs = jordan_block(n) + 0.05 * rotation_conjugate(op.q, theta)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


@pytest.mark.parametrize("theta", [0.3, 1.0, -2.2])
def test_rotation_equivariance_spectrum(theta):
    op = build(PerturbationSpec(n=10, delta=1e-2, master_seed=3))
    rotated = np.exp(1j * theta) * eigenvalues(op.a_delta)
    conj = eigenvalues(jordan_block(10) + 1e-2 * rotation_conjugate(op.q, theta))
    assert multiset_distance(rotated, conj) < 1e-9


def test_acceptance_rate():
    specs = [PerturbationSpec(n=20, delta=1e-3, master_seed=5, trial_index=i) for i in range(2000)]
    rate = np.mean([build(s).accepted for s in specs])
    assert rate >= 0.999
