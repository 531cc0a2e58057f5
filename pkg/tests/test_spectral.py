import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from anosov_domains import spectral
from anosov_domains.errors import EigenSolverError, SingularMatrixError
from anosov_domains.group import GroupPresentation, enumerate_ball
from anosov_domains.reps import ComposedFuchsian, schottky_rep, sym_power
from anosov_domains.spectral import (contragredient, eigen_magnitudes, g_omega_residual, sl_star_check,
                                     symspace_length, weak_unipotent_check)

from oracles import root_magnitudes


def rot(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


def test_magnitude_examples():
    np.testing.assert_allclose(eigen_magnitudes(rot(math.pi / 2)), [1, 1], rtol=1e-15)
    np.testing.assert_allclose(eigen_magnitudes(np.diag([2, 1, 0.5])), [2, 1, 0.5], rtol=1e-15)


def test_magnitudes_vs_characteristic_polynomial(rng):
    worst = 0.0
    for _ in range(200):
        A = rng.standard_normal((5, 5))
        got = eigen_magnitudes(A)
        ref = root_magnitudes(A)
        worst = max(worst, float(np.max(np.abs(got - ref) / ref)))
    assert worst <= 1e-8


def test_singular_input_raises():
    with pytest.raises(SingularMatrixError):
        eigen_magnitudes(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_non_finite_input_raises():
    with pytest.raises((EigenSolverError, ValueError)):
        eigen_magnitudes(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_complex_matrices():
    A = np.array([[1j, 1.0], [0.0, 2.0]])
    np.testing.assert_allclose(eigen_magnitudes(A), [2, 1])
    assert spectral.field_of(A) == "complex"
    assert spectral.field_of(np.eye(2)) == "real"


def test_sl_star_examples():
    assert sl_star_check(np.eye(3))
    assert sl_star_check(np.diag([2, 0.5]))
    assert not sl_star_check(2 * np.eye(2))
    # |det| = 1 with a non-real determinant is still in SL*
    assert sl_star_check(np.diag([1j, 1.0]))


def test_weak_unipotent_examples(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    assert weak_unipotent_check(Q)
    assert weak_unipotent_check(np.array([[1.0, 5.0], [0.0, 1.0]]))
    assert not weak_unipotent_check(np.diag([2, 0.5]))


def test_contragredient_examples(rng):
    np.testing.assert_array_equal(contragredient(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(contragredient(np.diag([2, 0.5])), np.diag([0.5, 2]))
    for _ in range(50):
        A = rng.standard_normal((4, 4))
        np.testing.assert_allclose(contragredient(contragredient(A)), A, atol=1e-12 * np.abs(A).max() * 10)
        lam = eigen_magnitudes(A)
        mu = eigen_magnitudes(contragredient(A))
        np.testing.assert_allclose(mu, 1 / lam[::-1], rtol=1e-9)


def test_contragredient_singular():
    with pytest.raises(SingularMatrixError):
        contragredient(np.zeros((2, 2)))


def test_g_omega_examples(rng):
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    for _ in range(20):
        A = rng.standard_normal((2, 2))
        A /= math.sqrt(abs(np.linalg.det(A)))
        if np.linalg.det(A) < 0:
            A[:, 0] *= -1
        assert g_omega_residual(A, J) <= 1e-12 * max(1.0, np.abs(A).max() ** 2)
    r = g_omega_residual(np.diag([2, 0.5]), np.eye(2))
    assert r == pytest.approx(np.linalg.norm(np.diag([1.5, -1.5])))
    with pytest.raises(ValueError):
        g_omega_residual(np.eye(2), np.eye(3))


def solve_omega(images):
    """Null vector of Omega A - A^-T Omega = 0 over all generator images."""
    d = images[0].shape[0]
    rows = []
    for A in images:
        Ait = np.linalg.inv(A).T
        rows.append(np.kron(np.eye(d), A.T) - np.kron(Ait, np.eye(d)))
    _, s, vt = np.linalg.svd(np.vstack(rows))
    return vt[-1].reshape(d, d), s


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_g_omega_for_symmetric_power_images(q):
    eta = schottky_rep()
    zeta = ComposedFuchsian(eta, q).zeta
    omega, s = solve_omega(zeta.images)
    assert s[-1] < 1e-10 < s[-2]
    if q % 2 == 0:
        np.testing.assert_allclose(omega, -omega.T, atol=1e-12)
    else:
        np.testing.assert_allclose(omega, omega.T, atol=1e-12)
    ball = enumerate_ball(zeta.presentation, 4)
    imgs, invs = zeta.ball_images(ball)
    worst = max(g_omega_residual(g, omega, h) / max(1.0, np.abs(g).max()) for g, h in zip(imgs, invs))
    assert worst <= 1e-8


def test_g_omega_zero_forces_palindromic_spectrum(rng):
    zeta = ComposedFuchsian(schottky_rep(), 4).zeta
    omega, _ = solve_omega(zeta.images)
    ball = enumerate_ball(zeta.presentation, 3)
    imgs, invs = zeta.ball_images(ball)
    for g, h in zip(imgs, invs):
        if g_omega_residual(g, omega, h) <= 1e-10 * max(1.0, np.abs(g).max()):
            lam = eigen_magnitudes(g, h)
            np.testing.assert_allclose(lam, 1 / lam[::-1], rtol=1e-9)


def test_symspace_examples():
    assert symspace_length(np.eye(3)) == 0
    assert symspace_length(np.diag([math.e, 1 / math.e])) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert symspace_length(np.diag([math.e ** 2, 1, math.e ** -2])) == pytest.approx(2 * math.sqrt(2), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_inverse_spectrum_reversed_reciprocal(seed, d):
    # generic matrices: a defective eigenvalue is only resolved to ~eps^(1/m)
    A = np.random.default_rng(seed).standard_normal((d, d))
    lam = eigen_magnitudes(A)
    mu = eigen_magnitudes(np.linalg.inv(A))
    np.testing.assert_allclose(mu, 1 / lam[::-1], rtol=1e-9)
    assert np.all(np.diff(lam) <= 0)
    assert np.prod(lam) == pytest.approx(abs(np.linalg.det(A)), rel=1e-9)
    assert symspace_length(A) == pytest.approx(symspace_length(np.linalg.inv(A)), rel=1e-9, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-3, 3)).filter(lambda A: abs(np.linalg.det(A)) > 0.1))
def test_magnitudes_sorted_and_normalised(A):
    lam = eigen_magnitudes(A)
    assert np.all(np.diff(lam) <= 0) and np.all(lam > 0)
    assert np.prod(lam) == pytest.approx(abs(np.linalg.det(A)), rel=1e-9)


def test_defective_eigenvalue_accuracy_is_cube_root_of_eps():
    J = np.array([[1.5, 1.0, 0.0], [0.0, 1.5, 1.0], [0.0, 0.0, 1.5]])
    Q = np.linalg.qr(np.random.default_rng(1).standard_normal((3, 3)))[0]
    lam = eigen_magnitudes(Q @ J @ Q.T)
    assert np.max(np.abs(lam - 1.5)) < 1e-4


def test_inverse_assisted_magnitudes_stay_accurate_for_long_words():
    # the smallest eigenvalue of a long word is lost by the forward solver alone
    A = sym_power(np.array([[3.0, 1.0], [2.0, 1.0]]), 5)
    P = np.linalg.matrix_power(A, 6)
    Pi = np.linalg.matrix_power(sym_power(np.array([[1.0, -1.0], [-2.0, 3.0]]), 5), 6)
    mu = (2 + math.sqrt(3)) ** 6
    exact = np.array([mu ** 4, mu ** -4])
    lam = eigen_magnitudes(P, Pi)
    np.testing.assert_allclose(lam[[0, -1]], exact, rtol=1e-9)
    naive = eigen_magnitudes(P, check=False)
    assert abs(naive[-1] - exact[1]) / exact[1] > 1e-6


def test_normalization_check_raises_on_inconsistent_input():
    A = np.diag([2.0, 0.5])
    with pytest.raises(EigenSolverError):
        spectral._check_normalization(A, np.array([2.0, 1.0]), None)


# --- factored products -----------------------------------------------------------

def test_product_magnitudes_follow_power_law_on_long_words():
    # every level of iota_q(eta(w)) against q - 2k + 1 times the 2x2 log magnitude
    eta = schottky_rep()
    ball = enumerate_ball(eta.presentation, 8, dedup=True)
    worst = 0.0
    for q in (3, 5, 8):
        zeta = ComposedFuchsian(eta, q).zeta
        for ell, (lo, hi) in ball.spans().items():
            codes = ball.codes[lo:hi, :ell]
            got = spectral.product_log_magnitudes(zeta.letter_table[codes])
            base = np.log([eigen_magnitudes(eta.evaluate_codes(codes[i:i + 1])[0])[0] for i in range(hi - lo)])
            want = base[:, None] * (q - 2 * np.arange(1, q + 1) + 1)
            worst = max(worst, float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want)))))
    assert worst <= 1e-9


def test_product_magnitudes_match_dense_solver_on_short_products(rng):
    F = rng.standard_normal((300, 3, 4, 4))
    got = spectral.product_log_magnitudes(F)
    dense = np.log(eigen_magnitudes(F[:, 0] @ F[:, 1] @ F[:, 2]))
    np.testing.assert_allclose(got, dense, rtol=1e-7, atol=1e-7)


def test_product_magnitudes_ties_and_jordan_blocks():
    R = np.kron(np.eye(2), rot(0.3))
    np.testing.assert_allclose(spectral.product_log_magnitudes(np.stack([R] * 5)[None]), 0, atol=1e-14)
    J = 2 * np.array([[1.0, 1, 0], [0, 1, 1], [0, 0, 1]])
    np.testing.assert_allclose(spectral.product_log_magnitudes(np.stack([J] * 7)[None]), 7 * math.log(2), rtol=1e-5)
    out = spectral.product_log_magnitudes(np.zeros((2, 0, 3, 3)))
    np.testing.assert_array_equal(out, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(2, 5))
def test_product_magnitudes_sum_to_log_det(seed, L, d):
    F = np.random.default_rng(seed).standard_normal((4, L, d, d))
    logs = spectral.product_log_magnitudes(F, check=False)
    want = np.linalg.slogdet(F)[1].sum(axis=1)
    np.testing.assert_allclose(logs.sum(axis=1), want, rtol=1e-9, atol=1e-9)
    assert np.all(np.diff(logs, axis=1) <= 0)


def test_product_magnitudes_reject_bad_input():
    with pytest.raises(ValueError):
        spectral.product_log_magnitudes(np.zeros((3, 3)))
    with pytest.raises(SingularMatrixError):
        spectral.product_log_magnitudes(np.zeros((1, 2, 2, 2)))
