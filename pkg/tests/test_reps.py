import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anosov_domains.errors import ValidationError
from anosov_domains.group import GroupPresentation, enumerate_ball
from anosov_domains.group.words import inverse
from anosov_domains.reps import (ComposedFuchsian, Representation, genus2_rep, rep_eval, rep_validate,
                                 schottky_rep, surface_rep, sym_power, symmetric_residual)
from anosov_domains.spectral import eigen_magnitudes, sl_star_check

F2 = GroupPresentation.free(2)


def random_unimodular(rng, hyperbolic=True, lo=2.0, hi=10.0):
    while True:
        A = rng.standard_normal((2, 2))
        det = np.linalg.det(A)
        if abs(det) < 1e-3:
            continue
        A /= math.sqrt(abs(det))
        if np.linalg.det(A) < 0:
            A[:, 0] *= -1
        if not hyperbolic or lo < abs(np.trace(A)) < hi:
            return A


def rot(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


def hyperbolic_unimodular(rng, lo=2.0, hi=10.0, max_cond=2.0):
    """``+-P diag(l, 1/l) P^-1`` with ``|tr|`` uniform on ``(lo, hi)`` and ``cond(P) <= max_cond``."""
    tr = rng.uniform(lo, hi)
    lam = (tr + math.sqrt(tr * tr - 4)) / 2
    s = math.exp(rng.uniform(-1, 1) * math.log(max_cond) / 2)
    P = rot(rng.uniform(0, 2 * math.pi)) @ np.diag([s, 1 / s]) @ rot(rng.uniform(0, 2 * math.pi))
    A = P @ np.diag([lam, 1 / lam]) @ np.linalg.inv(P)
    return A if rng.random() < 0.5 else -A


def test_rep_eval_basics(rng):
    rho = schottky_rep()
    np.testing.assert_array_equal(rep_eval(rho, ()), np.eye(2))
    np.testing.assert_array_equal(rep_eval(rho, (1,)), rho.images[0])
    letters = [1, -1, 2, -2]
    for _ in range(100):
        u = tuple(rng.choice(letters, size=rng.integers(0, 6)).tolist())
        v = tuple(rng.choice(letters, size=rng.integers(0, 6)).tolist())
        np.testing.assert_allclose(rho(u + v), rho(u) @ rho(v), rtol=1e-12, atol=1e-12)


def test_rep_eval_inverse_on_ball():
    rho = ComposedFuchsian(schottky_rep(), 3).zeta
    ball = enumerate_ball(F2, 5)
    imgs, invs = rho.ball_images(ball)
    for g, h, w in zip(imgs[::37], invs[::37], ball.words[::37]):
        np.testing.assert_allclose(g @ h, np.eye(3), atol=1e-10 * max(1, np.abs(g).max()))
        np.testing.assert_allclose(rho(inverse(w)), h, rtol=1e-12, atol=1e-12)


def test_rep_eval_rejects_bad_letters():
    with pytest.raises(ValidationError):
        rep_eval(schottky_rep(), (3,))


def test_validate_free_rep():
    assert rep_validate(schottky_rep()).valid


def test_genus2_relator_residual():
    rho = genus2_rep()
    rel = rho.presentation.relators[0]
    direct = np.eye(2)
    for x in rel:
        direct = direct @ (rho.images[x - 1] if x > 0 else np.linalg.inv(rho.images[-x - 1]))
    assert np.linalg.norm(direct - np.eye(2)) <= 1e-8
    assert rep_validate(rho).max_relator_residual <= 1e-8


def test_genus2_properties():
    rho = genus2_rep()
    traces = [abs(np.trace(g)) for g in rho.images]
    assert all(t > 2 for t in traces)
    np.testing.assert_allclose(traces, traces[0], rtol=1e-12)
    assert traces[0] == pytest.approx(2 + math.sqrt(2), rel=1e-12)
    for g in rho.images:
        assert abs(np.linalg.det(g) - 1) <= 1e-12
        assert np.isrealobj(g)


def test_genus2_perturbed_is_invalid():
    rho = genus2_rep()
    imgs = [g.copy() for g in rho.images]
    imgs[0][0, 1] += 0.1
    assert not rep_validate(Representation(rho.presentation, imgs)).valid


def test_surface_rep_higher_genus():
    rho = surface_rep(3)
    assert rep_validate(rho).max_relator_residual <= 1e-8


def test_sym_power_examples():
    A = np.array([[2.0, 1.0], [3.0, 2.0]])
    np.testing.assert_allclose(sym_power(A, 2), A)
    np.testing.assert_allclose(eigen_magnitudes(sym_power(np.diag([2, 0.5]), 3)), [4, 1, 0.25])
    np.testing.assert_array_equal(sym_power(np.eye(2), 6), np.eye(6))
    with pytest.raises(ValueError):
        sym_power(A, 1)


def test_sym_power_eigenvalue_law(rng):
    worst = 0.0
    for _ in range(100):
        A = hyperbolic_unimodular(rng)
        lam1 = eigen_magnitudes(A)[0]
        Ainv = np.linalg.inv(A)
        for q in range(3, 9):
            got = eigen_magnitudes(sym_power(A, q), sym_power(Ainv, q))
            want = lam1 ** (q - 2 * np.arange(1, q + 1) + 1)
            worst = max(worst, float(np.max(np.abs(got - want) / want)))
    assert worst <= 1e-8


def test_sym_power_law_error_is_explained_by_conditioning(rng):
    # strongly non-normal A: the computed spectrum of iota_q(A) is only as good as
    # q * eps * cond(iota_q(V)) * (norm / magnitude), V the eigenbasis of A
    eps = np.finfo(float).eps
    worst = 0.0
    for _ in range(200):
        A = random_unimodular(rng)
        ev, V = np.linalg.eig(A)
        lam1 = np.abs(ev).max()
        for q in range(2, 9):
            M, Mi = sym_power(A, q), sym_power(np.linalg.inv(A), q)
            want = lam1 ** (q - 2 * np.arange(1, q + 1) + 1)
            got = eigen_magnitudes(M, Mi, check=False)
            bound = q * eps * np.linalg.cond(sym_power(V, q)) * np.minimum(
                np.linalg.norm(M, 2) / want, np.linalg.norm(Mi, 2) * want)
            worst = max(worst, float(np.max(np.abs(got - want) / want / bound)))
    assert worst <= 50


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_sym_power_homomorphism_and_determinant(seed, q):
    rng = np.random.default_rng(seed)
    A, B = random_unimodular(rng, False), random_unimodular(rng, False)
    lhs = sym_power(A @ B, q)
    rhs = sym_power(A, q) @ sym_power(B, q)
    scale = np.linalg.norm(sym_power(A, q)) * np.linalg.norm(sym_power(B, q))
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * scale
    assert abs(abs(np.linalg.det(sym_power(A, q))) - 1) <= 1e-9 * max(1.0, np.linalg.cond(A)) ** (q - 1)


def test_sym_power_orthogonal_stays_orthogonal():
    c, s = math.cos(0.7), math.sin(0.7)
    R = sym_power(np.array([[c, -s], [s, c]]), 6)
    np.testing.assert_allclose(R @ R.T, np.eye(6), atol=1e-13)


def test_composed_fuchsian_cache():
    eta = schottky_rep()
    cf = ComposedFuchsian(eta, 5)
    for g, z in zip(eta.images, cf.zeta.images):
        np.testing.assert_allclose(z, sym_power(g, 5), atol=1e-10)
    with pytest.raises(ValidationError):
        ComposedFuchsian(cf.zeta, 3)


def test_schottky_examples():
    one = schottky_rep(1, 3.0)
    np.testing.assert_allclose(one.images[0], np.diag([3, 1 / 3]))
    assert eigen_magnitudes(one.images[0])[0] == pytest.approx(3)
    two = schottky_rep(2, 3.0, math.pi / 4)
    for g in two.images:
        assert np.linalg.det(g) == pytest.approx(1, abs=1e-15)
        assert sl_star_check(g)
    with pytest.raises(ValidationError):
        schottky_rep(2, 1.0)


def test_schottky_gap_slope_positive_on_ball():
    rho = schottky_rep()
    ball = enumerate_ball(F2, 8, dedup=True)
    lam = rho.ball_magnitudes(ball)
    slope = np.log(lam[:, 0]) / ball.translation
    assert slope.min() > 0


def test_symmetric_residual_examples():
    # SL_2 images preserve the symplectic form: exactly symmetric
    assert symmetric_residual(schottky_rep(), 1, 6) <= 1e-8
    zeta3 = ComposedFuchsian(schottky_rep(), 3).zeta
    for q in (3, 4, 5):
        zeta = ComposedFuchsian(schottky_rep(), q).zeta
        for k in range(1, q + 1):
            assert symmetric_residual(zeta, k, 6) <= 1e-7
    # any SL_2 representation is symmetric: the spectrum of A is {l, 1/l}, as is that of A^-1
    sl2 = Representation(F2, [np.array([[2.0, 1.0], [0.0, 0.5]]), np.array([[1.0, 0.0], [1.0, 1.0]])])
    assert symmetric_residual(sl2, 1, 4) <= 1e-8
    bad = Representation(F2, [np.array([[4.0, 1.0, 0.0], [0.0, 0.5, 1.0], [0.0, 0.0, 0.5]]),
                              np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])])
    assert symmetric_residual(bad, 1, 4) > 0.01
    with pytest.raises(ValueError):
        symmetric_residual(zeta3, 4, 2)


def test_representation_validation_errors():
    with pytest.raises(ValidationError):
        Representation(F2, [np.eye(2)])
    with pytest.raises(ValidationError):
        Representation(F2, [np.eye(2), np.eye(3)])
    with pytest.raises(ValidationError):
        Representation(F2, [np.eye(2), np.zeros((2, 2))])
