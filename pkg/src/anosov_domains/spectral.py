"""Eigenvalue magnitudes and the matrix predicates built on them.

All functions accept a single ``(d, d)`` matrix or a stack ``(..., d, d)``.
"""
from __future__ import annotations

import numpy as np

from .errors import EigenSolverError, SingularMatrixError

TOL_DET = 1e-12
# magnitudes closer than this (relative) are treated as equal for strictness purposes
TIE_RTOL = 1e-10
# flipped on by the test-suite; verifies prod(magnitudes) == |det| on well-conditioned input
CHECK_NORMALIZATION = False


def _square(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    if not np.issubdtype(A.dtype, np.complexfloating):
        A = A.astype(float, copy=False)
    return A


def field_of(A) -> str:
    A = np.asarray(A)
    if np.iscomplexobj(A) and np.any(A.imag != 0):
        return "complex"
    return "real"


def _require_invertible(A: np.ndarray) -> None:
    sign, logdet = np.linalg.slogdet(A)
    if np.any(sign == 0) or np.any(logdet < np.log(TOL_DET)):
        raise SingularMatrixError("matrix is singular (|det| below tolerance)")


def _sorted_abs_eigvals(A: np.ndarray) -> np.ndarray:
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise EigenSolverError("eigensolver returned non-finite eigenvalues")
    return -np.sort(-np.abs(ev), axis=-1)


def eigen_magnitudes(A, inverse=None, *, check: bool | None = None) -> np.ndarray:
    """Moduli of the complex eigenvalues of ``A``, largest first.

    When ``inverse`` (an independently computed ``A^-1``, e.g. the product of
    inverse generator images) is supplied, the small magnitudes are taken as
    reciprocals of the large magnitudes of the inverse wherever that has the
    smaller forward-error bound.  This keeps ``log`` of the bottom of the
    spectrum accurate for long words.
    """
    A = _square(A)
    if not np.all(np.isfinite(A)):
        raise EigenSolverError("non-finite matrix entries")
    if inverse is None:
        _require_invertible(A)
        mags = _sorted_abs_eigvals(A)
    else:
        inverse = _square(inverse)
        if inverse.shape != A.shape:
            raise ValueError("inverse must have the same shape as A")
        fwd = _sorted_abs_eigvals(A)
        rev = 1.0 / _sorted_abs_eigvals(inverse)[..., ::-1]
        na = np.linalg.norm(A, axis=(-2, -1))[..., None]
        nb = np.linalg.norm(inverse, axis=(-2, -1))[..., None]
        with np.errstate(divide="ignore"):
            use_fwd = na / fwd <= nb * rev
        mags = -np.sort(-np.where(use_fwd, fwd, rev), axis=-1)
    if check if check is not None else CHECK_NORMALIZATION:
        _check_normalization(A, mags, inverse)
    return mags


def _check_normalization(A, mags, inverse) -> None:
    inv = np.linalg.inv(A) if inverse is None else inverse
    cond = np.linalg.norm(A, axis=(-2, -1)) * np.linalg.norm(inv, axis=(-2, -1))
    ok = cond < 1e6
    if not np.any(ok):
        return
    det = np.abs(np.linalg.det(A))
    prod = np.exp(np.sum(np.log(mags), axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(prod - det) / det
    # forward error of each magnitude is bounded by about eps * cond
    tol = np.maximum(1e-9, 64 * np.finfo(float).eps * A.shape[-1] * cond)
    if np.any((rel > tol)[ok]):
        raise EigenSolverError(f"eigenvalue magnitudes do not multiply to |det| (rel err {rel[ok].max():.3g})")


# lower couplings of the periodic QR sweep (see product_log_magnitudes)
_CONVERGED = 1e-13
_BLOCK_TOL = 1e-8
_PERIODS = 64
_MIN_PERIODS = 3


def product_log_magnitudes(factors, *, periods: int = _PERIODS, check: bool | None = None) -> np.ndarray:
    """``log`` eigenvalue moduli of ``F_0 F_1 ... F_{L-1}``, largest first, without forming the product.

    ``factors`` has shape ``(N, L, d, d)``.  Orthogonal iteration is run
    through the factors one at a time (a periodic QR sweep), so each factor
    contributes a triangular ``R`` and the spectrum is read off the product
    of their diagonals.  Unlike the eigenvalues of the assembled matrix,
    every level keeps relative accuracy, including magnitudes near 1 in a
    word whose norm is huge.  Indices whose lower-triangular coupling has
    not died out (equal moduli: complex pairs, unitary or unipotent parts)
    are grouped and their block product is solved directly.
    """
    F = np.asarray(factors)
    if F.ndim != 4 or F.shape[-1] != F.shape[-2]:
        raise ValueError(f"expected factors of shape (N, L, d, d), got {F.shape}")
    if not np.all(np.isfinite(F)):
        raise EigenSolverError("non-finite factor")
    n, L, d = F.shape[0], F.shape[1], F.shape[2]
    if L == 0:
        return np.zeros((n, d))
    _require_invertible(F.reshape(-1, d, d))
    dtype = np.result_type(F.dtype, float)
    Q = np.broadcast_to(np.eye(d, dtype=dtype), (n, d, d)).copy()
    Rs = np.empty((L, n, d, d), dtype=dtype)
    C = np.empty((n, d, d), dtype=dtype)
    prev = np.full((n, d, d), np.inf)
    active = np.arange(n)
    lower = np.tril(np.ones((d, d), dtype=bool), -1)
    for n_run in range(1, max(1, periods) + 1):
        Z = Q[active]
        for j in range(L - 1, -1, -1):
            Z, Rs[L - 1 - j, active] = np.linalg.qr(F[active, j] @ Z)
        Ca = np.conj(np.swapaxes(Q[active], -1, -2)) @ Z
        C[active] = Ca
        Q[active] = Z
        # a lower coupling between separated levels decays like |l_i/l_j| per
        # period down to the rounding floor; ties and complex pairs stay put.
        # It can also grow while the basis leaves an unstable ordering.
        c = np.abs(Ca)
        pc = prev[active]
        settled = (c <= _CONVERGED) | ((c > 0.5 * pc) & (c < 2.0 * pc)) | ~lower
        prev[active] = c
        if n_run >= _MIN_PERIODS:
            active = active[~settled.all(axis=(1, 2))]
        if not len(active):
            break
    diag = np.abs(np.diagonal(Rs, axis1=-2, axis2=-1))
    with np.errstate(divide="ignore"):
        logs = np.log(diag).sum(axis=0) + np.log(np.abs(np.diagonal(C, axis1=-2, axis2=-1)))
    coupled = lower & (np.abs(C) > _BLOCK_TOL)
    # Q^H W Q = C R_{L-1}...R_0 with R's upper triangular; only the lower part of C couples levels
    joined = np.zeros((n, max(d - 1, 0)), dtype=bool)
    for i in range(d - 1):
        joined[:, i] = coupled[:, i + 1:, :i + 1].any(axis=(1, 2))
    rows = np.flatnonzero(joined.any(axis=1))
    if len(rows):
        patterns = {}
        for r in rows:
            patterns.setdefault(joined[r].tobytes(), []).append(r)
        for key, idx in patterns.items():
            idx = np.array(idx)
            mask = np.frombuffer(key, dtype=bool)
            start = 0
            for i in range(d):
                if i < d - 1 and mask[i]:
                    continue
                if i > start:
                    logs[idx, start:i + 1] = _block_logs(C[idx], Rs[:, idx], start, i + 1)
                start = i + 1
    if not np.all(np.isfinite(logs)):
        raise EigenSolverError("factored product is numerically singular")
    logs = -np.sort(-logs, axis=-1)
    if check if check is not None else CHECK_NORMALIZATION:
        logdet = np.linalg.slogdet(F)[1].sum(axis=1)
        err = np.abs(logs.sum(axis=1) - logdet)
        if np.any(err > 1e-9 * np.maximum(1.0, np.abs(logs).sum(axis=1))):
            raise EigenSolverError(f"log magnitudes do not sum to log|det| (err {err.max():.3g})")
    return logs


def _block_logs(C, Rs, a, b):
    """Log moduli of the eigenvalues of the diagonal block ``[a, b)`` of ``C R_{L-1} ... R_0``."""
    M = C[:, a:b, a:b]
    scale = np.zeros(M.shape[0])
    for R in reversed(Rs):
        M = M @ R[:, a:b, a:b]
        s = np.max(np.abs(M), axis=(-2, -1))
        M = M / s[:, None, None]
        scale += np.log(s)
    ev = np.linalg.eigvals(M)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(ev)) + scale[:, None]


def log_magnitudes(A, inverse=None) -> np.ndarray:
    return np.log(eigen_magnitudes(A, inverse))


def sl_star_check(A, tol: float = 1e-9) -> bool:
    """``||det A| - 1| <= tol`` (membership in SL*_d)."""
    A = _square(A)
    return bool(np.all(np.abs(np.abs(np.linalg.det(A)) - 1.0) <= tol))


def weak_unipotent_check(A, tol: float = 1e-9) -> bool:
    """Every complex eigenvalue of ``A`` has modulus 1 (within ``tol``)."""
    mags = eigen_magnitudes(A)
    return bool(np.all(np.abs(mags - 1.0) <= tol))


def contragredient(A) -> np.ndarray:
    A = _square(A)
    _require_invertible(A)
    return np.swapaxes(np.linalg.inv(A), -1, -2)


def g_omega_residual(A, omega, inverse=None) -> float:
    """Frobenius norm of ``omega A omega^-1 - A^-T``; zero iff ``A`` preserves the form.

    ``inverse`` may supply ``A^-1`` computed independently (e.g. from inverse
    generator images), which avoids inverting an ill-conditioned word image.
    """
    A = _square(A)
    omega = _square(omega)
    if A.shape[-1] != omega.shape[-1]:
        raise ValueError("dimension mismatch between A and omega")
    lhs = omega @ A @ np.linalg.inv(omega)
    if inverse is None:
        rhs = contragredient(A)
    else:
        inverse = _square(inverse)
        if inverse.shape != A.shape:
            raise ValueError("inverse must have the same shape as A")
        rhs = np.swapaxes(inverse, -1, -2)
    return float(np.max(np.linalg.norm(lhs - rhs, axis=(-2, -1))))


def symspace_length(A, inverse=None) -> np.ndarray | float:
    """Translation length on the symmetric space: ``sqrt(sum_i log(lambda_i)^2)``."""
    logs = log_magnitudes(A, inverse)
    out = np.sqrt(np.sum(logs ** 2, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def magnitudes_equal(x, y, rtol: float = TIE_RTOL) -> np.ndarray:
    x = np.asarray(x)
    y = np.asarray(y)
    return np.abs(x - y) <= rtol * np.maximum(np.abs(x), np.abs(y))
