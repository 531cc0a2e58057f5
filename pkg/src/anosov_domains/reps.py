"""Representations as generator -> matrix maps, and concrete builders."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ._parallel import map_chunks
from .errors import ValidationError
from .group.ball import BallIndex, enumerate_ball
from .group.presentation import GroupPresentation
from .group.words import Word, letter_code
from .spectral import field_of, product_log_magnitudes

DEFAULT_REL_TOL = 1e-8


def _inverse(g: np.ndarray) -> np.ndarray:
    if g.shape == (2, 2):
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
    return np.linalg.inv(g)


class Representation:
    """A homomorphism from a finitely presented group into GL_d(R or C).

    Images are stored read-only.  Letter codes ``2i`` and ``2i+1`` index the
    image of generator ``i`` and of its inverse in :attr:`letter_table`.
    """

    def __init__(self, presentation: GroupPresentation, images: Sequence, name: str = ""):
        mats = [np.array(m) for m in images]
        if len(mats) != presentation.n_generators:
            raise ValidationError(
                f"{len(mats)} images for {presentation.n_generators} generators")
        d = mats[0].shape[0] if mats and mats[0].ndim == 2 else 0
        for m in mats:
            if m.shape != (d, d) or d == 0:
                raise ValidationError("generator images must be square matrices of one size")
            if not np.all(np.isfinite(m)):
                raise ValidationError("generator images must be finite")
        self.field = "complex" if any(field_of(m) == "complex" for m in mats) else "real"
        dtype = complex if self.field == "complex" else float
        mats = [np.real_if_close(m).astype(dtype) if self.field == "real" else m.astype(dtype) for m in mats]
        table = []
        for m in mats:
            if abs(np.linalg.det(m)) < 1e-12:
                raise ValidationError("generator images must be invertible")
            table.extend([m, _inverse(m)])
        self.presentation = presentation
        self.images = tuple(mats)
        self.letter_table = np.stack(table)
        self.letter_table.setflags(write=False)
        for m in self.images:
            m.setflags(write=False)
        self.name = name

    @property
    def dimension(self) -> int:
        return self.images[0].shape[0]

    def __repr__(self):
        label = self.name or "Representation"
        return f"<{label}: {self.presentation.kind} group on {self.presentation.n_generators} generators, dim {self.dimension}, {self.field}>"

    def __call__(self, word: Sequence[int]) -> np.ndarray:
        return rep_eval(self, word)

    def evaluate_codes(self, codes: np.ndarray) -> np.ndarray:
        """Images of a batch of equal-length words given as letter codes ``(N, l)``."""
        codes = np.asarray(codes)
        if codes.shape[1] == 0:
            return np.broadcast_to(np.eye(self.dimension, dtype=self.letter_table.dtype),
                                   (codes.shape[0], self.dimension, self.dimension)).copy()
        out = self.letter_table[codes[:, 0]]
        for j in range(1, codes.shape[1]):
            out = out @ self.letter_table[codes[:, j]]
        return out

    def evaluate_inverse_codes(self, codes: np.ndarray) -> np.ndarray:
        return self.evaluate_codes(np.asarray(codes)[:, ::-1] ^ 1)

    def ball_images(self, ball: BallIndex, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Images of every ball word and of its inverse, in ball order."""
        self._check_ball(ball)
        n, d = len(ball), self.dimension
        imgs = np.empty((n, d, d), dtype=self.letter_table.dtype)
        invs = np.empty_like(imgs)
        for ell, (lo, hi) in ball.spans().items():
            rows = ball.codes[lo:hi, :ell]

            def work(a, b, rows=rows, lo=lo):
                imgs[lo + a:lo + b] = self.evaluate_codes(rows[a:b])
                invs[lo + a:lo + b] = self.evaluate_inverse_codes(rows[a:b])

            map_chunks(work, hi - lo, workers)
        return imgs, invs

    def log_magnitudes_codes(self, codes: np.ndarray) -> np.ndarray:
        """Log eigenvalue moduli ``(N, d)`` of equal-length words given as letter codes."""
        codes = np.asarray(codes)
        return product_log_magnitudes(self.letter_table[codes])

    def word_log_magnitudes(self, word: Sequence[int]) -> np.ndarray:
        for x in word:
            if x == 0 or abs(x) > self.presentation.n_generators:
                raise ValidationError(f"letter {x} does not index a generator")
        codes = np.array([[letter_code(x) for x in word]], dtype=np.int64).reshape(1, len(word))
        return self.log_magnitudes_codes(codes)[0]

    def ball_log_magnitudes(self, ball: BallIndex, workers: int = 1) -> np.ndarray:
        """Log eigenvalue moduli ``(N, d)`` of every ball word, largest first.

        Computed from the factored word (see :func:`product_log_magnitudes`),
        so every level keeps relative accuracy however long the word.
        """
        self._check_ball(ball)
        out = np.empty((len(ball), self.dimension))
        for ell, (lo, hi) in ball.spans().items():
            rows = ball.codes[lo:hi, :ell]

            def work(a, b, rows=rows, lo=lo):
                out[lo + a:lo + b] = self.log_magnitudes_codes(rows[a:b])

            map_chunks(work, hi - lo, workers)
        return out

    def ball_magnitudes(self, ball: BallIndex, workers: int = 1) -> np.ndarray:
        """Eigenvalue magnitudes ``(N, d)`` of every ball word, largest first."""
        return np.exp(self.ball_log_magnitudes(ball, workers))

    def _check_ball(self, ball: BallIndex):
        if ball.presentation != self.presentation:
            raise ValidationError("ball and representation use different presentations")


def rep_eval(rho: Representation, word: Sequence[int]) -> np.ndarray:
    """Product of generator images along ``word``; the empty word maps to the identity."""
    out = np.eye(rho.dimension, dtype=rho.letter_table.dtype)
    for x in word:
        if x == 0 or abs(x) > rho.presentation.n_generators:
            raise ValidationError(f"letter {x} does not index a generator")
        out = out @ rho.letter_table[letter_code(x)]
    return out


@dataclass
class ValidationReport:
    relator_residuals: list[float]
    det_deviations: list[float]
    tol: float

    @property
    def valid(self) -> bool:
        return all(r <= self.tol for r in self.relator_residuals + self.det_deviations)

    @property
    def max_relator_residual(self) -> float:
        return max(self.relator_residuals, default=0.0)

    def __bool__(self):
        return self.valid


def rep_validate(rho: Representation, tol: float = DEFAULT_REL_TOL) -> ValidationReport:
    eye = np.eye(rho.dimension)
    rel = [float(np.linalg.norm(rep_eval(rho, r) - eye)) for r in rho.presentation.relators]
    dets = [float(abs(abs(np.linalg.det(g)) - 1.0)) for g in rho.images]
    return ValidationReport(rel, dets, tol)


def sym_power(A, q: int) -> np.ndarray:
    """Image of a 2x2 matrix under the irreducible q-dimensional representation.

    ``A`` acts on degree ``q - 1`` homogeneous polynomials in two variables;
    the basis ``sqrt(C(q-1, j)) x^(q-1-j) y^j`` keeps images of orthogonal
    matrices orthogonal.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    A = np.asarray(A)
    if A.shape != (2, 2):
        raise ValueError("sym_power needs a 2x2 matrix")
    m = q - 1
    dtype = complex if np.iscomplexobj(A) else float
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    out = np.zeros((q, q), dtype=dtype)
    for j in range(q):
        poly = np.ones(1, dtype=dtype)
        for _ in range(m - j):
            poly = np.convolve(poly, [a, c])
        for _ in range(j):
            poly = np.convolve(poly, [b, d])
        out[:, j] = poly
    norms = np.sqrt([math.comb(m, i) for i in range(q)])
    return out * norms[None, :] / norms[:, None]


class ComposedFuchsian:
    """``iota_q o eta`` for a 2-dimensional ``eta``; images are built eagerly."""

    def __init__(self, base: Representation, q: int):
        if base.dimension != 2:
            raise ValidationError("the base representation must be 2-dimensional")
        if q < 2:
            raise ValidationError("q must be >= 2")
        self.base = base
        self.q = q
        self.zeta = Representation(base.presentation, [sym_power(g, q) for g in base.images],
                                   name=f"iota_{q}({base.name or 'eta'})")

    @property
    def presentation(self) -> GroupPresentation:
        return self.base.presentation

    @property
    def dimension(self) -> int:
        return self.q

    def __repr__(self):
        return f"<ComposedFuchsian q={self.q} of {self.base!r}>"


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def schottky_rep(n: int = 2, multiplier: float = 3.0, tilt: float = math.pi / 4) -> Representation:
    """Free group on ``n`` generators; generator ``i`` is ``diag(mu, 1/mu)`` rotated by ``i * tilt``."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not multiplier > 1:
        raise ValidationError("multiplier must be > 1")
    diag = np.diag([multiplier, 1.0 / multiplier])
    images = []
    for i in range(n):
        r = _rotation(i * tilt)
        images.append(r @ diag @ r.T)
    return Representation(GroupPresentation.free(n), images, name=f"schottky(n={n}, mu={multiplier:g})")


def _su11_rotation(theta: float) -> np.ndarray:
    return np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])


def _su11_translation(t: float) -> np.ndarray:
    ch, sh = math.cosh(t / 2), math.sinh(t / 2)
    return np.array([[ch, sh], [sh, ch]], dtype=complex)


def surface_rep(genus: int = 2) -> Representation:
    """Side pairings of the regular hyperbolic 4g-gon with interior angles 2*pi/(4g).

    Side ``s`` of the polygon has its midpoint at angle ``2*pi*s/(4g)``.  The
    pairing of side ``i`` onto side ``j`` is rotate-to-0, translate across,
    rotate-to-j in the disc model, conjugated into SL_2(R) by the Cayley map.
    """
    if genus < 2:
        raise ValidationError("surface_rep needs genus >= 2")
    sides = 4 * genus
    dist = math.acosh(1.0 / math.tan(math.pi / sides))
    theta = [2 * math.pi * s / sides for s in range(sides)]

    def pairing(i: int, j: int) -> np.ndarray:
        return _su11_rotation(theta[j] - math.pi) @ _su11_translation(-2 * dist) @ _su11_rotation(-theta[i])

    cayley = np.array([[1j, 1j], [-1, 1]])
    cayley_inv = np.linalg.inv(cayley)

    def to_real(m: np.ndarray) -> np.ndarray:
        r = cayley @ m @ cayley_inv
        assert np.max(np.abs(r.imag)) < 1e-12
        return r.real

    a = [to_real(pairing(4 * j + 2, 4 * j)) for j in range(genus)]
    b = [to_real(pairing(4 * j + 1, 4 * j + 3)) for j in range(genus)]
    return Representation(GroupPresentation.surface(genus), a + b, name=f"surface(g={genus})")


def genus2_rep() -> Representation:
    return surface_rep(2)


def symmetric_residual(rho: Representation, k: int, radius: int, workers: int = 1) -> float:
    """Max over ball words of ``|log lambda_k(rho(w)) - log lambda_k(rho(w^-1))|``."""
    if not 1 <= k <= rho.dimension:
        raise ValueError("k out of range")
    ball = enumerate_ball(rho.presentation, radius, dedup=True)
    fwd = rho.ball_log_magnitudes(ball, workers)[:, k - 1]
    inv_ball = ball.inverted()
    bwd = rho.ball_log_magnitudes(inv_ball, workers)[:, k - 1]
    return float(np.max(np.abs(fwd - bwd))) if len(ball) else 0.0
