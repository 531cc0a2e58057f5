"""Per-class spectral tables shared by the estimators."""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import null_space

from ..errors import ValidationError
from ..group.ball import BallIndex, enumerate_ball
from ..group.cayley import ball_translation_lengths
from ..group.presentation import GroupPresentation, RealCharacter
from ..group.words import Word, exponent_sums
from ..reps import ComposedFuchsian, Representation

PHI_ZERO = 1e-12
_CACHE_SIZE = 8


@dataclass(eq=False)
class SpectralTable:
    """Log eigenvalue magnitudes of ``rep`` on every class of a ball (rows in ball order)."""

    rep: Representation
    ball: BallIndex
    logs: np.ndarray

    @property
    def radius(self) -> int:
        return self.ball.radius

    @property
    def words(self) -> list[Word]:
        return self.ball.words

    @cached_property
    def exponents(self) -> np.ndarray:
        return self.ball.exponent_sums.astype(float)

    @cached_property
    def norms(self) -> np.ndarray:
        """Translation lengths (-1 where not certified)."""
        return ball_translation_lengths(self.ball)

    def phi_values(self, phi) -> np.ndarray:
        return self.exponents @ np.asarray(phi, dtype=float).T


_cache: "OrderedDict[tuple, tuple]" = OrderedDict()
_lock = threading.Lock()


def spectral_table(rep: Representation, radius: int, workers: int = 1) -> SpectralTable:
    """Cached table over the conjugacy-deduplicated ball (free) or the word ball (otherwise)."""
    key = (id(rep), radius)
    with _lock:
        hit = _cache.get(key)
        if hit is not None and hit[0] is rep:
            _cache.move_to_end(key)
            return hit[1]
    ball = enumerate_ball(rep.presentation, radius, dedup=True)
    logs = rep.ball_log_magnitudes(ball, workers)
    logs.setflags(write=False)
    table = SpectralTable(rep, ball, logs)
    with _lock:
        _cache[key] = (rep, table)
        while len(_cache) > _CACHE_SIZE:
            _cache.popitem(last=False)
    return table


def clear_cache() -> None:
    with _lock:
        _cache.clear()


@dataclass(frozen=True)
class LevelSource:
    """Where the level-``k`` log magnitudes come from and how they scale.

    For a plain ``zeta`` the column is ``log lambda_k(zeta)`` and ``factor`` is 1.
    For ``iota_q o eta`` the column is ``log lambda_1(eta)`` and ``factor`` is
    ``q - 2k + 1`` (power law), so ``log lambda_k(zeta) = factor * column``.
    """

    rep: Representation
    column: int
    factor: int
    q: int
    fuchsian: bool


def level_source(target, k: int) -> LevelSource:
    if isinstance(target, ComposedFuchsian):
        q = target.q
        if not 1 <= k <= q / 2:
            raise ValidationError(f"need 1 <= k <= q/2 (k={k}, q={q})")
        return LevelSource(target.base, 0, q - 2 * k + 1, q, True)
    if not isinstance(target, Representation):
        raise ValidationError("target must be a Representation or ComposedFuchsian")
    q = target.dimension
    if not 1 <= k <= q / 2:
        raise ValidationError(f"need 1 <= k <= q/2 (k={k}, q={q})")
    return LevelSource(target, k - 1, 1, q, False)


def as_character_matrix(phi, presentation: GroupPresentation) -> np.ndarray:
    """Stack one or more characters into an ``(m, n)`` float array, validating each."""
    if isinstance(phi, RealCharacter):
        phi = phi.as_array()
    arr = np.atleast_2d(np.asarray(phi, dtype=float))
    if arr.shape[1] != presentation.n_generators:
        raise ValidationError(f"characters need {presentation.n_generators} values")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("character values must be finite")
    if presentation.relators:
        rel = np.array([exponent_sums(r, presentation.n_generators) for r in presentation.relators], float)
        if np.any(np.abs(arr @ rel.T) > 1e-12 * np.maximum(1.0, np.abs(arr).max())):
            raise ValidationError("character does not vanish on the relators")
    return arr


def character_space(presentation: GroupPresentation) -> np.ndarray:
    """Orthonormal basis (rows) of hom(G, R) inside R^n."""
    n = presentation.n_generators
    if not presentation.relators:
        return np.eye(n)
    rel = np.array([exponent_sums(r, n) for r in presentation.relators], float)
    return null_space(rel).T
