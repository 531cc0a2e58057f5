"""Membership of characters in the Anosov domain and the ball bounds around it."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ValidationError
from ..group.words import Word
from ..spectral import TIE_RTOL, eigen_magnitudes
from .gaps import _require_symmetric, s_k_estimate
from .tables import PHI_ZERO, as_character_matrix, character_space, level_source, spectral_table

BAND = 1e-6
# characters handled per block when many are evaluated at once
_BLOCK = 64


def threshold(p: int, q: int, k: int = 1, fuchsian: bool = False) -> Fraction:
    """``(p+q)/(pq)``, or ``(p+q)/(pq(q-2k+1))`` against ``log lambda_1(eta)``."""
    if p < 1 or q < 2 or not 1 <= k <= q / 2:
        raise ValidationError("need p >= 1, q >= 2 and 1 <= k <= q/2")
    t = Fraction(p + q, p * q)
    return t / (q - 2 * k + 1) if fuchsian else t


def scale_factor(p: int, q: int, k: int = 1, fuchsian: bool = False) -> Fraction:
    return 1 / threshold(p, q, k, fuchsian)


def verdict_of(margin: float, band: float = BAND) -> str:
    if margin > band:
        return "inside"
    if margin < -band:
        return "outside"
    return "indeterminate"


def first_within_tie(values: np.ndarray, best: np.ndarray) -> np.ndarray:
    """Row of the first entry (shortlex) within ``TIE_RTOL`` of the column minimum."""
    with np.errstate(invalid="ignore"):
        near = values <= best + TIE_RTOL * np.abs(best)
    return np.argmax(near, axis=0)


def _column(table, src) -> np.ndarray:
    return table.logs[:, src.column]


def _criterion_many(table, src, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Criterion minimum and argmin row for each character row of ``phis`` (-1: none)."""
    logs = _column(table, src)
    vals = np.full(len(phis), np.inf)
    rows = np.full(len(phis), -1, dtype=np.int64)
    for lo in range(0, len(phis), _BLOCK):
        block = phis[lo:lo + _BLOCK]
        t = np.abs(table.exponents @ block.T)
        ok = t > PHI_ZERO
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ok, logs[:, None] / np.where(ok, t, 1.0), np.inf)
        if len(ratio):
            best = np.min(ratio, axis=0)
            idx = first_within_tie(ratio, best)
            vals[lo:lo + _BLOCK] = best
            rows[lo:lo + _BLOCK] = np.where(np.isfinite(best), idx, -1)
    return vals, rows


def criterion_inf(zeta, k: int, phi, radius: int, workers: int = 1) -> tuple[float, Word | None]:
    """``min log lambda_k(zeta(g)) / |phi(g)|`` over ball classes with ``phi(g) != 0``.

    For ``ComposedFuchsian`` the numerator is ``log lambda_1(eta(g))`` (the
    level-``k`` value divided by ``q - 2k + 1``).  Returns ``(inf, None)`` when
    ``phi`` vanishes on every class of the ball.
    """
    src = level_source(zeta, k)
    table = spectral_table(src.rep, radius, workers)
    arr = as_character_matrix(phi, src.rep.presentation)
    if arr.shape[0] != 1:
        raise ValidationError("criterion_inf takes a single character")
    if not np.any(arr):
        raise ValidationError("the criterion needs a nonzero character")
    vals, rows = _criterion_many(table, src, arr)
    return float(vals[0]), (table.words[rows[0]] if rows[0] >= 0 else None)


@dataclass
class DomainEstimate:
    c_R: float
    threshold: float
    margin: float
    verdict: str
    radius: int
    witness: Word | None
    p: int = 1
    q: int = 2
    k: int = 1
    fuchsian: bool = False
    band: float = BAND

    @property
    def inside(self) -> bool:
        return self.verdict == "inside"


def membership(p: int, q: int, k: int, zeta, phi, radius: int, band: float = BAND,
               workers: int = 1) -> DomainEstimate:
    """Is ``phi`` in the domain of ``(p, q, k)``-Anosov suspensions of ``zeta``?"""
    src = _source_for(q, k, zeta)
    if not src.fuchsian:
        _require_symmetric(src.rep, k, workers)
    thr = float(threshold(p, q, k, src.fuchsian))
    c, w = criterion_inf(zeta, k, phi, radius, workers)
    margin = c - thr
    return DomainEstimate(c, thr, margin, verdict_of(margin, band), radius, w, p, q, k, src.fuchsian, band)


def _source_for(q: int, k: int, zeta):
    src = level_source(zeta, k)
    if src.q != q:
        raise ValidationError(f"q={q} does not match the representation dimension {src.q}")
    return src


def margins(p: int, q: int, k: int, zeta, phis, radius: int, workers: int = 1):
    """Vectorised membership margins for many characters ``(m, n)``."""
    src = _source_for(q, k, zeta)
    table = spectral_table(src.rep, radius, workers)
    arr = as_character_matrix(phis, src.rep.presentation)
    vals, rows = _criterion_many(table, src, arr)
    zero = ~np.any(arr, axis=1)
    thr = float(threshold(p, q, k, src.fuchsian))
    return vals - thr, vals, rows, zero, table


def level_extremes(zeta, k: int, radius: int, workers: int = 1) -> tuple[float, float]:
    """``(s_k estimate, max over generators of log lambda_k)`` in the source's own units."""
    src = level_source(zeta, k)
    s = s_k_estimate(zeta, k, radius, workers)
    mags = eigen_magnitudes(np.stack(src.rep.images))
    top = float(np.max(np.log(mags[:, src.column])))
    return s / src.factor, top


@dataclass
class BoundsViolation:
    direction: np.ndarray
    radius: float
    kind: str
    estimate: DomainEstimate


@dataclass
class BoundsReport:
    p: int
    q: int
    k: int
    radius: int
    scale: float
    s_k: float
    max_generator: float
    r_inner: float
    r_outer: float
    directions: np.ndarray
    inner_margins: np.ndarray
    outer_margins: np.ndarray
    violations: list[BoundsViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def random_directions(presentation, n: int, seed: int = 0) -> np.ndarray:
    """``n`` random valid characters of unit uniform norm."""
    basis = character_space(presentation)
    rng = np.random.default_rng(seed)
    out = rng.standard_normal((n, basis.shape[0])) @ basis
    return out / np.max(np.abs(out), axis=1, keepdims=True)


def ball_bounds_check(p: int, q: int, k: int, zeta, radius: int, n_directions: int = 50,
                      seed: int = 0, inner_shrink: float = 1e-3, band: float = BAND,
                      workers: int = 1, directions=None) -> BoundsReport:
    """Sample the inner and outer uniform-norm balls around the domain.

    Inner radius ``pq/(p+q) * s_k`` and outer radius
    ``pq/(p+q) * max_sigma log lambda_k(zeta(sigma))``.  Each direction ``u``
    (unit uniform norm) is tested at ``(1 - inner_shrink) * r_inner * u``,
    which must be inside, and at ``r_outer * u``, which must not be inside.
    """
    src = _source_for(q, k, zeta)
    if not src.fuchsian:
        _require_symmetric(src.rep, k, workers)
    s_lvl, top_lvl = level_extremes(zeta, k, radius, workers)
    s = s_lvl * src.factor
    top = top_lvl * src.factor
    scale = float(scale_factor(p, q, k, False))
    r_in, r_out = scale * s, scale * top
    pres = src.rep.presentation
    u = random_directions(pres, n_directions, seed) if directions is None else \
        as_character_matrix(directions, pres)
    thr = float(threshold(p, q, k, src.fuchsian))
    m_in, c_in, rows_in, _, table = margins(p, q, k, zeta, (1 - inner_shrink) * r_in * u, radius, workers)
    m_out, c_out, rows_out, _, _ = margins(p, q, k, zeta, r_out * u, radius, workers)
    report = BoundsReport(p, q, k, radius, scale, s, top, r_in, r_out, u, m_in, m_out)

    def est(c, row, m):
        w = table.words[row] if row >= 0 else None
        return DomainEstimate(float(c), thr, float(m), verdict_of(m, band), radius, w, p, q, k, src.fuchsian, band)

    for i in range(len(u)):
        if verdict_of(m_in[i], band) != "inside":
            report.violations.append(BoundsViolation(u[i], (1 - inner_shrink) * r_in, "inner",
                                                     est(c_in[i], rows_in[i], m_in[i])))
        if verdict_of(m_out[i], band) == "inside":
            report.violations.append(BoundsViolation(u[i], r_out, "outer",
                                                     est(c_out[i], rows_out[i], m_out[i])))
    return report
