"""Deformations t * phi of iota_d o eta, and the boundary arithmetic on surfaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .._io import write_csv
from ..errors import ValidationError
from ..group.presentation import GroupPresentation, RealCharacter
from ..reps import ComposedFuchsian, Representation
from ..spectral import eigen_magnitudes
from .domain import BAND, criterion_inf, threshold, verdict_of
from .gaps import s_k_estimate

# length convention for boundary comparisons, echoed in output metadata
LENGTH_CONVENTION = "len_X(g) = log lambda_1(eta(g))"


@dataclass
class SweepRow:
    t: float
    k: int
    c: float
    threshold: float
    margin: float
    verdict: str


@dataclass
class SweepResult:
    d: int
    p: int
    q: int
    radius: int
    band: float
    c: float
    rows: list[SweepRow]
    predicted: dict[int, float]
    observed: dict[int, float | None]
    monotone: bool
    levels: tuple[int, ...] = ()

    COLUMNS = ("t", "k", "c", "threshold", "margin", "verdict")

    def verdicts(self, t: float) -> dict[int, str]:
        return {r.k: r.verdict for r in self.rows if r.t == t}

    def anosov_levels(self, t: float) -> frozenset[int]:
        return frozenset(k for k, v in self.verdicts(t).items() if v == "inside")

    def to_csv(self, meta: dict | None = None) -> str:
        rows = ((r.t, r.k, r.c, r.threshold, r.margin, r.verdict) for r in self.rows)
        return write_csv(self.COLUMNS, rows, meta)


def predicted_transition(c: float, p: int, q: int, k: int) -> float:
    """``t_k = c * pq(q-2k+1)/(p+q)``."""
    return c * float(1 / threshold(p, q, k, fuchsian=True))


def deformation_sweep(eta: Representation, phi, d: int, t_grid, radius: int, band: float = BAND,
                      workers: int = 1) -> SweepResult:
    """Verdicts for ``t * phi`` at every level ``k <= d/2`` with ``p = 1, q = d - 1``.

    One criterion value ``c = c_R(phi)`` (on ``log lambda_1(eta)``) is used
    for every ``t``: ``c_R(t phi) = c / |t|``.  Levels with ``k > q/2`` (even
    ``d``) can never be Anosov for this block shape and are reported outside.
    At ``t = 0`` the zero character is inside whenever the level slope of
    ``iota_q o eta`` is positive.
    """
    if d < 3:
        raise ValidationError("need d >= 3")
    if isinstance(eta, ComposedFuchsian):
        eta = eta.base
    if eta.dimension != 2:
        raise ValidationError("eta must be 2-dimensional")
    p, q = 1, d - 1
    fuchs = ComposedFuchsian(eta, q)
    c, _ = criterion_inf(fuchs, 1, phi, radius, workers)
    levels = tuple(range(1, d // 2 + 1))
    grid = sorted(float(t) for t in np.asarray(t_grid, dtype=float).ravel())
    zero_inside = {}
    rows: list[SweepRow] = []
    predicted: dict[int, float] = {}
    for k in levels:
        if k <= q / 2:
            predicted[k] = predicted_transition(c, p, q, k)
    for t in grid:
        for k in levels:
            if k > q / 2:
                rows.append(SweepRow(t, k, c / abs(t) if t else math.inf, math.inf, -math.inf, "outside"))
                continue
            thr = float(threshold(p, q, k, fuchsian=True))
            if t == 0:
                if k not in zero_inside:
                    zero_inside[k] = s_k_estimate(fuchs, k, radius, workers) > band
                rows.append(SweepRow(t, k, math.inf, thr, math.inf,
                                     "inside" if zero_inside[k] else "indeterminate"))
                continue
            ct = c / abs(t)
            m = ct - thr
            rows.append(SweepRow(t, k, ct, thr, m, verdict_of(m, band)))
    observed: dict[int, float | None] = {}
    for k in predicted:
        ks = [r for r in rows if r.k == k]
        observed[k] = next((r.t for r in ks if abs(r.t) > 0 and r.verdict != "inside"), None)
    # Anosov levels may only disappear as |t| grows
    by_abs = sorted({abs(t) for t in grid})
    sets = []
    for a in by_abs:
        s = set(levels)
        for r in rows:
            if abs(r.t) == a and r.verdict != "inside":
                s.discard(r.k)
        sets.append(s)
    monotone = all(b <= a for a, b in zip(sets, sets[1:]))
    return SweepResult(d, p, q, radius, band, c, rows, predicted, observed, monotone, levels)


def boundary_formula(p: int, q: int, k: int, length: float) -> float:
    """``|t| = pq(q-2k+1)/(p+q) * len``."""
    if not length > 0:
        raise ValidationError("length must be positive")
    if p < 1 or q < 2 or k < 1:
        raise ValidationError("need p >= 1, q >= 2, k >= 1")
    return float(Fraction(p * q * (q - 2 * k + 1), p + q)) * length


def intersection_character(presentation: GroupPresentation) -> RealCharacter:
    """Value 1 on the first generator ``a1`` and 0 on the others."""
    if presentation.kind != "surface":
        raise ValidationError("the intersection character needs a surface presentation")
    vals = [0.0] * presentation.n_generators
    vals[0] = 1.0
    return RealCharacter(vals)


@dataclass
class BoundaryComparison:
    length: float
    predicted_t: float
    observed_t: float
    c_R: float
    witness: tuple
    relative_gap: float
    convention: str = LENGTH_CONVENTION


def boundary_comparison(eta: Representation, p: int, q: int, k: int, radius: int,
                        workers: int = 1) -> BoundaryComparison:
    """Formula value with ``len = log lambda_1(eta(a1))`` against the flip of ``t * phi``.

    The flip sits at ``c_R(phi) * pq(q-2k+1)/(p+q)``; since ``a1`` is in the
    ball, ``c_R <= len`` and the observed flip never exceeds the formula.
    Whether the two agree depends on the metric (a hypothesis not checked here).
    """
    phi = intersection_character(eta.presentation)
    length = float(np.log(eigen_magnitudes(eta.images[0])[0]))
    pred = boundary_formula(p, q, k, length)
    c, w = criterion_inf(ComposedFuchsian(eta, q), k, phi, radius, workers)
    obs = predicted_transition(c, p, q, k)
    return BoundaryComparison(length, pred, obs, c, w, (pred - obs) / pred)
