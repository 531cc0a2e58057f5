"""Eigenvalue-gap growth along a ball and the slope estimator s_k."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._io import write_csv
from ..errors import ValidationError
from ..group.words import Word, format_word
from ..reps import Representation, symmetric_residual
from ..spectral import TIE_RTOL
from .tables import level_source, spectral_table

SYMMETRY_TOL = 1e-7
SYMMETRY_RADIUS = 3


@dataclass
class GapSeries:
    """Points ``(||g||, log(lambda_k / lambda_{k+1}), row)`` over the nontrivial classes of a ball."""

    k: int
    radius: int
    norms: np.ndarray
    gaps: np.ndarray
    rows: np.ndarray
    words: list[Word]
    generators: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.norms)

    def to_csv(self, meta: dict | None = None) -> str:
        rows = ((format_word(w, self.generators or None), int(n), float(g))
                for w, n, g in zip(self.words, self.norms, self.gaps))
        return write_csv(("word", "norm", "gap"), rows, meta)


def gap_series(rho: Representation, k: int, radius: int, workers: int = 1) -> GapSeries:
    """Logarithmic gap at level ``k`` for each class (free) or word (otherwise).

    Words whose translation length is not certified, or is 0 (trivial in the
    group), are left out.
    """
    d = rho.dimension
    if not 1 <= k < d:
        raise ValidationError(f"need 1 <= k < {d}")
    table = spectral_table(rho, radius, workers)
    norms = np.asarray(table.norms)
    keep = np.flatnonzero(norms >= 1)
    gaps = table.logs[keep, k - 1] - table.logs[keep, k]
    words = [table.words[i] for i in keep]
    return GapSeries(k, radius, norms[keep], gaps, keep, words, rho.presentation.generators)


def growth_slope(series: GapSeries, cutoff_fraction: float = 0.5) -> tuple[float, float]:
    """``(a_hat, b_hat)`` with ``a_hat * ||g|| - b_hat`` minorising every point.

    ``a_hat`` is the least slope ``gap / ||g||`` among points with
    ``||g|| >= cutoff_fraction * R``.
    """
    if not len(series):
        raise ValidationError("empty gap series")
    sel = series.norms >= cutoff_fraction * series.radius
    if not np.any(sel):
        raise ValidationError("no points above the cutoff")
    a_hat = float(np.min(series.gaps[sel] / series.norms[sel]))
    b_hat = max(0.0, float(np.max(a_hat * series.norms - series.gaps)))
    return a_hat, b_hat


def _require_symmetric(zeta: Representation, k: int, workers: int):
    res = symmetric_residual(zeta, k, SYMMETRY_RADIUS, workers)
    if res > SYMMETRY_TOL:
        raise ValidationError(f"representation is not symmetric at level {k} (residual {res:.3g})")


def s_k_estimate(zeta, k: int, radius: int, workers: int = 1,
                 return_witness: bool = False):
    """Least ``log lambda_k(zeta(g)) / ||g||`` over classes with ``||g|| >= max(2, R/2)``.

    Accepts a plain representation or ``ComposedFuchsian`` (power law applied to
    ``eta``).  Non-increasing in ``R``: enlarging the ball only adds classes.
    """
    src = level_source(zeta, k)
    rep, col, factor = src.rep, src.column, src.factor
    if not src.fuchsian:
        _require_symmetric(rep, k, workers)
    table = spectral_table(rep, radius, workers)
    norms = np.asarray(table.norms)
    sel = np.flatnonzero(norms >= max(2.0, radius / 2))
    if not len(sel):
        raise ValidationError(f"no classes with length >= max(2, R/2) at R={radius}")
    ratios = factor * table.logs[sel, col] / norms[sel]
    value = float(ratios.min())
    i = int(np.argmax(ratios <= value + TIE_RTOL * abs(value)))
    return (value, table.words[sel[i]]) if return_witness else value
