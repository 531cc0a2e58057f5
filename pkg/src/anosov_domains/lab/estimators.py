"""Estimator-style front ends: fit on a representation, predict on characters."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ..errors import ValidationError
from ..reps import ComposedFuchsian, Representation
from .domain import BAND, _criterion_many, _require_symmetric, _source_for, threshold, verdict_of
from .gaps import gap_series, growth_slope, s_k_estimate
from .tables import as_character_matrix, spectral_table


class AnosovDomain(BaseEstimator):
    """Ball estimate of the domain of ``(p, q, k)``-Anosov suspensions.

    ``fit`` takes the representation ``zeta`` (or ``ComposedFuchsian``) and
    tabulates its spectra over the ball; ``predict`` maps characters (rows of
    ``Phi``) to ``inside`` / ``outside`` / ``indeterminate``.

    Examples
    --------
    >>> from anosov_domains import AnosovDomain, schottky_rep
    >>> est = AnosovDomain(p=1, q=2, k=1, radius=6).fit(schottky_rep())
    >>> est.predict([[0.1, 0.0], [5.0, 0.0]]).tolist()
    ['inside', 'outside']
    """

    def __init__(self, p: int = 1, q: int = 2, k: int = 1, radius: int = 8, band: float = BAND,
                 workers: int = 1):
        self.p = p
        self.q = q
        self.k = k
        self.radius = radius
        self.band = band
        self.workers = workers

    def fit(self, zeta, y=None):
        if not isinstance(zeta, (Representation, ComposedFuchsian)):
            raise ValidationError("fit expects a Representation or ComposedFuchsian")
        if self.radius < 1:
            raise ValidationError("radius must be >= 1")
        src = _source_for(self.q, self.k, zeta)
        if not src.fuchsian:
            _require_symmetric(src.rep, self.k, self.workers)
        self.source_ = src
        self.table_ = spectral_table(src.rep, self.radius, self.workers)
        self.threshold_ = float(threshold(self.p, self.q, self.k, src.fuchsian))
        self.presentation_ = src.rep.presentation
        self.n_features_in_ = self.presentation_.n_generators
        try:
            self.zero_inside_ = s_k_estimate(zeta, self.k, self.radius, self.workers) > self.band
        except ValidationError:
            # no classes long enough for a slope estimate
            self.zero_inside_ = False
        return self

    def _phis(self, Phi) -> np.ndarray:
        check_is_fitted(self, "table_")
        arr = check_array(Phi, dtype=float, ensure_min_samples=1)
        if arr.shape[1] != self.n_features_in_:
            raise ValidationError(f"expected {self.n_features_in_} character values, got {arr.shape[1]}")
        return as_character_matrix(arr, self.presentation_)

    def criterion(self, Phi) -> np.ndarray:
        """Ball criterion ``c_R`` per character (``inf`` where it vanishes on the ball)."""
        phis = self._phis(Phi)
        vals, _ = _criterion_many(self.table_, self.source_, phis)
        return vals

    def decision_function(self, Phi) -> np.ndarray:
        """Margin ``c_R - threshold``; positive inside.

        The zero character gets ``+inf`` when the level slope ``s_k`` is
        positive on the ball and 0 (indeterminate) otherwise.
        """
        phis = self._phis(Phi)
        vals, _ = _criterion_many(self.table_, self.source_, phis)
        out = vals - self.threshold_
        zero = ~np.any(phis, axis=1)
        if np.any(zero):
            out[zero] = np.inf if self.zero_inside_ else 0.0
        return out

    def predict(self, Phi) -> np.ndarray:
        return np.array([verdict_of(m, self.band) for m in self.decision_function(Phi)], dtype=object)

    def witnesses(self, Phi) -> list:
        phis = self._phis(Phi)
        _, rows = _criterion_many(self.table_, self.source_, phis)
        return [self.table_.words[r] if r >= 0 else None for r in rows]


class GapGrowth(BaseEstimator):
    """Linear minorant ``a * ||g|| - b`` of the level-``k`` eigenvalue gap."""

    def __init__(self, k: int = 1, radius: int = 8, cutoff_fraction: float = 0.5, workers: int = 1):
        self.k = k
        self.radius = radius
        self.cutoff_fraction = cutoff_fraction
        self.workers = workers

    def fit(self, rho, y=None):
        if not isinstance(rho, Representation):
            raise ValidationError("fit expects a Representation")
        self.series_ = gap_series(rho, self.k, self.radius, self.workers)
        self.a_hat_, self.b_hat_ = growth_slope(self.series_, self.cutoff_fraction)
        return self

    def predict(self, norms) -> np.ndarray:
        """Lower bound on the gap at the given translation lengths."""
        check_is_fitted(self, "a_hat_")
        x = check_array(np.asarray(norms, dtype=float).reshape(-1, 1), ensure_min_samples=1)[:, 0]
        return self.a_hat_ * x - self.b_hat_
