"""Two-dimensional slices of the domain, and nesting across (p, q, k)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._io import fmt, write_csv
from ..errors import ValidationError
from ..reps import ComposedFuchsian
from .domain import (_criterion_many, _require_symmetric, _source_for, as_character_matrix,
                     level_extremes, scale_factor, threshold)
from .tables import character_space, spectral_table

SVG_SIZE = 400
SVG_MARGIN = 20


def angles(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


@dataclass
class SliceResult:
    """Boundary of the domain in the plane spanned by two characters."""

    psi1: np.ndarray
    psi2: np.ndarray
    theta: np.ndarray
    radius: np.ndarray
    witness_rows: np.ndarray
    p: int
    q: int
    k: int
    R: int
    fuchsian: bool
    r_inner: np.ndarray | None = None
    r_outer: np.ndarray | None = None
    words: list = field(default_factory=list, repr=False)
    # psi1, psi2 dependent: the slice is a segment of a line through 0
    degenerate: bool = False

    @property
    def bounded(self) -> np.ndarray:
        return np.isfinite(self.radius)

    @property
    def vertices(self) -> np.ndarray:
        """Polygon vertices ``(r cos t, r sin t)`` at the bounded angles."""
        b = self.bounded
        r, t = self.radius[b], self.theta[b]
        return np.column_stack([r * np.cos(t), r * np.sin(t)])

    @property
    def boundary_characters(self) -> np.ndarray:
        """``r(t) u_t`` as characters (rows) at the bounded angles."""
        b = self.bounded
        u = np.cos(self.theta[b])[:, None] * self.psi1 + np.sin(self.theta[b])[:, None] * self.psi2
        return self.radius[b][:, None] * u

    def symmetry_defect(self) -> float:
        """Max relative ``|r(t) - r(t + pi)|`` (needs an even number of angles)."""
        n = len(self.theta)
        if n % 2:
            raise ValueError("central symmetry needs an even number of angles")
        a, b = self.radius, np.roll(self.radius, -n // 2)
        both = np.isfinite(a) & np.isfinite(b)
        if np.any(np.isfinite(a) != np.isfinite(b)):
            return math.inf
        return float(np.max(np.abs(a[both] - b[both]) / np.maximum(a[both], b[both]), initial=0.0))

    def to_csv(self, meta: dict | None = None) -> str:
        return write_csv(("theta", "radius"), zip(self.theta.tolist(), self.radius.tolist()), meta)

    def to_svg(self) -> str:
        """Polygon plus the inner and outer uniform-norm balls, in a fixed viewBox.

        Coordinates are scaled so the outer ball just fits, which keeps slices
        for different (p, q, k) of the same representation comparable.
        """
        outer = self.r_outer if self.r_outer is not None else self.radius
        finite = outer[np.isfinite(outer)]
        extent = float(finite.max()) if len(finite) else 1.0
        half = SVG_SIZE / 2
        s = (half - SVG_MARGIN) / extent

        def path(r):
            ok = np.isfinite(r)
            pts = [(half + s * ri * math.cos(t), half - s * ri * math.sin(t))
                   for ri, t in zip(r[ok], self.theta[ok])]
            return " ".join(f"{fmt(round(x, 6))},{fmt(round(y, 6))}" for x, y in pts)

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
               f'width="{SVG_SIZE}" height="{SVG_SIZE}">',
               f'<title>slice p={self.p} q={self.q} k={self.k} R={self.R}</title>',
               f'<line x1="0" y1="{half:g}" x2="{SVG_SIZE}" y2="{half:g}" stroke="#ccc"/>',
               f'<line x1="{half:g}" y1="0" x2="{half:g}" y2="{SVG_SIZE}" stroke="#ccc"/>']
        if self.r_outer is not None:
            out.append(f'<polygon points="{path(self.r_outer)}" fill="none" stroke="#999" stroke-dasharray="4 3"/>')
        if self.r_inner is not None:
            out.append(f'<polygon points="{path(self.r_inner)}" fill="none" stroke="#999" stroke-dasharray="1 2"/>')
        out.append(f'<polygon points="{path(self.radius)}" fill="#4a7ab022" stroke="#1f4e8c"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def slice_domain(p: int, q: int, k: int, zeta, psi1, psi2, n: int, radius: int,
                 workers: int = 1, bounds: bool = True) -> SliceResult:
    """Boundary radius along ``cos(t) psi1 + sin(t) psi2`` for ``n`` equally spaced angles.

    ``r(t) = c_R(u_t) / threshold`` by homogeneity of the criterion.  Angles
    where ``u_t`` vanishes on the whole ball get radius ``inf``.
    """
    src = _source_for(q, k, zeta)
    if not src.fuchsian:
        _require_symmetric(src.rep, k, workers)
    pres = src.rep.presentation
    basis = as_character_matrix(np.vstack([np.asarray(psi1, float), np.asarray(psi2, float)]), pres)
    rank = np.linalg.matrix_rank(basis)
    if rank == 0:
        raise ValidationError("slice characters are both zero")
    if n < 3:
        raise ValidationError("need at least 3 angles")
    theta = angles(n)
    u = np.cos(theta)[:, None] * basis[0] + np.sin(theta)[:, None] * basis[1]
    table = spectral_table(src.rep, radius, workers)
    vals, rows = _criterion_many(table, src, u)
    scale = float(scale_factor(p, q, k, src.fuchsian))
    res = SliceResult(basis[0], basis[1], theta, vals * scale, rows, p, q, k, radius, src.fuchsian,
                      words=table.words, degenerate=rank < 2)
    if bounds:
        s_lvl, top_lvl = level_extremes(zeta, k, radius, workers)
        sup = np.max(np.abs(u), axis=1)
        plain = float(scale_factor(p, q, k, False))
        res.r_inner = plain * s_lvl * src.factor / sup
        res.r_outer = plain * top_lvl * src.factor / sup
    return res


@dataclass
class NestingReport:
    pairs_checked: int
    violations: list[tuple]
    ray_checks: int
    ray_violations: list[tuple]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.ray_violations

    def __bool__(self):
        return self.ok


def _admissible(p_max: int, q_max: int):
    for p in range(1, p_max + 1):
        for q in range(2, q_max + 1):
            for k in range(1, q // 2 + 1):
                yield p, q, k


def nesting_check(eta, q_max: int = 10, p_max: int = 10, radius: int = 8, n_rays: int = 8,
                  workers: int = 1) -> NestingReport:
    """Exact monotonicity of ``(p+q)/(pq(q-2k+1))`` plus strict nesting of sampled radii.

    Decreasing in ``p`` and ``q`` and increasing in ``k`` means the domains
    grow with ``p`` and ``q`` and shrink with ``k``.
    """
    f = {t: threshold(*t, fuchsian=True) for t in _admissible(p_max, q_max)}
    pairs = []
    for (p, q, k) in f:
        for nxt, want in (((p + 1, q, k), -1), ((p, q + 1, k), -1), ((p, q, k + 1), 1)):
            if nxt in f:
                pairs.append(((p, q, k), nxt, want))
    violations = [(a, b) for a, b, want in pairs if (f[b] - f[a]) * want <= 0]

    base = eta.base if isinstance(eta, ComposedFuchsian) else eta
    probe = ComposedFuchsian(base, 2)
    pres = base.presentation
    theta = angles(n_rays)
    space = character_space(pres)[:2]
    if space.shape[0] < 2:
        u = np.cos(theta)[:, None] * space[0]
    else:
        u = np.cos(theta)[:, None] * space[0] + np.sin(theta)[:, None] * space[1]
    src = _source_for(2, 1, probe)
    table = spectral_table(src.rep, radius, workers)
    c, _ = _criterion_many(table, src, u)
    ray_violations = []
    checks = 0
    for a, b, want in pairs:
        ra = c * float(1 / f[a])
        rb = c * float(1 / f[b])
        for i in np.flatnonzero(np.isfinite(c)):
            checks += 1
            # larger threshold, smaller domain
            if not ((rb[i] > ra[i]) if want < 0 else (rb[i] < ra[i])):
                ray_violations.append((a, b, float(theta[i])))
    return NestingReport(len(pairs), violations, checks, ray_violations)
