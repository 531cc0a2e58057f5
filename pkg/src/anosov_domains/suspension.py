"""Reducible suspensions rho_{p,q}(phi, xi, zeta, kappa) and their eigenvalue checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from ._io import write_csv
from .errors import ValidationError
from .group.ball import BallIndex, enumerate_ball
from .group.presentation import RealCharacter, character_eval, character_validate
from .group.words import Word, format_word, multiply
from .reps import Representation, rep_eval, rep_validate, symmetric_residual

STRICT_TOL = 1e-9
XI_SAMPLE_RADIUS = 4
# eigenvalues of a defective unipotent block are only resolved to ~sqrt(eps)
XI_SAMPLE_TOL = 1e-6


@dataclass(frozen=True)
class Zero:
    """kappa identically zero (block-diagonal suspension)."""


@dataclass(frozen=True, eq=False)
class CoboundarySeed:
    """kappa(g) = M V(g) - U(g) M for a fixed ``p x q`` matrix ``M``."""

    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", np.array(self.M))


@dataclass(frozen=True, eq=False)
class ExplicitTable:
    """One ``p x q`` block per generator, extended to words by the block formula."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(np.array(b) for b in self.blocks))


KappaSource = Union[Zero, CoboundarySeed, ExplicitTable]


@dataclass(eq=False)
class SuspensionSpec:
    p: int
    q: int
    phi: RealCharacter
    xi: Representation
    zeta: Representation
    kappa: KappaSource = field(default_factory=Zero)
    rel_tol: float = 1e-8
    xi_sample_radius: int = XI_SAMPLE_RADIUS

    def __post_init__(self):
        if self.p < 1 or self.q < 2:
            raise ValidationError("need p >= 1 and q >= 2")
        if not isinstance(self.phi, RealCharacter):
            self.phi = RealCharacter(self.phi)
        pres = self.zeta.presentation
        if self.xi.presentation != pres:
            raise ValidationError("xi and zeta must share a presentation")
        if self.xi.dimension != self.p or self.zeta.dimension != self.q:
            raise ValidationError(f"xi must be {self.p}-dimensional and zeta {self.q}-dimensional")
        if len(self.phi) != pres.n_generators or not character_validate(self.phi, pres):
            raise ValidationError("phi is not a character of the presentation")
        for name, rho in (("xi", self.xi), ("zeta", self.zeta)):
            if not rep_validate(rho, self.rel_tol):
                raise ValidationError(f"{name} fails relator or determinant validation")
        ball = enumerate_ball(pres, self.xi_sample_radius, dedup=True)
        mags = self.xi.ball_magnitudes(ball)
        bad = np.flatnonzero(np.any(np.abs(mags - 1.0) > XI_SAMPLE_TOL, axis=1))
        if len(bad):
            w = format_word(ball.words[bad[0]], pres.generators)
            raise ValidationError(f"xi is not weakly unipotent on {w}")
        shape = (self.p, self.q)
        if isinstance(self.kappa, CoboundarySeed) and self.kappa.M.shape != shape:
            raise ValidationError(f"coboundary seed must be {shape}")
        if isinstance(self.kappa, ExplicitTable):
            if len(self.kappa.blocks) != pres.n_generators:
                raise ValidationError("kappa table needs one block per generator")
            if any(b.shape != shape for b in self.kappa.blocks):
                raise ValidationError(f"kappa blocks must be {shape}")

    @property
    def d(self) -> int:
        return self.p + self.q

    @property
    def presentation(self):
        return self.zeta.presentation

    def U(self, word: Sequence[int]) -> np.ndarray:
        return math.exp(character_eval(self.phi, word) / self.p) * rep_eval(self.xi, word)

    def V(self, word: Sequence[int]) -> np.ndarray:
        return math.exp(-character_eval(self.phi, word) / self.q) * rep_eval(self.zeta, word)

    def generator_kappa(self) -> list[np.ndarray]:
        n = self.presentation.n_generators
        if isinstance(self.kappa, Zero):
            return [np.zeros((self.p, self.q))] * n
        if isinstance(self.kappa, CoboundarySeed):
            kap = coboundary_kappa(self.kappa.M, self.phi, self.xi, self.zeta)
            return [kap((i + 1,)) for i in range(n)]
        return list(self.kappa.blocks)

    def reference(self) -> "SuspensionSpec":
        """Same data with ``xi = I`` and ``kappa = 0``."""
        eye = Representation(self.presentation, [np.eye(self.p)] * self.presentation.n_generators, name="I")
        return SuspensionSpec(self.p, self.q, self.phi, eye, self.zeta, Zero(), self.rel_tol,
                              self.xi_sample_radius)


def _block(u: np.ndarray, k: np.ndarray, v: np.ndarray) -> np.ndarray:
    p, q = u.shape[0], v.shape[0]
    dtype = np.result_type(u, k, v)
    out = np.zeros((p + q, p + q), dtype=dtype)
    out[:p, :p] = u
    out[:p, p:] = k
    out[p:, p:] = v
    return out


def build_suspension(spec: SuspensionSpec) -> Representation:
    """Block upper-triangular representation of dimension ``p + q``."""
    images = []
    for i, kap in enumerate(spec.generator_kappa()):
        images.append(_block(spec.U((i + 1,)), kap, spec.V((i + 1,))))
    rho = Representation(spec.presentation, images,
                         name=f"rho_{spec.p},{spec.q}({spec.zeta.name or 'zeta'})")
    report = rep_validate(rho, spec.rel_tol)
    if not report.valid:
        if isinstance(spec.kappa, ExplicitTable):
            raise ValidationError(
                f"kappa table is not a cocycle (relator residual {report.max_relator_residual:.3g})")
        raise ValidationError(f"suspension fails validation (relator residual {report.max_relator_residual:.3g})")
    return rho


def coboundary_kappa(M, phi: RealCharacter, xi: Representation, zeta: Representation) -> Callable[[Sequence[int]], np.ndarray]:
    """``kappa(g) = M V(g) - U(g) M`` with ``U = e^(phi/p) xi`` and ``V = e^(-phi/q) zeta``."""
    M = np.asarray(M)
    p, q = xi.dimension, zeta.dimension
    if M.shape != (p, q):
        raise ValidationError(f"seed must be {p}x{q}")

    def kappa(word: Sequence[int]) -> np.ndarray:
        t = character_eval(phi, word)
        return M @ (math.exp(-t / q) * rep_eval(zeta, word)) - (math.exp(t / p) * rep_eval(xi, word)) @ M

    return kappa


def table_kappa(blocks: Sequence, phi: RealCharacter, xi: Representation, zeta: Representation) -> Callable[[Sequence[int]], np.ndarray]:
    """Extend per-generator blocks to words through the block product."""
    spec_u = lambda w: math.exp(character_eval(phi, w) / xi.dimension) * rep_eval(xi, w)
    spec_v = lambda w: math.exp(-character_eval(phi, w) / zeta.dimension) * rep_eval(zeta, w)
    p = xi.dimension
    letters = {}
    for i, b in enumerate(blocks):
        g = _block(spec_u((i + 1,)), np.asarray(b), spec_v((i + 1,)))
        letters[i + 1] = g
        letters[-(i + 1)] = np.linalg.inv(g)

    def kappa(word: Sequence[int]) -> np.ndarray:
        out = np.eye(p + zeta.dimension, dtype=next(iter(letters.values())).dtype)
        for x in word:
            out = out @ letters[x]
        return out[:p, p:]

    return kappa


def cocycle_residual(kappa: Callable, phi: RealCharacter, xi: Representation, zeta: Representation,
                     pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> float:
    """Max over pairs of ``|kappa(gh) - U(g) kappa(h) - kappa(g) V(h)|`` (Frobenius)."""
    p, q = xi.dimension, zeta.dimension
    U = lambda w: math.exp(character_eval(phi, w) / p) * rep_eval(xi, w)
    V = lambda w: math.exp(-character_eval(phi, w) / q) * rep_eval(zeta, w)
    worst = 0.0
    for g, h in pairs:
        res = kappa(multiply(g, h)) - U(g) @ kappa(h) - kappa(g) @ V(h)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def _ball(spec_or_pres, radius: int) -> BallIndex:
    pres = getattr(spec_or_pres, "presentation", spec_or_pres)
    return enumerate_ball(pres, radius, dedup=True)


def reference_magnitudes(spec: SuspensionSpec, ball: BallIndex, workers: int = 1) -> np.ndarray:
    """Spectra of the ``(phi, I, zeta, 0)`` suspension: exact block union."""
    t = ball.exponent_sums @ spec.phi.as_array()
    lam = spec.zeta.ball_magnitudes(ball, workers) * np.exp(-t / spec.q)[:, None]
    top = np.repeat(np.exp(t / spec.p)[:, None], spec.p, axis=1)
    return -np.sort(-np.concatenate([top, lam], axis=1), axis=1)


def generality_check(spec: SuspensionSpec, radius: int, rtol: float = 1e-7, workers: int = 1,
                     rho: Representation | None = None) -> bool:
    """Spectra of rho(w) agree with the ``xi = I, kappa = 0`` reference on the ball."""
    return generality_deviation(spec, radius, workers, rho) <= rtol


def generality_deviation(spec: SuspensionSpec, radius: int, workers: int = 1,
                         rho: Representation | None = None) -> float:
    rho = rho if rho is not None else build_suspension(spec)
    ball = _ball(spec, radius)
    got = rho.ball_magnitudes(ball, workers)
    ref = reference_magnitudes(spec, ball, workers)
    return float(np.max(np.abs(got - ref) / ref)) if len(ball) else 0.0


@dataclass(frozen=True)
class SandwichRecord:
    word: Word
    norm: int
    phi: float
    lam_k: float
    lam_qk1: float
    exp_term: float
    lower_margin: float
    upper_margin: float
    passed: bool
    strict: bool


@dataclass
class SandwichReport:
    k: int
    radius: int
    symmetric: bool
    strict_tol: float
    records: list[SandwichRecord]
    generators: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def __bool__(self):
        return self.passed

    @property
    def violations(self) -> list[SandwichRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def first_violation(self) -> SandwichRecord | None:
        return next((r for r in self.records if not r.passed), None)

    COLUMNS = ("word", "norm", "phi", "lam_k", "lam_qk1", "exp_term", "pass", "strict")

    def to_csv(self, meta: dict | None = None) -> str:
        rows = ([format_word(r.word, self.generators or None), r.norm, r.phi, r.lam_k, r.lam_qk1,
                 r.exp_term, r.passed, r.strict] for r in self.records)
        return write_csv(self.COLUMNS, rows, meta)


def _sandwich(spec: SuspensionSpec, k: int, radius: int, strict_tol: float, symmetric: bool,
              workers: int) -> SandwichReport:
    q = spec.q
    if not 1 <= k <= q / 2:
        raise ValidationError("need 1 <= k <= q/2")
    ball = _ball(spec, radius)
    mags = spec.zeta.ball_magnitudes(ball, workers)
    t = ball.exponent_sums @ spec.phi.as_array()
    s = (spec.p + q) / (spec.p * q)
    log_k = np.log(mags[:, k - 1])
    log_qk1 = np.log(mags[:, q - k])
    if symmetric:
        expo = s * np.abs(t)
        lower = -expo - log_qk1
    else:
        expo = s * t
        lower = expo - log_qk1
    upper = log_k - expo
    strict = (lower > strict_tol) & (upper > strict_tol)
    weak = (lower >= -strict_tol) & (upper >= -strict_tol)
    passed = strict if spec.presentation.is_torsion_free else weak
    with np.errstate(over="ignore"):
        exp_term = np.exp(expo)
    trans = np.asarray(ball.translation)
    records = [SandwichRecord(w, int(trans[i]), float(t[i]), float(mags[i, k - 1]), float(mags[i, q - k]),
                              float(exp_term[i]), float(lower[i]), float(upper[i]), bool(passed[i]),
                              bool(strict[i]))
               for i, w in enumerate(ball.words)]
    return SandwichReport(k, radius, symmetric, strict_tol, records, spec.presentation.generators)


def sandwich_check(spec: SuspensionSpec, k: int, radius: int, strict_tol: float = STRICT_TOL,
                   workers: int = 1) -> SandwichReport:
    """``lambda_{q-k+1}(zeta(g)) <= e^((p+q) phi(g)/(pq)) <= lambda_k(zeta(g))`` on the ball."""
    return _sandwich(spec, k, radius, strict_tol, False, workers)


def symmetric_sandwich_check(spec: SuspensionSpec, k: int, radius: int, strict_tol: float = STRICT_TOL,
                             workers: int = 1, symmetry_tol: float = 1e-7) -> SandwichReport:
    """As :func:`sandwich_check` with ``|phi(g)|`` and the lower bound mirrored."""
    res = symmetric_residual(spec.zeta, k, min(radius, 4), workers)
    if res > symmetry_tol:
        raise ValidationError(f"zeta is not symmetric at level {k} (residual {res:.3g})")
    return _sandwich(spec, k, radius, strict_tol, True, workers)


@dataclass
class QIEReport:
    radius: int
    min_margin: float
    witness: Word
    ok: bool

    def __bool__(self):
        return self.ok


def qie_slope_check(rho: Representation, zeta: Representation, radius: int, workers: int = 1,
                    tol: float = 1e-9) -> QIEReport:
    """``len(rho(w)) >= len(zeta(w)) / (2 sqrt(q)) - tol`` for every ball word."""
    if rho.presentation != zeta.presentation:
        raise ValidationError("rho and zeta must share a presentation")
    q = zeta.dimension
    ball = _ball(rho, radius)
    lr = np.sqrt(np.sum(rho.ball_log_magnitudes(ball, workers) ** 2, axis=1))
    lz = np.sqrt(np.sum(zeta.ball_log_magnitudes(ball, workers) ** 2, axis=1))
    margin = lr - lz / (2 * math.sqrt(q))
    if not len(ball):
        return QIEReport(radius, 0.0, (), True)
    i = int(np.argmin(margin))
    return QIEReport(radius, float(margin[i]), ball.words[i], bool(margin[i] >= -tol))
