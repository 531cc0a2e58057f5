"""Scenario-driven command line front end.

Exit codes: 0 computed with definite verdicts, 1 computed but some verdict
indeterminate, 2 input or validation error (one JSON line on stderr).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import lab
from ._io import fmt, write_csv
from .errors import AnosovDomainsError
from .group import GroupPresentation, RealCharacter, character_validate, enumerate_ball, format_word, parse_word
from .reps import ComposedFuchsian, Representation, rep_validate, schottky_rep, surface_rep
from .suspension import (CoboundarySeed, ExplicitTable, SuspensionSpec, Zero, build_suspension,
                         qie_slope_check, sandwich_check, symmetric_sandwich_check)

COMMANDS = ("validate", "spectrum", "suspend", "gaps", "domain", "slice", "sweep", "nesting", "bounds")


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FreeSpec(_Model):
    kind: Literal["free"]
    rank: Annotated[int, Field(ge=1)] = 2
    generators: Optional[list[str]] = None


class SurfaceSpec(_Model):
    kind: Literal["surface"]
    genus: Annotated[int, Field(ge=1)] = 2


class CustomSpec(_Model):
    kind: Literal["custom"]
    generators: list[str]
    relators: list[str] = []


PresentationSpec = Annotated[Union[FreeSpec, SurfaceSpec, CustomSpec], Field(discriminator="kind")]

# a matrix entry is a real number or an [re, im] pair
Entry = Union[float, Annotated[list[float], Field(min_length=2, max_length=2)]]
MatrixSpec = list[list[Entry]]


class SchottkySpec(_Model):
    builder: Literal["schottky"]
    n: Annotated[int, Field(ge=1)] = 2
    multiplier: Annotated[float, Field(gt=1)] = 3.0
    tilt: float = math.pi / 4


class Genus2Spec(_Model):
    builder: Literal["genus2"]


class SurfaceRepSpec(_Model):
    builder: Literal["surface"]
    genus: Annotated[int, Field(ge=2)] = 2


class ExplicitSpec(_Model):
    builder: Literal["explicit"]
    matrices: list[MatrixSpec]


class SymPowerSpec(_Model):
    builder: Literal["sym_power"]
    q: Annotated[int, Field(ge=2)]
    base: "RepSpec"


RepSpec = Annotated[Union[SchottkySpec, Genus2Spec, SurfaceRepSpec, ExplicitSpec, SymPowerSpec],
                    Field(discriminator="builder")]
SymPowerSpec.model_rebuild()


class ZeroKappa(_Model):
    kind: Literal["zero"]


class CoboundaryKappa(_Model):
    kind: Literal["coboundary"]
    M: MatrixSpec


class TableKappa(_Model):
    kind: Literal["explicit"]
    blocks: list[MatrixSpec]


KappaSpec = Annotated[Union[ZeroKappa, CoboundaryKappa, TableKappa], Field(discriminator="kind")]


class SuspensionBlock(_Model):
    xi: Optional[RepSpec] = None
    kappa: KappaSpec = ZeroKappa(kind="zero")


class GridSpec(_Model):
    """``num`` points from ``start`` to ``stop``; with ``relative`` the ends are multiples of c_R."""

    start: float = 0.0
    stop: float
    num: Annotated[int, Field(ge=1)]
    relative: bool = False


class TaskSpec(_Model):
    p: Annotated[int, Field(ge=1)] = 1
    q: Optional[Annotated[int, Field(ge=2)]] = None
    k: Annotated[int, Field(ge=1)] = 1
    R: Annotated[int, Field(ge=1)] = 8
    t_grid: Optional[Union[list[float], GridSpec]] = None
    N: Annotated[int, Field(ge=3)] = 64
    band: Annotated[float, Field(ge=0)] = lab.BAND
    d: Optional[Annotated[int, Field(ge=3)]] = None
    p_max: Annotated[int, Field(ge=1)] = 10
    q_max: Annotated[int, Field(ge=2)] = 10
    n_directions: Annotated[int, Field(ge=1)] = 50
    seed: int = 0
    strict_tol: Annotated[float, Field(ge=0)] = 1e-9
    rel_tol: Annotated[float, Field(gt=0)] = 1e-8
    cutoff_fraction: Annotated[float, Field(gt=0, le=1)] = 0.5
    words: Optional[list[str]] = None


class OutputSpec(_Model):
    csv: Optional[str] = None
    svg: Optional[str] = None


class Scenario(_Model):
    presentation: Optional[PresentationSpec] = None
    representation: RepSpec
    character: Optional[list[float]] = None
    characters: Optional[Annotated[list[list[float]], Field(min_length=2, max_length=2)]] = None
    suspension: Optional[SuspensionBlock] = None
    task: TaskSpec = TaskSpec()
    outputs: OutputSpec = OutputSpec()

    @model_validator(mode="after")
    def _check(self):
        t = self.task
        if t.q is not None and t.k > t.q / 2:
            raise ValueError("task.k must satisfy 1 <= k <= q/2")
        return self


class CLIError(Exception):
    pass


def _matrix(spec: MatrixSpec, square: bool = True) -> np.ndarray:
    rows = [[complex(e[0], e[1]) if isinstance(e, list) else complex(e) for e in row] for row in spec]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise CLIError("matrix rows must have equal length")
    if square and len(rows) != len(rows[0]):
        raise CLIError("matrices must be square")
    m = np.array(rows)
    return m.real.copy() if not np.any(m.imag) else m


def _presentation(spec) -> GroupPresentation:
    if spec.kind == "free":
        return GroupPresentation.free(spec.generators or spec.rank)
    if spec.kind == "surface":
        return GroupPresentation.surface(spec.genus)
    names = tuple(spec.generators)
    return GroupPresentation(names, tuple(parse_word(r, names) for r in spec.relators), "custom")


def build_rep(spec, pres: GroupPresentation | None):
    if spec.builder == "schottky":
        rep = schottky_rep(spec.n, spec.multiplier, spec.tilt)
    elif spec.builder == "genus2":
        rep = surface_rep(2)
    elif spec.builder == "surface":
        rep = surface_rep(spec.genus)
    elif spec.builder == "explicit":
        if pres is None:
            raise CLIError("explicit representations need a presentation")
        return Representation(pres, [_matrix(m) for m in spec.matrices], name="explicit")
    else:
        base = build_rep(spec.base, pres)
        if isinstance(base, ComposedFuchsian):
            raise CLIError("sym_power of a sym_power is not supported")
        return ComposedFuchsian(base, spec.q)
    if pres is not None and pres != rep.presentation:
        raise CLIError(f"builder {spec.builder!r} does not match the declared presentation")
    return rep


class Context:
    def __init__(self, scenario: Scenario, out: Path, radius: int | None, threads: int, band: float | None):
        self.sc = scenario
        self.out = out
        self.R = radius if radius is not None else scenario.task.R
        if self.R < 1:
            raise CLIError("radius must be >= 1")
        self.workers = max(1, threads)
        self.band = band if band is not None else scenario.task.band
        if self.band < 0:
            raise CLIError("band must be >= 0")
        pres = _presentation(scenario.presentation) if scenario.presentation else None
        self.target = build_rep(scenario.representation, pres)
        self.zeta = self.target.zeta if isinstance(self.target, ComposedFuchsian) else self.target
        self.pres = self.zeta.presentation
        self.q = scenario.task.q if scenario.task.q is not None else self.zeta.dimension
        if self.q != self.zeta.dimension:
            raise CLIError(f"task.q={self.q} but the representation has dimension {self.zeta.dimension}")

    def character(self, required=True) -> RealCharacter | None:
        vals = self.sc.character
        if vals is None:
            if required:
                raise CLIError("scenario needs a character")
            return None
        if len(vals) != self.pres.n_generators:
            raise CLIError(f"character needs {self.pres.n_generators} values")
        phi = RealCharacter(vals)
        if not character_validate(phi, self.pres):
            raise CLIError("character does not vanish on the relators")
        return phi

    def meta(self, **extra) -> dict:
        t = self.sc.task
        base = {"units": "nats", "R": self.R, "band": self.band, "strict_tol": t.strict_tol,
                "rel_tol": t.rel_tol, "convention": lab.LENGTH_CONVENTION}
        base.update(extra)
        return base

    def write(self, default: str, text: str, kind: str = "csv") -> str:
        name = getattr(self.sc.outputs, kind) or default
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text, encoding="utf-8", newline="\n")
        return str(path)


def _words(ctx: Context):
    if ctx.sc.task.words:
        return [parse_word(w, ctx.pres.generators) for w in ctx.sc.task.words]
    return enumerate_ball(ctx.pres, ctx.R).words


def cmd_validate(ctx: Context) -> tuple[dict, int]:
    rep = ctx.zeta
    report = rep_validate(rep, ctx.sc.task.rel_tol)
    phi = ctx.character(required=False)
    ok_phi = True if phi is None else character_validate(phi, ctx.pres)
    rows = [("relator", i, r) for i, r in enumerate(report.relator_residuals)]
    rows += [("det", i, r) for i, r in enumerate(report.det_deviations)]
    path = ctx.write("validate.csv", write_csv(("check", "index", "deviation"), rows, ctx.meta()))
    summary = {"valid": report.valid, "character_valid": ok_phi,
               "max_relator_residual": report.max_relator_residual, "csv": path}
    if not (report.valid and ok_phi):
        raise CLIError(f"validation failed: {json.dumps(summary, sort_keys=True)}")
    return summary, 0


def cmd_spectrum(ctx: Context):
    words = _words(ctx)
    d = ctx.zeta.dimension
    rows = []
    for w in words:
        lam = np.exp(ctx.zeta.word_log_magnitudes(w))
        rows.append([format_word(w, ctx.pres.generators), len(w), *lam.tolist()])
    cols = ("word", "length") + tuple(f"lam_{i + 1}" for i in range(d))
    path = ctx.write("spectrum.csv", write_csv(cols, rows, ctx.meta()))
    return {"words": len(rows), "csv": path}, 0


def _kappa(spec):
    if spec.kind == "zero":
        return Zero()
    if spec.kind == "coboundary":
        return CoboundarySeed(_matrix(spec.M, square=False))
    return ExplicitTable(tuple(_matrix(b, square=False) for b in spec.blocks))


def cmd_suspend(ctx: Context):
    t = ctx.sc.task
    p, q = t.p, ctx.q
    block = ctx.sc.suspension or SuspensionBlock()
    phi = ctx.character()
    if block.xi is None:
        xi = Representation(ctx.pres, [np.eye(p)] * ctx.pres.n_generators, name="I")
    else:
        xi = build_rep(block.xi, ctx.pres)
        if isinstance(xi, ComposedFuchsian):
            xi = xi.zeta
    spec = SuspensionSpec(p, q, phi, xi, ctx.zeta, _kappa(block.kappa), t.rel_tol)
    rho = build_suspension(spec)
    plain = sandwich_check(spec, t.k, ctx.R, t.strict_tol, ctx.workers)
    path = ctx.write("sandwich.csv", plain.to_csv(ctx.meta(k=t.k, p=p, q=q, kind="plain")))
    summary = {"dimension": rho.dimension, "relator_residual": rep_validate(rho).max_relator_residual,
               "sandwich_pass": plain.passed, "csv": path}
    try:
        sym = symmetric_sandwich_check(spec, t.k, ctx.R, t.strict_tol, ctx.workers)
    except AnosovDomainsError:
        sym = None
    if sym is not None:
        summary["symmetric_sandwich_pass"] = sym.passed
        first = sym.first_violation
        summary["symmetric_violation"] = format_word(first.word, ctx.pres.generators) if first else None
        summary["symmetric_csv"] = ctx.write("symmetric_sandwich.csv",
                                             sym.to_csv(ctx.meta(k=t.k, p=p, q=q, kind="symmetric")))
    qie = qie_slope_check(rho, ctx.zeta, ctx.R, ctx.workers)
    summary["qie_ok"] = qie.ok
    summary["qie_min_margin"] = qie.min_margin
    return summary, 0


def cmd_gaps(ctx: Context):
    t = ctx.sc.task
    series = lab.gap_series(ctx.zeta, t.k, ctx.R, ctx.workers)
    a, b = lab.growth_slope(series, t.cutoff_fraction)
    path = ctx.write("gaps.csv", series.to_csv(ctx.meta(k=t.k, a_hat=a, b_hat=b,
                                                        cutoff_fraction=t.cutoff_fraction)))
    return {"a_hat": a, "b_hat": b, "points": len(series), "csv": path}, 0


def cmd_domain(ctx: Context):
    t = ctx.sc.task
    est = lab.membership(t.p, ctx.q, t.k, ctx.target, ctx.character(), ctx.R, ctx.band, ctx.workers)
    w = format_word(est.witness, ctx.pres.generators) if est.witness is not None else ""
    row = (est.c_R, est.threshold, est.margin, est.verdict, est.radius, w)
    path = ctx.write("domain.csv", write_csv(("c_R", "threshold", "margin", "verdict", "R", "witness"), [row],
                                             ctx.meta(p=t.p, q=ctx.q, k=t.k, fuchsian=est.fuchsian)))
    summary = {"verdict": est.verdict, "c_R": est.c_R, "threshold": est.threshold, "margin": est.margin,
               "witness": w, "csv": path}
    return summary, 1 if est.verdict == "indeterminate" else 0


def _basis(ctx: Context):
    if ctx.sc.characters is not None:
        return ctx.sc.characters
    n = ctx.pres.n_generators
    if n < 2:
        raise CLIError("slice needs two characters")
    return [list(np.eye(n)[0]), list(np.eye(n)[1])]


def cmd_slice(ctx: Context):
    t = ctx.sc.task
    psi1, psi2 = _basis(ctx)
    res = lab.slice_domain(t.p, ctx.q, t.k, ctx.target, psi1, psi2, t.N, ctx.R, ctx.workers)
    meta = ctx.meta(p=t.p, q=ctx.q, k=t.k, N=t.N, psi1=" ".join(fmt(float(x)) for x in res.psi1),
                    psi2=" ".join(fmt(float(x)) for x in res.psi2))
    csv_path = ctx.write("slice.csv", res.to_csv(meta))
    svg_path = ctx.write("slice.svg", res.to_svg(), kind="svg")
    unbounded = int(np.sum(~res.bounded))
    summary = {"angles": t.N, "unbounded": unbounded, "symmetry_defect": res.symmetry_defect() if t.N % 2 == 0 else None,
               "csv": csv_path, "svg": svg_path}
    return summary, 1 if unbounded else 0


def cmd_sweep(ctx: Context):
    t = ctx.sc.task
    if t.d is None:
        raise CLIError("sweep needs task.d")
    if t.t_grid is None:
        raise CLIError("sweep needs task.t_grid")
    eta = ctx.target.base if isinstance(ctx.target, ComposedFuchsian) else ctx.target
    phi = ctx.character()
    grid = t.t_grid
    if isinstance(grid, GridSpec):
        scale = 1.0
        if grid.relative:
            scale, _ = lab.criterion_inf(ComposedFuchsian(eta, t.d - 1), 1, phi, ctx.R, ctx.workers)
        grid = np.linspace(grid.start * scale, grid.stop * scale, grid.num)
    res = lab.deformation_sweep(eta, phi, t.d, grid, ctx.R, ctx.band, ctx.workers)
    meta = ctx.meta(d=t.d, p=res.p, q=res.q, c=res.c,
                    predicted=" ".join(f"{k}:{fmt(v)}" for k, v in res.predicted.items()))
    path = ctx.write("sweep.csv", res.to_csv(meta))
    indet = any(r.verdict == "indeterminate" for r in res.rows)
    summary = {"c": res.c, "predicted": {str(k): v for k, v in res.predicted.items()},
               "observed": {str(k): v for k, v in res.observed.items()}, "monotone": res.monotone, "csv": path}
    return summary, 1 if indet else 0


def cmd_nesting(ctx: Context):
    t = ctx.sc.task
    eta = ctx.target.base if isinstance(ctx.target, ComposedFuchsian) else ctx.target
    if eta.dimension != 2:
        raise CLIError("nesting needs a 2-dimensional eta (or a sym_power of one)")
    rep = lab.nesting_check(eta, t.q_max, t.p_max, ctx.R, 8, ctx.workers)
    rows = [(str(a), str(b)) for a, b in rep.violations]
    path = ctx.write("nesting.csv", write_csv(("smaller", "larger"), rows,
                                              ctx.meta(p_max=t.p_max, q_max=t.q_max)))
    summary = {"pairs": rep.pairs_checked, "violations": len(rep.violations), "ray_checks": rep.ray_checks,
               "ray_violations": len(rep.ray_violations), "ok": rep.ok, "csv": path}
    return summary, 0


def cmd_bounds(ctx: Context):
    t = ctx.sc.task
    rep = lab.ball_bounds_check(t.p, ctx.q, t.k, ctx.target, ctx.R, t.n_directions, t.seed,
                                band=ctx.band, workers=ctx.workers)
    rows = []
    for u, mi, mo in zip(rep.directions, rep.inner_margins, rep.outer_margins):
        rows.append((" ".join(fmt(float(x)) for x in u), float(mi), lab.verdict_of(mi, ctx.band),
                     float(mo), lab.verdict_of(mo, ctx.band)))
    meta = ctx.meta(p=t.p, q=ctx.q, k=t.k, r_inner=rep.r_inner, r_outer=rep.r_outer, s_k=rep.s_k)
    path = ctx.write("bounds.csv", write_csv(("direction", "inner_margin", "inner_verdict",
                                              "outer_margin", "outer_verdict"), rows, meta))
    summary = {"r_inner": rep.r_inner, "r_outer": rep.r_outer, "violations": len(rep.violations),
               "ok": rep.ok, "csv": path}
    return summary, 0


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors go out as the same one-line JSON as every other input error."""

    def error(self, message):
        raise CLIError(f"{self.prog}: {message}")


def _parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="anosov-domains", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--radius", type=int, help="override task.R")
    ap.add_argument("--threads", type=int, default=1, help="worker threads")
    ap.add_argument("--band", type=float, help="override the indeterminacy band")
    return ap


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": " ".join(str(message).split())}) + "\n")
    return 2


def load_scenario(path: Path) -> Scenario:
    return Scenario.model_validate_json(Path(path).read_text(encoding="utf-8"))


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except CLIError as exc:
        return _fail("usage", str(exc))
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        sc = load_scenario(args.scenario)
        ctx = Context(sc, args.out, args.radius, args.threads, args.band)
        summary, code = HANDLERS[args.command](ctx)
    except pydantic.ValidationError as exc:
        return _fail("scenario", "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors()))
    except (OSError, CLIError, AnosovDomainsError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc))
    sys.stdout.write(json.dumps(summary, sort_keys=True, default=_jsonable) + "\n")
    return code


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(type(x))


if __name__ == "__main__":
    sys.exit(main())
