"""Finite presentations and real characters."""
from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .words import EMPTY, Word, commutator, exponent_sums, free_reduce, multiply

KINDS = ("free", "surface", "custom")


@dataclass(frozen=True)
class GroupPresentation:
    """Generators, relators and the kind of group they present.

    ``free`` presentations carry no relators; ``surface`` presentations of
    genus ``g`` use generators ``a1..ag, b1..bg`` and the single relator
    ``[a1, b1] ... [ag, bg]``.
    """

    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    kind: str = "custom"
    genus: int | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        if self.kind not in KINDS:
            raise ValueError(f"unknown presentation kind {self.kind!r}")
        if not gens:
            raise ValueError("a presentation needs at least one generator")
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be distinct")
        for name in gens:
            if not name or name.upper() == name or name in ("e",):
                raise ValueError(f"generator name {name!r} must contain a lower-case letter")
        n = len(gens)
        for rel in self.relators:
            if any(x == 0 or abs(x) > n for x in rel):
                raise ValueError(f"relator {rel} uses an undeclared generator")
        if self.kind == "free" and self.relators:
            raise ValueError("free presentations have no relators")
        if self.kind == "surface":
            if self.genus is None or self.genus < 1 or n != 2 * self.genus:
                raise ValueError("surface presentation needs 2g generators")
            if self.relators != (surface_relator(self.genus),):
                raise ValueError("surface presentation must use the standard product of commutators")
        if self.kind != "surface" and self.kind != "custom" and self.genus is not None:
            raise ValueError("genus is only meaningful for surface presentations")

    @classmethod
    def free(cls, n: int | Sequence[str] = 2) -> "GroupPresentation":
        if isinstance(n, int):
            if n < 1:
                raise ValueError("free group rank must be >= 1")
            names = list(string.ascii_lowercase[:n]) if n <= 26 else [f"x{i + 1}" for i in range(n)]
        else:
            names = list(n)
        return cls(tuple(names), (), "free")

    @classmethod
    def surface(cls, genus: int = 2) -> "GroupPresentation":
        names = [f"a{i + 1}" for i in range(genus)] + [f"b{i + 1}" for i in range(genus)]
        return cls(tuple(names), (surface_relator(genus),), "surface", genus)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    @property
    def n_letters(self) -> int:
        return 2 * len(self.generators)

    @property
    def is_torsion_free(self) -> bool:
        return self.kind in ("free", "surface")


def surface_relator(genus: int) -> Word:
    """``[a1, b1] ... [ag, bg]`` with a_i = i and b_i = genus + i (1-based)."""
    word: Word = EMPTY
    for i in range(1, genus + 1):
        word = multiply(word, commutator((i,), (genus + i,)))
    return word


@dataclass(frozen=True)
class RealCharacter:
    """A homomorphism to the reals, given by its values on the generators (nats)."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("character values must be finite")
        object.__setattr__(self, "values", vals)

    def __call__(self, word: Sequence[int]) -> float:
        return character_eval(self, word)

    def __len__(self):
        return len(self.values)

    def __mul__(self, t: float) -> "RealCharacter":
        return RealCharacter(tuple(t * v for v in self.values))

    __rmul__ = __mul__

    def __add__(self, other: "RealCharacter") -> "RealCharacter":
        return RealCharacter(tuple(a + b for a, b in zip(self.values, other.values, strict=True)))

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def character_eval(phi: RealCharacter, word: Sequence[int]) -> float:
    """Signed sum of generator values along ``word``.

    Computed from exponent sums, so the result is an exact class function.
    """
    sums = exponent_sums(word, len(phi.values))
    return math.fsum(e * v for e, v in zip(sums, phi.values) if e)


def character_validate(phi: RealCharacter, presentation: GroupPresentation, tol: float = 1e-12) -> bool:
    if len(phi.values) != presentation.n_generators:
        return False
    scale = max(1.0, uniform_norm(phi))
    return all(abs(character_eval(phi, r)) <= tol * scale for r in presentation.relators)


def uniform_norm(phi: RealCharacter) -> float:
    return max((abs(v) for v in phi.values), default=0.0)


def relator_words(presentation: GroupPresentation) -> list[Word]:
    return [free_reduce(r) for r in presentation.relators]
