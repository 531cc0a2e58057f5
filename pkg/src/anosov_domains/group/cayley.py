"""Word and translation lengths in surface groups.

Lengths are certified by a meet-in-the-middle search: the Cayley ball of
radius ``h`` is enumerated breadth-first, elements are told apart through the
faithful side-pairing representation of the regular 4g-gon, and every
numerical match is confirmed with Dehn's algorithm before it is used.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import NumericalAmbiguityError, ValidationError
from .presentation import GroupPresentation
from .words import Word, cyclic_reduce, free_reduce, inverse, rotations

DEFAULT_CAP = 8


class DehnReducer:
    """Dehn's algorithm for a single relator with small cancellation."""

    def __init__(self, relator: Sequence[int]):
        r = tuple(relator)
        half = len(r) // 2
        self.table: dict[Word, Word] = {}
        for cyc in rotations(r) + rotations(inverse(r)):
            for m in range(len(r), half, -1):
                self.table.setdefault(cyc[:m], inverse(cyc[m:]))
        self.lengths = sorted({len(k) for k in self.table}, reverse=True)

    def reduce(self, word: Sequence[int]) -> Word:
        w = free_reduce(word)
        changed = True
        while changed:
            changed = False
            for m in self.lengths:
                for i in range(len(w) - m + 1):
                    rep = self.table.get(w[i:i + m])
                    if rep is not None:
                        w = free_reduce(w[:i] + rep + w[i + m:])
                        changed = True
                        break
                if changed:
                    break
        return w

    def is_identity(self, word: Sequence[int]) -> bool:
        return not self.reduce(word)


class SurfaceCayleyBall:
    """Breadth-first Cayley ball of radius ``half_radius`` for the genus-g group."""

    def __init__(self, genus: int, half_radius: int):
        from ..reps import surface_rep

        self.genus = genus
        self.half_radius = half_radius
        self.presentation = GroupPresentation.surface(genus)
        self.dehn = DehnReducer(self.presentation.relators[0])
        self.rep = surface_rep(genus)
        table = self.rep.letter_table
        letters = [(c >> 1) + 1 if not c & 1 else -((c >> 1) + 1) for c in range(table.shape[0])]
        words: list[Word] = [()]
        mats = np.eye(2)[None]
        lengths = [0]
        frontier = np.array([0])
        for radius in range(1, half_radius + 1):
            cand_w, src, codes = [], [], []
            for idx in frontier:
                w = words[idx]
                for code, letter in enumerate(letters):
                    if w and w[-1] == -letter:
                        continue
                    cand_w.append(w + (letter,))
                    src.append(idx)
                    codes.append(code)
            cand_m = mats[src] @ table[codes]
            # the Cayley graph is bipartite (even relator), so a candidate can
            # only coincide with the previous layer or with another candidate
            prev = np.flatnonzero(np.asarray(lengths) == radius - 1)
            dist, j = _nearest(mats[prev], cand_m)
            keep = np.ones(len(cand_w), dtype=bool)
            for i in np.flatnonzero(dist <= _tol(cand_m)):
                self._confirm(words[prev[j[i]]], cand_w[i])
                keep[i] = False
            flat = cand_m.reshape(-1, 4)
            tree = cKDTree(flat)
            for a, b in sorted(tree.query_pairs(1e-6 * max(1.0, float(np.abs(flat).max())))):
                if not (keep[a] and keep[b]):
                    continue
                if np.max(np.abs(cand_m[a] - cand_m[b])) <= min(_tol(cand_m[a:a + 1])[0], _tol(cand_m[b:b + 1])[0]):
                    self._confirm(cand_w[a], cand_w[b])
                    keep[b] = False
            new = np.flatnonzero(keep)
            start = len(words)
            words.extend(cand_w[i] for i in new)
            mats = np.concatenate([mats, cand_m[new]])
            lengths.extend([radius] * len(new))
            frontier = np.arange(start, len(words))
        self.words = words
        self.mats = mats
        self.lengths = np.array(lengths)
        self.inv_mats = np.stack([mats[:, 1, 1], -mats[:, 0, 1], -mats[:, 1, 0], mats[:, 0, 0]], axis=-1).reshape(-1, 2, 2)
        self.tree = cKDTree(self.mats.reshape(len(self.mats), 4))

    def _confirm(self, u: Word, v: Word) -> None:
        if not self.dehn.is_identity(u + inverse(v)):
            raise NumericalAmbiguityError(f"numerically equal words {u} and {v} differ in the group")

    def element_length(self, word: Sequence[int]) -> int | None:
        """Exact length if it is at most ``2 * half_radius``, else None."""
        w = free_reduce(word)
        if not w:
            return 0
        cands = self.inv_mats @ self.rep(w)
        dist, idx = self.tree.query(cands.reshape(len(cands), 4))
        hit = np.flatnonzero(dist <= _tol(cands))
        if not len(hit):
            return None
        totals = self.lengths[hit] + self.lengths[idx[hit]]
        for pos in np.argsort(totals, kind="stable"):
            x = hit[pos]
            if self.dehn.is_identity(self.words[x] + self.words[idx[x]] + inverse(w)):
                return int(totals[pos])
            raise NumericalAmbiguityError(f"could not confirm factorisation of {w}")
        return None


def _tol(mats: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(mats.reshape(len(mats), -1)), axis=1)
    return 1e-9 * np.maximum(1.0, scale)


def _nearest(ref: np.ndarray, mats: np.ndarray):
    tree = cKDTree(ref.reshape(len(ref), -1))
    return tree.query(mats.reshape(len(mats), -1))


@lru_cache(maxsize=8)
def surface_ball(genus: int, half_radius: int) -> SurfaceCayleyBall:
    return SurfaceCayleyBall(genus, half_radius)


def _require_cap(cap: int):
    if cap < 1:
        raise ValueError("cap must be >= 1")


def word_length(word: Sequence[int], presentation: GroupPresentation, cap: int = DEFAULT_CAP) -> int | None:
    """Length of the element represented by ``word``; None when it cannot be certified.

    Free groups: reduced length.  Surface groups: exact when the length is at
    most ``cap``.  Other presentations have no word-problem solver, so only
    freely trivial words get a length.
    """
    _require_cap(cap)
    w = free_reduce(word)
    if presentation.kind == "free":
        return len(w)
    if not w:
        return 0
    if presentation.kind == "surface":
        ball = surface_ball(presentation.genus, (cap + 1) // 2)
        n = ball.element_length(w)
        return n if n is not None and n <= cap else None
    return None


def translation_length(word: Sequence[int], presentation: GroupPresentation,
                       cap: int = DEFAULT_CAP) -> int | None:
    """Free groups: cyclically reduced length.  Otherwise the minimum word length
    over cyclic rotations of the cyclic reduction (None if any is unknown)."""
    _require_cap(cap)
    core = cyclic_reduce(word)
    if presentation.kind == "free":
        return len(core)
    best = None
    for rot in rotations(core):
        n = word_length(rot, presentation, cap)
        if n is None:
            return None
        best = n if best is None else min(best, n)
    return best if best is not None else 0


def ball_translation_lengths(ball, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Translation length of every ball word (-1 where unknown)."""
    pres = ball.presentation
    if pres.kind == "free":
        return np.asarray(ball.translation)
    cache: dict[Word, int] = {}
    out = np.empty(len(ball), dtype=np.int64)
    for i, w in enumerate(ball.words):
        core = cyclic_reduce(w)
        key = min(rotations(core)) if core else ()
        if key not in cache:
            t = translation_length(core, pres, cap)
            cache[key] = -1 if t is None else t
        out[i] = cache[key]
    return out
