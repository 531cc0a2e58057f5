"""Shortlex enumeration of freely reduced words, with conjugacy dedup."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np

from ..errors import ResourceLimitError
from .presentation import GroupPresentation
from .words import Word, codes_word

DEFAULT_MAX_ENTRIES = 5_000_000
PAD = -1


class BallEntry(NamedTuple):
    word: Word
    length: int
    translation: int | None
    key: int


def ball_size(n_letters: int, radius: int) -> int:
    """Number of nontrivial freely reduced words of length <= radius."""
    return sum(n_letters * (n_letters - 1) ** (ell - 1) for ell in range(1, radius + 1))


def _levels(n_letters: int, radius: int) -> Iterator[np.ndarray]:
    level = np.arange(n_letters, dtype=np.int16)[:, None]
    yield level
    letters = np.arange(n_letters, dtype=np.int16)
    for _ in range(2, radius + 1):
        n = level.shape[0]
        parents = np.repeat(level, n_letters, axis=0)
        tail = np.tile(letters, n)
        keep = tail != (parents[:, -1] ^ 1)
        level = np.concatenate([parents[keep], tail[keep, None]], axis=1)
        yield level


def _values(rows: np.ndarray, base: int) -> np.ndarray:
    v = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        v = v * base + rows[:, j]
    return v


def _min_rotation(values: np.ndarray, length: int, base: int) -> np.ndarray:
    best = values.copy()
    for r in range(1, length):
        hi = np.int64(base) ** (length - r)
        rot = (values % hi) * np.int64(base) ** r + values // hi
        np.minimum(best, rot, out=best)
    return best


def _offset(length: int, base: int) -> int:
    return sum(base ** j for j in range(length))


def _strip_counts(rows: np.ndarray) -> np.ndarray:
    ell = rows.shape[1]
    s = np.zeros(rows.shape[0], dtype=np.int64)
    alive = np.ones(rows.shape[0], dtype=bool)
    for i in range(ell // 2):
        alive &= rows[:, i] == (rows[:, ell - 1 - i] ^ 1)
        s += alive
    return s


def _core_keys(rows: np.ndarray, base: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclically reduced length and conjugacy key of each row."""
    ell = rows.shape[1]
    strip = _strip_counts(rows)
    core_len = ell - 2 * strip
    keys = np.empty(rows.shape[0], dtype=np.int64)
    for m in np.unique(core_len):
        sel = np.flatnonzero(core_len == m)
        idx = strip[sel, None] + np.arange(m)[None, :]
        core = np.take_along_axis(rows[sel], idx, axis=1)
        keys[sel] = _offset(int(m), base) + _min_rotation(_values(core, base), int(m), base)
    return core_len, keys


@dataclass(eq=False)
class BallIndex:
    """Nontrivial freely reduced words of length <= ``radius`` in shortlex order.

    ``codes`` holds letter codes padded with -1; ``translation`` is -1 where
    the translation length is not known.  ``keys`` identify free conjugacy
    classes (least rotation of the cyclic reduction, encoded as an integer
    that respects shortlex order).
    """

    presentation: GroupPresentation
    radius: int
    dedup: bool
    codes: np.ndarray
    lengths: np.ndarray
    translation: np.ndarray
    keys: np.ndarray
    _spans: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for arr in (self.codes, self.lengths, self.translation, self.keys):
            arr.setflags(write=False)
        if not self._spans:
            for ell in range(1, self.radius + 1):
                lo, hi = np.searchsorted(self.lengths, [ell, ell + 1])
                if hi > lo:
                    self._spans[ell] = (int(lo), int(hi))

    def __len__(self) -> int:
        return int(self.lengths.shape[0])

    def __iter__(self) -> Iterator[BallEntry]:
        words = self.words
        for i in range(len(self)):
            t = int(self.translation[i])
            yield BallEntry(words[i], int(self.lengths[i]), None if t < 0 else t, int(self.keys[i]))

    def spans(self) -> dict[int, tuple[int, int]]:
        """Map word length -> (start, stop) rows; rows of one length are contiguous."""
        return dict(self._spans)

    def level_codes(self, length: int) -> np.ndarray:
        lo, hi = self._spans[length]
        return self.codes[lo:hi, :length]

    @cached_property
    def words(self) -> list[Word]:
        return [codes_word(row[:ell]) for row, ell in zip(self.codes, self.lengths)]

    @cached_property
    def exponent_sums(self) -> np.ndarray:
        n = self.presentation.n_generators
        out = np.zeros((len(self), n), dtype=np.int64)
        for i in range(n):
            out[:, i] = (self.codes == 2 * i).sum(axis=1) - (self.codes == 2 * i + 1).sum(axis=1)
        out.setflags(write=False)
        return out

    def subset(self, mask: np.ndarray) -> "BallIndex":
        return BallIndex(self.presentation, self.radius, self.dedup, self.codes[mask],
                         self.lengths[mask], self.translation[mask], self.keys[mask])

    def inverted(self) -> "BallIndex":
        """Same rows with every word replaced by its inverse (row order and keys kept)."""
        codes = self.codes.copy()
        for ell, (lo, hi) in self._spans.items():
            codes[lo:hi, :ell] = codes[lo:hi, :ell][:, ::-1] ^ 1
        return BallIndex(self.presentation, self.radius, self.dedup, codes, self.lengths,
                         self.translation, self.keys)

    def with_translation(self, translation: np.ndarray) -> "BallIndex":
        return BallIndex(self.presentation, self.radius, self.dedup, self.codes,
                         self.lengths, np.asarray(translation, dtype=np.int64), self.keys)


def enumerate_ball(presentation: GroupPresentation, radius: int, dedup: bool = False,
                   max_entries: int = DEFAULT_MAX_ENTRIES) -> BallIndex:
    """Enumerate the ball of freely reduced words.

    With ``dedup`` on a free presentation only the least rotation of each
    cyclically reduced word is kept, i.e. one word per conjugacy class.
    Dedup is ignored for other kinds of presentation.
    """
    if radius < 1:
        raise ValueError("ball radius must be >= 1")
    base = presentation.n_letters
    if _offset(radius + 1, base) >= np.iinfo(np.int64).max:
        raise ResourceLimitError(f"radius {radius} too large to encode words over {base} letters")
    total = ball_size(base, radius)
    if total > max_entries:
        raise ResourceLimitError(f"ball of radius {radius} has {total} words (limit {max_entries})")
    dedup = dedup and presentation.kind == "free"
    free = presentation.kind == "free"

    codes, lengths, trans, keys = [], [], [], []
    for rows in _levels(base, radius):
        ell = rows.shape[1]
        if dedup:
            v = _values(rows, base)
            cyc = rows[:, 0] != (rows[:, -1] ^ 1) if ell > 1 else np.ones(len(rows), bool)
            canon = cyc & (_min_rotation(v, ell, base) == v)
            rows = rows[canon]
            core_len = np.full(len(rows), ell, dtype=np.int64)
            k = _offset(ell, base) + v[canon]
        else:
            core_len, k = _core_keys(rows, base)
        padded = np.full((len(rows), radius), PAD, dtype=np.int16)
        padded[:, :ell] = rows
        codes.append(padded)
        lengths.append(np.full(len(rows), ell, dtype=np.int64))
        trans.append(core_len if free else np.full(len(rows), -1, dtype=np.int64))
        keys.append(k)
    return BallIndex(presentation, radius, dedup, np.concatenate(codes), np.concatenate(lengths),
                     np.concatenate(trans).astype(np.int64), np.concatenate(keys))
