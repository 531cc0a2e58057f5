"""Words in a finitely generated group.

A word is a tuple of nonzero signed integers: ``i + 1`` stands for the
generator with index ``i`` and ``-(i + 1)`` for its inverse.  Letters are
ordered ``a < A < b < B < ...`` (generator before its inverse), which is the
order used for every shortlex comparison in the package.  Internally letters
are also handled as *codes* ``2 * i + (sign < 0)`` so that the letter order is
plain integer order and ``code ^ 1`` is the inverse letter.
"""
from __future__ import annotations

from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...] of signed, 1-based generator indices

EMPTY: Word = ()


def letter_code(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (letter < 0)


def code_letter(code: int) -> int:
    index = (code >> 1) + 1
    return -index if code & 1 else index


def word_codes(word: Sequence[int]) -> list[int]:
    return [letter_code(x) for x in word]


def codes_word(codes: Iterable[int]) -> Word:
    return tuple(code_letter(int(c)) for c in codes if c >= 0)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def free_reduce(word: Sequence[int]) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    stack: list[int] = []
    for x in word:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclic_reduce(word: Sequence[int]) -> Word:
    """Freely reduce, then strip matching inverse letters from both ends.

    >>> cyclic_reduce((1, 2, -1))
    (2,)
    >>> cyclic_reduce((1, 2, -1, -2))
    (1, 2, -1, -2)
    """
    w = free_reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]


def is_freely_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    return is_freely_reduced(word) and (len(word) < 2 or word[0] != -word[-1])


def rotations(word: Sequence[int]) -> list[Word]:
    w = tuple(word)
    return [w[i:] + w[:i] for i in range(max(len(w), 1))]


def shortlex_key(word: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    return len(word), tuple(letter_code(x) for x in word)


def conjugacy_key(word: Sequence[int]) -> Word:
    """Least rotation (in letter order) of the cyclic reduction of ``word``.

    Two words of a free group are conjugate exactly when their keys agree.
    """
    core = cyclic_reduce(word)
    if not core:
        return EMPTY
    return min(rotations(core), key=shortlex_key)


def multiply(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        out.extend(w)
    return free_reduce(out)


def power(word: Sequence[int], n: int) -> Word:
    base = tuple(word) if n >= 0 else inverse(word)
    return free_reduce(base * abs(n))


def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    return multiply(u, v, inverse(u), inverse(v))


def exponent_sums(word: Sequence[int], n_generators: int) -> list[int]:
    sums = [0] * n_generators
    for x in word:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return sums


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse ``"aBA"`` or ``"a1.B1.a2"`` into a word.

    Upper-casing a generator name denotes its inverse.  Names longer than one
    character must be separated by dots.  ``""`` and ``"1"`` are the identity.
    """
    text = text.strip()
    if text in ("", "1", "e"):
        return EMPTY
    lookup = {}
    for i, name in enumerate(names):
        lookup[name] = i + 1
        if name.upper() != name:
            lookup[name.upper()] = -(i + 1)
    tokens = text.split(".") if "." in text or any(len(n) > 1 for n in names) else list(text)
    word = []
    for tok in tokens:
        if tok not in lookup:
            raise ValueError(f"unknown letter {tok!r} in word {text!r}")
        word.append(lookup[tok])
    return tuple(word)


def format_word(word: Sequence[int], names: Sequence[str]) -> str:
    if not word:
        return "1"
    parts = [names[x - 1] if x > 0 else names[-x - 1].upper() for x in word]
    sep = "." if any(len(n) > 1 for n in names) else ""
    return sep.join(parts)
