"""Slow, independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools

import numpy as np


def naive_free_reduce(word):
    """Rescan from the start after every cancellation."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i:i + 2]
                changed = True
                break
    return tuple(w)


def naive_cyclic_reduce(word):
    w = list(naive_free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def inv(word):
    return tuple(-x for x in reversed(word))


def all_reduced_words(n, length):
    letters = [s * (i + 1) for i in range(n) for s in (1, -1)]
    for w in itertools.product(letters, repeat=length):
        if all(w[i] != -w[i + 1] for i in range(length - 1)):
            yield w


def conjugator_search_length(word, n, max_len):
    best = len(naive_free_reduce(word))
    for m in range(1, max_len + 1):
        for d in all_reduced_words(n, m):
            best = min(best, len(naive_free_reduce(d + tuple(word) + inv(d))))
    return best


def orbit_count(n, radius, conj_len):
    """Number of conjugacy classes among the nontrivial reduced words of length <= radius."""
    words = [w for m in range(1, radius + 1) for w in all_reduced_words(n, m)]
    index = {w: i for i, w in enumerate(words)}
    parent = list(range(len(words)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    deltas = [d for m in range(1, conj_len + 1) for d in all_reduced_words(n, m)]
    for w in words:
        for d in deltas:
            c = naive_free_reduce(d + w + inv(d))
            j = index.get(c)
            if j is not None:
                a, b = find(index[w]), find(j)
                if a != b:
                    parent[a] = b
    return len({find(i) for i in range(len(words))})


def relator_pieces(relator):
    """All subwords of the cyclic conjugates of ``r`` and ``r^-1`` longer than half of r."""
    out = {}
    m = len(relator)
    for r in (tuple(relator), inv(relator)):
        for s in range(m):
            cyc = r[s:] + r[:s]
            for ell in range(m // 2 + 1, m + 1):
                out.setdefault(cyc[:ell], inv(cyc[ell:]))
    return out


def dehn_trivial(word, relator):
    """Independent Dehn reduction: True iff ``word`` is trivial in <gens | relator>."""
    pieces = relator_pieces(relator)
    w = naive_free_reduce(word)
    m = len(relator)
    progress = True
    while w and progress:
        progress = False
        for ell in range(m, m // 2, -1):
            for i in range(len(w) - ell + 1):
                sub = w[i:i + ell]
                if sub in pieces:
                    w = naive_free_reduce(w[:i] + pieces[sub] + w[i + ell:])
                    progress = True
                    break
            if progress:
                break
    return not w


def surface_length_oracle(word, relator, n_gens, max_len):
    """Shortest word equal to ``word`` (combinatorial search; None beyond max_len)."""
    for m in range(0, max_len + 1):
        cands = [()] if m == 0 else all_reduced_words(n_gens, m)
        for u in cands:
            if dehn_trivial(tuple(u) + inv(word), relator):
                return m
    return None


def charpoly(A):
    """Faddeev-LeVerrier characteristic polynomial coefficients (leading 1)."""
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    I = np.eye(n)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * I
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def root_magnitudes(A):
    return np.sort(np.abs(np.roots(charpoly(A))))[::-1]
