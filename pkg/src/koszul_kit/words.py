"""Indexing of tensor words over a finite alphabet.

Words of length n over d generators are the monomial basis of V^{otimes n};
within a length they are ordered lexicographically by generator index, and
globally degree-major.  The global index order is what the quotient
constructions pivot on: the *largest* word in a relation is rewritten into
smaller ones, so chosen basis monomials are lexicographically least.
"""

from __future__ import annotations

from itertools import product


def words_of_length(d: int, n: int):
    """All words of length n over range(d), in lex order."""
    return [tuple(w) for w in product(range(d), repeat=n)]


def word_local_index(word, d: int) -> int:
    """Index of the word inside its own degree block (base-d value)."""
    idx = 0
    for a in word:
        idx = idx * d + a
    return idx


def degree_offset(d: int, n: int) -> int:
    """Number of words of length < n (start of the degree-n block)."""
    if d == 1:
        return n
    return (d ** n - 1) // (d - 1)


def word_global_index(word, d: int) -> int:
    return degree_offset(d, len(word)) + word_local_index(word, d)


def global_index_to_word(idx: int, d: int):
    n = 0
    while degree_offset(d, n + 1) <= idx:
        n += 1
    local = idx - degree_offset(d, n)
    word = []
    for _ in range(n):
        word.append(local % d)
        local //= d
    return tuple(reversed(word))


def pair_index(a: int, b: int, d: int) -> int:
    """Row-major index of the pair (a, b) in V tensor V coordinates."""
    return a * d + b


def word_weight(word, weights) -> int:
    return sum(weights[a] for a in word)
