"""Permutation algebra on wire labels and the induced state-space matrices.

Stored direction: ``map[i]`` is where wire i goes. All other readings are
derived through :func:`inverse`. The matrix convention is pinned by
``permutation_matrix``: the value of wire i moves to wire map[i], with
qubit 0 as the most significant bit.
"""
from __future__ import annotations

from itertools import permutations as _itertools_permutations

import numpy as np

from .circuit import Circuit


class Permutation:
    """Bijection on {0..k-1}; immutable and hashable."""

    __slots__ = ("map",)

    def __init__(self, mapping):
        m = tuple(int(x) for x in mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"not a permutation: {m}")
        object.__setattr__(self, "map", m)

    def __setattr__(self, *a):
        raise AttributeError("Permutation is immutable")

    @property
    def size(self) -> int:
        return len(self.map)

    def __call__(self, i: int) -> int:
        return self.map[i]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.map == other.map

    def __lt__(self, other):
        return self.map < other.map

    def __hash__(self):
        return hash(self.map)

    def __repr__(self):
        return f"Permutation({list(self.map)})"

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.map))

    def to_json(self) -> list[int]:
        return list(self.map)


def identity(k: int) -> Permutation:
    return Permutation(range(k))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """a after b: (a.b)(i) = a(b(i)); satisfies M(a.b) = M(a) @ M(b)."""
    if a.size != b.size:
        raise ValueError("size mismatch")
    return Permutation(a.map[b.map[i]] for i in range(a.size))


def inverse(a: Permutation) -> Permutation:
    inv = [0] * a.size
    for i, v in enumerate(a.map):
        inv[v] = i
    return Permutation(inv)


def all_permutations(k: int) -> list[Permutation]:
    """All k! permutations in lexicographic map order."""
    return [Permutation(p) for p in _itertools_permutations(range(k))]


def permutation_matrix(p: Permutation) -> np.ndarray:
    """2^k x 2^k real 0/1 matrix moving the value of wire i to wire p(i)."""
    k = p.size
    n = 2 ** k
    m = np.zeros((n, n), dtype=complex)
    for x in range(n):
        y = 0
        for i in range(k):
            bit = (x >> (k - 1 - i)) & 1
            y |= bit << (k - 1 - p.map[i])
        m[y, x] = 1.0
    return m


def permute_unitary(u: np.ndarray, p_i: Permutation, p_o: Permutation) -> np.ndarray:
    """M(p_o) @ u @ M(p_i)."""
    dim = 2 ** p_i.size
    if u.shape != (dim, dim) or p_o.size != p_i.size:
        raise ValueError("dimension mismatch")
    return permutation_matrix(p_o) @ u @ permutation_matrix(p_i)


def permute_circuit(c: Circuit, p: Permutation) -> Circuit:
    """Relabel every qubit i to p(i); unitary becomes M(p) U M(p)^dagger."""
    if p.size != c.num_qubits:
        raise ValueError("size mismatch")
    return Circuit(c.num_qubits, (g.relabeled(p.map) for g in c.gates), c.metadata)
