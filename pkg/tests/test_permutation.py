"""Exhaustive algebra checks for k <= 3 — these pin the conventions every
other module leans on."""
import numpy as np
import pytest

from pamc.circuit import Circuit, Gate
from pamc.permutation import (Permutation, all_permutations, compose, identity,
                              inverse, permutation_matrix, permute_circuit,
                              permute_unitary)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_group_axioms(k):
    perms = all_permutations(k)
    assert len(perms) == [1, 1, 2, 6][k]
    e = identity(k)
    for a in perms:
        assert compose(a, inverse(a)) == e
        assert compose(inverse(a), a) == e
        assert compose(a, e) == a
        for b in perms:
            for c in perms:
                assert compose(compose(a, b), c) == compose(a, compose(b, c))


@pytest.mark.parametrize("k", [2, 3])
def test_matrix_homomorphism(k):
    for a in all_permutations(k):
        for b in all_permutations(k):
            assert np.allclose(permutation_matrix(compose(a, b)),
                               permutation_matrix(a) @ permutation_matrix(b))


@pytest.mark.parametrize("k", [2, 3])
def test_matrix_inverse_is_transpose(k):
    for a in all_permutations(k):
        m = permutation_matrix(a)
        assert np.allclose(permutation_matrix(inverse(a)), m.T)


def test_matrix_moves_wire_values():
    # p = [1, 0] exchanges the two wires: basis |10> -> |01>
    m = permutation_matrix(Permutation([1, 0]))
    v = np.zeros(4)
    v[0b10] = 1
    assert np.argmax(m @ v) == 0b01


def test_not_a_permutation_rejected():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


@pytest.mark.parametrize("k", [2, 3])
def test_permute_circuit_identity(k, make_circuit):
    c = make_circuit(k, 6)
    u = c.unitary()
    for p in all_permutations(k):
        m = permutation_matrix(p)
        assert np.allclose(permute_circuit(c, p).unitary(),
                           m @ u @ m.conj().T, atol=1e-12)


def test_permute_unitary_formula():
    u = Circuit(2, [Gate("cnot", (0, 1))]).unitary()
    p_i, p_o = Permutation([1, 0]), Permutation([0, 1])
    assert np.allclose(
        permute_unitary(u, p_i, p_o),
        u @ permutation_matrix(p_i))


def test_lexicographic_order():
    maps = [p.map for p in all_permutations(3)]
    assert maps == sorted(maps)
    assert maps[0] == (0, 1, 2)
