"""Partition property suite: coverage, exclusivity, width, dependency order,
and unitary-exact reconstruction over many random circuits."""
import numpy as np
import pytest

from pamc.partition import quick_partition
from tests.conftest import random_circuit


def _check_partition(c, pc, k):
    seen = []
    for b in pc.blocks:
        assert 1 <= b.width <= k
        assert b.qubits == tuple(sorted(b.qubits))
        assert len(b.gates) == len(b.source_indices)
        seen.extend(b.source_indices)
        for g in b.gates:
            assert all(0 <= q < b.width for q in g.qubits)
    # coverage + exclusivity: every source gate in exactly one block
    assert sorted(seen) == list(range(len(c.gates)))


@pytest.mark.parametrize("k", [2, 3])
def test_partition_properties_many_random(k):
    rng = np.random.default_rng(7)
    for trial in range(200):
        n = int(rng.integers(2, 7))
        c = random_circuit(rng, n, int(rng.integers(1, 25)))
        pc = quick_partition(c, k)
        _check_partition(c, pc, k)


def test_reconstruction_preserves_unitary():
    rng = np.random.default_rng(8)
    for trial in range(40):
        n = int(rng.integers(2, 6))
        c = random_circuit(rng, n, int(rng.integers(1, 20)))
        pc = quick_partition(c, 3)
        assert np.allclose(pc.to_circuit().unitary(), c.unitary(), atol=1e-10)


def test_block_dag_respects_qubit_order():
    rng = np.random.default_rng(9)
    for trial in range(50):
        c = random_circuit(rng, 5, 15)
        pc = quick_partition(c, 3)
        for i, preds in enumerate(pc.predecessors):
            assert all(p < i for p in preds)
        # executing blocks by index must see each qubit's gates in source order
        for q in range(c.num_qubits):
            touches = []
            for b in pc.blocks:
                touches.extend(
                    src for src, g in zip(b.source_indices, b.gates)
                    if q in tuple(b.qubits[x] for x in g.qubits))
            assert touches == sorted(touches)


def test_front_and_reversed():
    rng = np.random.default_rng(10)
    c = random_circuit(rng, 4, 12)
    pc = quick_partition(c, 3)
    front = pc.front(set())
    assert front and all(pc.predecessors[i] == () for i in front)
    rev = pc.reversed_blocks()
    assert len(rev.blocks) == len(pc.blocks)
    assert {b.index for b in rev.blocks} == {b.index for b in pc.blocks}


def test_rejects_width_one():
    rng = np.random.default_rng(11)
    with pytest.raises(ValueError):
        quick_partition(random_circuit(rng, 3, 5), 1)


def test_merges_do_not_break_three_qubit_gap():
    # regression-style: interleaved disjoint pairs must not merge across a
    # dependency
    from pamc.circuit import Circuit, Gate
    c = Circuit(4, [Gate("cnot", (0, 1)), Gate("cnot", (2, 3)),
                    Gate("cnot", (1, 2)), Gate("cnot", (0, 1))])
    pc = quick_partition(c, 3)
    _check_partition(c, pc, 3)
    assert np.allclose(pc.to_circuit().unitary(), c.unitary())
