"""Routing properties that need no synthesis: mapping-state invariants,
heuristic symmetry, swap selection, and literal-mode end-to-end runs."""
import numpy as np
import pytest

from pamc.circuit import emit_qasm
from pamc.pam import (MappingState, RoutingError, SweepConfig, candidate_swaps,
                      compile_circuit, extended_set, heuristic_h,
                      per_gate_blocks)
from pamc.partition import quick_partition
from pamc.topology import distance_matrix, preset
from pamc.verify import verify
from tests.conftest import random_circuit

CFG = SweepConfig(seed=0)


def test_mapping_state_bijection():
    m = MappingState(3, 5, [4, 0, 2])
    assert m.pos[0] == 4 and m.pos[1] == 0 and m.pos[2] == 2
    assert sorted(m.wire_at) == list(range(5))
    m.apply_swap(4, 1)
    assert m.pos[0] == 1
    with pytest.raises(RoutingError):
        MappingState(3, 2, [0, 1, 0])
    with pytest.raises(RoutingError):
        MappingState(3, 4, [0, 1, 1])


def test_mapping_block_perm_update():
    from pamc.permutation import Permutation
    m = MappingState(3, 3, [0, 1, 2])
    # carrier of wire i moves to old position of wire p(i)
    m.apply_block_perm((0, 1, 2), Permutation([1, 2, 0]))
    assert m.pos[0] == 1 and m.pos[1] == 2 and m.pos[2] == 0


@pytest.mark.parametrize("name,auto", [
    ("line-5", lambda p, n: n - 1 - p),          # reversal
    ("ring-6", lambda p, n: (p + 2) % n),        # rotation
    ("grid-2x2", lambda p, n: {0: 0, 1: 2, 2: 1, 3: 3}[p]),  # transpose
])
def test_heuristic_invariant_under_graph_automorphism(name, auto):
    g = preset(name)
    n = g.num_physical
    rng = np.random.default_rng(3)
    c = random_circuit(rng, min(4, n), 10)
    pc = quick_partition(c, 3)
    front = [pc.blocks[i] for i in pc.front(set())]
    ext = [pc.blocks[i] for i in extended_set(pc, set(), pc.front(set()), CFG)]
    d = distance_matrix(g)
    layout = list(rng.permutation(n)[:c.num_qubits])
    m1 = MappingState(c.num_qubits, n, layout)
    m2 = MappingState(c.num_qubits, n, [auto(p, n) for p in layout])
    h1 = heuristic_h(front, ext, m1, d, CFG)
    h2 = heuristic_h(front, ext, m2, d, CFG)
    assert abs(h1 - h2) < 1e-12


def test_candidate_swaps_exclude_intra_block_edges():
    g = preset("line-4")
    c = random_circuit(np.random.default_rng(0), 2, 4, p_cnot=1.0)
    pc = quick_partition(c, 2)
    m = MappingState(2, 4, [1, 2])
    front = [pc.blocks[i] for i in pc.front(set())]
    cands = candidate_swaps(front, m, g)
    assert (1, 2) not in cands
    assert all((1 in e or 2 in e) for e in cands)


@pytest.mark.parametrize("mode", ["sabre_baseline", "block_only"])
def test_literal_modes_route_and_verify(mode):
    rng = np.random.default_rng(21)
    for trial in range(10):
        n = int(rng.integers(2, 6))
        c = random_circuit(rng, n, int(rng.integers(3, 15)))
        g = preset(f"line-{n + 1}")
        r = compile_circuit(c, g, SweepConfig(seed=trial), mode=mode)
        # coupling legality
        for gate in r.circuit.gates:
            if gate.arity == 2:
                assert g.has_edge(*gate.qubits), (mode, trial, gate)
        assert r.intra_block_swaps == 0
        rep = verify(c, r.circuit, r.initial_wires, r.final_wires)
        assert rep.ok, (mode, trial, rep.distance)


def test_determinism_byte_equality():
    rng = np.random.default_rng(5)
    c = random_circuit(rng, 4, 12)
    g = preset("grid-2x3")
    runs = [compile_circuit(c, g, SweepConfig(seed=9), mode="sabre_baseline")
            for _ in range(2)]
    assert emit_qasm(runs[0].circuit) == emit_qasm(runs[1].circuit)
    assert runs[0].sidecar()["initial_layout"] == runs[1].sidecar()["initial_layout"]


def test_per_gate_blocks_structure():
    rng = np.random.default_rng(6)
    c = random_circuit(rng, 3, 8)
    pc = per_gate_blocks(c)
    assert len(pc.blocks) == len(c.gates)
    assert all(b.width <= 2 for b in pc.blocks)


def test_device_too_small_rejected():
    rng = np.random.default_rng(7)
    c = random_circuit(rng, 4, 4)
    with pytest.raises(RoutingError):
        compile_circuit(c, preset("line-3"), mode="sabre_baseline")


def test_free_qubits_participate():
    # 2 logical qubits on a 5-line: routing still verifies with phantoms
    rng = np.random.default_rng(8)
    c = random_circuit(rng, 2, 6, p_cnot=0.8)
    r = compile_circuit(c, preset("line-5"), SweepConfig(seed=2),
                        mode="sabre_baseline")
    rep = verify(c, r.circuit, r.initial_wires, r.final_wires)
    assert rep.ok
