import numpy as np

from pamc.circuit import Circuit, Gate
from pamc.library import fully_interacting, nearest_neighbor_chain
from pamc.verify import communication_score, verify


def test_verify_identity_trivial():
    c = Circuit(2, [Gate("cnot", (0, 1))])
    rep = verify(c, c, [0, 1], [0, 1])
    assert rep.ok and rep.distance <= 1e-12


def test_verify_detects_wrong_circuit():
    logical = Circuit(2, [Gate("cnot", (0, 1))])
    wrong = Circuit(2, [Gate("cnot", (1, 0))])
    rep = verify(logical, wrong, [0, 1], [0, 1])
    assert not rep.ok and "exceeds" in rep.message


def test_verify_swap_as_remapping():
    # a physical SWAP that is only bookkeeping: final mapping absorbs it
    logical = Circuit(2, [])
    phys = Circuit(2, [Gate("swap", (0, 1))])
    assert verify(logical, phys, [0, 1], [1, 0]).ok
    assert not verify(logical, phys, [0, 1], [0, 1]).ok


def test_verify_with_phantom_wires():
    # logical wires on a bigger device, untouched spectators excluded
    logical = Circuit(2, [Gate("cnot", (0, 1))])
    phys = Circuit(6, [Gate("cnot", (4, 2))])
    init = [2, 5, 1, 3, 0, 4]  # wire0@4, wire1@2
    rep = verify(logical, phys, init, init)
    assert rep.ok
    assert rep.num_active == 2


def test_communication_score_chain_and_clique():
    chain = nearest_neighbor_chain(12)
    assert abs(communication_score(chain) - 0.1667) <= 0.0005
    assert communication_score(fully_interacting(12)) == 1.0


def test_communication_score_edges():
    assert communication_score(Circuit(1, [])) == 0.0
    c = Circuit(3, [Gate("cnot", (0, 1)), Gate("cnot", (0, 1))])
    assert abs(communication_score(c) - 1 / 3) < 1e-12
