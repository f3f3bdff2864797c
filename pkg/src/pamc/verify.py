"""Numerical equivalence checking for routed circuits and the communication
score used to summarize how widely a circuit's interactions are spread."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import SIMULATION_CAP, Circuit
from .synthesis import hs_distance


@dataclass
class VerificationReport:
    ok: bool
    distance: float
    threshold: float
    num_active: int
    message: str = ""


def wire_position_matrix(wire_to_pos) -> np.ndarray:
    """Unitary moving each wire's bit to its physical position (wire 0 = MSB)."""
    from .permutation import Permutation, permutation_matrix

    return permutation_matrix(Permutation(tuple(wire_to_pos)))


def verify(logical: Circuit, physical: Circuit, initial_wires, final_wires,
           threshold: float = 1e-8) -> VerificationReport:
    """Check W R(pi_0) = R(pi_f) (U ⊗ I) up to global phase.

    ``initial_wires``/``final_wires`` list the wire carried by each physical
    qubit before and after the routed circuit; wires >= logical.num_qubits are
    phantoms on free qubits. The check is restricted to active physical qubits
    (those touched by a gate or carrying a logical wire) so spectators don't
    blow up the simulation.
    """
    n_log = logical.num_qubits
    pos0 = {w: p for p, w in enumerate(initial_wires)}
    posf = {w: p for p, w in enumerate(final_wires)}

    active = {p for g in physical.gates for p in g.qubits}
    active |= {pos0[w] for w in range(n_log)}
    active |= {posf[w] for w in range(n_log)}
    active = sorted(active)
    if len(active) > SIMULATION_CAP:
        return VerificationReport(False, float("nan"), threshold, len(active),
                                  f"{len(active)} active qubits exceed the "
                                  f"simulation cap {SIMULATION_CAP}")
    prank = {p: i for i, p in enumerate(active)}

    # wires present on active qubits: logical first, phantoms after, so the
    # extended target is a plain Kronecker product
    wires = [initial_wires[p] for p in active]
    phantoms = sorted(w for w in wires if w >= n_log)
    wrank = {w: i for i, w in enumerate(range(n_log))}
    wrank.update({w: n_log + i for i, w in enumerate(phantoms)})

    sub = Circuit(len(active),
                  [g.relabeled({p: prank[p] for p in g.qubits})
                   for g in physical.gates])
    w_mat = sub.unitary()

    r0 = wire_position_matrix([prank[pos0[w]] for w, _ in
                               sorted(wrank.items(), key=lambda kv: kv[1])])
    rf = wire_position_matrix([prank[posf[w]] for w, _ in
                               sorted(wrank.items(), key=lambda kv: kv[1])])
    u_ext = np.kron(logical.unitary(), np.eye(2 ** len(phantoms)))
    target = rf @ u_ext @ r0.conj().T

    dist = hs_distance(target, w_mat)
    ok = dist <= threshold
    return VerificationReport(ok, dist, threshold, len(active),
                              "" if ok else f"distance {dist:.3e} exceeds "
                                            f"threshold {threshold:.1e}")


def communication_score(c: Circuit, num_qubits: int | None = None) -> float:
    """Fraction of qubit pairs that share at least one multi-qubit gate."""
    n = num_qubits if num_qubits is not None else c.num_qubits
    if n < 2:
        return 0.0
    pairs = set()
    for g in c.gates:
        qs = g.qubits
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                pairs.add(tuple(sorted((qs[i], qs[j]))))
    return len(pairs) / (n * (n - 1) / 2)
