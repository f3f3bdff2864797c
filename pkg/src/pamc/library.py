"""Built-in benchmark circuits and target unitaries, generated from their
textbook definitions so no external files are needed.
"""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, ccx_gates, parse_qasm

PI = math.pi


def _cp(a: int, b: int, lam: float) -> list[Gate]:
    u1 = lambda q, l: Gate("u3", (q,), (0.0, 0.0, l))
    cx = lambda x, y: Gate("cnot", (x, y))
    return [u1(a, lam / 2), cx(a, b), u1(b, -lam / 2), cx(a, b), u1(b, lam / 2)]


def _h(q: int) -> Gate:
    return Gate("u3", (q,), (PI / 2, 0.0, PI))


def qft(n: int) -> Circuit:
    """Controlled-phase ladder without the final bit-reversal swaps; this is
    the conventional n(n-1) CNOT implementation (6 CNOTs at n = 3)."""
    gates: list[Gate] = []
    for i in range(n):
        gates.append(_h(i))
        for j in range(i + 1, n):
            gates.extend(_cp(j, i, PI / 2 ** (j - i)))
    return Circuit(n, gates)


def ccx() -> Circuit:
    return Circuit(3, ccx_gates(0, 1, 2))


def cswap() -> Circuit:
    """Fredkin via Toffoli conjugated by CNOTs."""
    cx = lambda x, y: Gate("cnot", (x, y))
    return Circuit(3, [cx(2, 1)] + ccx_gates(0, 1, 2) + [cx(2, 1)])


def swap2() -> Circuit:
    return Circuit(2, [Gate("swap", (0, 1))])


def cxx() -> Circuit:
    cx = lambda x, y: Gate("cnot", (x, y))
    return Circuit(3, [cx(0, 1), cx(0, 2)])


def nearest_neighbor_chain(n: int) -> Circuit:
    """One CNOT per adjacent pair; interaction graph is the n-path."""
    return Circuit(n, [Gate("cnot", (i, i + 1)) for i in range(n - 1)])


def fully_interacting(n: int) -> Circuit:
    return Circuit(n, [Gate("cnot", (i, j))
                       for i in range(n) for j in range(i + 1, n)])


_BUILDERS = {
    "qft3": lambda: qft(3),
    "qft4": lambda: qft(4),
    "qft5": lambda: qft(5),
    "ccx": ccx,
    "cswap": cswap,
    "swap2": swap2,
    "cxx": cxx,
}


def named_circuits() -> list[str]:
    return sorted(_BUILDERS)


def build(name: str) -> Circuit:
    if name not in _BUILDERS:
        raise KeyError(f"unknown built-in circuit {name!r}; "
                       f"available: {', '.join(named_circuits())}")
    return _BUILDERS[name]()


def load_circuit(spec: str) -> Circuit:
    """Built-in name or path to a QASM file."""
    import os

    if os.path.exists(spec):
        return parse_qasm(open(spec).read())
    return build(spec)
