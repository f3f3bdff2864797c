import numpy as np
import pytest

from pamc.circuit import Circuit, Gate


def random_circuit(rng, num_qubits, num_gates, p_cnot=0.5):
    gates = []
    for _ in range(num_gates):
        if num_qubits >= 2 and rng.random() < p_cnot:
            q = rng.choice(num_qubits, size=2, replace=False)
            gates.append(Gate("cnot", (int(q[0]), int(q[1]))))
        else:
            q = int(rng.integers(num_qubits))
            gates.append(Gate("u3", (q,), tuple(rng.uniform(-np.pi, np.pi, 3))))
    return Circuit(num_qubits, gates)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_circuit(rng):
    def make(num_qubits=3, num_gates=8, p_cnot=0.5):
        return random_circuit(rng, num_qubits, num_gates, p_cnot)
    return make
