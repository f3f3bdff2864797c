"""Circuit IR, QASM-subset parsing/emission, and small-scale unitary simulation.

The internal gate set is {U3, CNOT, SWAP} plus opaque placeholder gates.
Everything ingested through :func:`parse_qasm` is lowered to it.

Conventions (fixed once, enforced by tests):
    * qubit 0 is the most significant bit of a basis-state index
    * applying a gate after a circuit multiplies its embedding on the left
    * u3(theta, phi, lam) = [[cos(t/2), -e^{i lam} sin(t/2)],
                             [e^{i phi} sin(t/2), e^{i(phi+lam)} cos(t/2)]]
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

SIMULATION_CAP = 10

_I2 = np.eye(2, dtype=complex)

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)

SWAP_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=complex)


class CircuitError(Exception):
    pass


class QasmError(CircuitError):
    """Parse failure; carries the offending line number when known."""


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate application. kind is 'u3', 'cnot', 'swap' or 'opaque'."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    label: str = ""
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"duplicate qubits in gate: {self.qubits}")
        if self.kind == "u3":
            if len(self.qubits) != 1 or len(self.params) != 3:
                raise CircuitError("u3 takes 1 qubit and 3 angles")
        elif self.kind in ("cnot", "swap"):
            if len(self.qubits) != 2 or self.params:
                raise CircuitError(f"{self.kind} takes 2 qubits and no angles")
        elif self.kind == "opaque":
            if not 1 <= len(self.qubits) <= 3:
                raise CircuitError("opaque gates span 1..3 qubits")
            dim = 2 ** len(self.qubits)
            m = self.matrix
            if m is None or m.shape != (dim, dim):
                raise CircuitError("opaque matrix dimension mismatch")
            err = np.abs(m.conj().T @ m - np.eye(dim)).max()
            if err > 1e-10:
                raise CircuitError(f"opaque matrix not unitary (err {err:.2e})")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def unitary(self) -> np.ndarray:
        if self.kind == "u3":
            return u3_matrix(*self.params)
        if self.kind == "cnot":
            return CNOT_MATRIX
        if self.kind == "swap":
            return SWAP_MATRIX
        return self.matrix

    def relabeled(self, mapping) -> "Gate":
        """New gate with each qubit q replaced by mapping[q]."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits),
                    self.params, self.label, self.matrix)


def gates_equal(a: Gate, b: Gate, angle_tol: float = 1e-12) -> bool:
    if a.kind != b.kind or a.qubits != b.qubits:
        return False
    if len(a.params) != len(b.params):
        return False
    if any(abs(x - y) > angle_tol for x, y in zip(a.params, b.params)):
        return False
    if a.kind == "opaque":
        return np.allclose(a.matrix, b.matrix, atol=angle_tol)
    return True


class Circuit:
    """Ordered gate list over num_qubits logical qubits.

    Immutable after construction; gate order is a valid topological order of
    the per-qubit dependency DAG by construction (it is the program order).
    """

    def __init__(self, num_qubits: int, gates=(), metadata=None):
        if num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        self.num_qubits = int(num_qubits)
        self.gates: tuple[Gate, ...] = tuple(gates)
        self.metadata = dict(metadata or {})
        for g in self.gates:
            if any(q >= self.num_qubits or q < 0 for q in g.qubits):
                raise CircuitError(
                    f"gate {g.kind} on {g.qubits} out of range for "
                    f"{self.num_qubits} qubits")

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"Circuit({self.num_qubits} qubits, {len(self.gates)} gates)"

    # -- dependency structure -------------------------------------------------

    def predecessors(self) -> list[tuple[int, ...]]:
        """Per-gate tuple of direct predecessor indices (last writer per qubit)."""
        last: dict[int, int] = {}
        preds = []
        for i, g in enumerate(self.gates):
            p = {last[q] for q in g.qubits if q in last}
            preds.append(tuple(sorted(p)))
            for q in g.qubits:
                last[q] = i
        return preds

    def dependency_front(self, done: set[int] | frozenset[int] = frozenset()) -> set[int]:
        done = set(done)
        preds = self.predecessors()
        return {i for i in range(len(self.gates))
                if i not in done and all(p in done for p in preds[i])}

    def depth(self) -> int:
        preds = self.predecessors()
        d = [0] * len(self.gates)
        for i in range(len(self.gates)):
            d[i] = 1 + max((d[p] for p in preds[i]), default=0)
        return max(d, default=0)

    def cnot_count(self) -> int:
        n = 0
        for g in self.gates:
            if g.kind == "cnot":
                n += 1
            elif g.kind == "swap":
                n += 3
        return n

    # -- simulation -----------------------------------------------------------

    def unitary(self) -> np.ndarray:
        if self.num_qubits > SIMULATION_CAP:
            raise CircuitError(
                f"simulation cap {SIMULATION_CAP} exceeded ({self.num_qubits} qubits)")
        dim = 2 ** self.num_qubits
        u = np.eye(dim, dtype=complex)
        for g in self.gates:
            u = apply_gate_matrix(u, g.unitary(), g.qubits, self.num_qubits)
        return u

    def extended(self, gates) -> "Circuit":
        return Circuit(self.num_qubits, self.gates + tuple(gates), self.metadata)

    def reversed_gates(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(reversed(self.gates)), self.metadata)


def apply_gate_matrix(u: np.ndarray, m: np.ndarray, qubits, n: int) -> np.ndarray:
    """Left-multiply u by the embedding of m on the given qubits (qubit 0 = MSB)."""
    a = len(qubits)
    t = u.reshape((2,) * n + (u.shape[1],))
    gm = m.reshape((2,) * (2 * a))
    t = np.tensordot(gm, t, axes=(tuple(range(a, 2 * a)), tuple(qubits)))
    t = np.moveaxis(t, range(a), qubits)
    return t.reshape(u.shape)


def embed_1q(m: np.ndarray, pos: int, k: int) -> np.ndarray:
    """Dense embedding of a 2x2 matrix at wire pos in a k-wire register."""
    return np.kron(np.kron(np.eye(2 ** pos), m), np.eye(2 ** (k - 1 - pos)))


# -- QASM subset --------------------------------------------------------------

_PI_EXPR = re.compile(r"^[0-9pi+\-*/(). eE]*$")

_ONE_QUBIT = {"u1", "u2", "u3", "h", "x", "y", "z", "rx", "ry", "rz"}
_TWO_QUBIT = {"cx", "cp", "cz", "swap"}
_PARAM_COUNT = {"u1": 1, "u2": 2, "u3": 3, "rx": 1, "ry": 1, "rz": 1, "cp": 1}

PI = math.pi


def _eval_angle(expr: str, lineno: int) -> float:
    expr = expr.strip()
    if not expr or not _PI_EXPR.match(expr):
        raise QasmError(f"line {lineno}: bad angle expression {expr!r}")
    try:
        return float(eval(expr, {"__builtins__": {}}, {"pi": math.pi}))
    except Exception as exc:
        raise QasmError(f"line {lineno}: bad angle expression {expr!r}") from exc


def _u1(q, lam):
    return Gate("u3", (q,), (0.0, 0.0, lam))


def _t(q):
    return _u1(q, PI / 4)


def _tdg(q):
    return _u1(q, -PI / 4)


def _h(q):
    return Gate("u3", (q,), (PI / 2, 0.0, PI))


def ccx_gates(a: int, b: int, c: int) -> list[Gate]:
    """Standard 6-CNOT Toffoli network (exact, including global phase)."""
    cx = lambda x, y: Gate("cnot", (x, y))
    return [
        _h(c), cx(b, c), _tdg(c), cx(a, c), _t(c), cx(b, c), _tdg(c),
        cx(a, c), _t(b), _t(c), _h(c), cx(a, b), _t(a), _tdg(b), cx(a, b),
    ]


def _lower(name: str, qubits: list[int], params: list[float], lineno: int) -> list[Gate]:
    q = qubits
    if name == "u3":
        return [Gate("u3", (q[0],), tuple(params))]
    if name == "u2":
        return [Gate("u3", (q[0],), (PI / 2, params[0], params[1]))]
    if name == "u1":
        return [_u1(q[0], params[0])]
    if name == "h":
        return [_h(q[0])]
    if name == "x":
        return [Gate("u3", (q[0],), (PI, 0.0, PI))]
    if name == "y":
        return [Gate("u3", (q[0],), (PI, PI / 2, PI / 2))]
    if name == "z":
        return [_u1(q[0], PI)]
    if name == "rx":
        return [Gate("u3", (q[0],), (params[0], -PI / 2, PI / 2))]
    if name == "ry":
        return [Gate("u3", (q[0],), (params[0], 0.0, 0.0))]
    if name == "rz":
        # equivalent to rz up to global phase; all checks are phase-invariant
        return [_u1(q[0], params[0])]
    if name == "cx":
        return [Gate("cnot", (q[0], q[1]))]
    if name == "swap":
        return [Gate("swap", (q[0], q[1]))]
    if name == "cz":
        return [_h(q[1]), Gate("cnot", (q[0], q[1])), _h(q[1])]
    if name == "cp":
        lam = params[0]
        return [
            _u1(q[0], lam / 2), Gate("cnot", (q[0], q[1])),
            _u1(q[1], -lam / 2), Gate("cnot", (q[0], q[1])),
            _u1(q[1], lam / 2),
        ]
    if name == "ccx":
        return ccx_gates(q[0], q[1], q[2])
    raise QasmError(f"line {lineno}: unsupported gate {name!r}")


_GATE_RE = re.compile(
    r"^(?P<name>[a-z][a-z0-9]*)\s*(?:\((?P<params>[^)]*)\))?\s*(?P<args>.+)$")
_ARG_RE = re.compile(r"^(?P<reg>[A-Za-z_][A-Za-z0-9_]*)\[(?P<idx>\d+)\]$")


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OPENQASM 2.0 subset into a lowered Circuit."""
    reg_name = None
    reg_size = 0
    gates: list[Gate] = []
    seen_header = False

    # statements end with ';'; track line numbers for diagnostics
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            if stmt.startswith("OPENQASM"):
                seen_header = True
                continue
            if stmt.startswith("include"):
                continue
            if stmt.startswith("barrier"):
                continue
            if stmt.startswith("qreg"):
                m = re.match(r"^qreg\s+([A-Za-z_][A-Za-z0-9_]*)\[(\d+)\]$", stmt)
                if not m:
                    raise QasmError(f"line {lineno}: malformed qreg")
                if reg_name is not None:
                    raise QasmError(f"line {lineno}: only one quantum register supported")
                reg_name, reg_size = m.group(1), int(m.group(2))
                if reg_size == 0:
                    raise QasmError(f"line {lineno}: register size 0")
                continue
            m = _GATE_RE.match(stmt)
            if not m:
                raise QasmError(f"line {lineno}: syntax error in {stmt!r}")
            name = m.group("name")
            if name not in _ONE_QUBIT | _TWO_QUBIT | {"ccx"}:
                raise QasmError(f"line {lineno}: unsupported statement {stmt!r}")
            if reg_name is None:
                raise QasmError(f"line {lineno}: gate before qreg declaration")
            params = []
            if m.group("params") is not None:
                params = [_eval_angle(p, lineno) for p in m.group("params").split(",")]
            expected = _PARAM_COUNT.get(name, 0)
            if len(params) != expected:
                raise QasmError(
                    f"line {lineno}: {name} expects {expected} parameter(s)")
            qubits = []
            for arg in (a.strip() for a in m.group("args").split(",")):
                am = _ARG_RE.match(arg)
                if not am or am.group("reg") != reg_name:
                    raise QasmError(f"line {lineno}: bad operand {arg!r}")
                idx = int(am.group("idx"))
                if idx >= reg_size:
                    raise QasmError(f"line {lineno}: qubit index {idx} out of range")
                qubits.append(idx)
            want = 3 if name == "ccx" else (2 if name in _TWO_QUBIT else 1)
            if len(qubits) != want:
                raise QasmError(f"line {lineno}: {name} expects {want} operand(s)")
            gates.extend(_lower(name, qubits, params, lineno))

    if not seen_header:
        raise QasmError("line 1: missing OPENQASM 2.0 header")
    if reg_name is None:
        raise QasmError("no quantum register declared")
    return Circuit(reg_size, gates)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_qasm(c: Circuit, decompose_swap: bool = False) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        if g.kind == "u3":
            t, p, l = g.params
            lines.append(f"u3({_fmt(t)},{_fmt(p)},{_fmt(l)}) q[{g.qubits[0]}];")
        elif g.kind == "cnot":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        elif g.kind == "swap":
            a, b = g.qubits
            if decompose_swap:
                lines.append(f"cx q[{a}],q[{b}];")
                lines.append(f"cx q[{b}],q[{a}];")
                lines.append(f"cx q[{a}],q[{b}];")
            else:
                lines.append(f"swap q[{a}],q[{b}];")
        else:
            raise CircuitError("opaque gates cannot be emitted as QASM")
    return "\n".join(lines) + "\n"
