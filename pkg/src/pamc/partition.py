"""Vertical partitioning: a single left-to-right sweep grouping gates into
bins of at most k qubits.

Tie rules are fixed for determinism: a gate joins the earliest-opened safe
bin, preferring bins that already contain one of its qubits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate


@dataclass
class Block:
    """A contiguous group of gates spanning at most k qubits.

    ``gates`` are relabeled to local wires 0..width-1, local wire i being the
    i-th smallest logical qubit in ``qubits``.
    """

    index: int
    qubits: tuple[int, ...]          # sorted logical qubits
    gates: tuple[Gate, ...]          # block-local wire labels
    source_indices: tuple[int, ...]  # positions in the source gate list

    @property
    def width(self) -> int:
        return len(self.qubits)

    def local_circuit(self) -> Circuit:
        return Circuit(self.width, self.gates)

    def unitary(self) -> np.ndarray:
        return self.local_circuit().unitary()

    def global_gates(self):
        """Gates relabeled back to logical qubits."""
        return [g.relabeled(self.qubits) for g in self.gates]


class PartitionedCircuit:
    def __init__(self, num_qubits: int, blocks: list[Block]):
        self.num_qubits = num_qubits
        self.blocks: tuple[Block, ...] = tuple(blocks)
        self.predecessors = self._build_dag()
        self.successors: tuple[tuple[int, ...], ...] = self._invert(self.predecessors)

    def _build_dag(self):
        last: dict[int, int] = {}
        preds = []
        for i, b in enumerate(self.blocks):
            p = {last[q] for q in b.qubits if q in last}
            preds.append(tuple(sorted(p)))
            for q in b.qubits:
                last[q] = i
        return tuple(preds)

    def _invert(self, preds):
        succ = [[] for _ in self.blocks]
        for i, ps in enumerate(preds):
            for p in ps:
                succ[p].append(i)
        return tuple(tuple(s) for s in succ)

    def front(self, done: set[int]) -> list[int]:
        return [i for i in range(len(self.blocks))
                if i not in done and all(p in done for p in self.predecessors[i])]

    def to_circuit(self) -> Circuit:
        gates = []
        for b in self.blocks:
            gates.extend(b.global_gates())
        return Circuit(self.num_qubits, gates)

    def reversed_blocks(self) -> "PartitionedCircuit":
        """Block list and per-block gate lists reversed (supports only matter)."""
        rev = [Block(b.index, b.qubits, tuple(reversed(b.gates)),
                     tuple(reversed(b.source_indices)))
               for b in reversed(self.blocks)]
        return PartitionedCircuit(self.num_qubits, rev)

    def __len__(self):
        return len(self.blocks)


class _Bin:
    __slots__ = ("qubits", "items", "open_time", "closed")

    def __init__(self, open_time: int):
        self.qubits: set[int] = set()
        self.items: list[tuple[int, Gate]] = []
        self.open_time = open_time
        self.closed = False


def quick_partition(c: Circuit, k: int) -> PartitionedCircuit:
    """O(gate count) binning sweep; every block spans at most k qubits."""
    if k < 2:
        raise ValueError("block width must be at least 2")

    bins: list[_Bin] = []          # in opening order; closed bins stay in place
    last_touch: dict[int, tuple[_Bin, int]] = {}  # qubit -> (bin, gate index)

    def safe(b: _Bin, gate: Gate) -> bool:
        if b.closed:
            return False
        if len(b.qubits | set(gate.qubits)) > k:
            return False
        for q in gate.qubits:
            t = last_touch.get(q)
            if t is not None and t[0] is not b and t[1] >= b.open_time:
                return False
        return True

    for gi, g in enumerate(c.gates):
        target = None
        # prefer the earliest safe bin already holding one of the gate's qubits
        for b in bins:
            if not b.closed and (b.qubits & set(g.qubits)) and safe(b, g):
                target = b
                break
        if target is None:
            for b in bins:
                if safe(b, g):
                    target = b
                    break
        if target is None:
            # close the bins blocking this gate's qubits, then open a new one
            for q in g.qubits:
                t = last_touch.get(q)
                if t is not None:
                    t[0].closed = True
            target = _Bin(gi)
            bins.append(target)
        target.qubits.update(g.qubits)
        target.items.append((gi, g))
        for q in g.qubits:
            last_touch[q] = (target, gi)

    blocks = _bins_to_blocks(c, bins, k)
    return PartitionedCircuit(c.num_qubits, blocks)


def _bins_to_blocks(c: Circuit, bins: list[_Bin], k: int) -> list[Block]:
    bins = [b for b in bins if b.items]
    _merge_trailing_singletons(bins, k)
    blocks = []
    for idx, b in enumerate(bins):
        qubits = tuple(sorted(b.qubits))
        local = {q: i for i, q in enumerate(qubits)}
        items = sorted(b.items)
        gates = tuple(g.relabeled(local) for _, g in items)
        blocks.append(Block(idx, qubits, gates, tuple(i for i, _ in items)))
    return blocks


def _merge_trailing_singletons(bins: list[_Bin], k: int) -> None:
    """Fold width-1 bins into an adjacent bin when width and order allow it."""
    changed = True
    while changed:
        changed = False
        for i, b in enumerate(bins):
            if len(b.qubits) != 1:
                continue
            q = next(iter(b.qubits))
            lo = min(gi for gi, _ in b.items)
            hi = max(gi for gi, _ in b.items)
            for j, other in enumerate(bins):
                if other is b or len(other.qubits | b.qubits) > k:
                    continue
                # safe only if no third bin touches a merged qubit inside the span
                span_lo = min(lo, min(gi for gi, _ in other.items))
                span_hi = max(hi, max(gi for gi, _ in other.items))
                merged = other.qubits | b.qubits
                conflict = any(
                    third is not b and third is not other
                    and (third.qubits & merged)
                    and any(span_lo <= gi <= span_hi for gi, g in third.items
                            if set(g.qubits) & merged)
                    for third in bins)
                if conflict:
                    continue
                other.qubits.update(b.qubits)
                other.items.extend(b.items)
                bins.pop(i)
                changed = True
                break
            if changed:
                break
