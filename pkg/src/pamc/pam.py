"""Permutation-aware layout and routing: a generalized SABRE-style sweep over
partitioned circuits, block-permutation selection, swap search with decay,
gate absorption, and the end-to-end compilation pipelines (including the
classic per-gate baseline and the ablation modes).

Mapping conventions (fixed once, pinned by the end-to-end equivalence test):
    * block-local wire i is the i-th smallest logical qubit of the block, so
      the placement-determined input permutation is the identity in local
      coordinates and the sub-topology carries the placement's labeling
    * placing a block with output permutation p moves the carrier of local
      wire i to the physical qubit that held local wire p(i)
    * free physical qubits carry phantom wires and participate in swaps
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, Gate
from .partition import Block, PartitionedCircuit, quick_partition
from .permutation import Permutation, all_permutations, identity
from .synthesis import (DiskCache, SynthesisConfig, SynthesisStats,
                        SynthesisTable, resynthesize_block)
from .topology import (CouplingGraph, DistanceMatrix, SubTopology,
                       TopologyError, distance_matrix, feasible_subtopologies,
                       induced_subtopology)

MODES = ("sabre_baseline", "block_only", "synth_no_perm",
         "input_only", "output_only", "sequential_both")

# which modes give the sweep output-permutation freedom / use a table
_OUTPUT_FREE = {"output_only", "sequential_both"}
_TABLE_MODES = {"synth_no_perm", "input_only", "output_only", "sequential_both"}


class RoutingError(Exception):
    pass


@dataclass(frozen=True)
class SweepConfig:
    extended_size: int = 20
    extended_weight: float = 0.5
    perm_weight: float = 0.1
    decay_delta: float = 0.001
    decay_reset_interval: int = 5
    layout_passes: int = 2
    seed: int = 0
    permutation_mode: str = "sequential_both"

    def __post_init__(self):
        if self.extended_size < 0 or min(
                self.extended_weight, self.perm_weight, self.decay_delta) < 0:
            raise ValueError("sweep weights and sizes must be nonnegative")
        if self.permutation_mode not in (
                "none", "input_only", "output_only", "sequential_both"):
            raise ValueError(f"bad permutation_mode {self.permutation_mode!r}")


class MappingState:
    """Full bijection between wires and physical qubits.

    Wires 0..n_logical-1 are circuit qubits; higher wires are phantoms riding
    on free physical qubits so swaps can move onto them.
    """

    __slots__ = ("n_logical", "n_physical", "wire_at", "pos")

    def __init__(self, n_logical: int, n_physical: int, log2phys):
        if n_physical < n_logical:
            raise RoutingError("device smaller than circuit")
        if len(set(log2phys)) != n_logical:
            raise RoutingError("initial layout is not injective")
        self.n_logical = n_logical
        self.n_physical = n_physical
        self.wire_at = [-1] * n_physical
        for l, p in enumerate(log2phys):
            self.wire_at[p] = l
        nxt = n_logical
        for p in range(n_physical):
            if self.wire_at[p] < 0:
                self.wire_at[p] = nxt
                nxt += 1
        self.pos = [0] * n_physical
        for p, w in enumerate(self.wire_at):
            self.pos[w] = p

    def copy(self) -> "MappingState":
        m = MappingState.__new__(MappingState)
        m.n_logical = self.n_logical
        m.n_physical = self.n_physical
        m.wire_at = list(self.wire_at)
        m.pos = list(self.pos)
        return m

    def apply_swap(self, p: int, q: int) -> None:
        a, b = self.wire_at[p], self.wire_at[q]
        self.wire_at[p], self.wire_at[q] = b, a
        self.pos[a], self.pos[b] = q, p

    def apply_block_perm(self, qubits, p_o: Permutation) -> None:
        """Carrier of local wire i moves to where local wire p_o(i) was."""
        old = [self.pos[q] for q in qubits]
        for i, q in enumerate(qubits):
            tgt = old[p_o(i)]
            self.pos[q] = tgt
            self.wire_at[tgt] = q

    def logical_layout(self) -> list[int]:
        return [self.pos[l] for l in range(self.n_logical)]

    def full_wires(self) -> list[int]:
        return list(self.wire_at)


@dataclass
class CompiledResult:
    circuit: Circuit                 # physical; SWAPs kept as gates
    initial_layout: list[int]        # physical qubit per logical
    final_mapping: list[int]
    initial_wires: list[int]         # full wire_at including phantoms
    final_wires: list[int]
    swap_count: int
    cnot_count: int
    mode: str
    seed: int
    wall_ms: float = 0.0
    intra_block_swaps: int = 0       # instrumentation; must stay 0

    def sidecar(self) -> dict:
        return {
            "initial_layout": self.initial_layout,
            "final_mapping": self.final_mapping,
            "swap_count": self.swap_count,
            "cnot_count": self.cnot_count,
            "mode": self.mode,
            "seed": self.seed,
            "wall_ms": round(self.wall_ms, 3),
        }


# -- heuristics ---------------------------------------------------------------

def heuristic_h(front: list[Block], ext: list[Block], mapping: MappingState,
                dist: DistanceMatrix, cfg: SweepConfig,
                exchange: tuple[int, int] | None = None,
                override: dict | None = None) -> float:
    """Front-layer mean pairwise distance plus weighted extended-set term.

    ``exchange`` scores a hypothetical swap of two physical qubits and
    ``override`` a hypothetical relocation of some logical qubits, without
    mutating the mapping.
    """
    def loc(q: int) -> int:
        p = override.get(q) if override else None
        if p is None:
            p = mapping.pos[q]
        if exchange:
            if p == exchange[0]:
                return exchange[1]
            if p == exchange[1]:
                return exchange[0]
        return p

    def block_sum(b: Block) -> float:
        qs = b.qubits
        total = 0.0
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                total += dist.d[loc(qs[i]), loc(qs[j])]
        return total

    h = 0.0
    if front:
        h += sum(block_sum(b) for b in front) / len(front)
    if ext:
        h += cfg.extended_weight / len(ext) * sum(block_sum(b) for b in ext)
    return h


def extended_set(pc: PartitionedCircuit, done: set[int], front: list[int],
                 cfg: SweepConfig) -> list[int]:
    """First |E| successors of the front layer, in BFS discovery order."""
    out: list[int] = []
    seen = set(front) | done
    queue = list(front)
    qi = 0
    while qi < len(queue) and len(out) < cfg.extended_size:
        b = queue[qi]
        qi += 1
        for s in pc.successors[b]:
            if s not in seen:
                seen.add(s)
                out.append(s)
                queue.append(s)
                if len(out) >= cfg.extended_size:
                    break
    return out


def candidate_swaps(front: list[Block], mapping: MappingState,
                    g: CouplingGraph) -> list[tuple[int, int]]:
    """Coupling edges touching a front-layer qubit, minus edges internal to a
    single front block."""
    active = {mapping.pos[q] for b in front for q in b.qubits}
    forbidden = set()
    for b in front:
        phys = [mapping.pos[q] for q in b.qubits]
        for i in range(len(phys)):
            for j in range(i + 1, len(phys)):
                forbidden.add(tuple(sorted((phys[i], phys[j]))))
    return sorted(e for e in g.edges
                  if (e[0] in active or e[1] in active) and e not in forbidden)


def select_swap(candidates: list[tuple[int, int]], front: list[Block],
                ext: list[Block], mapping: MappingState, dist: DistanceMatrix,
                decay: np.ndarray, cfg: SweepConfig) -> tuple[int, int]:
    if not candidates:
        raise RoutingError("no candidate swaps (unroutable state)")
    best_edge, best_score = None, math.inf
    for e in candidates:
        h = heuristic_h(front, ext, mapping, dist, cfg, exchange=e)
        score = max(decay[e[0]], decay[e[1]]) * h
        if score < best_score or (score == best_score and e < best_edge):
            best_edge, best_score = e, score
    return best_edge


# -- block placement ----------------------------------------------------------

def _placement_subtopology(b: Block, mapping: MappingState,
                           g: CouplingGraph) -> SubTopology | None:
    """Labeled sub-topology of the block's current placement, or None if the
    placement is disconnected (block not executable here)."""
    try:
        return induced_subtopology(g, [mapping.pos[q] for q in b.qubits])
    except TopologyError:
        return None


def literal_plan(b: Block, mapping: MappingState,
                 g: CouplingGraph) -> Circuit | None:
    """The block's own gates adapted to the current placement, or None.

    Requires a connected placement. Two-qubit gates whose endpoints sit two
    hops apart inside the block are conjugated by a SWAP through the middle
    qubit, which leaves the mapping unchanged so the block stays atomic.
    """
    phys = [mapping.pos[q] for q in b.qubits]
    k = len(phys)
    if _placement_subtopology(b, mapping, g) is None:
        return None
    adj = [[i != j and g.has_edge(phys[i], phys[j]) for j in range(k)]
           for i in range(k)]
    gates: list[Gate] = []
    for gate in b.gates:
        if gate.arity < 2:
            gates.append(gate)
            continue
        if all(adj[a][c] for a, c in
               ((gate.qubits[i], gate.qubits[j])
                for i in range(gate.arity) for j in range(i + 1, gate.arity))):
            gates.append(gate)
            continue
        if gate.arity != 2:
            return None
        a, c = gate.qubits
        mids = [m for m in range(k) if m not in (a, c) and adj[a][m] and adj[m][c]]
        if not mids:
            return None
        m = mids[0]
        gates.append(Gate("swap", (a, m)))
        gates.append(gate.relabeled({a: m, c: c}))
        gates.append(Gate("swap", (a, m)))
    return Circuit(k, gates)


def select_permutation(b: Block, mapping: MappingState, table: SynthesisTable,
                       front_after: list[Block], ext_after: list[Block],
                       dist: DistanceMatrix, cfg: SweepConfig,
                       g: CouplingGraph):
    """Choose the block's output permutation under the current placement.

    Returns (p_o, circuit, literal) or None when the block is not executable.
    The input permutation is placement-determined (identity in block-local
    coordinates); output freedom depends on the permutation mode.
    """
    sub = _placement_subtopology(b, mapping, g)
    if sub is None:
        return None
    k = b.width
    ident = identity(k)
    if cfg.permutation_mode in _OUTPUT_FREE:
        choices = all_permutations(k)
    else:
        choices = [ident]

    best = None
    for p_o in choices:
        entry = table.get(b.index, sub, ident, p_o)
        if entry is None or entry.circuit is None or math.isinf(entry.cnot_count):
            continue
        override = {q: mapping.pos[b.qubits[p_o(i)]]
                    for i, q in enumerate(b.qubits)}
        h = heuristic_h(front_after, ext_after, mapping, dist, cfg,
                        override=override)
        score = cfg.perm_weight * entry.cnot_count + h
        key = (score, entry.cnot_count, p_o.map)
        if best is None or key < best[0]:
            best = (key, p_o, entry.circuit)
    if best is not None:
        return best[1], best[2], False
    # missing entries: fall back to the literal gates under this placement
    lit = literal_plan(b, mapping, g)
    if lit is not None:
        return ident, lit, True
    return None


# -- the sweep ----------------------------------------------------------------

@dataclass
class SweepOutcome:
    circuit: Circuit
    mapping: MappingState
    swap_count: int
    intra_block_swaps: int


def sweep(pc: PartitionedCircuit, mapping0: MappingState,
          table: SynthesisTable | None, dist: DistanceMatrix,
          g: CouplingGraph, cfg: SweepConfig,
          literal_only: bool = False) -> SweepOutcome:
    """Place every executable front block; otherwise commit one swap.

    With ``literal_only`` (baseline and block-only modes) blocks are emitted
    verbatim and executability means every two-qubit gate sits on an edge.
    """
    mapping = mapping0.copy()
    done: set[int] = set()
    emitted: list[Gate] = []
    decay = np.ones(g.num_physical)
    swaps = 0
    swaps_since_reset = 0
    intra = 0
    guard = max(64, g.num_physical * max(1, len(pc.blocks)) * dist.diameter)

    while len(done) < len(pc.blocks):
        placed = True
        while placed:
            placed = False
            for bi in pc.front(done):
                b = pc.blocks[bi]
                plan = _plan_block(bi, b, mapping, table, pc, done, dist, cfg,
                                   g, literal_only)
                if plan is None:
                    continue
                p_o, circuit = plan
                phys = [mapping.pos[q] for q in b.qubits]
                for gate in circuit.gates:
                    emitted.append(gate.relabeled(phys))
                mapping.apply_block_perm(b.qubits, p_o)
                done.add(bi)
                decay[:] = 1.0
                swaps_since_reset = 0
                placed = True
                break
        if len(done) == len(pc.blocks):
            break
        front_ids = pc.front(done)
        front = [pc.blocks[i] for i in front_ids]
        ext = [pc.blocks[i] for i in extended_set(pc, done, front_ids, cfg)]
        cands = candidate_swaps(front, mapping, g)
        edge = select_swap(cands, front, ext, mapping, dist, decay, cfg)
        wires = (mapping.wire_at[edge[0]], mapping.wire_at[edge[1]])
        if any(set(wires) <= set(b.qubits) for b in front):
            intra += 1
        emitted.append(Gate("swap", edge))
        mapping.apply_swap(*edge)
        decay[edge[0]] += cfg.decay_delta
        decay[edge[1]] += cfg.decay_delta
        swaps += 1
        swaps_since_reset += 1
        if swaps_since_reset >= cfg.decay_reset_interval:
            decay[:] = 1.0
            swaps_since_reset = 0
        if swaps > guard:
            raise RoutingError(
                f"sweep exceeded swap guard ({guard}); blocks done "
                f"{len(done)}/{len(pc.blocks)}")
    return SweepOutcome(Circuit(g.num_physical, emitted), mapping, swaps, intra)


def _plan_block(bi, b, mapping, table, pc, done, dist, cfg, g, literal_only):
    if b.width == 1:
        if literal_only or table is None:
            return identity(1), b.local_circuit()
        return (_table_plan(bi, b, mapping, table, pc, done, dist, cfg, g)
                or (identity(1), b.local_circuit()))
    if literal_only or table is None:
        lit = literal_plan(b, mapping, g)
        if lit is not None:
            return identity(b.width), lit
        return None
    return _table_plan(bi, b, mapping, table, pc, done, dist, cfg, g)


def _table_plan(bi, b, mapping, table, pc, done, dist, cfg, g):
    """bi is the block's position in pc's DAG; b.index keys the table."""
    done_after = done | {bi}
    front_after_ids = pc.front(done_after)
    front_after = [pc.blocks[i] for i in front_after_ids]
    ext_after = [pc.blocks[i]
                 for i in extended_set(pc, done_after, front_after_ids, cfg)]
    sel = select_permutation(b, mapping, table, front_after, ext_after,
                             dist, cfg, g)
    if sel is None:
        return None
    p_o, circuit, _literal = sel
    return p_o, circuit


# -- layout / route / absorb / compile ---------------------------------------

def per_gate_blocks(c: Circuit) -> PartitionedCircuit:
    blocks = []
    for i, gate in enumerate(c.gates):
        qs = tuple(sorted(gate.qubits))
        local = {q: j for j, q in enumerate(qs)}
        blocks.append(Block(i, qs, (gate.relabeled(local),), (i,)))
    return PartitionedCircuit(c.num_qubits, blocks)


def layout(pc: PartitionedCircuit, table: SynthesisTable | None,
           dist: DistanceMatrix, g: CouplingGraph, cfg: SweepConfig,
           literal_only: bool = False) -> MappingState:
    """Seeded random start evolved by forward/backward sweeps; gates discarded."""
    if g.num_physical < pc.num_qubits:
        raise RoutingError(f"device has {g.num_physical} qubits but the "
                           f"circuit needs {pc.num_qubits}")
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(g.num_physical)
    mapping = MappingState(pc.num_qubits, g.num_physical,
                           [int(perm[l]) for l in range(pc.num_qubits)])
    rev = pc.reversed_blocks()
    for _ in range(cfg.layout_passes):
        mapping = sweep(pc, mapping, table, dist, g, cfg, literal_only).mapping
        mapping = sweep(rev, mapping, table, dist, g, cfg, literal_only).mapping
    return mapping


def route(pc: PartitionedCircuit, mapping0: MappingState,
          table: SynthesisTable | None, dist: DistanceMatrix,
          g: CouplingGraph, cfg: SweepConfig, mode: str = "sequential_both",
          literal_only: bool = False) -> CompiledResult:
    t0 = time.perf_counter()
    initial = mapping0.copy()
    out = sweep(pc, mapping0, table, dist, g, cfg, literal_only)
    return CompiledResult(
        circuit=out.circuit,
        initial_layout=initial.logical_layout(),
        final_mapping=out.mapping.logical_layout(),
        initial_wires=initial.full_wires(),
        final_wires=out.mapping.full_wires(),
        swap_count=out.swap_count,
        cnot_count=out.circuit.cnot_count(),
        mode=mode,
        seed=cfg.seed,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        intra_block_swaps=out.intra_block_swaps,
    )


def absorb(result: CompiledResult, g: CouplingGraph, k: int,
           syn_cfg: SynthesisConfig,
           stats: SynthesisStats | None = None) -> CompiledResult:
    """Repartition the physical circuit (SWAPs included) and resynthesize each
    block in place against its induced sub-topology; keep strict improvements."""
    from .synthesis import SynthesisError, hs_distance, qsearch
    from .topology import TopologyError, induced_subtopology

    pc = quick_partition(result.circuit, k)
    new_gates: list[Gate] = []
    for b in pc.blocks:
        old_local = b.local_circuit()
        replacement = None
        if b.width <= k:
            try:
                sub = induced_subtopology(g, b.qubits)
            except TopologyError:
                sub = None
            if sub is not None:
                try:
                    cand = qsearch(b.unitary(), sub, syn_cfg, stats)
                    if cand.cnot_count() < old_local.cnot_count():
                        replacement = cand
                except SynthesisError:
                    pass
        chosen = replacement if replacement is not None else old_local
        new_gates.extend(gate.relabeled(b.qubits) for gate in chosen.gates)
    circuit = Circuit(result.circuit.num_qubits, new_gates)
    return replace(result, circuit=circuit,
                   cnot_count=circuit.cnot_count(),
                   swap_count=sum(1 for gate in circuit.gates
                                  if gate.kind == "swap"))


def build_table(pc: PartitionedCircuit, g: CouplingGraph,
                syn_cfg: SynthesisConfig, mode: str,
                cache: DiskCache | None = None,
                stats: SynthesisStats | None = None) -> SynthesisTable:
    table = SynthesisTable()
    identity_only = mode == "synth_no_perm"
    feas_by_width: dict[int, list[SubTopology]] = {}
    for b in pc.blocks:
        w = b.width
        if w not in feas_by_width:
            feas_by_width[w] = ([SubTopology(1, [])] if w == 1
                                else feasible_subtopologies(g, w))
        resynthesize_block(b, feas_by_width[w], syn_cfg, stats=stats,
                           table=table, cache=cache,
                           identity_only=identity_only)
    return table


def compile_circuit(c: Circuit, g: CouplingGraph,
                    cfg: SweepConfig | None = None,
                    syn_cfg: SynthesisConfig | None = None,
                    mode: str = "sequential_both", k: int = 3,
                    cache: DiskCache | None = None,
                    do_absorb: bool = True,
                    stats: SynthesisStats | None = None) -> CompiledResult:
    """partition -> resynthesize -> layout -> route -> absorb."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    cfg = cfg or SweepConfig()
    syn_cfg = syn_cfg or SynthesisConfig(seed=cfg.seed)
    t0 = time.perf_counter()
    dist = distance_matrix(g)

    if mode == "sabre_baseline":
        pc = per_gate_blocks(c)
        table = None
        literal = True
        cfg = replace(cfg, permutation_mode="none")
    else:
        pc = quick_partition(c, k)
        literal = mode == "block_only"
        table = None if literal else build_table(pc, g, syn_cfg, mode,
                                                 cache=cache, stats=stats)
        perm_mode = {"block_only": "none", "synth_no_perm": "none",
                     "input_only": "input_only", "output_only": "output_only",
                     "sequential_both": "sequential_both"}[mode]
        cfg = replace(cfg, permutation_mode=perm_mode)

    mapping = layout(pc, table, dist, g, cfg, literal_only=literal)
    result = route(pc, mapping, table, dist, g, cfg, mode=mode,
                   literal_only=literal)
    if do_absorb and mode in _TABLE_MODES:
        result = absorb(result, g, k, syn_cfg, stats=stats)
    result.wall_ms = (time.perf_counter() - t0) * 1e3
    return result
