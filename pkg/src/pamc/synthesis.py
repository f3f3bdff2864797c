"""Topology-aware unitary synthesis: best-first search over CNOT placements
with numerical instantiation, permutation-aware variants (sequential and
exhaustive), and offline block resynthesis into a permutation table.
"""
from __future__ import annotations

import hashlib
import heapq
import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .circuit import Circuit, Gate, emit_qasm, parse_qasm
from .partition import Block
from .permutation import (Permutation, all_permutations, compose, identity,
                          inverse, permutation_matrix, permute_circuit)
from .topology import SubTopology


class SynthesisError(Exception):
    def __init__(self, message, best_circuit=None, best_distance=None):
        super().__init__(message)
        self.best_circuit = best_circuit
        self.best_distance = best_distance


def hs_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |tr(U^dagger V)| / dim; zero iff V equals U up to global phase."""
    if u.shape != v.shape or u.shape[0] != u.shape[1]:
        raise ValueError("dimension mismatch")
    n = u.shape[0]
    return max(0.0, 1.0 - abs(np.vdot(u, v)) / n)


@dataclass(frozen=True)
class SynthesisConfig:
    multistarts: int = 4
    success_threshold: float = 1e-10
    max_cnots: int = 20
    optimizer_max_iters: int = 300
    seed: int = 0
    warm_start: bool = False

    def __post_init__(self):
        if self.success_threshold <= 0:
            raise ValueError("success threshold must be positive")
        if self.multistarts < 1:
            raise ValueError("at least one multistart required")

    def cache_key_fields(self):
        return (self.multistarts, self.success_threshold, self.max_cnots,
                self.optimizer_max_iters, self.seed)


@dataclass
class SynthesisStats:
    """Instrumentation counters shared across nested synthesis calls."""

    qsearch_calls: int = 0
    instantiate_calls: int = 0
    direct_syntheses: int = 0
    cache_hits: int = 0


class Template:
    """Ordered slots: parameterized single-qubit rotations and fixed CNOTs."""

    __slots__ = ("k", "slots", "_kind", "_a", "_b", "num_params", "cnot_count")

    def __init__(self, k: int, slots):
        self.k = k
        self.slots = tuple(slots)
        kind, a, b = [], [], []
        n_u3 = 0
        n_cx = 0
        for s in self.slots:
            if s[0] == "u3":
                kind.append(0)
                a.append(s[1])
                b.append(-1)
                n_u3 += 1
            else:
                kind.append(1)
                a.append(s[1][0])
                b.append(s[1][1])
                n_cx += 1
        self._kind = np.array(kind, dtype=np.int32)
        self._a = np.array(a, dtype=np.int32)
        self._b = np.array(b, dtype=np.int32)
        self.num_params = 3 * n_u3
        self.cnot_count = n_cx

    def objective(self, target: np.ndarray):
        kind, a, b, k = self._kind, self._a, self._b, self.k

        def f(theta):
            return kernels.objective_and_grad(kind, a, b, theta, target, k)

        return f

    def extended(self, edge: tuple[int, int]) -> "Template":
        c, t = edge
        return Template(self.k, self.slots + (("cnot", (c, t)), ("u3", c), ("u3", t)))

    def circuit(self, theta) -> Circuit:
        gates = []
        off = 0
        for s in self.slots:
            if s[0] == "u3":
                gates.append(Gate("u3", (s[1],), tuple(theta[off:off + 3])))
                off += 3
            else:
                gates.append(Gate("cnot", s[1]))
        return Circuit(max(self.k, 1), gates)


def root_template(k: int) -> Template:
    return Template(k, [("u3", i) for i in range(k)])


def instantiate(template: Template, target: np.ndarray, cfg: SynthesisConfig,
                rng: np.random.Generator | None = None,
                stats: SynthesisStats | None = None,
                warm_theta=None):
    """Multistart quasi-Newton minimization of the phase-invariant distance.

    Returns (theta, distance) for the best start; stops early once a start
    reaches the success threshold.
    """
    if target.shape != (2 ** template.k,) * 2:
        raise ValueError("template width does not match target dimension")
    if stats is not None:
        stats.instantiate_calls += 1
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    fun = template.objective(target)
    d = template.num_params
    if d == 0:
        return np.zeros(0), fun(np.zeros(0))[0]

    starts = [rng.uniform(-math.pi, math.pi, d) for _ in range(cfg.multistarts)]
    if warm_theta is not None and cfg.warm_start:
        pad = np.zeros(d)
        pad[: len(warm_theta)] = warm_theta
        starts.insert(0, pad)

    best_theta, best_dist = None, math.inf
    for x0 in starts:
        res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.optimizer_max_iters,
                                "ftol": 1e-16, "gtol": 1e-12})
        val = float(res.fun)
        if not math.isfinite(val):
            # restart with a fresh draw rather than aborting
            res = minimize(fun, rng.uniform(-math.pi, math.pi, d), jac=True,
                           method="L-BFGS-B",
                           options={"maxiter": cfg.optimizer_max_iters,
                                    "ftol": 1e-16, "gtol": 1e-12})
            val = float(res.fun)
        if val < best_dist:
            best_dist, best_theta = val, res.x
        if best_dist < cfg.success_threshold:
            break
    return best_theta, best_dist


def qsearch(target: np.ndarray, g: SubTopology, cfg: SynthesisConfig,
            stats: SynthesisStats | None = None,
            max_cnots: int | None = None) -> Circuit:
    """Best-first search over CNOT placements on the sub-topology's edges.

    A greedy pass (priority: instantiated distance, then CNOT count) finds a
    first solution quickly; layered refinement passes with a shrinking CNOT
    cap (priority: CNOT count, then distance) then drive the count to the
    minimum the instantiater can certify. Instantiations are memoized per
    call, so refinement mostly replays cached nodes.
    """
    if stats is not None:
        stats.qsearch_calls += 1
    if target.shape != (2 ** g.k,) * 2:
        raise ValueError("target dimension does not match sub-topology width")
    limit = cfg.max_cnots if max_cnots is None else min(max_cnots, cfg.max_cnots)
    rng = np.random.default_rng(cfg.seed)
    edges = g.sorted_edges()
    memo: dict = {}

    def inst(tpl: Template, warm):
        hit = memo.get(tpl.slots)
        if hit is not None:
            return hit
        res = instantiate(tpl, target, cfg, rng, stats, warm_theta=warm)
        memo[tpl.slots] = res
        return res

    best = _best_first(target, g, cfg, edges, inst, limit, greedy=True)
    if best is None:
        slots, (th, best_d) = min(memo.items(), key=lambda kv: kv[1][1])
        best_c = Template(g.k, slots).circuit(th)
        raise SynthesisError(
            f"no circuit within threshold {cfg.success_threshold} at {limit} "
            f"CNOTs (best distance {best_d:.3e})",
            best_circuit=best_c, best_distance=best_d)
    while best.cnot_count() > 0:
        improved = _best_first(target, g, cfg, edges, inst,
                               best.cnot_count() - 1, greedy=False)
        if improved is None:
            break
        best = improved
    return best


def _best_first(target, g, cfg, edges, inst, limit, greedy):
    """One search pass; returns the first circuit below threshold or None."""
    counter = 0
    root = root_template(g.k)
    theta, dist = inst(root, None)
    key = (dist, 0) if greedy else (0, dist)
    heap = [(key, counter, root, theta)]
    while heap:
        k0, _, tpl, theta = heapq.heappop(heap)
        dist = k0[0] if greedy else k0[1]
        ncx = tpl.cnot_count
        if dist < cfg.success_threshold:
            return tpl.circuit(theta)
        if ncx >= limit:
            continue
        for e in edges:
            child = tpl.extended(e)
            counter += 1
            cth, cdist = inst(child, theta)
            ck = (cdist, ncx + 1) if greedy else (ncx + 1, cdist)
            heapq.heappush(heap, (ck, counter, child, cth))
    return None


@dataclass
class PASResult:
    p_i: Permutation
    p_o: Permutation
    circuit: Circuit
    distance: float

    @property
    def cnot_count(self) -> int:
        return self.circuit.cnot_count()


def _permuted_target(u: np.ndarray, p_i: Permutation, p_o: Permutation) -> np.ndarray:
    return permutation_matrix(p_o) @ u @ permutation_matrix(p_i)


def seqpas(target: np.ndarray, g: SubTopology, cfg: SynthesisConfig,
           stats: SynthesisStats | None = None) -> PASResult:
    """Sequential search: best input permutation first, then best output.

    Performs exactly 2 * k! synthesis calls.
    """
    k = g.k
    perms = all_permutations(k)
    ident = identity(k)

    best = None
    for p_i in perms:
        cand = _try_pair(target, g, cfg, stats, p_i, ident, cap=None)
        best = _better(best, cand)
    p_i_star = best.p_i
    for p_o in perms:
        cand = _try_pair(target, g, cfg, stats, p_i_star, p_o, cap=None)
        best = _better(best, cand)
    if best.circuit is None:
        raise SynthesisError("all permutation searches failed")
    return best


def fullpas(target: np.ndarray, g: SubTopology, cfg: SynthesisConfig,
            stats: SynthesisStats | None = None) -> PASResult:
    """Exhaustive search over all (k!)^2 input/output permutation pairs."""
    k = g.k
    perms = all_permutations(k)
    best = None
    for p_i in perms:
        for p_o in perms:
            cap = None if best is None or best.circuit is None \
                else best.circuit.cnot_count()
            cand = _try_pair(target, g, cfg, stats, p_i, p_o, cap=cap)
            best = _better(best, cand)
    if best.circuit is None:
        raise SynthesisError("all permutation searches failed")
    return best


def _try_pair(target, g, cfg, stats, p_i, p_o, cap):
    try:
        c = qsearch(_permuted_target(target, p_i, p_o), g, cfg, stats,
                    max_cnots=cap)
        return PASResult(p_i, p_o, c, hs_distance(
            _permuted_target(target, p_i, p_o), c.unitary()))
    except SynthesisError:
        return PASResult(p_i, p_o, None, math.inf)


def _better(best: PASResult | None, cand: PASResult) -> PASResult:
    """Min CNOTs, ties by lower depth then lexicographic (p_i, p_o)."""
    if cand.circuit is None:
        return cand if best is None else best
    if best is None or best.circuit is None:
        return cand
    a = (best.circuit.cnot_count(), best.circuit.depth(), best.p_i.map, best.p_o.map)
    b = (cand.circuit.cnot_count(), cand.circuit.depth(), cand.p_i.map, cand.p_o.map)
    return cand if b < a else best


# -- permutation table --------------------------------------------------------

@dataclass
class TableEntry:
    circuit: Circuit | None
    cnot_count: float                 # inf for failed syntheses
    distance: float
    derived_from: tuple | None = None


def entry_key(g: SubTopology, p_i: Permutation, p_o: Permutation):
    return (g.sorted_edges(), p_i.map, p_o.map)


class SynthesisTable:
    """entries[block_key][(G edges, P_i, P_o)] -> TableEntry."""

    def __init__(self):
        self.entries: dict = {}

    def insert(self, block_key, g, p_i, p_o, entry: TableEntry):
        self.entries.setdefault(block_key, {})[entry_key(g, p_i, p_o)] = entry

    def get(self, block_key, g, p_i, p_o) -> TableEntry | None:
        return self.entries.get(block_key, {}).get(entry_key(g, p_i, p_o))

    def block_entries(self, block_key) -> dict:
        return self.entries.get(block_key, {})


def unitary_hash(u: np.ndarray) -> str:
    return hashlib.sha1(np.round(u, 12).tobytes()).hexdigest()


class DiskCache:
    """One JSON record per synthesized entry, keyed by
    (unitary hash, sub-topology, permutations, config)."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, uhash, g, p_i, p_o, cfg):
        tag = hashlib.sha1(json.dumps(
            [sorted(g.edges), list(p_i.map), list(p_o.map),
             cfg.cache_key_fields()]).encode()).hexdigest()[:16]
        d = os.path.join(self.root, uhash[:16])
        os.makedirs(d, exist_ok=True)
        return os.path.join(d, tag + ".json")

    def load(self, uhash, g, p_i, p_o, cfg):
        path = self._path(uhash, g, p_i, p_o, cfg)
        if not os.path.exists(path):
            return None
        obj = json.loads(open(path).read())
        circuit = parse_qasm(obj["qasm"]) if obj["qasm"] else None
        cnots = obj["cnot_count"] if obj["cnot_count"] is not None else math.inf
        return TableEntry(circuit, cnots, obj["distance"])

    def store(self, uhash, g, p_i, p_o, cfg, entry: TableEntry):
        path = self._path(uhash, g, p_i, p_o, cfg)
        obj = {
            "key": {"unitary": uhash, "subtopology": sorted(g.edges),
                    "p_i": list(p_i.map), "p_o": list(p_o.map)},
            "qasm": emit_qasm(entry.circuit) if entry.circuit else None,
            "cnot_count": None if math.isinf(entry.cnot_count) else int(entry.cnot_count),
            "distance": entry.distance,
            "derived_from": None,
        }
        tmp = path + ".tmp"
        with open(tmp, "w") as f:
            json.dump(obj, f)
        os.replace(tmp, path)


def resynthesize_block(block: Block, feas: list[SubTopology],
                       cfg: SynthesisConfig,
                       stats: SynthesisStats | None = None,
                       table: SynthesisTable | None = None,
                       cache: DiskCache | None = None,
                       identity_only: bool = False,
                       block_key=None) -> SynthesisTable:
    """Fill the table for one block: an entry per (sub-topology, P_i, P_o).

    Direct synthesis runs only on one representative per relabeling orbit;
    the rest are derived by circuit relabeling, which rotates the sub-topology
    and shifts both permutations.
    """
    if block.width > 3:
        raise SynthesisError(f"block width {block.width} exceeds in-process cap 3")
    if table is None:
        table = SynthesisTable()
    if block_key is None:
        block_key = block.index
    k = block.width
    u = block.unitary()
    uhash = unitary_hash(u)
    perms = [identity(k)] if identity_only else all_permutations(k)
    relabels = all_permutations(k)
    feas_set = {g.edges: g for g in feas}

    for g in feas:
        for p_i in perms:
            for p_o in perms:
                if table.get(block_key, g, p_i, p_o) is not None:
                    continue
                entry = None
                if cache is not None:
                    entry = cache.load(uhash, g, p_i, p_o, cfg)
                    if entry is not None and stats is not None:
                        stats.cache_hits += 1
                if entry is None:
                    entry = _direct_entry(u, g, p_i, p_o, cfg, stats)
                    if cache is not None:
                        cache.store(uhash, g, p_i, p_o, cfg, entry)
                table.insert(block_key, g, p_i, p_o, entry)
                if identity_only:
                    continue
                # derive the rest of the relabeling orbit
                for sigma in relabels:
                    if sigma.is_identity() or entry.circuit is None:
                        continue
                    g2_edges = frozenset(
                        tuple(sorted((sigma(a), sigma(b)))) for a, b in g.edges)
                    g2 = feas_set.get(g2_edges)
                    if g2 is None:
                        continue
                    p_i2 = compose(p_i, inverse(sigma))
                    p_o2 = compose(sigma, p_o)
                    if table.get(block_key, g2, p_i2, p_o2) is not None:
                        continue
                    derived = TableEntry(
                        permute_circuit(entry.circuit, sigma),
                        entry.cnot_count, entry.distance,
                        derived_from=entry_key(g, p_i, p_o))
                    table.insert(block_key, g2, p_i2, p_o2, derived)
    return table


def _direct_entry(u, g, p_i, p_o, cfg, stats) -> TableEntry:
    if stats is not None:
        stats.direct_syntheses += 1
    try:
        c = qsearch(_permuted_target(u, p_i, p_o), g, cfg, stats)
        return TableEntry(c, c.cnot_count(),
                          hs_distance(_permuted_target(u, p_i, p_o), c.unitary()))
    except SynthesisError as exc:
        return TableEntry(None, math.inf,
                          exc.best_distance if exc.best_distance is not None
                          else math.inf)
