"""Coupling graphs, hop-distance matrices, and k-qubit sub-topology handling."""
from __future__ import annotations

import re
from collections import deque
from itertools import combinations

import numpy as np


class TopologyError(Exception):
    pass


def _norm_edge(u, v):
    u, v = int(u), int(v)
    if u == v:
        raise TopologyError(f"self-loop on {u}")
    return (u, v) if u < v else (v, u)


class CouplingGraph:
    """Simple undirected connected graph over physical qubits."""

    def __init__(self, num_physical: int, edges):
        self.num_physical = int(num_physical)
        es = {_norm_edge(u, v) for u, v in edges}
        for u, v in es:
            if not (0 <= u < self.num_physical and 0 <= v < self.num_physical):
                raise TopologyError(f"edge ({u},{v}) out of range")
        self.edges: frozenset[tuple[int, int]] = frozenset(es)
        self.adj: tuple[tuple[int, ...], ...] = self._build_adj()
        if not self._connected():
            raise TopologyError("coupling graph must be connected")

    def _build_adj(self):
        adj = [[] for _ in range(self.num_physical)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def _connected(self) -> bool:
        if self.num_physical == 1:
            return True
        seen = {0}
        q = deque([0])
        while q:
            u = q.popleft()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    q.append(v)
        return len(seen) == self.num_physical

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def __repr__(self):
        return f"CouplingGraph({self.num_physical} qubits, {len(self.edges)} edges)"


class DistanceMatrix:
    """Symmetric all-pairs hop counts."""

    def __init__(self, d: np.ndarray):
        self.d = d

    def __getitem__(self, idx):
        return int(self.d[idx])

    @property
    def diameter(self) -> int:
        return int(self.d.max())


def distance_matrix(g: CouplingGraph) -> DistanceMatrix:
    n = g.num_physical
    d = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        d[src, src] = 0
        q = deque([src])
        while q:
            u = q.popleft()
            for v in g.adj[u]:
                if d[src, v] < 0:
                    d[src, v] = d[src, u] + 1
                    q.append(v)
    if (d < 0).any():
        raise TopologyError("disconnected graph")
    return DistanceMatrix(d)


class SubTopology:
    """Labeled connected simple graph on block positions {0..k-1}."""

    def __init__(self, k: int, edges):
        self.k = int(k)
        self.edges: frozenset[tuple[int, int]] = frozenset(_norm_edge(u, v) for u, v in edges)
        for u, v in self.edges:
            if not (0 <= u < self.k and 0 <= v < self.k):
                raise TopologyError(f"sub-topology edge ({u},{v}) out of range")
        if not self.is_connected():
            raise TopologyError("sub-topology must be connected")

    def is_connected(self) -> bool:
        if self.k == 1:
            return True
        adj = {i: set() for i in range(self.k)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.k

    def relabeled(self, perm_map) -> "SubTopology":
        return SubTopology(self.k, ((perm_map[u], perm_map[v]) for u, v in self.edges))

    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def __eq__(self, other):
        return isinstance(other, SubTopology) and self.k == other.k and self.edges == other.edges

    def __hash__(self):
        return hash((self.k, self.edges))

    def __repr__(self):
        return f"SubTopology(k={self.k}, edges={sorted(self.edges)})"


def enumerate_subtopologies(k: int) -> list[SubTopology]:
    """All labeled connected simple graphs on k positions (k in {2, 3})."""
    if k not in (2, 3):
        raise TopologyError(f"unsupported block width {k}")
    if k == 2:
        return [SubTopology(2, [(0, 1)])]
    all_edges = [(0, 1), (0, 2), (1, 2)]
    out = []
    # paths: drop one edge each; triangle: keep all
    for drop in all_edges:
        out.append(SubTopology(3, [e for e in all_edges if e != drop]))
    out.append(SubTopology(3, all_edges))
    return out


def contains_triangle(g: CouplingGraph) -> bool:
    for u, v in g.edges:
        if set(g.adj[u]) & set(g.adj[v]):
            return True
    return False


def feasible_subtopologies(g: CouplingGraph, k: int) -> list[SubTopology]:
    """Sub-topologies realizable as a subgraph of some induced k-subset of g."""
    subs = enumerate_subtopologies(k)
    if k == 2:
        return subs
    if contains_triangle(g):
        return subs
    return [s for s in subs if len(s.edges) < 3]


def induced_subtopology(g: CouplingGraph, phys) -> SubTopology:
    """Sub-topology induced by the ordered physical tuple; positions follow it."""
    phys = tuple(int(p) for p in phys)
    if len(set(phys)) != len(phys):
        raise TopologyError("physical qubits must be distinct")
    edges = [(i, j) for i, j in combinations(range(len(phys)), 2)
             if g.has_edge(phys[i], phys[j])]
    sub = SubTopology.__new__(SubTopology)
    sub.k = len(phys)
    sub.edges = frozenset(edges)
    if not sub.is_connected():
        raise TopologyError(f"placement {phys} induces a disconnected sub-topology")
    return sub


# -- construction and IO ------------------------------------------------------

def line(n: int) -> CouplingGraph:
    return CouplingGraph(n, [(i, i + 1) for i in range(n - 1)])


def ring(n: int) -> CouplingGraph:
    return CouplingGraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> CouplingGraph:
    return CouplingGraph(n, combinations(range(n), 2))


def grid(rows: int, cols: int) -> CouplingGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return CouplingGraph(rows * cols, edges)


def heavy_hex_sample() -> CouplingGraph:
    """A small 12-qubit heavy-hex-style (triangle-free) patch."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4),
             (0, 5), (4, 6),
             (5, 7), (6, 11),
             (7, 8), (8, 9), (9, 10), (10, 11)]
    return CouplingGraph(12, edges)


def preset(name: str) -> CouplingGraph:
    """Named graphs: line-N, ring-N, complete-N, grid-RxC, heavy-hex."""
    if name == "heavy-hex":
        return heavy_hex_sample()
    m = re.match(r"^(line|ring|complete)-(\d+)$", name)
    if m:
        return {"line": line, "ring": ring, "complete": complete}[m.group(1)](int(m.group(2)))
    m = re.match(r"^grid-(\d+)x(\d+)$", name)
    if m:
        return grid(int(m.group(1)), int(m.group(2)))
    raise TopologyError(f"unknown coupling preset {name!r}")


def load_edge_list(text: str) -> CouplingGraph:
    """One 'u v' pair per line, 0-based, '#' comments."""
    edges = []
    hi = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        parts = s.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise TopologyError(f"line {lineno}: expected 'u v'")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        hi = max(hi, u, v)
    if not edges:
        raise TopologyError("empty edge list")
    return CouplingGraph(hi + 1, edges)


def load_coupling(spec: str) -> CouplingGraph:
    """Preset name, edge-list path, or JSON {num_physical, edges} path."""
    import json
    import os

    if os.path.exists(spec):
        text = open(spec).read()
        if spec.endswith(".json"):
            obj = json.loads(text)
            return CouplingGraph(obj["num_physical"], [tuple(e) for e in obj["edges"]])
        return load_edge_list(text)
    return preset(spec)
