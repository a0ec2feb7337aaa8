"""Simple undirected graphs, exhaustive tree/forest enumeration, and counting.

Enumeration is deletion/contraction with deterministic branching on the
lowest edge id, guarded by configurable caps (DPP_MAX_ENUM overrides the
defaults).  Counting goes through the weighted Laplacian determinant.
"""

from __future__ import annotations

import os
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded
from .linalg import det_bareiss
from .rational import ONE, Rat, Rational, as_rational

DEFAULT_TREE_VERTEX_CAP = 12
DEFAULT_FOREST_EDGE_CAP = 24
DEFAULT_MATCHING_SIZE_CAP = 10


def default_tree_cap() -> int:
    return int(os.environ.get("DPP_MAX_ENUM", DEFAULT_TREE_VERTEX_CAP))


def default_forest_cap() -> int:
    return int(os.environ.get("DPP_MAX_ENUM", DEFAULT_FOREST_EDGE_CAP))


class Graph:
    """Simple undirected graph with stable, ordered edge identifiers."""

    def __init__(self, vertices: Sequence, edges: Sequence):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("vertex labels must be unique")
        vset = set(vertices)
        seen_ids = set()
        seen_pairs = set()
        norm = []
        for eid, u, v in edges:
            if eid in seen_ids:
                raise ValueError(f"duplicate edge id {eid!r}")
            seen_ids.add(eid)
            if u == v:
                raise ValueError(f"self-loop at {u!r} is not allowed")
            if u not in vset or v not in vset:
                raise ValueError(f"edge {eid!r} references an unknown vertex")
            pair = frozenset((u, v))
            if pair in seen_pairs:
                raise ValueError(f"parallel edge {eid!r} is not allowed")
            seen_pairs.add(pair)
            norm.append((eid, u, v))
        self.vertices = vertices
        self.edges = tuple(norm)
        self.edge_by_id = {eid: (u, v) for eid, u, v in norm}

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_ids(self) -> tuple:
        return tuple(sorted(self.edge_by_id))

    def __repr__(self):
        return f"Graph(|V|={self.num_vertices}, |E|={self.num_edges})"

    def is_connected(self) -> bool:
        if self.num_vertices == 0:
            return True
        adj: dict = {v: [] for v in self.vertices}
        for _, u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        stack = [self.vertices[0]]
        seen = {self.vertices[0]}
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices


class BipartiteGraph:
    """Balanced bipartite graph; edges run from the left side to the right."""

    def __init__(self, left: Sequence, right: Sequence, edges: Sequence):
        left = tuple(left)
        right = tuple(right)
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise ValueError("side labels must be unique")
        if set(left) & set(right):
            raise ValueError("sides must be disjoint")
        if len(left) != len(right):
            raise ValueError("sides must have equal size")
        lset, rset = set(left), set(right)
        seen = set()
        norm = []
        for u, w in edges:
            if u not in lset or w not in rset:
                raise ValueError(f"edge ({u!r}, {w!r}) must go left to right")
            if (u, w) in seen:
                raise ValueError(f"duplicate edge ({u!r}, {w!r})")
            seen.add((u, w))
            norm.append((u, w))
        self.left = left
        self.right = right
        self.edges = tuple(norm)

    @property
    def size(self) -> int:
        return len(self.left)

    def __repr__(self):
        return f"BipartiteGraph(n={self.size}, |F|={len(self.edges)})"


class _DSU:
    """Union-find without path compression so unions can be undone."""

    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return rb

    def undo(self, token):
        if token is None:
            return
        ra = self.parent[token]
        self.parent[token] = token
        self.size[ra] -= self.size[token]


def enumerate_spanning_trees(graph: Graph, max_vertices: int | None = None) -> Iterator[tuple]:
    """Yield the edge-id set of every spanning tree, each exactly once.

    Deterministic order: recursion branches on the lowest remaining edge id,
    taking the edge before skipping it.  Disconnected graphs yield nothing.
    """
    cap = default_tree_cap() if max_vertices is None else max_vertices
    if graph.num_vertices > cap:
        raise CapExceeded(
            f"spanning-tree enumeration cap: |V| = {graph.num_vertices} exceeds {cap}"
        )
    return _tree_stream(graph)


def _tree_stream(graph: Graph) -> Iterator[tuple]:
    if graph.num_vertices == 0 or not graph.is_connected():
        return
    edges = sorted(graph.edges)
    dsu = _DSU(graph.vertices)
    roots_needed = graph.num_vertices

    def connectable(start: int, components: int) -> bool:
        trail = []
        for idx in range(start, len(edges)):
            _, u, v = edges[idx]
            token = dsu.union(u, v)
            if token is not None:
                trail.append(token)
                components -= 1
                if components == 1:
                    break
        ok = components == 1
        for token in reversed(trail):
            dsu.undo(token)
        return ok

    chosen: list = []

    def rec(start: int, components: int) -> Iterator[tuple]:
        if components == 1:
            yield tuple(chosen)
            return
        if not connectable(start, components):
            return
        for idx in range(start, len(edges)):
            eid, u, v = edges[idx]
            token = dsu.union(u, v)
            if token is None:
                continue
            chosen.append(eid)
            yield from rec(idx + 1, components - 1)
            chosen.pop()
            dsu.undo(token)
            # Every tree not using this edge is produced by the next branch;
            # bail out once no tree can avoid it.
            if not connectable(idx + 1, components):
                return

    yield from rec(0, roots_needed)


def enumerate_forests(graph: Graph, max_edges: int | None = None) -> Iterator[tuple]:
    """Yield every acyclic edge-id subset (including the empty set) once."""
    cap = default_forest_cap() if max_edges is None else max_edges
    if graph.num_edges > cap:
        raise CapExceeded(
            f"forest enumeration cap: |E| = {graph.num_edges} exceeds {cap}"
        )
    edges = sorted(graph.edges)
    dsu = _DSU(graph.vertices)
    chosen: list = []

    def rec(idx: int) -> Iterator[tuple]:
        if idx == len(edges):
            yield tuple(chosen)
            return
        eid, u, v = edges[idx]
        token = dsu.union(u, v)
        if token is not None:
            chosen.append(eid)
            yield from rec(idx + 1)
            chosen.pop()
            dsu.undo(token)
        yield from rec(idx + 1)

    return rec(0)


def is_forest_subset(graph: Graph, edge_ids: Iterable) -> bool:
    dsu = _DSU(graph.vertices)
    for eid in edge_ids:
        u, v = graph.edge_by_id[eid]
        if dsu.union(u, v) is None:
            return False
    return True


def is_spanning_tree(graph: Graph, edge_ids: Iterable) -> bool:
    ids = list(edge_ids)
    if len(ids) != graph.num_vertices - 1:
        return False
    dsu = _DSU(graph.vertices)
    for eid in ids:
        u, v = graph.edge_by_id[eid]
        if dsu.union(u, v) is None:
            return False
    return True


def count_spanning_trees(graph: Graph, edge_weights: Mapping | None = None) -> Rational:
    """Weighted spanning-tree count via the Laplacian determinant.

    With unit weights this is the number of spanning trees; in general it is
    the sum over spanning trees of the product of edge weights.  Disconnected
    graphs give 0.
    """
    n = graph.num_vertices
    if n == 0:
        return Rat(0)
    if n == 1:
        return ONE
    weights = {}
    for eid, _, _ in graph.edges:
        w = ONE if edge_weights is None else as_rational(edge_weights.get(eid, ONE))
        if w <= 0:
            raise ValueError(f"edge weight for {eid!r} must be positive")
        weights[eid] = w
    index = {v: i for i, v in enumerate(graph.vertices)}
    lap = [[Rat(0)] * (n - 1) for _ in range(n - 1)]
    for eid, u, v in graph.edges:
        iu, iv = index[u], index[v]
        w = weights[eid]
        if iu < n - 1:
            lap[iu][iu] += w
        if iv < n - 1:
            lap[iv][iv] += w
        if iu < n - 1 and iv < n - 1:
            lap[iu][iv] -= w
            lap[iv][iu] -= w
    return det_bareiss(lap)


def count_perfect_matchings(graph: BipartiteGraph, max_size: int | None = None) -> int:
    """Brute-force perfect-matching count over all left-to-right bijections."""
    cap = DEFAULT_MATCHING_SIZE_CAP if max_size is None else max_size
    n = graph.size
    if n > cap:
        raise CapExceeded(f"matching enumeration cap: n = {n} exceeds {cap}")
    if n == 0:
        return 1
    right_index = {w: j for j, w in enumerate(graph.right)}
    adjacent = [set() for _ in range(n)]
    for i, u in enumerate(graph.left):
        for a, w in graph.edges:
            if a == u:
                adjacent[i].add(right_index[w])
    count = 0
    for perm in permutations(range(n)):
        if all(perm[i] in adjacent[i] for i in range(n)):
            count += 1
    return count
