"""Exact normalizing constants and exact sampling for constrained DPPs.

Everything enumerates the constraint family outright and sums exact
principal minors; the point is bit-exact ground truth at desk scale, not
asymptotic efficiency.
"""

from __future__ import annotations

from bisect import bisect_right
from itertools import product
from typing import Iterable, Sequence

from .errors import CapExceeded
from .graphs import Graph, enumerate_forests, enumerate_spanning_trees
from .linalg import WeightedPSD
from .rational import ONE, Rat, Rational

DEFAULT_TRANSVERSAL_CAP = 200_000
DEFAULT_SUBSET_GROUND_CAP = 16

CONSTRAINTS = ("tree", "forest", "partition", "none")


class ConstrainedDPP:
    """A weighted PSD kernel together with a subset constraint.

    constraint is one of "tree" / "forest" (requires a graph whose edge ids
    match the matrix labels), "partition" (one item per part), or "none".
    """

    def __init__(
        self,
        matrix: WeightedPSD,
        constraint: str,
        graph: Graph | None = None,
        parts: Sequence[Sequence] | None = None,
    ):
        if constraint not in CONSTRAINTS:
            raise ValueError(f"unknown constraint {constraint!r}")
        if constraint in ("tree", "forest"):
            if graph is None:
                raise ValueError(f"constraint {constraint!r} requires a graph")
            _check_labels(matrix, graph)
        if constraint == "partition":
            if parts is None:
                raise ValueError("constraint 'partition' requires parts")
            parts = tuple(tuple(p) for p in parts)
            _check_partition(matrix, parts)
        self.matrix = matrix
        self.constraint = constraint
        self.graph = graph
        self.parts = parts

    def __repr__(self):
        return f"ConstrainedDPP(constraint={self.constraint!r}, m={self.matrix.dimension})"


def _check_labels(matrix: WeightedPSD, graph: Graph) -> None:
    if set(matrix.labels) != set(graph.edge_by_id):
        raise ValueError("matrix labels do not match graph edge ids")


def _check_partition(matrix: WeightedPSD, parts: tuple) -> None:
    flat = [a for part in parts for a in part]
    if len(flat) != len(set(flat)):
        raise ValueError("parts must be disjoint")
    if set(flat) != set(matrix.labels):
        raise ValueError("parts must cover exactly the matrix labels")


def z_tree(matrix: WeightedPSD, graph: Graph, max_vertices: int | None = None) -> Rational:
    """Sum of weighted principal minors over all spanning trees; 0 if disconnected."""
    _check_labels(matrix, graph)
    total = Rat(0)
    for tree in enumerate_spanning_trees(graph, max_vertices=max_vertices):
        total += matrix.minor(tree)
    return total


def z_forest(matrix: WeightedPSD, graph: Graph, max_edges: int | None = None) -> Rational:
    """Sum of weighted principal minors over all forests, including the empty set."""
    _check_labels(matrix, graph)
    total = Rat(0)
    for forest in enumerate_forests(graph, max_edges=max_edges):
        total += matrix.minor(forest)
    return total


def _transversals(parts: tuple, max_transversals: int | None = None) -> Iterable[tuple]:
    cap = DEFAULT_TRANSVERSAL_CAP if max_transversals is None else max_transversals
    count = 1
    for part in parts:
        count *= len(part)
    if count > cap:
        raise CapExceeded(f"transversal enumeration cap: {count} exceeds {cap}")
    ordered = [tuple(sorted(part)) for part in parts]
    return product(*ordered)


def partition_constrained_sum(
    matrix: WeightedPSD,
    parts: Sequence[Sequence],
    max_transversals: int | None = None,
) -> Rational:
    """Sum of minors over all transversals picking one label from each part."""
    parts = tuple(tuple(p) for p in parts)
    _check_partition(matrix, parts)
    total = Rat(0)
    for pick in _transversals(parts, max_transversals):
        total += matrix.minor(pick)
    return total


class _SplitMix64:
    """Deterministic 64-bit generator (splitmix64), identical on every platform."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)


def _family(dpp: ConstrainedDPP, max_vertices, max_edges, max_transversals):
    if dpp.constraint == "tree":
        return enumerate_spanning_trees(dpp.graph, max_vertices=max_vertices)
    if dpp.constraint == "forest":
        return enumerate_forests(dpp.graph, max_edges=max_edges)
    if dpp.constraint == "partition":
        return _transversals(dpp.parts, max_transversals)
    labels = sorted(dpp.matrix.labels)
    if len(labels) > DEFAULT_SUBSET_GROUND_CAP:
        raise CapExceeded(
            f"subset enumeration cap: {len(labels)} labels exceeds "
            f"{DEFAULT_SUBSET_GROUND_CAP}"
        )

    def subsets():
        for mask in range(1 << len(labels)):
            yield tuple(labels[i] for i in range(len(labels)) if mask >> i & 1)

    return subsets()


def sample_exact(
    dpp: ConstrainedDPP,
    seed: int,
    count: int,
    max_vertices: int | None = None,
    max_edges: int | None = None,
    max_transversals: int | None = None,
) -> list:
    """Draw i.i.d. subsets with probability minor(S)/Z by inverse CDF.

    The generator is a seeded splitmix64 stream mapped to a rational in
    [0, 1) with 128-bit resolution, so runs are reproducible everywhere and
    the selection against exact cumulative sums never rounds.  Subsets with
    zero minor stay in the enumeration but are never selected.
    """
    outcomes = []
    cums = []
    total = Rat(0)
    for subset in _family(dpp, max_vertices, max_edges, max_transversals):
        mass = dpp.matrix.minor(subset)
        total += mass
        outcomes.append(tuple(sorted(subset)))
        cums.append(total)
    if total == 0:
        raise ValueError("empty support")
    gen = _SplitMix64(seed)
    draws = []
    for _ in range(count):
        r = (gen.next64() << 64) | gen.next64()
        threshold = Rat(r, 1 << 128) * total
        draws.append(outcomes[bisect_right(cums, threshold)])
    return draws
