"""Reduction pipelines: matchings to tree normalizers, interpolation, and the
approximation-preserving routes from the mixed discriminant.

Each pipeline is paired elsewhere (tests, verify) with an independent
brute-force route; this module only builds instances, runs the steps, and
reports what happened.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence
from weakref import WeakKeyDictionary

from .dpp import _SplitMix64, partition_constrained_sum, z_forest, z_tree
from .errors import CapExceeded
from .graphs import (
    BipartiteGraph,
    Graph,
    default_forest_cap,
    enumerate_forests,
    enumerate_spanning_trees,
)
from .linalg import SymMatrix, WeightedPSD, unconstrained_normalizer
from .matroid import find_witness
from .mixed_disc import MDInstance, PartitionInstance, build_partition_instance
from .rational import ONE, Rat, Rational, as_rational, exp_enclosure


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    """A chain gadget graph with its block kernel and bookkeeping.

    The graph is a spine of n+1 vertices; consecutive spine vertices are
    joined by parallel two-edge paths, one per ground element, giving a left
    edge and a right edge each.  The kernel base carries the source matrix
    on the left block and an identity on the right block with no coupling.
    Reweighted copies accumulate left/right factors and remember the
    original instance.
    """

    graph: Graph
    kernel: WeightedPSD
    left_edges: tuple
    right_edges: tuple
    parts: tuple
    source: object
    scale: Rational
    left_source: dict
    left_factor: Rational = ONE
    right_factor: Rational = ONE
    origin: "GadgetInstance | None" = None
    _buckets: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = len(self.parts)
        m = len(self.left_edges)
        g = self.graph
        if g.num_vertices != n + m + 1:
            raise ValueError("gadget must have n + m + 1 vertices")
        if g.num_edges != 2 * m or len(self.right_edges) != m:
            raise ValueError("gadget must have 2m edges, split evenly")
        ids = set(self.left_edges) | set(self.right_edges)
        if len(ids) != 2 * m or ids != set(g.edge_by_id):
            raise ValueError("left/right edges must partition the edge ids")
        if set(self.kernel.labels) != ids:
            raise ValueError("kernel labels must match the edge ids")
        flat = [e for p in self.parts for e in p]
        if sorted(flat) != sorted(self.left_edges):
            raise ValueError("parts must partition the left edges")
        base = self.kernel.base
        for r1 in self.right_edges:
            for r2 in self.right_edges:
                expect = 1 if r1 == r2 else 0
                if base[r1, r2] != expect:
                    raise ValueError("kernel must be the identity on right edges")
            for l1 in self.left_edges:
                if base[r1, l1] != 0:
                    raise ValueError("kernel must not couple left and right edges")

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    @property
    def num_left(self) -> int:
        return len(self.left_edges)


def build_pm_gadget(bipartite: BipartiteGraph) -> GadgetInstance:
    """Gadget whose tree normalizer counts the perfect matchings of the input.

    One two-edge path per bipartite edge; the left block of the kernel has a
    1 exactly where two left edges point at the same right-side vertex, so a
    tree's minor survives only when its left edges pick distinct partners.
    """
    if len(bipartite.left) != len(bipartite.right):
        raise ValueError("bipartite sides must be balanced")
    n = bipartite.size
    left_pos = {u: i + 1 for i, u in enumerate(bipartite.left)}
    right_pos = {w: j + 1 for j, w in enumerate(bipartite.right)}
    spine = [f"u{i:02d}" for i in range(1, n + 2)]
    vertices = list(spine)
    left_ids = []
    right_ids = []
    edges = []
    left_source = {}
    groups: list = [[] for _ in range(n)]
    for u, w in sorted(bipartite.edges, key=lambda e: (left_pos[e[0]], right_pos[e[1]])):
        i, j = left_pos[u], right_pos[w]
        mid = f"u{i:02d}w{j:02d}"
        vertices.append(mid)
        lid, rid = f"l{i:02d}.{j:02d}", f"r{i:02d}.{j:02d}"
        edges.append((lid, spine[i - 1], mid))
        edges.append((rid, mid, spine[i]))
        left_ids.append(lid)
        right_ids.append(rid)
        left_source[lid] = (u, w)
        groups[i - 1].append(lid)
    graph = Graph(vertices, edges)
    labels = left_ids + right_ids
    def entry(a, b):
        if a in left_source and b in left_source:
            return 1 if left_source[a][1] == left_source[b][1] else 0
        if a == b:
            return 1
        return 0
    rows = [[entry(a, b) for b in labels] for a in labels]
    kernel = WeightedPSD(SymMatrix(labels, rows))
    return GadgetInstance(
        graph=graph,
        kernel=kernel,
        left_edges=tuple(left_ids),
        right_edges=tuple(right_ids),
        parts=tuple(tuple(g) for g in groups),
        source=bipartite,
        scale=ONE,
        left_source=left_source,
    )


def build_md_gadget(instance: PartitionInstance) -> GadgetInstance:
    """Gadget whose witness-restricted tree minors sum to the transversal sum.

    Left edges inherit the partition instance's base entries and weights;
    right edges are unit identity columns.
    """
    n = instance.num_parts
    spine = [f"v{i:02d}" for i in range(1, n + 2)]
    vertices = list(spine)
    left_ids = []
    right_ids = []
    edges = []
    left_source = {}
    groups: list = []
    for i, part in enumerate(instance.parts, start=1):
        group = []
        for k, label in enumerate(sorted(part), start=1):
            mid = f"w{i:02d}.{k:02d}"
            vertices.append(mid)
            lid, rid = f"l{i:02d}.{k:02d}", f"r{i:02d}.{k:02d}"
            edges.append((lid, spine[i - 1], mid))
            edges.append((rid, mid, spine[i]))
            left_ids.append(lid)
            right_ids.append(rid)
            left_source[lid] = label
            group.append(lid)
        groups.append(tuple(group))
    graph = Graph(vertices, edges)
    labels = left_ids + right_ids
    base = instance.matrix.base
    def entry(a, b):
        if a in left_source and b in left_source:
            return base[left_source[a], left_source[b]]
        if a == b:
            return 1
        return 0
    rows = [[entry(a, b) for b in labels] for a in labels]
    weights = {lid: instance.matrix.weights[left_source[lid]] for lid in left_ids}
    weights.update({rid: ONE for rid in right_ids})
    kernel = WeightedPSD(SymMatrix(labels, rows), weights)
    return GadgetInstance(
        graph=graph,
        kernel=kernel,
        left_edges=tuple(left_ids),
        right_edges=tuple(right_ids),
        parts=tuple(groups),
        source=instance,
        scale=instance.scale,
        left_source=left_source,
    )


def reweight_rank_one(
    instance: GadgetInstance, left_factor, right_factor
) -> GadgetInstance:
    """Multiply left weights by left_factor^2 and right weights by right_factor^2.

    This realizes the Hadamard product of the kernel with the rank-one
    matrix built from (left_factor on left edges, right_factor on right
    edges): every minor gains left_factor^(2|S on left|) *
    right_factor^(2|S on right|).
    """
    lf = as_rational(left_factor)
    rf = as_rational(right_factor)
    if lf <= 0 or rf <= 0:
        raise ValueError("reweighting factors must be positive")
    factors = {e: lf * lf for e in instance.left_edges}
    factors.update({e: rf * rf for e in instance.right_edges})
    return GadgetInstance(
        graph=instance.graph,
        kernel=instance.kernel.scaled(factors),
        left_edges=instance.left_edges,
        right_edges=instance.right_edges,
        parts=instance.parts,
        source=instance.source,
        scale=instance.scale,
        left_source=instance.left_source,
        left_factor=instance.left_factor * lf,
        right_factor=instance.right_factor * rf,
        origin=instance.origin or instance,
    )


def count_pm_via_zt(bipartite: BipartiteGraph, max_edges: int | None = None) -> int:
    """Perfect-matching count read off the gadget's tree normalizer."""
    inst = build_pm_gadget(bipartite)
    cap = default_forest_cap() if max_edges is None else max_edges
    if inst.graph.num_edges > cap:
        raise CapExceeded(
            f"gadget enumeration cap: |E| = {inst.graph.num_edges} exceeds {cap}"
        )
    value = z_tree(inst.kernel, inst.graph, max_vertices=inst.graph.num_vertices)
    if value.denominator != 1:
        raise AssertionError("matching count came out non-integral")
    return int(value)


def lagrange_leading_coeff(points: Sequence, degree_bound: int) -> Rational:
    """Exact coefficient of x^degree_bound in the interpolating polynomial.

    Uses the first degree_bound + 1 points; the leading coefficient is the
    top divided difference sum y_i / prod_{k != i} (x_i - x_k).
    """
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    pts = [(as_rational(x), as_rational(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation points must have distinct x values")
    need = degree_bound + 1
    if len(pts) < need:
        raise ValueError(f"need at least {need} points for degree bound {degree_bound}")
    pts = pts[:need]
    lead = Rat(0)
    for i, (xi, yi) in enumerate(pts):
        denom = ONE
        for k, (xk, _) in enumerate(pts):
            if k != i:
                denom *= xi - xk
        lead += yi / denom
    return lead


def zt_via_zf(
    matrix: WeightedPSD,
    graph: Graph,
    oracle: "OracleSpec | None" = None,
    max_edges: int | None = None,
) -> Rational:
    """Recover the tree normalizer from forest normalizers by interpolation.

    Scaling every weight by x multiplies each forest's minor by x^|S|, so
    the forest normalizer is a polynomial of degree at most |V| - 1 whose
    leading coefficient is the tree normalizer.  Only the exact oracle is
    admissible: interpolation amplifies any multiplicative error.
    """
    spec = oracle if oracle is not None else OracleSpec()
    if spec.mode != "exact":
        raise ValueError("interpolation requires exact oracle")
    n = graph.num_vertices
    if n == 0:
        return Rat(0)
    points = []
    for x in range(1, n + 1):
        scaled = matrix.scaled_all(Rat(x))
        points.append((Rat(x), z_forest(scaled, graph, max_edges=max_edges)))
    return lagrange_leading_coeff(points, n - 1)


@dataclass(frozen=True)
class OracleSpec:
    """How to simulate the approximate-normalizer oracle.

    exact returns the true value; noisy multiplies it by e^u with u drawn
    uniformly (seeded) from [-delta, delta]; adversarial pins the factor at
    e^(+delta) or e^(-delta) depending on direction.  Irrational factors are
    replaced by tight rational bounds taken from inside the allowed
    interval, so a simulated oracle always meets its accuracy contract.
    """

    mode: str = "exact"
    noise: Rational | None = None
    seed: int = 0
    direction: int = 1

    def __post_init__(self):
        if self.mode not in ("exact", "noisy", "adversarial"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if self.noise is not None:
            noise = as_rational(self.noise)
            if not 0 < noise < 1:
                raise ValueError("oracle noise must lie in (0, 1)")
            object.__setattr__(self, "noise", noise)


class _OracleSession:
    """One reduction run's view of the oracle; records every call."""

    def __init__(self, spec: OracleSpec):
        self.spec = spec
        self.calls: list = []
        self._gen = _SplitMix64(spec.seed)

    def query(self, instance: GadgetInstance, kind: str, delta) -> Rational:
        delta = as_rational(delta)
        self.calls.append((kind, delta))
        exact = gadget_z_exact(instance, kind)
        if self.spec.mode == "exact":
            return exact
        tol = self.spec.noise if self.spec.noise is not None else delta
        if not 0 < tol < 1:
            raise ValueError("oracle tolerance must lie in (0, 1)")
        if self.spec.mode == "adversarial":
            if self.spec.direction >= 0:
                factor = exp_enclosure(tol)[0]
            else:
                factor = exp_enclosure(-tol)[1]
        else:
            r = self._gen.next64()
            u = tol * Rat(2 * r - (1 << 64), 1 << 64)
            factor = exp_enclosure(u)[0] if u >= 0 else exp_enclosure(u)[1]
        return exact * factor


def gadget_z_exact(instance: GadgetInstance, kind: str) -> Rational:
    """Exact tree or forest normalizer of a (possibly reweighted) gadget.

    Enumerates the family once on the unweighted original and groups minors
    by (right-edge count, left-edge count); the determinant of any subset
    splits off the identity right block, so it only depends on the left
    part.  Reweighting factors then enter through a short power sum.  Agrees
    with the generic normalizers entry for entry (covered by tests).
    """
    if kind not in ("tree", "forest"):
        raise ValueError(f"unknown normalizer kind {kind!r}")
    origin = instance.origin or instance
    coeffs = origin._buckets.get(kind)
    if coeffs is None:
        coeffs = _bucket_coefficients(origin, kind)
        origin._buckets[kind] = coeffs
    lf, rf = instance.left_factor, instance.right_factor
    lf2, rf2 = lf * lf, rf * rf
    lpow: dict = {}
    rpow: dict = {}
    total = Rat(0)
    for (r, l), value in coeffs.items():
        pr = rpow.get(r)
        if pr is None:
            pr = rpow[r] = rf2**r
        pl = lpow.get(l)
        if pl is None:
            pl = lpow[l] = lf2**l
        total += value * pr * pl
    return total


def _bucket_coefficients(origin: GadgetInstance, kind: str) -> dict:
    for rid in origin.right_edges:
        if origin.kernel.weights[rid] != 1:
            raise AssertionError("origin gadget must have unit right weights")
    graph = origin.graph
    left_bit = {eid: 1 << i for i, eid in enumerate(origin.left_edges)}
    if kind == "tree":
        family = enumerate_spanning_trees(graph, max_vertices=graph.num_vertices)
    else:
        family = enumerate_forests(graph, max_edges=graph.num_edges)
    counts: dict = {}
    for subset in family:
        lmask = 0
        r = 0
        for eid in subset:
            bit = left_bit.get(eid)
            if bit is None:
                r += 1
            else:
                lmask |= bit
        key = (r, lmask)
        counts[key] = counts.get(key, 0) + 1
    base = origin.kernel.base
    weights = origin.kernel.weights
    left = origin.left_edges
    minors: dict = {}
    coeffs: dict = {}
    for (r, lmask), mult in counts.items():
        minor = minors.get(lmask)
        if minor is None:
            labels = [left[i] for i in range(len(left)) if lmask >> i & 1]
            minor = base.minor_det(base.positions(labels))
            for a in labels:
                minor *= weights[a]
            minors[lmask] = minor
        if minor == 0:
            continue
        key = (r, lmask.bit_count())
        coeffs[key] = coeffs.get(key, Rat(0)) + mult * minor
    return coeffs


@dataclass(frozen=True)
class ReductionReport:
    """Everything a reduction run produced, in exact rationals."""

    target: str
    epsilon: Rational
    oracle_mode: str
    declared_zero: bool
    witness: tuple | None
    x: Rational | None
    y: Rational | None
    oracle_value: Rational | None
    estimate: Rational | None
    reference: Rational
    scale: Rational
    bounds_lower: Rational
    bounds_upper: Rational
    bounds_pass: bool
    oracle_calls: tuple

    @property
    def value(self) -> Rational:
        """The declared answer: the estimate, or exactly zero."""
        return Rat(0) if self.declared_zero else self.estimate


def _sandwich_bounds(mode: str, epsilon, reference) -> tuple:
    """Inner rational enclosure of the guaranteed interval around reference.

    Exact oracle: [D, (1 + eps/2) D], the proven bound, which implies the
    e^(eps/2) form.  Otherwise: rationals inside [e^-eps D, e^eps D], so a
    pass certifies the stated interval.
    """
    if mode == "exact":
        return reference, (ONE + epsilon / 2) * reference
    lower = exp_enclosure(-epsilon)[1] * reference
    upper = exp_enclosure(epsilon)[0] * reference
    return lower, upper


def _run_md_reduction(kernels, epsilon, oracle, max_edges, target) -> ReductionReport:
    eps = as_rational(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    spec = oracle if oracle is not None else OracleSpec()
    pinst = build_partition_instance(kernels)
    inst = build_md_gadget(pinst)
    cap = default_forest_cap() if max_edges is None else max_edges
    if inst.graph.num_edges > cap:
        raise CapExceeded(
            f"gadget enumeration cap: |E| = {inst.graph.num_edges} exceeds {cap}"
        )
    # Independent reference: the transversal route, never the tree route.
    reference = partition_constrained_sum(pinst.matrix, pinst.parts) / pinst.scale
    witness = find_witness(inst)
    if witness is None:
        return ReductionReport(
            target=target,
            epsilon=eps,
            oracle_mode=spec.mode,
            declared_zero=True,
            witness=None,
            x=None,
            y=None,
            oracle_value=None,
            estimate=None,
            reference=reference,
            scale=pinst.scale,
            bounds_lower=Rat(0),
            bounds_upper=Rat(0),
            bounds_pass=reference == 0,
            oracle_calls=(),
        )
    ratio = unconstrained_normalizer(inst.kernel) / inst.kernel.minor(witness)
    session = _OracleSession(spec)
    n = inst.num_parts
    m = inst.num_left
    if target == "tree":
        x = ratio * 2 / eps
        y = None
        queried = reweight_rank_one(inst, 1, x)
        zhat = session.query(queried, "tree", eps / 2)
        estimate = zhat / (x ** (2 * m) * pinst.scale)
    else:
        y = ratio * 4 / eps
        x = ratio * y ** (2 * m - 2 * n) * 4 / eps
        queried = reweight_rank_one(inst, y, x)
        zhat = session.query(queried, "forest", eps / 2)
        estimate = zhat / (x ** (2 * m) * y ** (2 * n) * pinst.scale)
    lower, upper = _sandwich_bounds(spec.mode, eps, reference)
    return ReductionReport(
        target=target,
        epsilon=eps,
        oracle_mode=spec.mode,
        declared_zero=False,
        witness=witness,
        x=x,
        y=y,
        oracle_value=zhat,
        estimate=estimate,
        reference=reference,
        scale=pinst.scale,
        bounds_lower=lower,
        bounds_upper=upper,
        bounds_pass=lower <= estimate <= upper,
        oracle_calls=tuple(session.calls),
    )


def apreduce_md_to_zt(
    kernels, epsilon, oracle: OracleSpec | None = None, max_edges: int | None = None
) -> ReductionReport:
    """Approximation-preserving estimate of the mixed discriminant via the
    tree normalizer: build the gadget, search a witness, pick the right-edge
    factor so off-target trees contribute at most an eps/2 relative error,
    query the oracle once at tolerance eps/2, and rescale."""
    return _run_md_reduction(kernels, epsilon, oracle, max_edges, "tree")


def apreduce_md_to_zf(
    kernels, epsilon, oracle: OracleSpec | None = None, max_edges: int | None = None
) -> ReductionReport:
    """Same pipeline against the forest normalizer; two factors are needed
    because forests can miss right edges and overfill left ones."""
    return _run_md_reduction(kernels, epsilon, oracle, max_edges, "forest")


def median_estimate(estimates: Sequence) -> Rational:
    """Median of independent run estimates; the usual success amplifier."""
    values = sorted(as_rational(v) for v in estimates)
    if not values:
        raise ValueError("need at least one estimate")
    mid = len(values) // 2
    if len(values) % 2 == 1:
        return values[mid]
    return (values[mid - 1] + values[mid]) / 2
