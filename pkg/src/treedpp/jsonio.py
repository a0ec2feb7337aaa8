"""JSON file formats: matrices, graphs, instance bundles, and reports.

Rationals travel as "p/q" (or plain integer) strings so every round trip is
bit-exact.  JSON floats are rejected outright.
"""

from __future__ import annotations

import json
from typing import Mapping

from .dpp import ConstrainedDPP
from .graphs import BipartiteGraph, Graph
from .linalg import SymMatrix, WeightedPSD
from .mixed_disc import MDInstance
from .rational import as_rational, bit_length, format_rational


def parse_rational(value):
    if isinstance(value, bool):
        raise ValueError("expected a rational as 'p/q' string or integer")
    if isinstance(value, int):
        return as_rational(value)
    if isinstance(value, str):
        try:
            return as_rational(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {value!r}") from exc
    raise ValueError(f"expected a rational as 'p/q' string or integer, got {value!r}")


def _require(obj, key, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise ValueError(f"{kind} object needs a {key!r} field")
    return obj[key]


def load_sym_matrix(obj) -> SymMatrix:
    rows = _require(obj, "rows", "matrix")
    labels = obj.get("labels")
    if labels is None:
        labels = [str(i) for i in range(len(rows))]
    return SymMatrix(labels, [[parse_rational(v) for v in row] for row in rows])


def load_weighted_psd(obj) -> WeightedPSD:
    base = load_sym_matrix(obj)
    weights = obj.get("weights")
    if weights is None:
        return WeightedPSD(base)
    if len(weights) != base.dimension:
        raise ValueError("weights array must parallel the labels")
    return WeightedPSD(
        base, {a: parse_rational(w) for a, w in zip(base.labels, weights)}
    )


def dump_sym_matrix(matrix: SymMatrix) -> dict:
    return {
        "labels": [str(a) for a in matrix.labels],
        "rows": [[format_rational(v) for v in row] for row in matrix.entries],
    }


def dump_weighted_psd(matrix: WeightedPSD) -> dict:
    obj = dump_sym_matrix(matrix.base)
    obj["weights"] = [format_rational(matrix.weights[a]) for a in matrix.labels]
    return obj


def load_graph(obj) -> tuple:
    """Returns (graph, edge-weight map or None)."""
    vertices = _require(obj, "vertices", "graph")
    edges = _require(obj, "edges", "graph")
    graph = Graph(vertices, [(eid, u, v) for eid, u, v in edges])
    weights = obj.get("weights")
    if weights is not None:
        weights = {eid: parse_rational(w) for eid, w in weights.items()}
        unknown = set(weights) - set(graph.edge_by_id)
        if unknown:
            raise ValueError(f"weights reference unknown edges {sorted(unknown)!r}")
    return graph, weights


def dump_graph(graph: Graph, weights: Mapping | None = None) -> dict:
    obj = {
        "vertices": list(graph.vertices),
        "edges": [[eid, u, v] for eid, u, v in graph.edges],
    }
    if weights is not None:
        obj["weights"] = {eid: format_rational(w) for eid, w in weights.items()}
    return obj


def load_bipartite(obj) -> BipartiteGraph:
    return BipartiteGraph(
        _require(obj, "left", "bipartite graph"),
        _require(obj, "right", "bipartite graph"),
        [(u, w) for u, w in _require(obj, "edges", "bipartite graph")],
    )


def dump_bipartite(graph: BipartiteGraph) -> dict:
    return {
        "left": list(graph.left),
        "right": list(graph.right),
        "edges": [[u, w] for u, w in graph.edges],
    }


def load_bundle(obj) -> ConstrainedDPP:
    constraint = _require(obj, "constraint", "instance bundle")
    base = load_sym_matrix(_require(obj, "matrix", "instance bundle"))
    weights = obj.get("weights")
    if weights is None:
        matrix = WeightedPSD(base)
    else:
        if len(weights) != base.dimension:
            raise ValueError("weights array must parallel the matrix labels")
        matrix = WeightedPSD(
            base, {a: parse_rational(w) for a, w in zip(base.labels, weights)}
        )
    graph = None
    if obj.get("graph") is not None:
        graph, _ = load_graph(obj["graph"])
    parts = obj.get("parts")
    return ConstrainedDPP(matrix, constraint, graph=graph, parts=parts)


def dump_bundle(dpp: ConstrainedDPP) -> dict:
    obj = {
        "graph": dump_graph(dpp.graph) if dpp.graph is not None else None,
        "matrix": dump_sym_matrix(dpp.matrix.base),
        "weights": [format_rational(dpp.matrix.weights[a]) for a in dpp.matrix.labels],
        "constraint": dpp.constraint,
        "parts": [list(p) for p in dpp.parts] if dpp.parts is not None else None,
    }
    return obj


def load_md_instance(obj) -> MDInstance:
    mats = _require(obj, "matrices", "mixed-discriminant instance")
    return MDInstance(tuple(load_sym_matrix(m) for m in mats))


def dump_md_instance(instance: MDInstance) -> dict:
    return {"matrices": [dump_sym_matrix(m) for m in instance.matrices]}


def _opt_rat(value):
    return None if value is None else format_rational(value)


def report_to_obj(report) -> dict:
    obj = {
        "target": report.target,
        "epsilon": format_rational(report.epsilon),
        "oracle_mode": report.oracle_mode,
        "declared_zero": report.declared_zero,
        "witness": list(report.witness) if report.witness is not None else None,
        "x": _opt_rat(report.x),
        "y": _opt_rat(report.y),
        "oracle_value": _opt_rat(report.oracle_value),
        "estimate": _opt_rat(report.estimate),
        "reference": format_rational(report.reference),
        "scale": format_rational(report.scale),
        "bounds_check": {
            "lower": format_rational(report.bounds_lower),
            "upper": format_rational(report.bounds_upper),
            "pass": report.bounds_pass,
        },
        "oracle_calls": [
            {"kind": kind, "delta": format_rational(delta)}
            for kind, delta in report.oracle_calls
        ],
    }
    if report.x is not None:
        obj["x_bits"] = bit_length(report.x)
    if report.y is not None:
        obj["y_bits"] = bit_length(report.y)
    return obj


def read_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(obj, handle, indent=2, sort_keys=False)
        handle.write("\n")
