"""Exact JSON encodings of elements, tensors and assembled algebras.

Every number is written as a CycloNumber dict of rational coefficient
strings, so a dump/load round trip is lossless and byte-stable.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .cyclo import CycloNumber
from .graph import DimensionGraph, Path
from .path_wba import PathWba, WbaElement


def _num(c) -> dict:
    if isinstance(c, CycloNumber):
        return c.to_json()
    return CycloNumber.rational(1, c).to_json()


def path_to_json(p: Path, graph: DimensionGraph) -> dict | list:
    if graph.is_simple:
        return list(p.vertices)
    return {"vertices": list(p.vertices), "edges": list(p.edges)}


def path_from_json(data, graph: DimensionGraph) -> Path:
    if isinstance(data, dict):
        return Path(tuple(data["vertices"]), tuple(data["edges"]))
    return graph.path(*data)


def label_to_json(algebra: PathWba, lab) -> dict:
    p, q = algebra.legs(lab)
    return {"m": lab[0], "p": path_to_json(p, algebra.graph), "q": path_to_json(q, algebra.graph)}


def label_from_json(algebra: PathWba, data: Mapping):
    g = algebra.graph
    p, q = path_from_json(data["p"], g), path_from_json(data["q"], g)
    if p.length != int(data["m"]) or q.length != p.length:
        raise ValueError("path lengths disagree with the stated degree")
    return algebra.label(p, q)


def terms_to_json(algebra: PathWba, terms: Mapping) -> dict:
    return {"terms": [dict(label_to_json(algebra, k), c=_num(v)) for k, v in sorted(terms.items())]}


def element_to_json(x: WbaElement) -> dict:
    return terms_to_json(x.algebra, x.terms)


def element_from_json(algebra: PathWba, data: Mapping) -> WbaElement:
    terms: dict = {}
    for t in data["terms"]:
        k = label_from_json(algebra, t)
        c = CycloNumber.from_json(t["c"])
        terms[k] = terms[k] + c if k in terms else c
    return WbaElement(algebra, terms)


def tensor_to_json(algebra: PathWba, terms: Mapping) -> dict:
    return {
        "terms": [
            {"legs": [label_to_json(algebra, k) for k in ks], "c": _num(v)}
            for ks, v in sorted(terms.items())
        ]
    }


def assembled_to_json(h) -> dict:
    """Dimensions, stabilization data, group-like, antipode and axiom report of an assembled algebra."""
    alg = h.quotient.algebra
    index = {a: i for i, a in enumerate(h.basis)}

    def vec(d: Mapping) -> list:
        return [{"i": index[k], "c": _num(v)} for k, v in sorted(d.items(), key=lambda kv: index[kv[0]])]

    out: dict[str, Any] = {
        "r": h.r,
        "dimension": h.dimension,
        "even_dimension": h.even_dimension,
        "odd_dimension": h.odd_dimension,
        "stabilization_degree": h.stabilization_degree,
        "steps": [
            {"m": s.m, "source_dim": s.source_dim, "target_dim": s.target_dim, "bijective": s.bijective}
            for s in h.steps
        ],
        "grouplike": terms_to_json(alg, h.grouplike),
        "basis": [label_to_json(alg, a) for a in h.basis],
        "representative_failures": len(h.representative_failures),
    }
    if h.axioms is not None:
        out["axioms"] = {
            "passed": h.axioms.passed,
            "checked": dict(h.axioms.checked),
            "failures": [{"identity": f.identity, "witness": f.witness} for f in h.axioms.failures],
        }
    if h.antipode is not None:
        out["antipode"] = [vec(h.antipode[a]) for a in h.basis]
    if h.antipode_report is not None:
        out["antipode_report"] = dict(h.antipode_report)
    return out


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
