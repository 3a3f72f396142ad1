"""The path weak bialgebra H[G] of a finite digraph.

Basis elements are pairs ``[p|q]`` of paths of equal length m.  A basis
label is the triple ``(m, i, j)`` with ``i`` and ``j`` indices into
``graph.paths(m)``.  Products concatenate both legs, the coproduct splits
through an intermediate path, and the counit pairs equal paths.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Mapping

from .graph import DimensionGraph, Path

Label = tuple  # (m, i, j)


class DegreeOverflowError(ArithmeticError):
    """An operation would produce an element above the degree cap."""


def _acc(target: dict, key, c) -> None:
    v = target.get(key)
    v = c if v is None else v + c
    if v:
        target[key] = v
    else:
        target.pop(key, None)


class WbaElement:
    """A finite linear combination of basis labels of a weak bialgebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms: Mapping | None = None):
        self.algebra = algebra
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __add__(self, other: WbaElement) -> WbaElement:
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return WbaElement(self.algebra, out)

    def __sub__(self, other: WbaElement) -> WbaElement:
        return self + (-other)

    def __neg__(self) -> WbaElement:
        return WbaElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, WbaElement):
            return self.algebra.multiply(self, other)
        return WbaElement(self.algebra, {k: v * other for k, v in self.terms.items()})

    def __rmul__(self, c):
        return WbaElement(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, WbaElement):
            return NotImplemented
        return self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{self.algebra.label_repr(k)}" for k, v in sorted(self.terms.items()))

    def degrees(self) -> set[int]:
        return {self.algebra.degree(k) for k in self.terms}


class Tensor:
    """An element of A (x) A (or a higher tensor power) as a dict of label tuples."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms: Mapping | None = None):
        self.algebra = algebra
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __add__(self, other: Tensor) -> Tensor:
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return Tensor(self.algebra, out)

    def __sub__(self, other: Tensor) -> Tensor:
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, -v)
        return Tensor(self.algebra, out)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"{v}*" + "(x)".join(self.algebra.label_repr(k) for k in ks) for ks, v in sorted(self.terms.items())
        )


class PathWba:
    """H[G] with an optional cap on the path length of any element produced."""

    def __init__(self, graph: DimensionGraph, degree_cap: int | None = None):
        self.graph = graph
        self.degree_cap = degree_cap
        self._concat: dict[tuple[int, int], dict[tuple[int, int], int]] = {}

    # -- basis bookkeeping ------------------------------------------------
    def paths(self, m: int) -> list[Path]:
        return self.graph.paths(m)

    def label(self, p: Path, q: Path) -> Label:
        if p.length != q.length:
            raise ValueError("[p|q] needs paths of equal length")
        return (p.length, self.graph.path_index(p), self.graph.path_index(q))

    def legs(self, a: Label) -> tuple[Path, Path]:
        m, i, j = a
        ps = self.paths(m)
        return ps[i], ps[j]

    def degree(self, a: Label) -> int:
        return a[0]

    def label_repr(self, a: Label) -> str:
        p, q = self.legs(a)
        return f"[{p}|{q}]"

    def basis(self, m: int) -> Iterator[Label]:
        n = len(self.paths(m))
        return ((m, i, j) for i in range(n) for j in range(n))

    def basis_up_to(self, max_degree: int) -> list[Label]:
        return [a for m in range(max_degree + 1) for a in self.basis(m)]

    def dimension(self, m: int) -> int:
        return len(self.paths(m)) ** 2

    def element(self, terms: Mapping | Iterable) -> WbaElement:
        if not isinstance(terms, Mapping):
            terms = {self.label(p, q): c for (p, q), c in terms}
        return WbaElement(self, terms)

    def basis_element(self, p: Path, q: Path, c=1) -> WbaElement:
        return WbaElement(self, {self.label(p, q): c})

    def _check_cap(self, m: int) -> None:
        if self.degree_cap is not None and m > self.degree_cap:
            raise DegreeOverflowError(f"degree {m} exceeds the cap {self.degree_cap}")

    def _concat_index(self, m: int, l: int, i: int, k: int) -> int | None:
        table = self._concat.get((m, l))
        if table is None:
            table = {}
            ps, rs = self.paths(m), self.paths(l)
            by_target: dict[int, list[int]] = defaultdict(list)
            for kk, r in enumerate(rs):
                by_target[r.target].append(kk)
            for ii, p in enumerate(ps):
                for kk in by_target.get(p.source, ()):
                    table[(ii, kk)] = self.graph.path_index(p * rs[kk])
            self._concat[(m, l)] = table
        return table.get((i, k))

    # -- structure maps on basis labels ----------------------------------
    def unit_terms(self) -> dict:
        n = len(self.paths(0))
        return {(0, j, l): 1 for j in range(n) for l in range(n)}

    def mult_basis(self, a: Label, b: Label) -> dict:
        m, i, j = a
        l, k, n = b
        self._check_cap(m + l)
        x = self._concat_index(m, l, i, k)
        if x is None:
            return {}
        y = self._concat_index(m, l, j, n)
        if y is None:
            return {}
        return {(m + l, x, y): 1}

    def comult_basis(self, a: Label) -> dict:
        m, i, j = a
        return {((m, i, t), (m, t, j)): 1 for t in range(len(self.paths(m)))}

    def counit_basis(self, a: Label):
        return 1 if a[1] == a[2] else 0

    def eps_s_basis(self, a: Label) -> dict:
        """Closed form of the source counital map on [p|q]."""
        m, i, j = a
        if i != j:
            return {}
        s = self.paths(m)[i].source
        return {(0, v, s): 1 for v in self.graph.vertices}

    def eps_t_basis(self, a: Label) -> dict:
        """Closed form of the target counital map on [p|q]."""
        m, i, j = a
        if i != j:
            return {}
        t = self.paths(m)[j].target
        return {(0, t, v): 1 for v in self.graph.vertices}

    def truncate_basis(self, a: Label) -> dict:
        """Keep [p|q] only when both legs are closed loops."""
        p, q = self.legs(a)
        return {a: 1} if p.source == p.target and q.source == q.target else {}

    # -- linear extensions ------------------------------------------------
    def unit(self) -> WbaElement:
        return WbaElement(self, self.unit_terms())

    def multiply(self, x: WbaElement, y: WbaElement) -> WbaElement:
        out: dict = {}
        for a, ca in x.terms.items():
            for b, cb in y.terms.items():
                for c, v in self.mult_basis(a, b).items():
                    _acc(out, c, ca * cb * v)
        return WbaElement(self, out)

    def comultiply(self, x: WbaElement) -> Tensor:
        out: dict = {}
        for a, ca in x.terms.items():
            for bc, v in self.comult_basis(a).items():
                _acc(out, bc, ca * v)
        return Tensor(self, out)

    def counit(self, x: WbaElement):
        total = 0
        for a, ca in x.terms.items():
            if self.counit_basis(a):
                total = ca * self.counit_basis(a) + total
        return total

    def _linear(self, fn, x: WbaElement) -> WbaElement:
        out: dict = {}
        for a, ca in x.terms.items():
            for b, v in fn(a).items():
                _acc(out, b, ca * v)
        return WbaElement(self, out)

    def eps_s(self, x: WbaElement) -> WbaElement:
        return self._linear(self.eps_s_basis, x)

    def eps_t(self, x: WbaElement) -> WbaElement:
        return self._linear(self.eps_t_basis, x)

    def truncate(self, x: WbaElement) -> WbaElement:
        return self._linear(self.truncate_basis, x)


def truncation_idempotent(graph: DimensionGraph, m: int, l: int) -> dict[tuple[Path, Path], dict[tuple[Path, Path], int]]:
    """The projection of kG^m (x) kG^l onto its composable pairs, as sparse columns."""
    out: dict = {}
    for p in graph.paths(m):
        for q in graph.paths(l):
            out[(p, q)] = {(p, q): 1} if p.source == q.target else {}
    return out


def idempotent_rank(P: Mapping) -> int:
    """Rank of a diagonal 0/1 projection given as sparse columns."""
    return sum(1 for col in P.values() if col)
