"""Finite directed graphs, their paths, and dimension graphs of fusion data.

Conventions.  An edge runs from its *source* to its *target*.  A path of
length m is stored as the vertex sequence ``(v0, ..., vm)`` together with the
edge used at each step, where step i is an edge with target ``v_{i-1}`` and
source ``v_i``.  So ``v0`` is the target of the path and ``vm`` its source,
and the concatenation ``p * q`` is defined when the last vertex of ``p`` equals
the first vertex of ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class Edge:
    source: int
    target: int
    id: int


@dataclass(frozen=True, order=True)
class Path:
    vertices: tuple[int, ...]
    edges: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("a path of length m has m+1 vertices and m edges")

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def target(self) -> int:
        return self.vertices[0]

    @property
    def source(self) -> int:
        return self.vertices[-1]

    def __mul__(self, other: Path) -> Path:
        if self.source != other.target:
            raise ValueError(f"cannot concatenate {self} and {other}")
        return Path(self.vertices + other.vertices[1:], self.edges + other.edges)

    def split(self, k: int) -> tuple[Path, Path]:
        """Split into the first k steps and the rest."""
        return (
            Path(self.vertices[: k + 1], self.edges[:k]),
            Path(self.vertices[k:], self.edges[k:]),
        )

    def __repr__(self):
        return "(" + ",".join(map(str, self.vertices)) + ")"


class GraphError(ValueError):
    pass


@dataclass
class DimensionGraph:
    """A finite digraph with optional vertex labels."""

    num_vertices: int
    edges: list[Edge]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        for e in self.edges:
            if not (0 <= e.source < self.num_vertices and 0 <= e.target < self.num_vertices):
                raise GraphError(f"edge {e} leaves the vertex set")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("edge ids must be distinct")
        if not self.labels:
            self.labels = [str(i) for i in range(self.num_vertices)]
        self._paths: dict[int, list[Path]] = {}
        self._index: dict[int, dict[Path, int]] = {}

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @cached_property
    def _in_edges(self) -> dict[int, list[Edge]]:
        # edges grouped by target: extending a path whose last vertex is v
        # uses an edge whose target is v
        out: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: (e.source, e.id)):
            out[e.target].append(e)
        return out

    @property
    def is_simple(self) -> bool:
        pairs = [(e.source, e.target) for e in self.edges]
        return len(set(pairs)) == len(pairs)

    def paths(self, m: int) -> list[Path]:
        """All paths of length m, sorted lexicographically."""
        if m < 0:
            raise ValueError("path length must be nonnegative")
        hit = self._paths.get(m)
        if hit is not None:
            return hit
        if m == 0:
            out = [Path((v,)) for v in self.vertices]
        else:
            out = []
            for p in self.paths(m - 1):
                for e in self._in_edges[p.source]:
                    out.append(Path(p.vertices + (e.source,), p.edges + (e.id,)))
            out.sort()
        self._paths[m] = out
        self._index[m] = {p: i for i, p in enumerate(out)}
        return out

    def path_index(self, p: Path) -> int:
        self.paths(p.length)
        return self._index[p.length][p]

    def path(self, *vertices: int) -> Path:
        """The path through ``vertices``; only for simple graphs."""
        if len(vertices) == 1:
            return Path((vertices[0],))
        edges = []
        for a, b in zip(vertices, vertices[1:]):
            cands = [e for e in self._in_edges[a] if e.source == b]
            if len(cands) != 1:
                raise GraphError(f"no unique edge with target {a} and source {b}")
            edges.append(cands[0].id)
        return Path(tuple(vertices), tuple(edges))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.labels),
            "edges": [[e.source, e.target, e.id] for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> DimensionGraph:
        verts = data["vertices"]
        return cls(len(verts), [Edge(int(s), int(t), int(i)) for s, t, i in data["edges"]], [str(v) for v in verts])


def enumerate_paths(graph: DimensionGraph, m: int) -> list[Path]:
    return graph.paths(m)


def sl2_dimension_graph(r: int) -> DimensionGraph:
    """The path graph on 0..r-2 with an edge each way between neighbours."""
    if r < 3:
        raise ValueError("level r must be at least 3")
    edges = []
    for j in range(r - 2):
        edges.append(Edge(j, j + 1, len(edges)))
        edges.append(Edge(j + 1, j, len(edges)))
    return DimensionGraph(r - 1, edges)


@dataclass
class FusionData:
    """Fusion rules of a semisimple category with simples 0..n-1.

    ``N[a][b][c]`` is the multiplicity of simple c in a (x) b.
    """

    N: list[list[list[int]]]
    unit: int = 0

    def __post_init__(self):
        n = len(self.N)
        if any(len(row) != n or any(len(col) != n for col in row) for row in self.N):
            raise ValueError("fusion tensor must be n x n x n")
        if not 0 <= self.unit < n:
            raise ValueError("unit index out of range")
        for a in range(n):
            for c in range(n):
                if self.N[self.unit][a][c] != (a == c) or self.N[a][self.unit][c] != (a == c):
                    raise ValueError("the unit object must fuse trivially")

    @property
    def rank(self) -> int:
        return len(self.N)

    def to_json(self) -> dict:
        return {"unit": self.unit, "N": self.N}

    @classmethod
    def from_json(cls, data: dict) -> FusionData:
        return cls([[[int(x) for x in col] for col in row] for row in data["N"]], int(data.get("unit", 0)))


def sl2_admissible(a: int, b: int, c: int, r: int) -> bool:
    """Truncated Clebsch-Gordan condition at level r."""
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c <= 2 * r - 4


def sl2_fusion_data(r: int) -> FusionData:
    n = r - 1
    N = [[[int(sl2_admissible(a, b, c, r)) for c in range(n)] for b in range(n)] for a in range(n)]
    return FusionData(N, 0)


class GeneratorError(ValueError):
    """The chosen object cannot serve as the generator of a dimension graph."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


def check_generator(fusion: FusionData, generator: int) -> None:
    """Raise :class:`GeneratorError` naming the first violated condition."""
    n = fusion.rank
    if not 0 <= generator < n:
        raise ValueError("generator index out of range")
    if generator == fusion.unit:
        raise GeneratorError("no unit summand", "the generator is the unit object")
    for j in range(n):
        for l in range(n):
            if fusion.N[l][generator][j] > 1:
                raise GeneratorError("multiplicity free", f"V_{j} occurs {fusion.N[l][generator][j]} times in V_{l} (x) M")
    seen = {fusion.unit}
    frontier = [fusion.unit]
    while frontier:
        a = frontier.pop()
        for b in range(n):
            if fusion.N[a][generator][b] and b not in seen:
                seen.add(b)
                frontier.append(b)
    if len(seen) < n:
        missing = sorted(set(range(n)) - seen)
        raise GeneratorError("generates", f"simples {missing} never occur in a tensor power of the generator")


def dimension_graph_from_fusion(fusion: FusionData, generator: int) -> DimensionGraph:
    """Graph with N^j_{l,M} edges from j to l, M the chosen generator."""
    check_generator(fusion, generator)
    edges = []
    for j in range(fusion.rank):
        for l in range(fusion.rank):
            for _ in range(fusion.N[l][generator][j]):
                edges.append(Edge(j, l, len(edges)))
    return DimensionGraph(fusion.rank, edges)


def path_multiplicities(graph: DimensionGraph, m: int, start: int = 0) -> list[int]:
    """Number of length-m paths with target ``start``, grouped by source."""
    counts = [0] * graph.num_vertices
    counts[start] = 1
    for _ in range(m):
        nxt = [0] * graph.num_vertices
        for e in graph.edges:
            nxt[e.source] += counts[e.target]
        counts = nxt
    return counts


def fusion_power_multiplicities(fusion: FusionData, generator: int, m: int) -> list[int]:
    """Multiplicity of each simple in the m-th tensor power of the generator."""
    counts = [0] * fusion.rank
    counts[fusion.unit] = 1
    for _ in range(m):
        nxt = [0] * fusion.rank
        for a, c in enumerate(counts):
            if c:
                for b in range(fusion.rank):
                    nxt[b] += c * fusion.N[a][generator][b]
        counts = nxt
    return counts


def load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def all_small_digraphs(max_vertices: int) -> Iterable[DimensionGraph]:
    """Every simple digraph (loops allowed) on 1..max_vertices vertices, up to isomorphism."""
    from itertools import permutations, product

    for n in range(1, max_vertices + 1):
        slots = [(s, t) for s in range(n) for t in range(n)]
        seen = set()
        for mask in product((0, 1), repeat=len(slots)):
            chosen = [slots[i] for i, b in enumerate(mask) if b]
            canon = min(tuple(sorted((perm[s], perm[t]) for s, t in chosen)) for perm in permutations(range(n)))
            if canon in seen:
                continue
            seen.add(canon)
            yield DimensionGraph(n, [Edge(s, t, i) for i, (s, t) in enumerate(canon)])


def graph_from_pairs(n: int, pairs: Sequence[tuple[int, int]]) -> DimensionGraph:
    return DimensionGraph(n, [Edge(s, t, i) for i, (s, t) in enumerate(pairs)])
