"""Temperley-Lieb diagrammatics at a root of unity.

Diagrams are read top to bottom.  A :class:`PlanarDiagram` has ``top`` and
``bottom`` boundary points; points ``0..top-1`` run left to right along the
top edge and ``top..top+bottom-1`` left to right along the bottom edge.
``compose(x, y)`` stacks ``x`` above ``y`` (so ``x`` acts first), closed
loops evaluate to ``delta = -[2] = -A^2 - A^-2``.

On top of this we build Jones-Wenzl idempotents, trivalent vertices, theta
and tetrahedral evaluations, 6j-symbols, and the braiding of the vector
representation in the path basis of the dimension graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .cyclo import CycloNumber, LevelField, field_for_level
from .graph import DimensionGraph, Path, sl2_admissible, sl2_dimension_graph


@dataclass(frozen=True)
class PlanarDiagram:
    """A non-crossing perfect matching of top and bottom boundary points."""

    top: int
    bottom: int
    pairing: tuple[int, ...]

    def __post_init__(self):
        n = self.top + self.bottom
        if len(self.pairing) != n or any(self.pairing[self.pairing[i]] != i or self.pairing[i] == i for i in range(n)):
            raise ValueError("pairing must be a fixed-point-free involution")

    def is_planar(self) -> bool:
        # walk the boundary clockwise: top left->right, then bottom right->left
        order = list(range(self.top)) + list(range(self.top + self.bottom - 1, self.top - 1, -1))
        pos = {p: i for i, p in enumerate(order)}
        stack = []
        for p in order:
            q = self.pairing[p]
            if pos[q] > pos[p]:
                stack.append(p)
            elif not stack or stack.pop() != q:
                return False
        return True

    def dagger(self) -> PlanarDiagram:
        """Reflection in a horizontal line."""
        t, b = self.top, self.bottom

        def m(i):
            return i + b if i < t else i - t

        pairing = [0] * (t + b)
        for i in range(t + b):
            pairing[m(i)] = m(self.pairing[i])
        return PlanarDiagram(b, t, tuple(pairing))

    def tensor(self, other: PlanarDiagram) -> PlanarDiagram:
        """Juxtaposition, self on the left."""
        t1, b1, t2, b2 = self.top, self.bottom, other.top, other.bottom

        def m1(i):
            return i if i < t1 else i + t2

        def m2(i):
            return i + t1 if i < t2 else i + t1 + b1

        pairing = [0] * (t1 + b1 + t2 + b2)
        for i in range(t1 + b1):
            pairing[m1(i)] = m1(self.pairing[i])
        for i in range(t2 + b2):
            pairing[m2(i)] = m2(other.pairing[i])
        return PlanarDiagram(t1 + t2, b1 + b2, tuple(pairing))


def planar_diagrams(n: int) -> list[PlanarDiagram]:
    """Every Temperley-Lieb diagram on n strands (there are Catalan(n) of them)."""
    order = list(range(n)) + list(range(2 * n - 1, n - 1, -1))

    def matchings(pts):
        if not pts:
            yield []
            return
        first = pts[0]
        for k in range(1, len(pts), 2):
            for left in matchings(pts[1:k]):
                for right in matchings(pts[k + 1 :]):
                    yield [(first, pts[k])] + left + right

    out = []
    for m in matchings(order):
        pairing = [0] * (2 * n)
        for u, v in m:
            pairing[u], pairing[v] = v, u
        out.append(PlanarDiagram(n, n, tuple(pairing)))
    return sorted(out, key=lambda d: d.pairing)


def identity_diagram(n: int) -> PlanarDiagram:
    return PlanarDiagram(n, n, tuple(list(range(n, 2 * n)) + list(range(n))))


def cup_cap_diagram(n: int, i: int) -> PlanarDiagram:
    """The generator e_i on n strands joining strands i and i+1 (0-based)."""
    if not 0 <= i < n - 1:
        raise ValueError("e_i needs 0 <= i < n-1")
    pairing = list(range(n, 2 * n)) + list(range(n))
    pairing[i], pairing[i + 1] = i + 1, i
    pairing[n + i], pairing[n + i + 1] = n + i + 1, n + i
    return PlanarDiagram(n, n, tuple(pairing))


@lru_cache(maxsize=200_000)
def compose_diagrams(x: PlanarDiagram, y: PlanarDiagram) -> tuple[PlanarDiagram, int]:
    """Stack x above y; return the diagram and the number of closed loops."""
    if x.bottom != y.top:
        raise ValueError("boundary mismatch in composition")
    a, m, b = x.top, x.bottom, y.bottom
    # global ids: x points 0..a+m-1, y points a+m..a+2m+b-1
    off = a + m
    glue = {}
    for k in range(m):
        glue[a + k] = off + k
        glue[off + k] = a + k

    def partner(g):
        return x.pairing[g] if g < off else off + y.pairing[g - off]

    def external(g):
        if g < a:
            return g
        if g >= off + m:
            return a + (g - off - m)
        return None

    pairing = [None] * (a + b)
    seen = set()
    for start in list(range(a)) + [off + m + j for j in range(b)]:
        s = external(start)
        if pairing[s] is not None:
            continue
        g = partner(start)
        while external(g) is None:
            seen.add(g)
            g2 = glue[g]
            seen.add(g2)
            g = partner(g2)
        e = external(g)
        pairing[s], pairing[e] = e, s
    loops = 0
    for g in range(a, a + m):
        if g in seen:
            continue
        loops += 1
        cur = g
        while True:
            seen.add(cur)
            nxt = glue[cur]
            seen.add(nxt)
            cur = partner(nxt)
            if cur == g:
                break
    return PlanarDiagram(a, b, tuple(pairing)), loops


def closure_loops(d: PlanarDiagram) -> int:
    """Number of loops in the Markov closure of a square diagram."""
    if d.top != d.bottom:
        raise ValueError("only square diagrams have a trace")
    n = d.top
    seen = [False] * (2 * n)
    loops = 0
    for s in range(2 * n):
        if seen[s]:
            continue
        loops += 1
        cur = s
        while not seen[cur]:
            seen[cur] = True
            p = d.pairing[cur]
            seen[p] = True
            cur = p + n if p < n else p - n  # closure strand
    return loops


class TLElement:
    """A linear combination of planar diagrams with fixed boundary."""

    __slots__ = ("field", "top", "bottom", "terms")

    def __init__(self, field: LevelField, top: int, bottom: int, terms: Mapping[PlanarDiagram, CycloNumber]):
        self.field = field
        self.top = top
        self.bottom = bottom
        self.terms = {d: c for d, c in terms.items() if c}

    @classmethod
    def diagram(cls, field: LevelField, d: PlanarDiagram, c=1) -> TLElement:
        return cls(field, d.top, d.bottom, {d: field(c)})

    @classmethod
    def identity(cls, field: LevelField, n: int) -> TLElement:
        return cls.diagram(field, identity_diagram(n))

    @property
    def delta(self) -> CycloNumber:
        return loop_value(self.field)

    def __add__(self, other: TLElement) -> TLElement:
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return TLElement(self.field, self.top, self.bottom, out)

    def __sub__(self, other: TLElement) -> TLElement:
        return self + other.scale(-1)

    def scale(self, c) -> TLElement:
        return TLElement(self.field, self.top, self.bottom, {d: v * c for d, v in self.terms.items()})

    def __rmul__(self, c) -> TLElement:
        return self.scale(c)

    def then(self, other: TLElement) -> TLElement:
        """Apply self, then other (self stacked above other)."""
        return tl_multiply(self, other)

    def tensor(self, other: TLElement) -> TLElement:
        out: dict = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                d = d1.tensor(d2)
                v = c1 * c2
                out[d] = out[d] + v if d in out else v
        return TLElement(self.field, self.top + other.top, self.bottom + other.bottom, out)

    def dagger(self) -> TLElement:
        return TLElement(self.field, self.bottom, self.top, {d.dagger(): c for d, c in self.terms.items()})

    def trace(self) -> CycloNumber:
        """Markov trace: close every top point to the bottom point below it."""
        delta = self.delta
        total = self.field.zero()
        for d, c in self.terms.items():
            total = total + c * delta ** closure_loops(d)
        return total

    def coefficient(self, d: PlanarDiagram) -> CycloNumber:
        return self.terms.get(d, self.field.zero())

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return (self.top, self.bottom, self.terms) == (other.top, other.bottom, other.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"TLElement({self.top}->{self.bottom}, {len(self.terms)} diagrams)"


def loop_value(field: LevelField) -> CycloNumber:
    return -(field.q + field.q.inverse())


def tl_multiply(x: TLElement, y: TLElement) -> TLElement:
    """x stacked above y."""
    if x.bottom != y.top:
        raise ValueError("boundary mismatch")
    delta = loop_value(x.field)
    powers = [x.field.one()]
    out: dict = {}
    for d1, c1 in x.terms.items():
        for d2, c2 in y.terms.items():
            d, loops = compose_diagrams(d1, d2)
            while len(powers) <= loops:
                powers.append(powers[-1] * delta)
            v = c1 * c2 * powers[loops] if loops else c1 * c2
            out[d] = out[d] + v if d in out else v
    return TLElement(x.field, x.top, y.bottom, out)


_JW_CACHE: dict = {}


def jones_wenzl(n: int, field: LevelField) -> TLElement:
    """The Jones-Wenzl idempotent P_n on n strands."""
    if not 0 <= n <= field.r - 2:
        raise ValueError(f"P_{n} is only used for labels 0..{field.r - 2} at level {field.r}")
    key = (field, n)
    hit = _JW_CACHE.get(key)
    if hit is not None:
        return hit
    if n <= 1:
        out = TLElement.identity(field, n)
    else:
        prev = jones_wenzl(n - 1, field).tensor(TLElement.identity(field, 1))
        e = TLElement.diagram(field, cup_cap_diagram(n, n - 2))
        coef = field.qint(n - 1) / field.qint(n)
        out = prev + tl_multiply(tl_multiply(prev, e), prev).scale(coef)
    _JW_CACHE[key] = out
    return out


def quantum_dim(n: int, field: LevelField) -> CycloNumber:
    """(-1)^n [n+1], the trace of P_n; nonzero for 0 <= n <= r-2."""
    if not 0 <= n <= field.r - 2:
        raise ValueError(f"label {n} outside 0..{field.r - 2}")
    v = field.qint(n + 1)
    return -v if n % 2 else v


def _vertex_skeleton(a: int, b: int, c: int) -> PlanarDiagram:
    i, j, k = (a + b - c) // 2, (a + c - b) // 2, (b + c - a) // 2
    top = a
    pairing = [0] * (a + b + c)

    def link(u, v):
        pairing[u], pairing[v] = v, u

    for t in range(i):
        link(t, top + t)
    for t in range(j):
        link(i + t, top + b + k + t)
    for t in range(k):
        link(top + b - 1 - t, top + b + t)
    return PlanarDiagram(a, b + c, tuple(pairing))


_VERTEX_CACHE: dict = {}


def trivalent_vertex(a: int, b: int, c: int, field: LevelField) -> TLElement:
    """The vertex V_a -> V_b (x) V_c: planar arcs capped by Jones-Wenzl projectors."""
    if not sl2_admissible(a, b, c, field.r):
        raise ValueError(f"({a}, {b}, {c}) is not admissible at level {field.r}")
    key = (field, a, b, c)
    hit = _VERTEX_CACHE.get(key)
    if hit is not None:
        return hit
    skel = TLElement.diagram(field, _vertex_skeleton(a, b, c))
    out = tl_multiply(
        tl_multiply(jones_wenzl(a, field), skel),
        jones_wenzl(b, field).tensor(jones_wenzl(c, field)),
    )
    _VERTEX_CACHE[key] = out
    return out


def admissible(a: int, b: int, c: int, r: int) -> bool:
    return sl2_admissible(a, b, c, r)


def theta(a: int, b: int, c: int, field: LevelField) -> CycloNumber:
    """Theta network: a vertex glued to its mirror image and closed; 0 off the admissible triples."""
    if not sl2_admissible(a, b, c, field.r):
        return field.zero()
    y = trivalent_vertex(a, b, c, field)
    return tl_multiply(y, y.dagger()).trace()


def theta_closed_form(a: int, b: int, c: int, field: LevelField) -> CycloNumber:
    """(-1)^(i+j+k) [i+j+k+1]! [i]! [j]! [k]! / ([i+j]! [j+k]! [i+k]!)."""
    i, j, k = (a + b - c) // 2, (a + c - b) // 2, (b + c - a) // 2
    f = field.qfactorial
    val = f(i + j + k + 1) * f(i) * f(j) * f(k) / (f(i + j) * f(j + k) * f(i + k))
    return -val if (i + j + k) % 2 else val


def _h_channel(a, b, c, d, j, field):
    # V_b (x) V_c -> V_a (x) V_d through a horizontal edge j
    left = trivalent_vertex(b, a, j, field).tensor(TLElement.identity(field, c))
    right = TLElement.identity(field, a).tensor(trivalent_vertex(d, j, c, field).dagger())
    return tl_multiply(left, right)


def _i_channel(a, b, c, d, i, field):
    # V_b (x) V_c -> V_a (x) V_d through a vertical edge i
    return tl_multiply(trivalent_vertex(i, b, c, field).dagger(), trivalent_vertex(i, a, d, field))


def tetrahedron(a: int, b: int, c: int, d: int, i: int, j: int, field: LevelField) -> CycloNumber:
    """Tetrahedral network with edges a, b, c, d on the outside, i and j inside."""
    return tl_multiply(_h_channel(a, b, c, d, j, field), _i_channel(a, b, c, d, i, field).dagger()).trace()


def six_j(a: int, b: int, i: int, c: int, d: int, j: int, field: LevelField) -> CycloNumber:
    """Recoupling coefficient of the I-channel i in the H-channel j."""
    for triple in ((a, d, i), (b, c, i), (a, b, j), (c, d, j)):
        if not sl2_admissible(*triple, field.r):
            return field.zero()
    return quantum_dim(i, field) / (theta(a, d, i, field) * theta(b, c, i, field)) * tetrahedron(a, b, c, d, i, j, field)


def recoupling_channels(a: int, b: int, c: int, d: int, field: LevelField) -> tuple[list[int], list[int]]:
    r = field.r
    I = [i for i in range(r - 1) if sl2_admissible(a, d, i, r) and sl2_admissible(b, c, i, r)]
    J = [j for j in range(r - 1) if sl2_admissible(a, b, j, r) and sl2_admissible(c, d, j, r)]
    return I, J


def recoupling_residual(a: int, b: int, c: int, d: int, field: LevelField) -> list[CycloNumber]:
    """Pair H_j - sum_i {..} I_i against every channel; all zero when recoupling holds."""
    I, J = recoupling_channels(a, b, c, d, field)
    tests = [_i_channel(a, b, c, d, i, field) for i in I] + [_h_channel(a, b, c, d, j, field) for j in J]
    out = []
    for j in J:
        diff = _h_channel(a, b, c, d, j, field)
        for i in I:
            diff = diff - _i_channel(a, b, c, d, i, field).scale(six_j(a, b, i, c, d, j, field))
        for t in tests:
            out.append(tl_multiply(diff, t.dagger()).trace())
    return out


def inverse_recoupling(a: int, b: int, c: int, d: int, field: LevelField) -> dict[tuple[int, int], CycloNumber]:
    """Coefficients D[j, i] with I_i = sum_j D[j, i] H_j, read off by pairing against the H-channels.

    Distinct H-channels pair to zero (Schur), so each coefficient is a single ratio of traces.
    """
    I, J = recoupling_channels(a, b, c, d, field)
    out = {}
    for j in J:
        h = _h_channel(a, b, c, d, j, field)
        norm = tl_multiply(h, h.dagger()).trace()
        for i in I:
            out[j, i] = tl_multiply(_i_channel(a, b, c, d, i, field), h.dagger()).trace() / norm
    return out


def recoupling_orthogonality(a: int, b: int, c: int, d: int, field: LevelField) -> list[list[CycloNumber]]:
    """The product D.C of the two change-of-basis matrices, indexed by H-channels; the identity when consistent."""
    I, J = recoupling_channels(a, b, c, d, field)
    D = inverse_recoupling(a, b, c, d, field)
    C = {(i, j): six_j(a, b, i, c, d, j, field) for i in I for j in J}
    return [[sum((D[j2, i] * C[i, j] for i in I), field.zero()) for j in J] for j2 in J]


# -- the braiding on the vector representation in the path basis ----------


def crossing(field: LevelField, inverse: bool = False) -> TLElement:
    """Positive crossing A (cup-cap) + A^-1 (identity); the inverse swaps A and A^-1."""
    a = field.A.inverse() if inverse else field.A
    e = TLElement.diagram(field, cup_cap_diagram(2, 0), a)
    return e + TLElement.identity(field, 2).scale(a.inverse())


def _path_morphism(p: Path, field: LevelField) -> TLElement:
    """V_{source} -> V_{target} (x) M (x) M for a length-2 path."""
    v0, v1, v2 = p.vertices
    first = trivalent_vertex(v2, v1, 1, field)
    second = trivalent_vertex(v1, v0, 1, field).tensor(TLElement.identity(field, 1))
    return tl_multiply(first, second)


def _pairing(f: TLElement, g: TLElement, source: int, field: LevelField) -> CycloNumber:
    # f^dagger g is a scalar multiple of P_source; return that scalar
    return tl_multiply(g, f.dagger()).trace() / quantum_dim(source, field)


@dataclass
class RMatrix:
    """Braiding coefficients R[p, q] on length-2 paths: the image of q is sum_p R[p, q] p."""

    r: int
    field: LevelField
    graph: DimensionGraph
    entries: dict[tuple[Path, Path], CycloNumber]

    def __getitem__(self, pq: tuple[Path, Path]) -> CycloNumber:
        return self.entries.get(pq, self.field.zero())

    def nonzero(self) -> dict[tuple[Path, Path], CycloNumber]:
        return {k: v for k, v in self.entries.items() if v}

    def column(self, q: Path) -> dict[Path, CycloNumber]:
        return {p: v for (p, qq), v in self.entries.items() if qq == q and v}

    def row(self, p: Path) -> dict[Path, CycloNumber]:
        return {q: v for (pp, q), v in self.entries.items() if pp == p and v}

    def scaled(self, c: CycloNumber) -> RMatrix:
        return RMatrix(self.r, self.field, self.graph, {k: v * c for k, v in self.entries.items()})

    def inverse(self) -> RMatrix:
        from .linalg import ExactMatrix

        out = {}
        paths = self.graph.paths(2)
        blocks: dict = {}
        for p in paths:
            blocks.setdefault((p.target, p.source), []).append(p)
        for ps in blocks.values():
            M = ExactMatrix([[self[(p, q)] for q in ps] for p in ps], self.field).inverse()
            for i, p in enumerate(ps):
                for j, q in enumerate(ps):
                    if M[i, j]:
                        out[(p, q)] = M[i, j]
        return RMatrix(self.r, self.field, self.graph, out)

    def __eq__(self, other):
        if not isinstance(other, RMatrix):
            return NotImplemented
        return self.r == other.r and self.nonzero() == other.nonzero()

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "entries": [
                {"p": list(p.vertices), "q": list(q.vertices), "c": c.to_json()}
                for (p, q), c in sorted(self.nonzero().items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict, root_exponent: int = 1) -> RMatrix:
        r = int(data["r"])
        field = field_for_level(r, root_exponent)
        g = sl2_dimension_graph(r)
        entries = {}
        for e in data["entries"]:
            c = CycloNumber.from_json(e["c"])
            if c.N != field.N:
                raise ValueError("coefficient field does not match the level")
            entries[(g.path(*e["p"]), g.path(*e["q"]))] = c
        return cls(r, field, g, entries)


def _blocks(graph: DimensionGraph) -> dict[tuple[int, int], list[Path]]:
    out: dict = {}
    for p in graph.paths(2):
        out.setdefault((p.target, p.source), []).append(p)
    return out


def derive_r_matrix(r: int, root_exponent: int = 1, inverse: bool = False) -> RMatrix:
    """Coefficients of the crossing in the basis of composed vertices, by contraction."""
    field = field_for_level(r, root_exponent)
    g = sl2_dimension_graph(r)
    X = crossing(field, inverse)
    entries = {}
    for (v0, v2), ps in _blocks(g).items():
        F = {p: _path_morphism(p, field) for p in ps}
        braid = TLElement.identity(field, v0).tensor(X)
        for q in ps:
            image = tl_multiply(F[q], braid)
            for p in ps:
                entries[(p, q)] = _pairing(F[p], image, v2, field) / _pairing(F[p], F[p], v2, field)
    return RMatrix(r, field, g, entries)


def closed_form_r(r: int, root_exponent: int = 1) -> RMatrix:
    """Transcription of the closed formulas, with q^(1/2) read as A."""
    field = field_for_level(r, root_exponent)
    g = sl2_dimension_graph(r)
    A, qi = field.A, field.qint
    Ainv = A.inverse()
    entries = {}
    top = r - 2
    for j in range(top + 1):
        up = (j, j + 1, j) if j + 1 <= top else None
        down = (j, j - 1, j) if j >= 1 else None
        if up:
            entries[(up, up)] = -Ainv * A ** (2 * (j + 1)) / qi(j + 1)
        if down:
            entries[(down, down)] = Ainv * A ** (-2 * (j + 1)) / qi(j + 1)
        if up and down:
            entries[(down, up)] = Ainv * qi(j) * qi(j + 2) / (qi(j + 1) * qi(j + 1))
            entries[(up, down)] = Ainv
        for s in (1, -1):
            k = j + 2 * s
            if 0 <= k <= top:
                p = (j, j + s, k)
                entries[(p, p)] = A ** -3
    return RMatrix(r, field, g, {(g.path(*p), g.path(*q)): c for (p, q), c in entries.items()})


@dataclass
class RComparison:
    equal: bool
    scalar: CycloNumber | None  # derived = scalar * closed form, when proportional
    mismatches: list[tuple[Path, Path]]


def compare_r_matrices(derived: RMatrix, closed: RMatrix) -> RComparison:
    keys = set(derived.nonzero()) | set(closed.nonzero())
    mism = sorted(k for k in keys if derived[k] != closed[k])
    scalar = None
    support_same = set(derived.nonzero()) == set(closed.nonzero())
    if support_same and keys:
        k0 = min(keys)
        lam = derived[k0] / closed[k0]
        if all(derived[k] == lam * closed[k] for k in keys):
            scalar = lam
    return RComparison(not mism, scalar, mism)
