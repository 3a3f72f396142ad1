"""Quotients of the path weak bialgebra by homogeneous relations.

The relations come from coefficient systems ``f[r, p]`` on paths of a
fixed length n (for the braided case, n = 2 and f is the R-matrix).  For
each pair of length-n paths (r, q) the generator is

    sum_p [r|p] f[p, q]  -  sum_p f[r, p] [p|q]

Every generator lives in a single endpoint sector (target and source of both
legs), and so does every product with basis monomials.  The ideal is built
degree by degree and sector by sector as the span of monomial sandwiches
``[x|y] * g * [z|w]``, kept in fully reduced echelon form.  Canonical forms
are residues modulo the pivot columns, so the quotient basis consists of
the non-pivot path pairs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cyclo import CycloField, CycloNumber
from .graph import DimensionGraph, Path
from .linalg import ExactMatrix, SparseRowSpace, add_scaled
from .path_wba import PathWba, WbaElement, _acc
from .temperley_lieb import RMatrix


class RelationError(ValueError):
    """A coefficient system that violates the endpoint condition."""


@dataclass
class RelationSet:
    """Homogeneous generators of a two-sided ideal of the path algebra."""

    algebra: PathWba
    degree: int
    coefficients: dict[tuple[Path, Path], CycloNumber]
    generators: list[dict] = field(default_factory=list)  # label -> coeff

    def __len__(self):
        return len(self.generators)

    def elements(self) -> list[WbaElement]:
        return [WbaElement(self.algebra, g) for g in self.generators]


def _endpoints(p: Path) -> tuple[int, int]:
    return p.target, p.source


def general_relations(algebra: PathWba, coefficients: Mapping[tuple[Path, Path], object], degree: int) -> RelationSet:
    """Generators for the coefficient system ``coefficients[(r, p)]`` on length-``degree`` paths."""
    f = {k: v for k, v in coefficients.items() if v}
    for (r, p), _ in f.items():
        if r.length != degree or p.length != degree:
            raise RelationError(f"coefficient ({r}, {p}) is not of degree {degree}")
        if _endpoints(r) != _endpoints(p):
            raise RelationError(f"coefficient ({r}, {p}) joins paths with different endpoints")
    rows: dict[Path, list] = defaultdict(list)  # r -> [(p, c)]
    cols: dict[Path, list] = defaultdict(list)  # q -> [(p, c)]
    for (r, p), c in f.items():
        rows[r].append((p, c))
        cols[p].append((r, c))
    label = algebra.label
    gens = []
    paths = algebra.paths(degree)
    for r in paths:
        for q in paths:
            g: dict = {}
            for p, c in cols.get(q, ()):
                _acc(g, label(r, p), c)
            for p, c in rows.get(r, ()):
                _acc(g, label(p, q), -c)
            if g:
                gens.append(g)
    return RelationSet(algebra, degree, f, gens)


def frt_relations(algebra: PathWba, R: RMatrix) -> RelationSet:
    """Quadratic relations making the braiding a comodule map."""
    return general_relations(algebra, R.entries, 2)


@dataclass
class QuotientDegree:
    """The ideal and the quotient in one degree."""

    m: int
    ambient: int
    rows: dict  # pivot label -> fully reduced row
    basis: list  # non-pivot labels, sorted

    @property
    def ideal_rank(self) -> int:
        return len(self.rows)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def reduce(self, vec: Mapping) -> dict:
        out = dict(vec)
        for k in [k for k in out if k in self.rows]:
            c = out.get(k)
            if c:
                add_scaled(out, self.rows[k], -c)
        return {k: v for k, v in out.items() if v}

    def row(self) -> tuple[int, int, int, int]:
        return (self.m, self.ambient, self.ideal_rank, self.dimension)


class Quotient:
    """H[G]/I for a homogeneous relation set, with canonical forms per degree."""

    def __init__(self, relations: RelationSet, degree_cap: int | None = None):
        self.relations = relations
        self.algebra = relations.algebra
        self.graph: DimensionGraph = self.algebra.graph
        self.degree_cap = degree_cap
        self._degrees: dict[int, QuotientDegree] = {}
        gens = []
        for g in relations.generators:
            terms = []
            for lab, c in g.items():
                p, q = self.algebra.legs(lab)
                terms.append((p, q, c))
            p0, q0, _ = terms[0]
            gens.append(((p0.target, p0.source, q0.target, q0.source), terms))
        self._gens = gens
        self._by_source: dict = {}
        self._by_target: dict = {}

    # -- ideal construction ------------------------------------------
    def _paths_from(self, k: int, v: int, by_source: bool) -> list[Path]:
        cache = self._by_source if by_source else self._by_target
        hit = cache.get(k)
        if hit is None:
            hit = defaultdict(list)
            for p in self.graph.paths(k):
                hit[p.source if by_source else p.target].append(p)
            cache[k] = hit
        return hit.get(v, [])

    def sandwiches(self, m: int) -> Iterable[dict]:
        """Monomial multiples [x|y] g [z|w] of every generator, landing in degree m."""
        n = self.relations.degree
        if m < n:
            return
        index = self.graph.path_index
        for (a, b, c, d), terms in self._gens:
            for k in range(m - n + 1):
                l = m - n - k
                xs = self._paths_from(k, a, True)
                ys = self._paths_from(k, c, True)
                zs = self._paths_from(l, b, False)
                ws = self._paths_from(l, d, False)
                for x in xs:
                    for y in ys:
                        for z in zs:
                            for w in ws:
                                vec = {}
                                for p, q, coef in terms:
                                    lab = (m, index(x * p * z), index(y * q * w))
                                    vec[lab] = coef
                                yield vec

    def sector(self, lab) -> tuple[int, int, int, int]:
        p, q = self.algebra.legs(lab)
        return (p.target, p.source, q.target, q.source)

    def degree(self, m: int) -> QuotientDegree:
        hit = self._degrees.get(m)
        if hit is not None:
            return hit
        spaces: dict = defaultdict(SparseRowSpace)
        for vec in self.sandwiches(m):
            spaces[self.sector(next(iter(vec)))].insert(vec)
        rows = {}
        for sp in spaces.values():
            rows.update(sp.rows)
        n = len(self.graph.paths(m))
        basis = [(m, i, j) for i in range(n) for j in range(n) if (m, i, j) not in rows]
        out = QuotientDegree(m, n * n, rows, basis)
        self._degrees[m] = out
        return out

    def dimension(self, m: int) -> int:
        return self.degree(m).dimension

    # -- canonical forms ---------------------------------------------
    def reduce_terms(self, terms: Mapping) -> dict:
        by_deg: dict = defaultdict(dict)
        for lab, c in terms.items():
            if c:
                by_deg[lab[0]][lab] = c
        out = {}
        for m, vec in by_deg.items():
            out.update(self.degree(m).reduce(vec))
        return out

    def reduce(self, x: WbaElement) -> WbaElement:
        return WbaElement(self, self.reduce_terms(x.terms))

    def in_ideal(self, x: WbaElement) -> bool:
        return not self.reduce_terms(x.terms)

    # -- basis-level structure maps on canonical labels ---------------
    def label_repr(self, a) -> str:
        return self.algebra.label_repr(a)

    def basis(self, m: int) -> list:
        return self.degree(m).basis

    def basis_up_to(self, max_degree: int) -> list:
        return [a for m in range(max_degree + 1) for a in self.basis(m)]

    def unit_terms(self) -> dict:
        return self.reduce_terms(self.algebra.unit_terms())

    def mult_basis(self, a, b) -> dict:
        if self.degree_cap is not None and a[0] + b[0] > self.degree_cap:
            from .path_wba import DegreeOverflowError

            raise DegreeOverflowError(f"degree {a[0] + b[0]} exceeds the cap {self.degree_cap}")
        return self.reduce_terms(self.algebra.mult_basis(a, b))

    def comult_basis(self, a) -> dict:
        out: dict = {}
        deg = self.degree(a[0])
        cache: dict = {}
        for (x, y), c in self.algebra.comult_basis(a).items():
            rx = cache.get(x)
            if rx is None:
                rx = cache[x] = deg.reduce({x: 1})
            ry = cache.get(y)
            if ry is None:
                ry = cache[y] = deg.reduce({y: 1})
            for u, cu in rx.items():
                for v, cv in ry.items():
                    _acc(out, (u, v), c * cu * cv)
        return out

    def counit_basis(self, a):
        return self.algebra.counit_basis(a)

    # -- element-level operations --------------------------------------
    def unit(self) -> WbaElement:
        return WbaElement(self, self.unit_terms())

    def multiply(self, x: WbaElement, y: WbaElement) -> WbaElement:
        return self.reduce(self.algebra.multiply(x, y))

    def comultiply(self, x: WbaElement) -> dict:
        out: dict = {}
        for a, ca in self.reduce_terms(x.terms).items():
            for pair, c in self.comult_basis(a).items():
                _acc(out, pair, ca * c)
        return out

    def counit(self, x: WbaElement):
        return self.algebra.counit(x)


class QuotientView:
    """Adapter exposing a quotient to the axiom checker."""

    def __init__(self, quotient: Quotient):
        self.q = quotient

    def degree(self, a) -> int:
        return a[0]

    def label_repr(self, a) -> str:
        return self.q.label_repr(a)

    def unit_terms(self):
        return self.q.unit_terms()

    def mult_basis(self, a, b):
        return self.q.mult_basis(a, b)

    def comult_basis(self, a):
        return self.q.comult_basis(a)

    def counit_basis(self, a):
        return self.q.counit_basis(a)


def frt_quotient(graph: DimensionGraph, R: RMatrix, degree_cap: int | None = None) -> Quotient:
    alg = PathWba(graph, degree_cap)
    return Quotient(frt_relations(alg, R), degree_cap)


def ideal_degree(relations: RelationSet, m: int) -> QuotientDegree:
    return Quotient(relations).degree(m)


def coideal_residuals(quotient: Quotient) -> list[dict]:
    """Images of the generators under the quotient coproduct and counit; all zero for a coideal."""
    out = []
    for g in quotient.relations.generators:
        delta: dict = {}
        for a, c in g.items():
            for (x, y), v in quotient.algebra.comult_basis(a).items():
                _acc(delta, (x, y), c * v)
        red: dict = {}
        m = quotient.relations.degree
        cache: dict = {}
        for (x, y), c in delta.items():
            rx = cache.get(x) or cache.setdefault(x, quotient.degree(m).reduce({x: 1}))
            ry = cache.get(y) or cache.setdefault(y, quotient.degree(m).reduce({y: 1}))
            for u, cu in rx.items():
                for v, cv in ry.items():
                    _acc(red, (u, v), c * cu * cv)
        eps = quotient.algebra.counit(WbaElement(quotient.algebra, g))
        if red or eps:
            out.append({"generator": g, "coproduct": red, "counit": eps})
    return out


# -- braid relations on paths ----------------------------------------


def braid_operator(R: RMatrix, m: int, i: int) -> dict:
    """R acting on edges i, i+1 of length-m paths: {(out, in): coeff}."""
    g = R.graph
    out = {}
    for p in g.paths(m):
        head, rest = p.split(i)
        mid, tail = rest.split(2)
        for new_mid, c in R.column(mid).items():
            out[(head * new_mid * tail, p)] = c
    return out


def _compose(x: dict, y: dict) -> dict:
    """Matrix product x∘y of sparse operators {(out, in): c}."""
    by_out: dict = defaultdict(list)
    for (o, i), c in y.items():
        by_out[o].append((i, c))
    res: dict = {}
    for (o, mid), c in x.items():
        for i, d in by_out.get(mid, ()):
            _acc(res, (o, i), c * d)
    return res


@dataclass
class StarTriangularReport:
    holds: bool
    residual: dict  # (out, in) -> R1R2R1 - R2R1R2


def check_star_triangular(R: RMatrix) -> StarTriangularReport:
    """R1 R2 R1 = R2 R1 R2 on length-3 paths."""
    R1 = braid_operator(R, 3, 0)
    R2 = braid_operator(R, 3, 1)
    lhs = _compose(R1, _compose(R2, R1))
    rhs = _compose(R2, _compose(R1, R2))
    diff = dict(lhs)
    for k, v in rhs.items():
        _acc(diff, k, -v)
    return StarTriangularReport(not diff, diff)


def _blocks(graph: DimensionGraph, m: int) -> dict[tuple[int, int], list[Path]]:
    out: dict = defaultdict(list)
    for p in graph.paths(m):
        out[(p.target, p.source)].append(p)
    return out


def endomorphism_dimension(R: RMatrix, m: int) -> int:
    """Dimension of the unital algebra generated by the braid operators on length-m paths."""
    field = R.field
    gens = [braid_operator(R, m, i) for i in range(m - 1)]
    space = SparseRowSpace()
    ident = {(p, p): field.one() for p in R.graph.paths(m)}
    frontier = [ident]
    space.insert(ident)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(g, x)
                if space.insert(y):
                    nxt.append(y)
        frontier = nxt
    return space.rank


def commutant_dimension(R: RMatrix, m: int) -> int:
    """Dimension of {T : T R_i = R_i T for all i} on length-m paths, solved exactly."""
    field = R.field
    gens = [braid_operator(R, m, i) for i in range(m - 1)]
    blocks = _blocks(R.graph, m)
    total = 0
    # T maps block (c, d) into block (a, b); each pair of blocks is independent
    for A in blocks.values():
        for C in blocks.values():
            unknowns = [(a, c) for a in A for c in C]
            A_set, C_set = set(A), set(C)
            col = {u: i for i, u in enumerate(unknowns)}
            eqs = []
            for g in gens:
                # (g T - T g)[a, c] = sum_a' g[a, a'] T[a', c] - sum_c' T[a, c'] g[c', c]
                rows: dict = defaultdict(dict)
                for (o, i), v in g.items():
                    if o in A_set:
                        for c in C:
                            _acc(rows[(o, c)], col[(i, c)], v)
                    if o in C_set:
                        for a in A:
                            _acc(rows[(a, i)], col[(a, o)], -v)
                eqs.extend(r for r in rows.values() if any(r.values()))
            if not eqs:
                total += len(unknowns)
                continue
            M = ExactMatrix([[e.get(j, field.zero()) for j in range(len(unknowns))] for e in eqs], field)
            total += len(unknowns) - M.rank()
    return total


# -- the universal r-form ----------------------------------------------


class RForm:
    """Bilinear form on H[G] built from an R-matrix by splitting off one edge at a time.

    With ``inverse=True`` it is the candidate weak inverse: degree (1, 1)
    values come from the inverse R-matrix and the recursions multiply the
    factors in the opposite order.
    """

    def __init__(self, algebra: PathWba, R: RMatrix, inverse: bool = False, max_degree: int = 3):
        self.algebra = algebra
        self.graph = algebra.graph
        self.R = R.inverse() if inverse else R
        self.inverse = inverse
        self.max_degree = max_degree
        self.field = R.field
        self._memo: dict = {}

    def _base11(self, p: Path, q: Path, r: Path, s: Path):
        if self.inverse:
            # pairs the reversed concatenations rp and qs
            if r.source == p.target and q.source == s.target and r.target == q.target and p.source == s.source:
                return self.R[(r * p, q * s)]
            return self.field.zero()
        if p.target == s.target and r.source == q.source and s.source == q.target and p.source == r.target:
            return self.R[(p * r, s * q)]
        return self.field.zero()

    def basis_value(self, a, b):
        key = (a, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        m, l = a[0], b[0]
        if max(m, l) > self.max_degree:
            raise ValueError(f"r-form only implemented up to degree {self.max_degree} per argument")
        p, q = self.algebra.legs(a)
        r, s = self.algebra.legs(b)
        zero, one = self.field.zero(), self.field.one()
        if m == 0 and l == 0:
            val = one if p.target == q.target == r.target == s.target else zero
        elif m == 0 and l == 1:
            ends = (r.source, r.target) if self.inverse else (r.target, r.source)
            val = one if ((p.target, q.target) == ends and r == s) else zero
        elif m == 1 and l == 0:
            ends = (p.target, p.source) if self.inverse else (p.source, p.target)
            val = one if ((r.target, s.target) == ends and p == q) else zero
        elif m == 1 and l == 1:
            val = self._base11(p, q, r, s)
        elif l >= 2 or (l == 1 and m == 0):
            val = self._split_right(p, q, r, s)
        else:
            val = self._split_left(p, q, r, s)
        self._memo[key] = val
        return val

    def _lab(self, p: Path, q: Path):
        return self.algebra.label(p, q)

    def _split_right(self, p, q, r, s):
        # second argument [r|s] = [r1|s1][r2|s2] with a single edge split off the end
        l = r.length
        r1, r2 = r.split(l - 1)
        s1, s2 = s.split(l - 1)
        total = self.field.zero()
        for t in self.graph.paths(p.length):
            if self.inverse:
                x = self.basis_value(self._lab(t, q), self._lab(r1, s1))
                if x:
                    total = total + x * self.basis_value(self._lab(p, t), self._lab(r2, s2))
            else:
                x = self.basis_value(self._lab(p, t), self._lab(r1, s1))
                if x:
                    total = total + x * self.basis_value(self._lab(t, q), self._lab(r2, s2))
        return total

    def _split_left(self, p, q, r, s):
        # first argument [p|q] = [p1|q1][p2|q2] with a single edge split off the end
        m = p.length
        p1, p2 = p.split(m - 1)
        q1, q2 = q.split(m - 1)
        total = self.field.zero()
        for t in self.graph.paths(r.length):
            if self.inverse:
                x = self.basis_value(self._lab(p1, q1), self._lab(r, t))
                if x:
                    total = total + x * self.basis_value(self._lab(p2, q2), self._lab(t, s))
            else:
                x = self.basis_value(self._lab(p2, q2), self._lab(r, t))
                if x:
                    total = total + x * self.basis_value(self._lab(p1, q1), self._lab(t, s))
        return total

    def __call__(self, x: WbaElement | Mapping, y: WbaElement | Mapping):
        xt = x.terms if isinstance(x, WbaElement) else x
        yt = y.terms if isinstance(y, WbaElement) else y
        total = self.field.zero()
        for a, ca in xt.items():
            for b, cb in yt.items():
                v = self.basis_value(a, b)
                if v:
                    total = total + ca * cb * v
        return total


def universal_r_form(quotient_or_algebra, R: RMatrix, max_degree: int = 3) -> RForm:
    alg = getattr(quotient_or_algebra, "algebra", quotient_or_algebra)
    return RForm(alg, R, False, max_degree)


@dataclass
class RFormReport:
    checked_pairs: int
    exchange_failures: list
    inverse_failures: list
    counit_failures: list
    vanishing_failures: list

    @property
    def passed(self) -> bool:
        return not (self.exchange_failures or self.inverse_failures or self.counit_failures or self.vanishing_failures)


def check_r_form(quotient: Quotient, R: RMatrix, max_degree: int = 2) -> RFormReport:
    """Exchange law, weak-inverse law and counit compatibility on basis pairs up to ``max_degree``."""
    alg = quotient.algebra
    r = RForm(alg, R, False, max_degree)
    rbar = RForm(alg, R, True, max_degree)
    basis = alg.basis_up_to(max_degree)
    comult = {a: alg.comult_basis(a) for a in basis}
    eps = alg.counit_basis
    mult = alg.mult_basis
    ex_fail, inv_fail, cu_fail = [], [], []
    for a in basis:
        for b in basis:
            lhs: dict = {}
            rhs: dict = {}
            inv1 = inv2 = 0
            cu1 = cu2 = 0
            for (a1, a2), ca in comult[a].items():
                for (b1, b2), cb in comult[b].items():
                    c = ca * cb
                    v = r.basis_value(a2, b2)
                    if v:
                        for k, w in mult(a1, b1).items():
                            _acc(lhs, k, c * v * w)
                    u = r.basis_value(a1, b1)
                    if u:
                        for k, w in mult(b2, a2).items():
                            _acc(rhs, k, c * u * w)
                    inv1 = inv1 + c * rbar.basis_value(a1, b1) * v
                    inv2 = inv2 + c * u * rbar.basis_value(a2, b2)
                    # r(x (x) y) = e(x'y') r(x'' (x) y'') = r(x' (x) y') e(y''x'')
                    e1 = sum(w for k, w in mult(a1, b1).items() if eps(k))
                    e2 = sum(w for k, w in mult(b2, a2).items() if eps(k))
                    cu1 = cu1 + c * e1 * v
                    cu2 = cu2 + c * u * e2
            diff = dict(lhs)
            for k, v in rhs.items():
                _acc(diff, k, -v)
            if quotient.reduce_terms(diff):
                ex_fail.append((a, b))
            e_ba = sum(w for k, w in mult(b, a).items() if eps(k))
            e_ab = sum(w for k, w in mult(a, b).items() if eps(k))
            if inv1 != e_ba or inv2 != e_ab:
                inv_fail.append((a, b))
            rv = r.basis_value(a, b)
            if cu1 != rv or cu2 != rv:
                cu_fail.append((a, b))
    # r must vanish on the ideal in either slot to descend to the quotient
    van = []
    gens = quotient.relations.generators if quotient.relations.degree <= max_degree else []
    for g in gens:
        for b in basis:
            if r(g, {b: 1}) or r({b: 1}, g) or rbar(g, {b: 1}) or rbar({b: 1}, g):
                van.append((tuple(g), b))
    return RFormReport(len(basis) ** 2, ex_fail, inv_fail, cu_fail, van)
