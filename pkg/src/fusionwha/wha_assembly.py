"""Group-likes of the FRT quotient and the weak Hopf algebra obtained by dividing by 1 - g.

Group-likes are searched degree by degree in canonical coordinates.  The
defining equations are quadratic, but they are block structured: write
``G_ab`` for the part of ``g`` whose legs start at source vertices ``a`` and
``b``.  Then ``Delta(G_ab) = sum_t G_at (x) G_tb``, so the diagonal blocks are
group-likes of small corner coalgebras and the off-diagonal blocks follow by
factoring rank-one tensors.  The residual freedom is the torus
``G_ab -> (s_b / s_a) G_ab``; :func:`normalize_by_r_form` pins it down with
the universal r-form.

The quotient by the non-homogeneous ideal ``(1 - g)`` is realised by
stabilization: once multiplication by ``g`` is bijective from degree ``m0``
on, the classes are represented in degrees ``m0`` (even) and ``m0 + 1`` (odd).
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .axioms import AxiomReport, check_wba_axioms
from .cyclo import RATIONALS, CycloField, CycloNumber, LevelField, field_for_level
from .frt_quotient import Quotient, RForm, frt_quotient
from .graph import DimensionGraph, Path, fusion_power_multiplicities, sl2_admissible, sl2_dimension_graph, sl2_fusion_data
from .linalg import ExactMatrix, SparseRowSpace, sparse_kernel, sparse_solve, InconsistentSystemError
from .path_wba import PathWba, WbaElement, _acc
from .temperley_lieb import RMatrix, derive_r_matrix


class GroupLikeSolveError(RuntimeError):
    """The solver met a configuration it cannot enumerate exactly."""


class ComoduleError(ValueError):
    """The proposed subspace is not closed under the coaction."""


class StabilizationError(RuntimeError):
    """Multiplication by the group-like never became bijective below the cap."""


class AntipodeError(RuntimeError):
    """The antipode equations have no solution or more than one."""


# -- fusion side -------------------------------------------------------


@dataclass(frozen=True)
class FusionOracle:
    """Dimension predictions for the sl2 category at level r."""

    r: int
    omega_dims: tuple[int, ...]

    def multiplicities(self, m: int) -> list[int]:
        """Multiplicity of each simple in the m-th tensor power of the generator."""
        return fusion_power_multiplicities(sl2_fusion_data(self.r), 1, m)

    def types(self, m: int) -> list[int]:
        return [j for j, c in enumerate(self.multiplicities(m)) if c]

    def predicted_degree_dimension(self, m: int) -> int:
        return sum(self.omega_dims[j] ** 2 for j in self.types(m))

    @property
    def total_dimension(self) -> int:
        return sum(d * d for d in self.omega_dims)

    def graph_dims(self) -> tuple[int, ...]:
        """The same dimensions read off the dimension graph.

        Fusion coefficients of V_j are the entries of U_j(A), the Chebyshev
        polynomial of the second kind in the adjacency matrix.
        """
        g = sl2_dimension_graph(self.r)
        n = g.num_vertices
        adj = [[0] * n for _ in range(n)]
        for e in g.edges:
            adj[e.source][e.target] += 1

        def matmul(x, y):
            return [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

        prev = [[int(i == j) for j in range(n)] for i in range(n)]
        cur = adj
        dims = [sum(map(sum, prev))]
        for _ in range(1, n):
            dims.append(sum(map(sum, cur)))
            nxt = matmul(adj, cur)
            cur, prev = [[nxt[i][j] - prev[i][j] for j in range(n)] for i in range(n)], cur
        return tuple(dims)


def fusion_oracle(r: int) -> FusionOracle:
    if r < 3:
        raise ValueError("level r must be at least 3")
    n = r - 1
    dims = tuple(sum(1 for a in range(n) for b in range(n) if sl2_admissible(b, j, a, r)) for j in range(n))
    return FusionOracle(r, dims)


# -- closed forms ------------------------------------------------------


def projector_q(r: int, root_exponent: int = 1) -> dict[Path, dict[Path, CycloNumber]]:
    """The idempotent onto the second copy of the unit in M (x) M, as columns on length-2 paths.

    Paths that are not loops, and loops not listed below, map to zero.
    """
    F = field_for_level(r, root_exponent)
    g = sl2_dimension_graph(r)
    qi = F.qint
    top = r - 2
    cols: dict[Path, dict[Path, CycloNumber]] = {p: {} for p in g.paths(2)}
    cols[g.path(0, 1, 0)] = {g.path(0, 1, 0): F.one()}
    cols[g.path(top, top - 1, top)] = {g.path(top, top - 1, top): F.one()}
    for j in range(1, top):
        up, down = g.path(j, j + 1, j), g.path(j, j - 1, j)
        cols[up] = {
            up: qi(j + 2) / (qi(2) * qi(j + 1)),
            down: -(qi(j) * qi(j + 2)) / (qi(2) * qi(j + 1) * qi(j + 1)),
        }
        cols[down] = {up: -qi(2).inverse(), down: qi(j) / (qi(2) * qi(j + 1))}
    return cols


def apply_linear(cols: Mapping[Path, Mapping[Path, CycloNumber]], vec: Mapping[Path, CycloNumber]) -> dict:
    out: dict = {}
    for p, c in vec.items():
        for q, v in cols.get(p, {}).items():
            _acc(out, q, c * v)
    return out


def compose_linear(x: Mapping, y: Mapping) -> dict:
    """The map ``x o y`` (apply y first)."""
    return {p: apply_linear(x, col) for p, col in y.items()}


def unit_copy_basis(r: int, root_exponent: int = 1, scaling: str = "closed-form") -> list[dict[Path, CycloNumber]]:
    """A basis b_0..b_{r-2} of the image of :func:`projector_q`, b_j a loop at j.

    Up to scale, b_j = [j+1](j,j+1,j) - [j](j,j-1,j).  ``"closed-form"``
    divides the middle vectors by sqrt(2) and takes b_{r-2} = -(r-2,r-3,r-2);
    ``"quantum"`` divides b_j by [j+1] for j < r-2 and leaves b_{r-2}
    unscaled, which is the choice whose group-like passes the r-form
    normalization.
    """
    F = field_for_level(r, root_exponent)
    g = sl2_dimension_graph(r)
    qi = F.qint
    top = r - 2
    if scaling not in ("closed-form", "quantum"):
        raise ValueError(f"unknown scaling {scaling!r}")
    out = [{g.path(0, 1, 0): F.one()}]
    for j in range(1, top):
        s = F.sqrt2.inverse() if scaling == "closed-form" else qi(j + 1).inverse()
        out.append({g.path(j, j + 1, j): qi(j + 1) * s, g.path(j, j - 1, j): -qi(j) * s})
    end = F.one() if scaling == "closed-form" else qi(top)
    out.append({g.path(top, top - 1, top): -end})
    return out


def grouplike_g2(r: int, algebra: PathWba | None = None, root_exponent: int = 1, weights: str = "closed-form") -> WbaElement:
    """The degree-2 group-like on pairs of length-2 loops.

    Block (j, l) carries kappa_j * rho_l times four loop terms.  With
    ``weights="closed-form"`` kappa = rho = 1 at the end vertices and
    1/sqrt(2) in between.  With ``weights="normalized"`` the middle values
    are kappa_j = [j+1]/2 and rho_l = 1/[l+1]; this member of the same torus
    orbit is central and satisfies the r-form normalization for every r.
    """
    F = field_for_level(r, root_exponent)
    alg = algebra or PathWba(sl2_dimension_graph(r))
    g = alg.graph
    qi = F.qint
    top = r - 2
    if weights == "closed-form":
        def kappa(j):
            return F.one() if j in (0, top) else F.sqrt2.inverse()
        rho = kappa
    elif weights == "normalized":
        def kappa(j):
            return F.one() if j in (0, top) else qi(j + 1) / 2
        def rho(l):
            return F.one() if l in (0, top) else qi(l + 1).inverse()
    else:
        raise ValueError(f"unknown weights {weights!r}")

    def loop(j, s):
        return g.path(j, j + s, j) if 0 <= j + s <= top else None

    terms: dict = {}
    for j in range(top + 1):
        for l in range(top + 1):
            c = kappa(j) * rho(l)
            for sj, sl, num, den, sign in ((1, 1, l + 1, j + 1, 1), (-1, -1, l, j, 1), (-1, 1, l + 1, j, -1), (1, -1, l, j + 1, -1)):
                p, q = loop(j, sj), loop(l, sl)
                if p is not None and q is not None:
                    _acc(terms, alg.label(p, q), c * qi(num) / qi(den) * sign)
    return WbaElement(alg, terms)


# -- certificates ------------------------------------------------------


def _sources(Q: Quotient, lab) -> tuple[int, int]:
    _, sp, _, sq = Q.sector(lab)
    return sp, sq


def _targets(Q: Quotient, lab) -> tuple[int, int]:
    tp, _, tq, _ = Q.sector(lab)
    return tp, tq


def _tensor_sub(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        _acc(out, k, -v)
    return out


def _outer_sum(Q: Quotient, terms: Mapping, pick) -> dict:
    """sum_t g^{(., t)} (x) g^{(t, .)} with the vertex pair read by ``pick``."""
    first: dict = defaultdict(dict)
    second: dict = defaultdict(dict)
    for a, c in terms.items():
        u, v = pick(Q, a)
        first[v][a] = c
        second[u][a] = c
    out: dict = {}
    for t, xs in first.items():
        for a, ca in xs.items():
            for b, cb in second.get(t, {}).items():
                _acc(out, (a, b), ca * cb)
    return out


@dataclass
class GroupLikeCertificate:
    element: WbaElement
    degree: int
    right: dict
    left: dict
    eps_s: dict
    eps_t: dict
    centrality: dict = field(default_factory=dict)
    x_fixed: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not (self.right or self.left or self.eps_s or self.eps_t)

    @property
    def central(self) -> bool:
        return not self.centrality

    @property
    def x_fixed_ok(self) -> bool:
        return not self.x_fixed

    def residual_sizes(self) -> dict[str, int]:
        return {
            "right": len(self.right),
            "left": len(self.left),
            "eps_s": len(self.eps_s),
            "eps_t": len(self.eps_t),
            "centrality": len(self.centrality),
            "x_fixed": len(self.x_fixed),
        }


def _terms(x) -> dict:
    return dict(x.terms) if isinstance(x, WbaElement) else dict(x)


def verify_grouplike(x: WbaElement | Mapping, quotient: Quotient, central_degree: int = 1) -> GroupLikeCertificate:
    """All four group-like residuals in the quotient, plus centrality and loop-fixedness."""
    Q = quotient
    alg = Q.algebra
    g = Q.reduce_terms(_terms(x))
    degrees = {a[0] for a in g}
    if len(degrees) > 1:
        raise ValueError("group-like candidates must be homogeneous")
    degree = degrees.pop() if degrees else 0
    delta = Q.comultiply(WbaElement(alg, g))
    right = _tensor_sub(delta, _outer_sum(Q, g, _sources))
    left = _tensor_sub(delta, _outer_sum(Q, g, _targets))
    unit = alg.unit_terms()
    es = _tensor_sub(alg.eps_s(WbaElement(alg, g)).terms, unit)
    et = _tensor_sub(alg.eps_t(WbaElement(alg, g)).terms, unit)
    cent = {}
    ge = WbaElement(alg, g)
    for m in range(central_degree + 1):
        for b in Q.basis(m):
            be = WbaElement(alg, {b: 1})
            d = Q.reduce_terms(_tensor_sub(alg.multiply(ge, be).terms, alg.multiply(be, ge).terms))
            if d:
                cent[b] = d
    xf = Q.reduce_terms(_tensor_sub(alg.truncate(ge).terms, g))
    return GroupLikeCertificate(WbaElement(Q, g), degree, right, left, es, et, cent, xf)


# -- the group-like solver ---------------------------------------------


def _pointed_part(Q: Quotient, labels: list, one: CycloNumber) -> list[dict]:
    """Span of the group-likes of the corner coalgebra on ``labels``.

    This is the largest subcoalgebra inside the cocommutative elements,
    found by shrinking until the coproduct closes up.
    """
    S = set(labels)
    delta = {b: {k: v for k, v in Q.comult_basis(b).items() if k[0] in S and k[1] in S} for b in labels}
    K = [{b: one} for b in labels]
    while K:
        space = SparseRowSpace()
        space.extend(K)
        residue = {x: space.reduce({x: one}) for x in labels}
        eqs: dict = defaultdict(dict)
        for i, k in enumerate(K):
            for b, cb in k.items():
                for (x, y), v in delta[b].items():
                    c = cb * v
                    _acc(eqs[("sym", x, y)], i, c)
                    _acc(eqs[("sym", y, x)], i, -c)
                    for u, cu in residue[x].items():
                        _acc(eqs[("sub", u, y)], i, c * cu)
        kernel = sparse_kernel(eqs.values(), range(len(K)), one)
        if len(kernel) == len(K):
            return K
        new = []
        for vec in kernel:
            c: dict = {}
            for i, xi in vec.items():
                for b, cb in K[i].items():
                    _acc(c, b, xi * cb)
            new.append(c)
        K = new
    return K


def _block(T: Mapping, Q: Quotient, s1: tuple, s2: tuple) -> dict:
    return {k: v for k, v in T.items() if _sources(Q, k[0]) == s1 and _sources(Q, k[1]) == s2}


def _counit(terms: Mapping):
    total = 0
    for (m, i, j), c in terms.items():
        if i == j:
            total = c + total
    return total


@dataclass
class GroupLikeFamily:
    """A torus orbit of group-likes: ``base`` rescaled by s_b / s_a on the source block (a, b)."""

    quotient: Quotient
    degree: int
    base: dict
    vertices: tuple[int, ...]
    torus: bool  # whether generic rescalings stay group-like

    def member(self, s: Mapping[int, object]) -> dict:
        Q = self.quotient
        out = {}
        for k, c in self.base.items():
            a, b = _sources(Q, k)
            out[k] = c * s[b] / s[a]
        return out

    def blocks(self) -> dict[tuple[int, int], dict]:
        out: dict = defaultdict(dict)
        for k, c in self.base.items():
            out[_sources(self.quotient, k)][k] = c
        return dict(out)

    def contains(self, x: WbaElement | Mapping) -> bool:
        """Whether x is a torus rescaling of the base point."""
        Q = self.quotient
        terms = Q.reduce_terms(_terms(x))
        if not self.torus:
            return terms == self.base
        base = self.blocks()
        other: dict = defaultdict(dict)
        for k, c in terms.items():
            other[_sources(Q, k)][k] = c
        if set(other) != set(base):
            return False
        ratio = {}
        for ab, blk in base.items():
            o = other[ab]
            if set(o) != set(blk):
                return False
            k0 = min(blk)
            lam = o[k0] / blk[k0]
            if any(o[k] != lam * blk[k] for k in blk):
                return False
            ratio[ab] = lam
        for (a, b), lam in ratio.items():
            if a == b and lam != 1:
                return False
            if (b, a) in ratio and lam * ratio[(b, a)] != 1:
                return False
            for (b2, c), mu in ratio.items():
                if b2 == b and (a, c) in ratio and lam * mu != ratio[(a, c)]:
                    return False
        return True


@dataclass
class GroupLikeSolution:
    degree: int
    families: list[GroupLikeFamily]
    normalized: list[dict] | None = None  # one point per family, when an R-matrix was given
    notes: list[str] = field(default_factory=list)


def _delta_terms(Q: Quotient, terms: Mapping) -> dict:
    out: dict = {}
    for a, ca in terms.items():
        for pair, c in Q.comult_basis(a).items():
            _acc(out, pair, ca * c)
    return out


def _grow(Q: Quotient, root: int, start: dict, vertices: Sequence[int]) -> dict | None:
    """Fill in every block from the diagonal block at ``root``; None if the data is inconsistent."""
    G = {(root, root): start}
    reached = [root]
    queue = [root]
    while queue:
        a = queue.pop(0)
        dg = _delta_terms(Q, G[(a, a)])
        for t in vertices:
            if t in reached:
                continue
            T = _block(dg, Q, (a, t), (t, a))
            if not T:
                continue
            x0, y0 = min(T)
            piv = T[(x0, y0)]
            gat = {x: c / piv for (x, y), c in T.items() if y == y0}
            gta = {y: c for (x, y), c in T.items() if x == x0}
            outer = {(x, y): cx * cy for x, cx in gat.items() for y, cy in gta.items()}
            if outer != T:
                return None
            gtt = {y: c for (x, y), c in _block(_delta_terms(Q, gat), Q, (a, t), (t, t)).items() if x == x0}
            if not gtt:
                return None
            G[(a, t)], G[(t, a)], G[(t, t)] = gat, gta, gtt
            reached.append(t)
            queue.append(t)
    if len(reached) != len(vertices):
        return None
    pending = {(t, s) for t in vertices for s in vertices if t != s and (t, s) not in G}
    while pending:
        progress = False
        for t, s in sorted(pending):
            for x in vertices:
                gxt, gxs = G.get((x, t)), G.get((x, s))
                if gxt and gxs is not None:
                    x0 = min(gxt)
                    blk = _block(_delta_terms(Q, gxs), Q, (x, t), (t, s))
                    G[(t, s)] = {y: c / gxt[x0] for (xx, y), c in blk.items() if xx == x0}
                    pending.discard((t, s))
                    progress = True
                    break
        if not progress:
            for ts in pending:
                G[ts] = {}
            break
    out: dict = {}
    for blk in G.values():
        for k, c in blk.items():
            _acc(out, k, c)
    return out


def grouplike_solve(quotient: Quotient, m: int, r_matrix: RMatrix | None = None, seed: int = 0) -> GroupLikeSolution:
    """All homogeneous degree-m group-likes of the quotient, as torus orbits.

    With an R-matrix, each orbit is also normalized by the r-form (see
    :func:`normalize_by_r_form`).
    """
    Q = quotient
    if Q.degree_cap is not None and m > Q.degree_cap:
        raise ValueError(f"degree {m} exceeds the cap {Q.degree_cap}")
    vertices = list(Q.graph.vertices)
    basis = Q.basis(m)
    if not basis:
        return GroupLikeSolution(m, [], [] if r_matrix else None, ["degree is empty"])
    one = _field_one(Q, r_matrix)
    corners: dict = defaultdict(list)
    for b in basis:
        tp, sp, tq, sq = Q.sector(b)
        if sp == sq and tp == tq:
            corners[(sp, tp)].append(b)
    notes: list[str] = []
    root = None
    cands: list[dict] = []
    for a in vertices:
        pts = []
        ok = True
        for c in vertices:
            labels = corners.get((a, c), [])
            if not labels:
                continue
            K = _pointed_part(Q, labels, one)
            if len(K) > 1:
                ok = False
                break
            if K and _counit(K[0]):
                e = _counit(K[0])
                pts.append({k: v / e for k, v in K[0].items()})
        if ok:
            root, cands = a, pts
            break
    if root is None:
        raise GroupLikeSolveError(f"no vertex has multiplicity-free corners in degree {m}")
    families = []
    rng = random.Random(seed)
    for cand in cands:
        g = _grow(Q, root, cand, vertices)
        if g is None:
            notes.append(f"corner point at vertex {root} in sector {sorted({Q.sector(k) for k in cand})} does not extend")
            continue
        cert = verify_grouplike(g, Q, central_degree=-1)
        if not cert.valid:
            notes.append(f"extension of a corner point at vertex {root} fails the group-like residuals {cert.residual_sizes()}")
            continue
        fam = GroupLikeFamily(Q, m, Q.reduce_terms(g), tuple(vertices), False)
        s = {v: one * Fraction(rng.randint(2, 9), rng.randint(2, 9)) for v in vertices}
        fam.torus = verify_grouplike(fam.member(s), Q, central_degree=-1).valid
        families.append(fam)
    normalized = None
    if r_matrix is not None:
        normalized = []
        for fam in families:
            h = normalize_by_r_form(fam, r_matrix)
            if h is None:
                notes.append("a family admits no r-form normalized member")
            else:
                normalized.append(h)
    return GroupLikeSolution(m, families, normalized, notes)


def _field_one(Q: Quotient, r_matrix: RMatrix | None):
    if r_matrix is not None:
        return r_matrix.field.one()
    for gen in Q.relations.generators:
        for c in gen.values():
            if isinstance(c, CycloNumber):
                return CycloField(c.N).one()
    raise GroupLikeSolveError("cannot infer the coefficient field; pass an R-matrix")


def normalize_by_r_form(family: GroupLikeFamily, R: RMatrix, check_degree: int = 1) -> dict | None:
    """The member h with r(h (x) x) = r(1 (x) x) and r(x (x) h) = r(x (x) 1).

    The conditions are imposed on the degree-1 elements [e|e] to fix the
    torus and then checked on every canonical basis element up to
    ``check_degree``.  Returns None when no member qualifies.
    """
    Q = family.quotient
    alg = Q.algebra
    rf = RForm(alg, R, False, max(family.degree, check_degree, 1))
    unit = alg.unit_terms()
    blocks = family.blocks()
    ratios: dict[tuple[int, int], object] = {}
    for i, p in enumerate(alg.paths(1)):
        x = {alg.label(p, p): 1}
        target = rf(unit, x)
        diag = 0
        off = []
        for (a, b), blk in blocks.items():
            v = rf(blk, x)
            if not v:
                continue
            if a == b:
                diag = diag + v
            else:
                off.append(((a, b), v))
        if len(off) == 1:
            (a, b), v = off[0]
            want = (target - diag) / v
            if (a, b) in ratios and ratios[(a, b)] != want:
                return None
            ratios[(a, b)] = want
        elif not off and diag != target:
            return None
    s = {family.vertices[0]: R.field.one()}
    changed = True
    while changed:
        changed = False
        for (a, b), w in ratios.items():
            if a in s and b not in s:
                s[b] = s[a] * w
                changed = True
            elif b in s and a not in s:
                s[a] = s[b] / w
                changed = True
    if len(s) != len(family.vertices):
        return None
    if any(s[b] / s[a] != w for (a, b), w in ratios.items()):
        return None
    h = family.member(s)
    for mm in range(check_degree + 1):
        for lab in Q.basis(mm):
            x = {lab: 1}
            if rf(h, x) != rf(unit, x) or rf(x, h) != rf(x, unit):
                return None
    return h


# -- extraction from a comodule ----------------------------------------


def grouplike_from_comodule(quotient: Quotient, basis: Sequence[Mapping[Path, object]]) -> WbaElement:
    """The group-like g = e(1_0) 1_1 of a subcomodule of kG^m spanned by ``basis``.

    ``basis[j]`` is identified with the base-algebra element at vertex j; the
    coaction on paths is p -> sum_q q (x) [q|p].
    """
    Q = quotient
    alg = Q.algebra
    lengths = {p.length for b in basis for p in b}
    if len(lengths) != 1:
        raise ComoduleError("basis vectors must be nonzero and share one path length")
    m = lengths.pop()
    paths = alg.paths(m)
    coeffs = [c for b in basis for c in b.values() if isinstance(c, CycloNumber)]
    if coeffs:
        F = CycloField(coeffs[0].N)
    else:
        try:
            F = CycloField(_field_one(Q, None).N)
        except GroupLikeSolveError:
            F = RATIONALS
    k = len(basis)
    rows = []
    for i, b in enumerate(basis):
        row = [F(b.get(p, 0)) for p in paths]
        row += [F.one() if j == i else F.zero() for j in range(k)]
        rows.append(row)
    red, piv = ExactMatrix(rows, F).rref()
    if len(piv) < k or piv[k - 1] >= len(paths):
        raise ComoduleError("basis vectors are linearly dependent")
    T = [red.rows[i][len(paths):] for i in range(k)]  # coordinates of the pivot paths
    pivot_paths = [paths[c] for c in piv[:k]]

    def h(j, q):
        terms: dict = {}
        for p, c in basis[j].items():
            _acc(terms, alg.label(q, p), F(c))
        return Q.reduce_terms(terms)

    coef = [[{} for _ in range(k)] for _ in range(k)]  # coef[i][j] = c_ij
    for j in range(k):
        hp = [h(j, q) for q in pivot_paths]
        for i in range(k):
            acc: dict = {}
            for i2 in range(k):
                t = T[i2][i]
                if t:
                    for lab, c in hp[i2].items():
                        _acc(acc, lab, t * c)
            coef[i][j] = acc
    # closure: sum_q q (x) h(j, q) == sum_i b_i (x) c_ij
    for j in range(k):
        lhs: dict = {}
        for q in paths:
            for lab, c in h(j, q).items():
                _acc(lhs, (q, lab), c)
        for i in range(k):
            for p, bp in basis[i].items():
                for lab, c in coef[i][j].items():
                    _acc(lhs, (p, lab), -F(bp) * c)
        if lhs:
            raise ComoduleError("span is not closed under the coaction")
    g: dict = {}
    for i in range(k):
        for j in range(k):
            for lab, c in coef[i][j].items():
                _acc(g, lab, c)
    return WbaElement(Q, g)


# -- assembly ----------------------------------------------------------


@dataclass
class StabilizationStep:
    m: int
    source_dim: int
    target_dim: int
    bijective: bool


@dataclass
class AssembledWha:
    r: int
    grouplike: dict
    stabilization_degree: int
    even_basis: list
    odd_basis: list
    mult: dict
    comult: dict
    counit: dict
    unit: dict
    steps: list[StabilizationStep]
    quotient: Quotient
    field: LevelField
    axioms: AxiomReport | None = None
    representative_failures: list = field(default_factory=list)
    antipode: dict | None = None
    antipode_report: dict | None = None

    @property
    def even_dimension(self) -> int:
        return len(self.even_basis)

    @property
    def odd_dimension(self) -> int:
        return len(self.odd_basis)

    @property
    def dimension(self) -> int:
        return self.even_dimension + self.odd_dimension

    @property
    def basis(self) -> list:
        return self.even_basis + self.odd_basis

    # the structure-map interface of the axiom checker
    def degree(self, a) -> int:
        return 0

    def label_repr(self, a) -> str:
        return self.quotient.label_repr(a)

    def unit_terms(self) -> dict:
        return dict(self.unit)

    def mult_basis(self, a, b) -> dict:
        return self.mult.get((a, b), {})

    def comult_basis(self, a) -> dict:
        return self.comult[a]

    def counit_basis(self, a):
        return self.counit[a]

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for k, v in self.mult.get((a, b), {}).items():
                    _acc(out, k, ca * cb * v)
        return out

    def eps_t(self, x: Mapping) -> dict:
        """e(1'x) 1''."""
        out: dict = {}
        for (u1, u2), c in self._unit_coproduct().items():
            e = _counit_vec(self.counit, self.multiply({u1: c}, x))
            if e:
                _acc(out, u2, e)
        return out

    def eps_s(self, x: Mapping) -> dict:
        """1' e(x 1'')."""
        out: dict = {}
        for (u1, u2), c in self._unit_coproduct().items():
            e = _counit_vec(self.counit, self.multiply(x, {u2: c}))
            if e:
                _acc(out, u1, e)
        return out

    def _unit_coproduct(self) -> dict:
        hit = getattr(self, "_d1", None)
        if hit is None:
            hit = {}
            for u, cu in self.unit.items():
                for pair, c in self.comult[u].items():
                    _acc(hit, pair, cu * c)
            self._d1 = hit
        return hit


def _counit_vec(counit: Mapping, vec: Mapping):
    total = 0
    for k, v in vec.items():
        e = counit[k]
        if e:
            total = v * e + total
    return total


class _Stabilizer:
    """Multiplication by g between canonical degrees, with cached inverses."""

    def __init__(self, Q: Quotient, g: dict, F: LevelField):
        self.Q = Q
        self.g = WbaElement(Q.algebra, g)
        self.F = F
        self._maps: dict[int, ExactMatrix] = {}
        self._inv: dict[int, ExactMatrix] = {}

    def matrix(self, m: int) -> ExactMatrix:
        hit = self._maps.get(m)
        if hit is None:
            src, dst = self.Q.basis(m), self.Q.basis(m + 2)
            pos = {b: i for i, b in enumerate(dst)}
            M = ExactMatrix.zeros(len(dst), len(src), self.F)
            alg = self.Q.algebra
            for j, a in enumerate(src):
                img = self.Q.reduce_terms(alg.multiply(self.g, WbaElement(alg, {a: 1})).terms)
                for k, c in img.items():
                    M[pos[k], j] = c
            hit = self._maps[m] = M
        return hit

    def bijective(self, m: int) -> bool:
        M = self.matrix(m)
        return M.nrows == M.ncols and M.rank() == M.ncols

    def push(self, vec: Mapping, m: int) -> dict:
        src, dst = self.Q.basis(m), self.Q.basis(m + 2)
        M = self.matrix(m)
        x = [self.F(vec.get(b, 0)) for b in src]
        out = {}
        for i, b in enumerate(dst):
            c = sum((M[i, j] * x[j] for j in range(len(src)) if x[j]), self.F.zero())
            if c:
                out[b] = c
        return out

    def pull(self, vec: Mapping, m: int) -> dict:
        """Preimage of a degree m + 2 vector in degree m."""
        inv = self._inv.get(m)
        if inv is None:
            inv = self._inv[m] = self.matrix(m).inverse()
        src, dst = self.Q.basis(m), self.Q.basis(m + 2)
        y = [self.F(vec.get(b, 0)) for b in dst]
        out = {}
        for i, b in enumerate(src):
            c = sum((inv[i, j] * y[j] for j in range(len(dst)) if y[j]), self.F.zero())
            if c:
                out[b] = c
        return out

    def pull_to(self, vec: Mapping, m: int, base: int) -> dict:
        while m > base:
            vec = self.pull(vec, m - 2)
            m -= 2
        return vec


def default_degree_cap(r: int) -> int:
    return 2 * (r - 2) + 2


def assemble_wha(
    r: int,
    max_degree: int | None = None,
    grouplike: str | Mapping = "normalized",
    root_exponent: int = 1,
    check_axioms: bool = True,
    check_representatives: bool = True,
) -> AssembledWha:
    """Stabilize multiplication by the group-like and transport the structure maps.

    ``grouplike`` is ``"normalized"`` (the r-form normalized solution in
    degree 2), ``"closed-form"`` (:func:`grouplike_g2`) or explicit terms.
    """
    M = default_degree_cap(r) if max_degree is None else max_degree
    R = derive_r_matrix(r, root_exponent)
    F = R.field
    Q = frt_quotient(sl2_dimension_graph(r), R)
    if isinstance(grouplike, str):
        if grouplike == "closed-form":
            g = Q.reduce_terms(grouplike_g2(r, Q.algebra, root_exponent).terms)
        elif grouplike == "normalized":
            sol = grouplike_solve(Q, 2, R)
            if len(sol.normalized or []) != 1:
                raise StabilizationError(f"expected one normalized degree-2 group-like, found {len(sol.normalized or [])}")
            g = sol.normalized[0]
        else:
            raise ValueError(f"unknown group-like choice {grouplike!r}")
    else:
        g = Q.reduce_terms(dict(grouplike))
    st = _Stabilizer(Q, g, F)
    steps: list[StabilizationStep] = []
    status: dict[int, bool] = {}
    for m in range(0, M - 1):
        status[m] = st.bijective(m)
        steps.append(StabilizationStep(m, Q.dimension(m), Q.dimension(m + 2), status[m]))
    m0 = None
    for cand in range(0, M - 1, 2):
        if all(status[m] for m in range(cand, M - 1)):
            m0 = cand
            break
    if m0 is None or m0 + 1 > M - 2:
        bad = [m for m in range(0, M - 1) if not status[m]]
        first = bad[-1] if bad else M - 2
        raise StabilizationError(f"multiplication by g is not bijective from degree {first} to {first + 2} (cap {M})")
    even, odd = list(Q.basis(m0)), list(Q.basis(m0 + 1))
    alg = Q.algebra

    def product(a, b) -> dict:
        d = a[0] + b[0]
        raw = Q.reduce_terms(alg.mult_basis(a, b))
        return st.pull_to(raw, d, m0 + (d - m0) % 2)

    basis = even + odd
    mult = {}
    for a in basis:
        for b in basis:
            v = product(a, b)
            if v:
                mult[(a, b)] = v
    comult = {a: Q.comult_basis(a) for a in basis}
    counit = {a: Q.counit_basis(a) for a in basis}
    unit = Q.unit_terms()
    for m in range(0, m0, 2):
        unit = st.push(unit, m)
    out = AssembledWha(r, g, m0, even, odd, mult, comult, counit, unit, steps, Q, F)
    if check_representatives:
        # products computed from the g-shifted representative of the left factor
        for a in basis:
            shifted = st.push({a: F.one()}, a[0])
            for b in basis:
                raw: dict = {}
                for k, c in shifted.items():
                    for kk, v in Q.reduce_terms(alg.mult_basis(k, b)).items():
                        _acc(raw, kk, c * v)
                d = a[0] + b[0] + 2
                if st.pull_to(raw, d, m0 + (d - m0) % 2) != mult.get((a, b), {}):
                    out.representative_failures.append((a, b))
    if check_axioms:
        out.axioms = check_wba_axioms(out, basis, None)
    return out


# -- antipode ----------------------------------------------------------


def _components(equations: list[dict]) -> list[list[int]]:
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eq in equations:
        ks = list(eq)
        for k in ks[1:]:
            ra, rb = find(ks[0]), find(k)
            if ra != rb:
                parent[ra] = rb
    groups: dict = defaultdict(list)
    for i, eq in enumerate(equations):
        if eq:
            groups[find(next(iter(eq)))].append(i)
    return list(groups.values())


def solve_antipode(h: AssembledWha) -> dict:
    """Solve id*S = e_t, S*id = e_s and e_s*S = S exactly.

    Given the first two, the third is equivalent to S*id*S = S, so the
    system is linear.  The result is stored on ``h`` and returned as
    {basis label: {basis label: coeff}}.
    """
    basis = h.basis
    F = h.field
    one = F.one()
    rows: list[tuple[dict, object]] = []
    for x in basis:
        et, es = h.eps_t({x: one}), h.eps_s({x: one})
        # id * S = e_t
        lhs: dict = defaultdict(dict)
        rhs_s: dict = defaultdict(dict)
        third: dict = defaultdict(dict)
        for (x1, x2), c in h.comult[x].items():
            for j in basis:
                for k, v in h.mult.get((x1, j), {}).items():
                    _acc(lhs[k], (j, x2), c * v)
                for k, v in h.mult.get((j, x2), {}).items():
                    _acc(rhs_s[k], (j, x1), c * v)
            for u, cu in h.eps_s({x1: one}).items():
                for j in basis:
                    for k, v in h.mult.get((u, j), {}).items():
                        _acc(third[k], (j, x2), c * cu * v)
        for k in basis:
            rows.append((dict(lhs.get(k, {})), et.get(k, F.zero())))
            rows.append((dict(rhs_s.get(k, {})), es.get(k, F.zero())))
            eq = dict(third.get(k, {}))
            _acc(eq, (k, x), -one)
            rows.append((eq, F.zero()))
    variables = [(j, y) for y in basis for j in basis]
    order = {v: i for i, v in enumerate(variables)}
    key = order.__getitem__
    solution: dict = {}
    free = 0
    eqs = [r for r in rows if r[0] or r[1]]
    comps = _components([e for e, _ in eqs])
    seen = set()
    try:
        for comp in comps:
            sub = [eqs[i] for i in comp]
            vs = sorted({v for e, _ in sub for v in e}, key=key)
            seen.update(vs)
            part, ker = sparse_solve(sub, vs, one, key=key)
            free += len(ker)
            solution.update(part)
        for e, b in eqs:
            if not e and b:
                raise InconsistentSystemError("constant equation")
    except InconsistentSystemError as exc:
        h.antipode_report = {"exists": False, "unique": False, "free_parameters": None}
        raise AntipodeError("antipode equations are inconsistent") from exc
    free += sum(1 for v in variables if v not in seen)
    S: dict = {y: {} for y in basis}
    for (j, y), c in solution.items():
        S[y][j] = c
    h.antipode = S
    report = {"exists": True, "unique": free == 0, "free_parameters": free}
    report.update(check_antipode(h, S))
    h.antipode_report = report
    if free:
        raise AntipodeError(f"antipode is not unique: {free} free parameters")
    return S


def _apply(S: Mapping, vec: Mapping) -> dict:
    out: dict = {}
    for y, c in vec.items():
        for j, v in S[y].items():
            _acc(out, j, c * v)
    return out


def check_antipode(h: AssembledWha, S: Mapping) -> dict:
    """The three antipode axioms and the anti-(co)multiplicativity checks, as failure counts."""
    basis = h.basis
    one = h.field.one()
    ax1 = ax2 = ax3 = 0
    for x in basis:
        a1: dict = {}
        a2: dict = {}
        a3: dict = {}
        for (x1, x2), c in h.comult[x].items():
            for k, v in h.multiply({x1: c}, S[x2]).items():
                _acc(a1, k, v)
            for k, v in h.multiply(S[x1], {x2: c}).items():
                _acc(a2, k, v)
            # (S * id * S)(x) = S(x1) x2 S(x3)
            for (y1, y2), d in h.comult[x2].items():
                left = h.multiply(S[x1], {y1: c * d})
                for k, v in h.multiply(left, S[y2]).items():
                    _acc(a3, k, v)
        ax1 += a1 != h.eps_t({x: one})
        ax2 += a2 != h.eps_s({x: one})
        ax3 += a3 != {k: v for k, v in S[x].items() if v}
    anti_mult = 0
    for a in basis:
        for b in basis:
            if _apply(S, h.mult.get((a, b), {})) != h.multiply(S[b], S[a]):
                anti_mult += 1
    anti_comult = 0
    for x in basis:
        lhs: dict = {}
        for y, c in S[x].items():
            for pair, v in h.comult[y].items():
                _acc(lhs, pair, c * v)
        rhs: dict = {}
        for (x1, x2), c in h.comult[x].items():
            for j, u in S[x2].items():
                for k, v in S[x1].items():
                    _acc(rhs, (j, k), c * u * v)
        anti_comult += lhs != rhs
    unit_fixed = _apply(S, h.unit) == {k: v for k, v in h.unit.items() if v}
    return {
        "axiom_id_S": ax1,
        "axiom_S_id": ax2,
        "axiom_S_id_S": ax3,
        "anti_multiplicative_failures": anti_mult,
        "anti_comultiplicative_failures": anti_comult,
        "unit_fixed": unit_fixed,
    }
