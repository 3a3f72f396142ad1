"""Exhaustive exact verification of the weak bialgebra axioms.

The checker only talks to an algebra through basis-level structure maps:

* ``unit_terms()`` -> {label: coeff}
* ``mult_basis(a, b)`` -> {label: coeff}
* ``comult_basis(a)`` -> {(label, label): coeff}
* ``counit_basis(a)`` -> coeff
* ``degree(a)`` and ``label_repr(a)``

Every structure map is evaluated on every basis tuple allowed by the
degree cap, and each identity is compared as a sparse multilinear map.  A
tuple of basis elements is in scope when the sum of their degrees is at
most the cap, so every intermediate product stays within it.  Products
that vanish are known to vanish because they were evaluated, which keeps
the enumeration proportional to the number of nonzero contributions.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

IDENTITIES = (
    "associativity",
    "unit",
    "coassociativity",
    "counit",
    "multiplicativity",
    "weak counit",
    "weak unit",
    "counital maps",
)


@dataclass
class AxiomFailure:
    identity: str
    witness: str
    detail: str = ""


@dataclass
class AxiomReport:
    checked: dict[str, int] = field(default_factory=dict)
    failures: list[AxiomFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def failed_identities(self) -> set[str]:
        return {f.identity for f in self.failures}

    def summary(self) -> str:
        lines = []
        bad = self.failed_identities()
        for name, n in self.checked.items():
            lines.append(f"{'FAIL' if name in bad else 'ok  '} {name} ({n} basis tuples)")
        for f in self.failures[:10]:
            lines.append(f"  {f.identity}: {f.witness} {f.detail}")
        return "\n".join(lines)


def _acc(target: dict, key, c) -> None:
    v = target.get(key)
    target[key] = c if v is None else v + c


def _prune(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class _Tables:
    """Structure constants of an algebra on the in-scope basis tuples."""

    def __init__(self, alg, basis: Sequence, cap: int | None):
        self.alg = alg
        self.basis = list(basis)
        self.deg = {a: alg.degree(a) for a in self.basis}
        self.cap = cap
        by_deg: dict[int, list] = defaultdict(list)
        for a in self.basis:
            by_deg[self.deg[a]].append(a)
        self.by_deg = by_deg
        self.mult: dict = {}
        self.right: dict = defaultdict(list)
        self.left: dict = defaultdict(list)
        mb = alg.mult_basis
        for da, As in by_deg.items():
            for db, Bs in by_deg.items():
                if not self.ok(da + db):
                    continue
                for a in As:
                    for b in Bs:
                        v = mb(a, b)
                        if v:
                            if not all(v.values()):
                                v = _prune(v)
                            if v:
                                self.mult[(a, b)] = v
                                self.right[a].append((b, v))
                                self.left[b].append((a, v))
        self.pairs_checked = sum(
            len(As) * len(Bs) for da, As in by_deg.items() for db, Bs in by_deg.items() if self.ok(da + db)
        )
        self.comult = {a: _prune(alg.comult_basis(a)) for a in self.basis}
        self.comult_first: dict = defaultdict(list)
        for b, d in self.comult.items():
            for (b1, b2), c in d.items():
                self.comult_first[b1].append((b, b2, c))
        self.counit = {a: alg.counit_basis(a) for a in self.basis}
        self.unit = _prune(alg.unit_terms())
        self.eps_right: dict = defaultdict(list)
        self.eps_left: dict = defaultdict(list)
        for (a, b), v in self.mult.items():
            e = self.eps(v)
            if e:
                self.eps_right[a].append((b, e))
                self.eps_left[b].append((a, e))
        self.d1 = self._unit_coproduct()
        self._by_first: dict = defaultdict(list)
        self._by_second: dict = defaultdict(list)
        for (u1, u2), c in self.d1.items():
            self._by_first[u1].append((u2, c))
            self._by_second[u2].append((u1, c))

    def integral(self) -> bool:
        return all(type(c) is int for d in self.comult.values() for c in d.values()) and all(
            type(c) is int for v in self.mult.values() for c in v.values()
        )

    def int_tables(self) -> _IntTables:
        if getattr(self, "_int", None) is None:
            self._int = _IntTables(self)
        return self._int

    def ok(self, d: int) -> bool:
        return self.cap is None or d <= self.cap

    def eps(self, vec: dict):
        total = 0
        for k, v in vec.items():
            c = self.counit.get(k)
            if c is None:
                c = self.alg.counit_basis(k)
            if c:
                total = v * c + total
        return total

    def mult_vec(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                v = self.mult.get((a, b))
                if v is None:
                    continue
                for k, w in v.items():
                    _acc(out, k, ca * cb * w)
        return _prune(out)

    def _unit_coproduct(self) -> dict:
        d1: dict = {}
        for u, cu in self.unit.items():
            for pair, c in self.comult.get(u, {}).items():
                _acc(d1, pair, cu * c)
        return _prune(d1)

    def counital_target(self, x: dict) -> dict:
        """e_t(x) = e(1'x) 1''."""
        by_first = self._by_first
        out: dict = {}
        for a, ca in x.items():
            for u1, e in self.eps_left.get(a, ()):
                for u2, c in by_first.get(u1, ()):
                    _acc(out, u2, ca * c * e)
        return _prune(out)

    def counital_source(self, x: dict) -> dict:
        """e_s(x) = 1' e(x 1'')."""
        by_second = self._by_second
        out: dict = {}
        for a, ca in x.items():
            for u2, e in self.eps_right.get(a, ()):
                for u1, c in by_second.get(u2, ()):
                    _acc(out, u1, ca * c * e)
        return _prune(out)


def structure_tables(alg, basis: Sequence, max_degree: int | None = None) -> _Tables:
    return _Tables(alg, basis, max_degree)


def _record(report: AxiomReport, name: str, lhs: dict, rhs: dict, fmt: Callable) -> None:
    bad = []
    for k in set(lhs) | set(rhs):
        if _prune(lhs.get(k, {})) != _prune(rhs.get(k, {})):
            bad.append(k)
    for k in sorted(bad, key=repr)[:5]:
        report.failures.append(AxiomFailure(name, fmt(k), f"lhs={lhs.get(k)} rhs={rhs.get(k)}"))


def check_wba_axioms(alg, basis: Sequence, max_degree: int | None = None) -> AxiomReport:
    """Verify every weak bialgebra identity on all in-scope basis tuples."""
    T = _Tables(alg, basis, max_degree)
    rep = AxiomReport()
    name = alg.label_repr

    def fmt(key):
        if isinstance(key, tuple) and key and isinstance(key[0], tuple):
            return "(" + ", ".join(name(k) for k in key) + ")"
        return name(key)

    cap = T.cap
    deg = T.deg
    triples = sum(
        len(A) * len(B) * len(C)
        for da, A in T.by_deg.items()
        for db, B in T.by_deg.items()
        for dc, C in T.by_deg.items()
        if T.ok(da + db + dc)
    )

    # associativity: (ab)c = a(bc)
    lhs: dict = {}
    rhs: dict = {}
    right_get, left_get = T.right.get, T.left.get
    for (a, b), v in T.mult.items():
        dab = deg[a] + deg[b]
        for d, cd in v.items():
            for c, w in right_get(d, ()):
                if cap is not None and dab + deg[c] > cap:
                    continue
                slot = lhs.setdefault((a, b, c), {})
                for k, x in w.items():
                    _acc(slot, k, cd * x)
    for (b, c), v in T.mult.items():
        dbc = deg[b] + deg[c]
        for d, cd in v.items():
            for a, w in left_get(d, ()):
                if cap is not None and dbc + deg[a] > cap:
                    continue
                slot = rhs.setdefault((a, b, c), {})
                for k, x in w.items():
                    _acc(slot, k, cd * x)
    rep.checked["associativity"] = triples
    _record(rep, "associativity", lhs, rhs, fmt)
    del lhs, rhs

    # unit: 1a = a = a1
    lhs, rhs, ident = {}, {}, {}
    for a in T.basis:
        ident[a] = {a: 1}
        lhs[a] = T.mult_vec(T.unit, {a: 1})
        rhs[a] = T.mult_vec({a: 1}, T.unit)
    rep.checked["unit"] = len(T.basis)
    _record(rep, "unit", lhs, ident, fmt)
    _record(rep, "unit", rhs, ident, fmt)

    # coassociativity and counit
    for a in _coassociativity_failures(T)[:5]:
        rep.failures.append(AxiomFailure("coassociativity", name(a)))
    cl, cr = {}, {}

    def counit_of(x):
        c = T.counit.get(x)
        return T.alg.counit_basis(x) if c is None else c

    for a in T.basis:
        el: dict = {}
        er: dict = {}
        for (x, y), c in T.comult[a].items():
            ex, ey = counit_of(x), counit_of(y)
            if ex:
                _acc(el, y, c * ex)
            if ey:
                _acc(er, x, c * ey)
        cl[a], cr[a] = el, er
    rep.checked["coassociativity"] = len(T.basis)
    rep.checked["counit"] = len(T.basis)
    _record(rep, "counit", cl, ident, fmt)
    _record(rep, "counit", cr, ident, fmt)
    del cl, cr, ident

    # multiplicativity: D(ab) = D(a)D(b)
    comult = T.comult
    mult_get, first_get = T.mult.get, T.comult_first.get
    if len(T.basis) > 200 and T.integral():
        for a, b in _multiplicativity_failures_int(T):
            rep.failures.append(AxiomFailure("multiplicativity", fmt((a, b))))
    else:
        lhs, rhs = {}, {}
        for (a, b), v in T.mult.items():
            slot = lhs.setdefault((a, b), {})
            for d, cd in v.items():
                for pair, c in comult.get(d, {}).items():
                    _acc(slot, pair, cd * c)
        for a in T.basis:
            da = deg[a]
            for (a1, a2), ca in comult[a].items():
                for b1, v1 in right_get(a1, ()):
                    for b, b2, cb in first_get(b1, ()):
                        v2 = mult_get((a2, b2))
                        if v2 is None or (cap is not None and da + deg[b] > cap):
                            continue
                        slot = rhs.get((a, b))
                        if slot is None:
                            slot = rhs[(a, b)] = {}
                        f = ca * cb
                        for x, cx in v1.items():
                            fx = f * cx
                            for y, cy in v2.items():
                                k = (x, y)
                                old = slot.get(k)
                                slot[k] = fx * cy if old is None else old + fx * cy
        _record(rep, "multiplicativity", lhs, rhs, fmt)
        del lhs, rhs
    rep.checked["multiplicativity"] = T.pairs_checked

    # weak counit: e(abc) = e(ab')e(b''c) = e(ab'')e(b'c)
    lhs, r1, r2 = {}, {}, {}
    eps_right, eps_left = T.eps_right.get, T.eps_left.get
    for (a, b), v in T.mult.items():
        dab = deg[a] + deg[b]
        for d, cd in v.items():
            for c, e in eps_right(d, ()):
                if cap is None or dab + deg[c] <= cap:
                    slot = lhs.setdefault((a, b, c), {})
                    _acc(slot, 0, cd * e)
    for b in T.basis:
        db = deg[b]
        for (b1, b2), cb in comult[b].items():
            for target, first, second in ((r1, b1, b2), (r2, b2, b1)):
                for a, e1 in eps_left(first, ()):
                    dab = deg[a] + db
                    for c, e2 in eps_right(second, ()):
                        if cap is None or dab + deg[c] <= cap:
                            slot = target.setdefault((a, b, c), {})
                            _acc(slot, 0, cb * e1 * e2)
    rep.checked["weak counit"] = triples
    _record(rep, "weak counit", lhs, r1, fmt)
    _record(rep, "weak counit", lhs, r2, fmt)
    del lhs, r1, r2

    # weak unit: (D (x) id)D(1) = (D(1) (x) 1)(1 (x) D(1)) = (1 (x) D(1))(D(1) (x) 1)
    d1 = T.d1
    L: dict = {}
    for (x, y), c in d1.items():
        for (x1, x2), c2 in comult.get(x, {}).items():
            _acc(L, (x1, x2, y), c * c2)
    R1: dict = {}
    R2: dict = {}
    for (x1, x2), c in d1.items():
        for (y1, y2), c2 in d1.items():
            for k, w in T.mult.get((x2, y1), {}).items():
                _acc(R1, (x1, k, y2), c * c2 * w)
            for k, w in T.mult.get((y1, x2), {}).items():
                _acc(R2, (x1, k, y2), c * c2 * w)
    rep.checked["weak unit"] = 1
    _record(rep, "weak unit", {"1": L}, {"1": R1}, lambda k: "D(1)")
    _record(rep, "weak unit", {"1": L}, {"1": R2}, lambda k: "D(1)")

    # counital maps: idempotent, with commuting images
    es = {a: T.counital_source({a: 1}) for a in T.basis}
    et = {a: T.counital_target({a: 1}) for a in T.basis}
    for a in T.basis:
        if T.counital_source(es[a]) != es[a]:
            rep.failures.append(AxiomFailure("counital maps", name(a), "source map not idempotent"))
        if T.counital_target(et[a]) != et[a]:
            rep.failures.append(AxiomFailure("counital maps", name(a), "target map not idempotent"))
    S = {tuple(sorted(v.items(), key=repr)): v for v in es.values() if v}
    Tt = {tuple(sorted(v.items(), key=repr)): v for v in et.values() if v}
    for x in S.values():
        for y in Tt.values():
            if T.mult_vec(x, y) != T.mult_vec(y, x):
                rep.failures.append(AxiomFailure("counital maps", f"{x} / {y}", "images do not commute"))
    rep.checked["counital maps"] = len(T.basis)
    return rep


def _coassociativity_failures(T: _Tables) -> list:
    """Basis elements a with (D (x) id)D(a) != (id (x) D)D(a)."""
    if len(T.basis) > 200 and T.integral():
        return _coassociativity_failures_int(T)
    bad = []
    for a in T.basis:
        L: dict = {}
        R: dict = {}
        for (x, y), c in T.comult[a].items():
            cx = T.comult.get(x)
            if cx is None:
                cx = _prune(T.alg.comult_basis(x))
            for (x1, x2), c2 in cx.items():
                _acc(L, (x1, x2, y), c * c2)
            cy = T.comult.get(y)
            if cy is None:
                cy = _prune(T.alg.comult_basis(y))
            for (y1, y2), c2 in cy.items():
                _acc(R, (x, y1, y2), c * c2)
        if _prune(L) != _prune(R):
            bad.append(a)
    return bad


def _gather(ptr, ids):
    """Flat positions of the CSR rows ``ids`` and the row each came from."""
    import numpy as np

    lens = ptr[ids + 1] - ptr[ids]
    rows = np.repeat(np.arange(len(ids)), lens)
    offs = np.repeat(np.cumsum(lens) - lens, lens)
    return ptr[ids][rows] + (np.arange(int(lens.sum())) - offs), rows


def _summed(keys, vals):
    """Combine duplicate keys, drop zeros, return sorted keys."""
    import numpy as np

    if len(keys) == 0:
        return keys, vals
    if np.all(vals == 1):
        keys = np.sort(keys)
        if len(keys) < 2 or np.all(keys[1:] != keys[:-1]):
            return keys, vals
    else:
        order = np.argsort(keys, kind="stable")
        keys, vals = keys[order], vals[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    sums = np.add.reduceat(vals, starts)
    keep = sums != 0
    return keys[starts][keep], sums[keep]


class _IntTables:
    """Integer structure constants as CSR arrays over a label index."""

    def __init__(self, T: _Tables):
        import numpy as np

        labels = list(T.basis)
        index = {a: i for i, a in enumerate(labels)}
        pos = 0
        while pos < len(labels):  # close the label set under the coproduct
            a = labels[pos]
            if a not in T.comult:
                T.comult[a] = _prune(T.alg.comult_basis(a))
            for pair in T.comult[a]:
                for x in pair:
                    if x not in index:
                        index[x] = len(labels)
                        labels.append(x)
            pos += 1
        B = len(labels)
        if B**4 >= 2**62:
            raise OverflowError("basis too large for packed keys")
        self.labels, self.index, self.B, self.nb = labels, index, B, len(T.basis)
        self.deg = np.array([T.alg.degree(a) for a in labels], dtype=np.int64)
        ptr = np.zeros(B + 1, dtype=np.int64)
        X, Y, C = [], [], []
        for i, a in enumerate(labels):
            d = T.comult[a]
            ptr[i + 1] = ptr[i] + len(d)
            for (x, y), c in d.items():
                X.append(index[x])
                Y.append(index[y])
                C.append(c)
        self.cptr = ptr
        self.X = np.asarray(X, dtype=np.int64)
        self.Y = np.asarray(Y, dtype=np.int64)
        self.C = np.asarray(C, dtype=np.int64)
        # products, sorted by (left, right)
        rows = []
        for (a, b), v in T.mult.items():
            for k, c in v.items():
                if k not in index:
                    raise KeyError("product leaves the closed label set")
                rows.append((index[a], index[b], index[k], c))
        rows.sort()
        M = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
        self.ML, self.MR, self.MO, self.MC = M[:, 0], M[:, 1], M[:, 2], M[:, 3]
        self.lptr = np.searchsorted(self.ML, np.arange(B + 1)).astype(np.int64)
        self.pairkey = self.ML * B + self.MR
        self.cap = T.cap

    def comult_of(self, ids):
        k, rows = _gather(self.cptr, ids)
        return rows, self.X[k], self.Y[k], self.C[k]

    def products_with_left(self, ids):
        k, rows = _gather(self.lptr, ids)
        return rows, self.MR[k], self.MO[k], self.MC[k]

    def products_of_pairs(self, left, right):
        """All (row, output, coeff) for the products left[row] * right[row]."""
        import numpy as np

        key = left * self.B + right
        lo = np.searchsorted(self.pairkey, key, side="left")
        hi = np.searchsorted(self.pairkey, key, side="right")
        lens = hi - lo
        rows = np.repeat(np.arange(len(key)), lens)
        offs = np.repeat(np.cumsum(lens) - lens, lens)
        k = lo[rows] + (np.arange(int(lens.sum())) - offs)
        return rows, self.MO[k], self.MC[k]

    def chunks(self, weight, budget=4_000_000):
        lo = 0
        while lo < self.nb:
            hi, used = lo, 0
            while hi < self.nb and used < budget:
                used += weight(hi)
                hi += 1
            yield lo, hi
            lo = hi


def _differing_rows(kl, vl, kr, vr, lo, hi, width):
    import numpy as np

    if np.array_equal(kl, kr) and np.array_equal(vl, vr):
        return []
    bad = []
    for a in range(lo, hi):
        ml = (kl // width) == a
        mr = (kr // width) == a
        if not (np.array_equal(kl[ml], kr[mr]) and np.array_equal(vl[ml], vr[mr])):
            bad.append(a)
    return bad


def _coassociativity_failures_int(T: _Tables) -> list:
    """Vectorized coassociativity check for integer structure constants."""
    import numpy as np

    I = T.int_tables()
    B, ptr = I.B, I.cptr
    bad: list[int] = []

    def weight(i):
        n = int(ptr[i + 1] - ptr[i])
        return n * max(1, n)

    for lo, hi in I.chunks(weight):
        ids = np.arange(lo, hi)
        rows, x, y, c = I.comult_of(ids)
        arow = ids[rows]
        rx, x1, x2, cx = I.comult_of(x)
        kl = ((arow[rx] * B + x1) * B + x2) * B + y[rx]
        vl = c[rx] * cx
        ry, y1, y2, cy = I.comult_of(y)
        kr = ((arow[ry] * B + x[ry]) * B + y1) * B + y2
        vr = c[ry] * cy
        bad += _differing_rows(*_summed(kl, vl), *_summed(kr, vr), lo, hi, B**3)
    return [I.labels[i] for i in bad]


def _multiplicativity_failures_int(T: _Tables) -> list:
    """Vectorized check of D(ab) = D(a)D(b) for integer structure constants."""
    import numpy as np

    I = T.int_tables()
    B, cap = I.B, I.cap
    bad: list[tuple] = []
    lp, cp = I.lptr, I.cptr

    def weight(i):
        n = int(cp[i + 1] - cp[i])
        return max(1, n) * (1 + int(lp[i + 1] - lp[i]))

    for lo, hi in I.chunks(weight, 2_000_000):
        ids = np.arange(lo, hi)
        # lhs: products a*b in the chunk, then their coproducts
        k = np.arange(lp[lo], lp[hi])
        ra, rb, ro, rc = I.ML[k], I.MR[k], I.MO[k], I.MC[k]
        rr, x, y, cxy = I.comult_of(ro)
        kl = ((ra[rr] * B + rb[rr]) * B + x) * B + y
        vl = rc[rr] * cxy
        # rhs: sum a'b' (x) a''b''
        rows, a1, a2, ca = I.comult_of(ids)
        a = ids[rows]
        r1, b1, x, cx = I.products_with_left(a1)
        a, a2, ca = a[r1], a2[r1], ca[r1] * cx
        r2, b, b2, cb = _first_leg(I, b1)
        a, a2, x, ca = a[r2], a2[r2], x[r2], ca[r2] * cb
        keep = b < I.nb
        if cap is not None:
            keep &= I.deg[a] + I.deg[b] <= cap
        if not keep.all():
            a, a2, x, ca, b, b2 = a[keep], a2[keep], x[keep], ca[keep], b[keep], b2[keep]
        r3, y, cy = I.products_of_pairs(a2, b2)
        kr = ((a[r3] * B + b[r3]) * B + x[r3]) * B + y
        vr = ca[r3] * cy
        kl, vl = _summed(kl, vl)
        kr, vr = _summed(kr, vr)
        if np.array_equal(kl, kr) and np.array_equal(vl, vr):
            continue
        diff = np.setxor1d(kl, kr)
        common = np.intersect1d(kl, kr)
        wl = vl[np.searchsorted(kl, common)]
        wr = vr[np.searchsorted(kr, common)]
        diff = np.concatenate([diff, common[wl != wr]])
        for key in np.unique(diff // B**2)[:5]:
            bad.append((I.labels[int(key // B)], I.labels[int(key % B)]))
    return bad


def _first_leg(I: _IntTables, b1):
    """Rows (b, b2, c) with D(b) containing b1 (x) b2, for each entry of b1."""
    import numpy as np

    if not hasattr(I, "fptr"):
        n = len(I.X)
        owner = np.repeat(np.arange(I.B), np.diff(I.cptr))
        order = np.argsort(I.X, kind="stable")
        I.f_owner, I.f_second, I.f_coeff = owner[order], I.Y[order], I.C[order]
        I.fptr = np.searchsorted(I.X[order], np.arange(I.B + 1)).astype(np.int64)
        assert I.fptr[-1] == n
    k, rows = _gather(I.fptr, b1)
    return rows, I.f_owner[k], I.f_second[k], I.f_coeff[k]
