from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fusionwha import PathWba, WbaElement, sl2_dimension_graph
from fusionwha.axioms import check_wba_axioms
from fusionwha.graph import graph_from_pairs
from fusionwha.path_wba import DegreeOverflowError, idempotent_rank, truncation_idempotent

from helpers import algebra, path


def lab(alg, p, q):
    return alg.label(p, q)


def test_unit_level_three():
    alg = algebra(3)
    assert alg.unit().terms == {(0, 0, 0): 1, (0, 0, 1): 1, (0, 1, 0): 1, (0, 1, 1): 1}


def test_unit_single_vertex():
    alg = PathWba(graph_from_pairs(1, []))
    assert alg.unit().terms == {(0, 0, 0): 1}


def test_unit_level_four_size():
    assert len(algebra(4).unit().terms) == 9


def test_composable_product():
    alg = algebra(3)
    x = alg.basis_element(path(3, 0, 1), path(3, 0, 1))
    y = alg.basis_element(path(3, 1, 0), path(3, 1, 0))
    assert x * y == alg.basis_element(path(3, 0, 1, 0), path(3, 0, 1, 0))


def test_non_composable_product_vanishes():
    alg = algebra(3)
    x = alg.basis_element(path(3, 0, 1), path(3, 0, 1))
    assert not (x * x)


def test_degree_overflow_is_an_error():
    alg = PathWba(sl2_dimension_graph(3), degree_cap=2)
    x = alg.basis_element(path(3, 0, 1), path(3, 0, 1))
    y = alg.basis_element(path(3, 1, 0, 1), path(3, 1, 0, 1))
    with pytest.raises(DegreeOverflowError):
        x * y


def test_coproduct_level_three():
    alg = algebra(3)
    a, b = path(3, 0, 1, 0), path(3, 1, 0, 1)
    d = alg.comultiply(alg.basis_element(a, b))
    assert d.terms == {(lab(alg, a, a), lab(alg, a, b)): 1, (lab(alg, a, b), lab(alg, b, b)): 1}


def test_coproduct_degree_zero():
    alg = algebra(4)
    d = alg.comultiply(alg.basis_element(path(4, 0), path(4, 2)))
    assert d.terms == {((0, 0, v), (0, v, 2)): 1 for v in range(3)}


def test_counit_examples():
    alg = algebra(3)
    a, b = path(3, 0, 1, 0), path(3, 1, 0, 1)
    assert alg.counit(alg.basis_element(a, a)) == 1
    assert alg.counit(alg.basis_element(a, b)) == 0
    assert alg.counit(alg.unit()) == 2


def test_counital_maps_examples():
    alg = algebra(3)
    a, b = path(3, 0, 1, 0), path(3, 1, 0, 1)
    assert alg.eps_s(alg.basis_element(a, a)).terms == {(0, 0, 0): 1, (0, 1, 0): 1}
    assert not alg.eps_s(alg.basis_element(a, b))
    alg4 = algebra(4)
    p = path(4, 0, 1, 2)
    assert alg4.eps_t(alg4.basis_element(p, p)).terms == {(0, 0, v): 1 for v in range(3)}


@pytest.mark.parametrize("r", [3, 4, 5])
def test_counital_closed_forms_match_definitions(r):
    """eps_s(x) = 1' e(x 1'') and eps_t(x) = e(1' x) 1'' on every basis element up to degree 2."""
    alg = algebra(r)
    unit = alg.unit()
    d1 = alg.comultiply(unit).terms
    for a in alg.basis_up_to(2):
        x = WbaElement(alg, {a: 1})
        es, et = {}, {}
        for (u1, u2), c in d1.items():
            e = alg.counit(x * WbaElement(alg, {u2: c}))
            if e:
                es[u1] = es.get(u1, 0) + e
            e = alg.counit(WbaElement(alg, {u1: c}) * x)
            if e:
                et[u2] = et.get(u2, 0) + e
        assert alg.eps_s(x).terms == {k: v for k, v in es.items() if v}
        assert alg.eps_t(x).terms == {k: v for k, v in et.items() if v}


def test_truncation_idempotent_level_three():
    g = sl2_dimension_graph(3)
    P = truncation_idempotent(g, 1, 1)
    assert len(P) == 4
    assert idempotent_rank(P) == 2


def test_truncation_degree_zero_is_diagonal():
    g = sl2_dimension_graph(5)
    assert idempotent_rank(truncation_idempotent(g, 0, 0)) == 4


@pytest.mark.parametrize("r", range(3, 7))
def test_truncation_rank_and_idempotency(r):
    g = sl2_dimension_graph(r)
    for m in range(3):
        for l in range(3):
            P = truncation_idempotent(g, m, l)
            assert idempotent_rank(P) == len(g.paths(m + l))
            for col in P.values():
                for k, v in col.items():
                    assert P[k] == {k: 1} and v == 1


# -- properties --------------------------------------------------------


@st.composite
def elements(draw, r=4, max_degree=2):
    alg = algebra(r)
    basis = alg.basis_up_to(max_degree)
    picks = draw(st.lists(st.tuples(st.sampled_from(basis), st.integers(-3, 3)), max_size=6))
    out = WbaElement(alg, {})
    for a, c in picks:
        out = out + WbaElement(alg, {a: c})
    return out


@given(elements())
def test_unit_laws(x):
    u = x.algebra.unit()
    assert u * x == x
    assert x * u == x


@given(elements())
def test_counit_law(x):
    alg = x.algebra
    left, right = {}, {}
    for (a, b), c in alg.comultiply(x).terms.items():
        if alg.counit_basis(a):
            left[b] = left.get(b, 0) + c
        if alg.counit_basis(b):
            right[a] = right.get(a, 0) + c
    assert WbaElement(alg, left) == x
    assert WbaElement(alg, right) == x


@given(st.sampled_from(algebra(4).basis_up_to(2)), st.sampled_from(algebra(4).basis_up_to(2)))
def test_grading(a, b):
    alg = algebra(4)
    prod = alg.mult_basis(a, b)
    assert all(k[0] == a[0] + b[0] for k in prod)
    assert all(x[0] == y[0] == a[0] for x, y in alg.comult_basis(a))


@pytest.mark.parametrize("r", [3, 4, 5])
def test_generated_in_degrees_zero_and_one(r):
    alg = algebra(r)
    for m in (2, 3):
        for a in alg.basis(m):
            p, q = alg.legs(a)
            prod = alg.unit()
            for k in range(m):
                pe, _ = p.split(k + 1)
                qe, _ = q.split(k + 1)
                step = alg.basis_element(pe.split(k)[1], qe.split(k)[1])
                prod = prod * step
            assert prod.terms == {a: 1}


# -- the axiom checker -------------------------------------------------


@pytest.mark.parametrize("r", range(3, 6))
def test_sl2_axioms(r):
    alg = algebra(r)
    assert check_wba_axioms(alg, alg.basis_up_to(4), 4).passed


class DroppedDelta(PathWba):
    """Multiplication that ignores the composability of the second legs."""

    def mult_basis(self, a, b):
        out = super().mult_basis(a, b)
        if out:
            return out
        p, _ = self.legs(a)
        r, _ = self.legs(b)
        if p.source == r.target:
            pr = p * r
            return {self.label(pr, pr): 1}
        return {}


def test_dropped_delta_breaks_multiplicativity():
    alg = DroppedDelta(sl2_dimension_graph(3))
    rep = check_wba_axioms(alg, alg.basis_up_to(2), 2)
    assert "multiplicativity" in rep.failed_identities()
    witnesses = [f.witness for f in rep.failures if f.identity == "multiplicativity"]
    assert "([(0)|(0)], [(0)|(1)])" in witnesses
