from __future__ import annotations

from functools import lru_cache

import pytest

from fusionwha import WbaElement
from fusionwha.wha_assembly import (
    AntipodeError,
    ComoduleError,
    StabilizationError,
    apply_linear,
    assemble_wha,
    compose_linear,
    default_degree_cap,
    fusion_oracle,
    grouplike_from_comodule,
    grouplike_g2,
    grouplike_solve,
    projector_q,
    solve_antipode,
    unit_copy_basis,
    verify_grouplike,
)

from helpers import derived, field, path, quotient
from oracles import OMEGA_DIMS, WHA_DIMS


@lru_cache(maxsize=None)
def assembled(r: int, which: str = "normalized"):
    h = assemble_wha(r, grouplike=which)
    solve_antipode(h)
    return h


def closed_g(r):
    Q = quotient(r)
    return grouplike_g2(r, Q.algebra)


def normalized_g(r):
    Q = quotient(r)
    return grouplike_g2(r, Q.algebra, weights="normalized")


# -- the projector -----------------------------------------------------


def test_projector_level_four_middle_vertex():
    F = field(4)
    P = projector_q(4)
    up, down = path(4, 1, 2, 1), path(4, 1, 0, 1)
    assert P[up][up] == F.qint(3) / (F.qint(2) * F.qint(2))
    assert P[down][up] == -F.qint(2).inverse()
    assert P[down][down] == F.qint(1) / (F.qint(2) * F.qint(2))


@pytest.mark.parametrize("r", range(3, 7))
def test_projector_is_idempotent(r):
    P = projector_q(r)
    PP = compose_linear(P, P)
    for p in P:
        assert {k: v for k, v in PP.get(p, {}).items() if v} == {k: v for k, v in P[p].items() if v}


@pytest.mark.parametrize("r", range(3, 7))
@pytest.mark.parametrize("scaling", ["closed-form", "quantum"])
def test_unit_copy_basis_spans_image(r, scaling):
    P = projector_q(r)
    for j, b in enumerate(unit_copy_basis(r, scaling=scaling)):
        assert apply_linear(P, b) == b
        assert all(p.source == p.target == j for p in b)


def test_unknown_scaling():
    with pytest.raises(ValueError):
        unit_copy_basis(4, scaling="other")


# -- the fusion oracle -------------------------------------------------


@pytest.mark.parametrize("r", sorted(OMEGA_DIMS))
def test_oracle_graph_dims(r):
    o = fusion_oracle(r)
    assert o.omega_dims == OMEGA_DIMS[r]
    assert o.graph_dims() == OMEGA_DIMS[r]


def test_oracle_level_three_constant():
    o = fusion_oracle(3)
    assert [o.predicted_degree_dimension(m) for m in range(6)] == [4] * 6


def test_oracle_level_five_degree_four():
    assert fusion_oracle(5).predicted_degree_dimension(4) == 52


@pytest.mark.parametrize("r", sorted(WHA_DIMS))
def test_oracle_total_dimension(r):
    assert fusion_oracle(r).total_dimension == WHA_DIMS[r]


def test_oracle_rejects_low_level():
    with pytest.raises(ValueError):
        fusion_oracle(2)


# -- group-like certificates -------------------------------------------


@pytest.mark.parametrize("r", range(3, 7))
def test_closed_form_grouplike_is_valid(r):
    cert = verify_grouplike(closed_g(r), quotient(r))
    assert cert.valid
    assert cert.x_fixed_ok
    assert cert.degree == 2


@pytest.mark.parametrize(
    "r",
    [3, 4, pytest.param(5, marks=pytest.mark.xfail(strict=True)), pytest.param(6, marks=pytest.mark.xfail(strict=True))],
)
def test_closed_form_grouplike_is_central(r):
    assert verify_grouplike(closed_g(r), quotient(r)).central


@pytest.mark.parametrize("r", range(3, 7))
def test_normalized_grouplike_is_central(r):
    cert = verify_grouplike(normalized_g(r), quotient(r))
    assert cert.valid and cert.central and cert.x_fixed_ok


def test_closed_form_centrality_residual_count_level_five():
    assert verify_grouplike(closed_g(5), quotient(5)).residual_sizes()["centrality"] == 24


@pytest.mark.parametrize("r", range(3, 6))
def test_unit_is_grouplike(r):
    Q = quotient(r)
    cert = verify_grouplike(Q.algebra.unit_terms(), Q)
    assert cert.valid and cert.central
    assert cert.degree == 0


def test_perturbed_grouplike_is_invalid():
    Q = quotient(4)
    g = dict(Q.reduce_terms(normalized_g(4).terms))
    k = min(g)
    g[k] = g[k] * 2
    assert not verify_grouplike(g, Q).valid


def test_inhomogeneous_candidate_rejected():
    Q = quotient(4)
    mixed = dict(Q.algebra.unit_terms())
    mixed.update(normalized_g(4).terms)
    with pytest.raises(ValueError):
        verify_grouplike(mixed, Q)


# -- the solver --------------------------------------------------------


def test_no_degree_one_grouplike_at_level_four():
    sol = grouplike_solve(quotient(4), 1, derived(4))
    assert sol.families == []


@pytest.mark.parametrize("r", range(3, 7))
def test_solver_degree_two_recovers_normalized(r):
    Q = quotient(r)
    sol = grouplike_solve(Q, 2, derived(r))
    target = Q.reduce_terms(normalized_g(r).terms)
    assert target in sol.normalized
    assert any(f.contains(closed_g(r)) for f in sol.families)


def test_solver_families_are_torus_orbits():
    Q = quotient(5)
    sol = grouplike_solve(Q, 2, derived(5))
    fam = next(f for f in sol.families if f.contains(closed_g(5)))
    assert fam.torus
    F = field(5)
    s = {v: F.one() * (v + 2) for v in fam.vertices}
    assert verify_grouplike(fam.member(s), Q, central_degree=-1).valid


@pytest.mark.parametrize("r", [4, 5])
def test_degree_four_contains_square(r):
    Q = quotient(r)
    h = WbaElement(Q.algebra, Q.reduce_terms(normalized_g(r).terms))
    sq = Q.reduce_terms(Q.multiply(h, h).terms)
    sol = grouplike_solve(Q, 4, derived(r))
    assert sq in sol.normalized


def test_solver_rejects_degree_above_cap():
    from fusionwha import frt_quotient, sl2_dimension_graph

    Q = frt_quotient(sl2_dimension_graph(4), derived(4), degree_cap=3)
    with pytest.raises(ValueError):
        grouplike_solve(Q, 4, derived(4))


# -- extraction from the unit copy -------------------------------------


@pytest.mark.parametrize("r", range(3, 7))
def test_extraction_quantum_basis_gives_normalized(r):
    Q = quotient(r)
    g = grouplike_from_comodule(Q, unit_copy_basis(r, scaling="quantum"))
    assert Q.reduce_terms(g.terms) == Q.reduce_terms(normalized_g(r).terms)


@pytest.mark.parametrize(
    "r",
    [3, pytest.param(4, marks=pytest.mark.xfail(strict=True)), pytest.param(5, marks=pytest.mark.xfail(strict=True))],
)
def test_extraction_closed_form_basis_gives_closed_form(r):
    Q = quotient(r)
    g = grouplike_from_comodule(Q, unit_copy_basis(r))
    assert Q.reduce_terms(g.terms) == Q.reduce_terms(closed_g(r).terms)


@pytest.mark.parametrize("r", [4, 5])
def test_extraction_any_basis_stays_in_the_orbit(r):
    Q = quotient(r)
    F = field(r)
    basis = [{p: c * (j + 2) for p, c in b.items()} for j, b in enumerate(unit_copy_basis(r))]
    g = grouplike_from_comodule(Q, basis)
    sol = grouplike_solve(Q, 2, derived(r))
    assert any(f.contains(g) for f in sol.families)
    assert verify_grouplike(g, Q, central_degree=-1).valid
    assert F.one()  # field is cached for the scaling above


def test_extraction_trivial_comodule_gives_unit():
    Q = quotient(4)
    basis = [{path(4, v): 1} for v in range(3)]
    g = grouplike_from_comodule(Q, basis)
    assert Q.reduce_terms(g.terms) == Q.reduce_terms(Q.algebra.unit_terms())


def test_extraction_rejects_non_subcomodule():
    Q = quotient(4)
    with pytest.raises(ComoduleError):
        grouplike_from_comodule(Q, [{path(4, 0, 1, 0): 1}])


def test_extraction_rejects_dependent_vectors():
    Q = quotient(4)
    b = unit_copy_basis(4)
    with pytest.raises(ComoduleError):
        grouplike_from_comodule(Q, [b[0], b[0]])


# -- assembly ----------------------------------------------------------


def test_default_degree_cap():
    assert default_degree_cap(4) == 6


@pytest.mark.parametrize("r", [3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_assembled_dimension(r):
    h = assembled(r)
    assert h.dimension == WHA_DIMS[r]
    assert h.axioms.passed, h.axioms.summary()
    assert h.representative_failures == []


def test_level_three_parities():
    h = assembled(3)
    assert (h.even_dimension, h.odd_dimension, h.stabilization_degree) == (4, 4, 0)


def test_level_four_unit_is_the_grouplike():
    h = assembled(4)
    assert h.stabilization_degree == 2
    assert h.unit == h.grouplike


@pytest.mark.parametrize("r", [3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_antipode_unique(r):
    h = assembled(r)
    rep = h.antipode_report
    assert rep["exists"] and rep["unique"]
    for key in ("axiom_id_S", "axiom_S_id", "axiom_S_id_S"):
        assert rep[key] == 0
    assert rep["unit_fixed"]


def test_antipode_fixes_unit():
    h = assembled(4)
    one = h.field.one()
    image: dict = {}
    for y, c in h.unit.items():
        for j, v in h.antipode[y].items():
            image[j] = image.get(j, 0 * one) + c * v
    assert {k: v for k, v in image.items() if v} == h.unit


def test_level_four_closed_form_assembles():
    h = assembled(4, "closed-form")
    assert h.dimension == WHA_DIMS[4] and h.axioms.passed


@pytest.mark.slow
def test_level_five_closed_form_grouplike_fails_to_assemble():
    h = assemble_wha(5, grouplike="closed-form")
    assert h.dimension == WHA_DIMS[5]
    assert not h.axioms.passed
    with pytest.raises(AntipodeError):
        solve_antipode(h)


def test_non_bijective_grouplike_rejected():
    Q = quotient(4)
    g = {k: v for k, v in Q.reduce_terms(normalized_g(4).terms).items() if Q.sector(k)[0] == 0}
    with pytest.raises(StabilizationError):
        assemble_wha(4, grouplike=g, check_axioms=False, check_representatives=False)


def test_unknown_grouplike_choice():
    with pytest.raises(ValueError):
        assemble_wha(3, grouplike="other")
