from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from fusionwha.cyclo import CycloNumber, FieldMismatchError, field_for_level, quantum_integer
from fusionwha.linalg import ExactMatrix, InconsistentSystemError

from helpers import field

LEVELS = st.integers(min_value=3, max_value=8)


@st.composite
def numbers(draw, r=None):
    r = draw(LEVELS) if r is None else r
    F = field(r)
    n = draw(st.integers(0, 6))
    terms = draw(st.lists(st.tuples(st.integers(0, F.N - 1), st.builds(Fraction, st.integers(-8, 8), st.integers(1, 5))), max_size=n))
    x = F.zero()
    for k, c in terms:
        x = x + F.zeta(k) * c
    return x


@st.composite
def triples(draw):
    r = draw(LEVELS)
    return tuple(draw(numbers(r)) for _ in range(3))


# -- field construction ------------------------------------------------


def test_level_three_conductor_and_root():
    F = field_for_level(3)
    assert F.N == 24
    assert F.A == CycloNumber.zeta(24, 2)
    assert F.A**12 == F.one()
    assert F.A**6 == -F.one()


def test_level_four_conductor():
    F = field_for_level(4)
    assert F.N == 16
    assert F.q == CycloNumber.zeta(16, 2)
    assert F.q**8 == F.one()


def test_level_five_exponent_three_is_primitive_20th_root():
    F = field_for_level(5, 3)
    assert F.N == 40
    assert F.A == CycloNumber.zeta(40, 6)
    orders = [k for k in range(1, 41) if F.A**k == F.one()]
    assert orders[0] == 20


@pytest.mark.parametrize("r", range(3, 9))
def test_root_relations(r):
    F = field(r)
    assert F.A ** (4 * r) == F.one()
    assert F.A ** (2 * r) == -F.one()
    assert F.sqrt2 * F.sqrt2 == 2 * F.one()
    assert F.sqrt_q * F.sqrt_q == F.q


@pytest.mark.parametrize("r,k", [(2, 1), (1, 1), (4, 2), (5, 5), (3, 3)])
def test_bad_level_or_exponent_rejected(r, k):
    with pytest.raises(ValueError):
        field_for_level(r, k)


# -- quantum integers --------------------------------------------------


def test_small_quantum_integers():
    F = field(5)
    assert quantum_integer(0, F) == F.zero()
    assert quantum_integer(1, F) == F.one()
    assert quantum_integer(5, F) == F.zero()


def test_quantum_two_at_level_three_is_one():
    assert quantum_integer(2, field(3)) == field(3).one()


@given(LEVELS, st.data())
def test_quantum_integer_identities(r, data):
    F = field(r)
    n = data.draw(st.integers(1, 3 * r))
    qi = F.qint
    assert qi(n + 1) == qi(2) * qi(n) - qi(n - 1)
    m = data.draw(st.integers(0, r))
    assert qi(r - m) == qi(m)
    assert qi(-n) == -qi(n)
    if n <= r - 1:
        assert qi(n)


def test_quantum_integer_matches_quotient_formula():
    F = field(7)
    q = F.q
    for n in range(0, 12):
        assert F.qint(n) * (q - q.inverse()) == q**n - q**-n


# -- ring axioms -------------------------------------------------------


@given(triples())
def test_ring_axioms(xyz):
    x, y, z = xyz
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z


@given(numbers())
def test_exact_inverse(x):
    assume(not x.is_zero())
    assert x * x.inverse() == 1


@given(numbers())
def test_json_round_trip(x):
    assert CycloNumber.from_json(x.to_json()) == x


def test_canonical_representation():
    F = field(4)
    z = F.zeta()
    assert z**F.N == F.one()
    # Phi_16(z) = z^8 + 1
    assert z**8 + 1 == F.zero()
    assert (z**8).coefficients() == [Fraction(-1)] + [Fraction(0)] * 7


def test_mixed_conductors_rejected():
    with pytest.raises(FieldMismatchError):
        field(3).one() + field(4).one()


def test_decimal_rendering():
    F = field(4)
    assert F.sqrt2.to_decimal(30) == "1.41421356237309504880168872421"


# -- matrices ----------------------------------------------------------


def _mat(rows, F):
    return ExactMatrix([[F(x) if not isinstance(x, CycloNumber) else x for x in row] for row in rows], F)


def test_rref_identity_and_zero():
    F = field(3)
    I = ExactMatrix.identity(3, F)
    red, piv = I.rref()
    assert red == I and piv == [0, 1, 2]
    assert ExactMatrix.zeros(2, 3, F).rank() == 0


def test_rank_of_hermitian_zeta8_matrix():
    # det = 1 - zeta * conj(zeta) = 0, so the rank is 1
    F = field(4)
    z = CycloNumber.zeta(F.N, F.N // 8)
    M = _mat([[1, z], [z.conjugate(), 1]], F)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    assert det == F.zero()
    assert M.rank() == 1


def test_rref_rejects_mixed_conductors():
    with pytest.raises(FieldMismatchError):
        ExactMatrix([[field(3).one(), field(4).one()]], field(3))


def test_solve_affine_examples():
    F = field(3)
    I = ExactMatrix.identity(2, F)
    b = [F(3), F.zeta()]
    x, ker = I.solve_affine(b)
    assert x == b and ker == []
    x, ker = ExactMatrix.zeros(1, 2, F).solve_affine([F.zero()])
    assert len(ker) == 2
    x, ker = _mat([[1, 1]], F).solve_affine([F.one()])
    assert x == [F.one(), F.zero()]
    assert ker == [[-F.one(), F.one()]]


def test_inconsistent_system():
    F = field(3)
    with pytest.raises(InconsistentSystemError):
        ExactMatrix.zeros(1, 1, F).solve_affine([F.one()])


@st.composite
def matrices(draw):
    F = field(4)
    n, m = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    vals = st.sampled_from([0, 0, 1, -1, 2]).map(F) | st.integers(0, 15).map(F.zeta)
    return ExactMatrix([[draw(vals) for _ in range(m)] for _ in range(n)], F)


@given(matrices())
def test_rref_idempotent_and_rank_transpose(M):
    red, piv = M.rref()
    red2, piv2 = red.rref()
    assert red2 == red and piv2 == piv
    assert M.rank() == M.transpose().rank()


@given(matrices())
def test_kernel_is_annihilated(M):
    for v in M.kernel():
        col = ExactMatrix([[x] for x in v], M.field)
        assert all(not x for row in (M @ col).rows for x in row)
