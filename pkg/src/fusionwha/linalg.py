"""Exact linear algebra over a cyclotomic field.

Two tools live here: :class:`ExactMatrix`, a small dense matrix with
row reduction and affine solving, and :class:`SparseRowSpace`, an
incrementally maintained reduced row echelon basis of a subspace whose
vectors are sparse dicts keyed by sortable column labels.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

from .cyclo import CycloNumber, FieldMismatchError, LevelField


class InconsistentSystemError(ValueError):
    """Raised when an affine system has no solution."""


class ExactMatrix:
    """Dense matrix with CycloNumber entries."""

    def __init__(self, rows: Sequence[Sequence[CycloNumber]], field: LevelField):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged rows")
            for a in r:
                if isinstance(a, CycloNumber) and a.N != field.N:
                    raise FieldMismatchError(f"entry of Q(zeta_{a.N}) in a matrix over Q(zeta_{field.N})")

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: LevelField) -> ExactMatrix:
        z = field.zero()
        return cls([[z] * ncols for _ in range(nrows)], field)

    @classmethod
    def identity(cls, n: int, field: LevelField) -> ExactMatrix:
        m = cls.zeros(n, n, field)
        for i in range(n):
            m.rows[i][i] = field.one()
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.rows[i][j] = value

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows

    def copy(self) -> ExactMatrix:
        return ExactMatrix(self.rows, self.field)

    def transpose(self) -> ExactMatrix:
        return ExactMatrix([list(c) for c in zip(*self.rows)], self.field) if self.rows else self.copy()

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        z = self.field.zero()
        cols = other.transpose().rows
        out = []
        for row in self.rows:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out.append([sum((a * col[k] for k, a in nz if col[k]), z) for col in cols])
        return ExactMatrix(out, self.field)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def scale(self, c) -> ExactMatrix:
        return ExactMatrix([[c * a for a in r] for r in self.rows], self.field)

    def rref(self) -> tuple[ExactMatrix, list[int]]:
        """Reduced row echelon form and pivot columns."""
        rows = [list(r) for r in self.rows]
        pivots: list[int] = []
        lead = 0
        for col in range(self.ncols):
            sel = next((i for i in range(lead, len(rows)) if rows[i][col]), None)
            if sel is None:
                continue
            rows[lead], rows[sel] = rows[sel], rows[lead]
            inv = rows[lead][col].inverse()
            rows[lead] = [a * inv if a else a for a in rows[lead]]
            for i in range(len(rows)):
                if i != lead and rows[i][col]:
                    f = rows[i][col]
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[lead])]
            pivots.append(col)
            lead += 1
            if lead == len(rows):
                break
        return ExactMatrix(rows, self.field), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> list[list[CycloNumber]]:
        """Basis of the right null space."""
        red, piv = self.rref()
        free = [c for c in range(self.ncols) if c not in set(piv)]
        basis = []
        for f in free:
            v = [self.field.zero()] * self.ncols
            v[f] = self.field.one()
            for i, p in enumerate(piv):
                v[p] = -red.rows[i][f]
            basis.append(v)
        return basis

    def solve_affine(self, rhs: Sequence[CycloNumber]) -> tuple[list[CycloNumber], list[list[CycloNumber]]]:
        """Particular solution and null-space basis of ``self @ x = rhs``."""
        aug = ExactMatrix([list(r) + [b] for r, b in zip(self.rows, rhs)], self.field)
        red, piv = aug.rref()
        if self.ncols in piv:
            raise InconsistentSystemError("affine system has no solution")
        x = [self.field.zero()] * self.ncols
        for i, p in enumerate(piv):
            x[p] = red.rows[i][self.ncols]
        return x, self.kernel()

    def inverse(self) -> ExactMatrix:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("only square matrices are invertible")
        aug = ExactMatrix([list(r) + list(e) for r, e in zip(self.rows, ExactMatrix.identity(n, self.field).rows)], self.field)
        red, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return ExactMatrix([r[n:] for r in red.rows], self.field)


SparseVector = dict  # column label -> CycloNumber


def add_scaled(target: dict, source: Mapping, c: CycloNumber) -> None:
    """target += c * source, dropping zeros."""
    for k, v in source.items():
        nv = target.get(k)
        nv = c * v if nv is None else nv + c * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class SparseRowSpace:
    """Reduced row echelon basis of a subspace of sparse vectors.

    Columns are ordered by ``key`` (default: natural ordering of labels); the
    pivot of a row is its least column.  Rows are kept fully reduced, so
    every vector has a unique canonical form modulo the space.
    """

    def __init__(self, key=None):
        self.key = key
        self.rows: dict[Hashable, dict] = {}  # pivot -> row with row[pivot] == 1

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> set:
        return set(self.rows)

    def _lead(self, vec: Mapping):
        return min(vec, key=self.key) if self.key else min(vec)

    def reduce(self, vec: Mapping) -> dict:
        """Canonical representative of ``vec`` modulo the space."""
        out = dict(vec)
        hits = [k for k in out if k in self.rows]
        for k in hits:
            c = out.get(k)
            if c:
                add_scaled(out, self.rows[k], -c)
        return out

    def insert(self, vec: Mapping) -> bool:
        """Add ``vec`` to the space; return False if it was already inside."""
        red = self.reduce(vec)
        if not red:
            return False
        piv = self._lead(red)
        inv = red[piv].inverse()
        red = {k: v * inv for k, v in red.items()}
        for p, row in self.rows.items():
            c = row.get(piv)
            if c:
                add_scaled(row, red, -c)
        self.rows[piv] = red
        return True

    def extend(self, vecs: Iterable[Mapping]) -> int:
        return sum(1 for v in vecs if self.insert(v))

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def basis(self) -> list[dict]:
        return [self.rows[p] for p in sorted(self.rows, key=self.key)]


def sparse_kernel(equations: Iterable[Mapping], variables: Iterable, one: CycloNumber, key=None) -> list[dict]:
    """Null space of a sparse homogeneous system, one vector per free variable."""
    space = SparseRowSpace(key)
    for eq in equations:
        if eq:
            space.insert({k: one * v for k, v in eq.items()})
    out = []
    for f in variables:
        if f in space.rows:
            continue
        vec = {f: one}
        for p, row in space.rows.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        out.append(vec)
    return out


def sparse_solve(equations: Iterable[tuple[Mapping, CycloNumber]], variables: Iterable, one: CycloNumber, key=None):
    """Particular solution and null space of ``eq . x = rhs``; None if inconsistent.

    The right-hand side rides along as the pseudo-variable ``_RHS``, which
    sorts after every real variable so it never becomes a pivot early.
    """
    rhs_key = _RHS
    space = SparseRowSpace(key=lambda k: (1, 0) if k is rhs_key else (0, key(k) if key else k))
    for eq, b in equations:
        vec = {k: one * v for k, v in eq.items() if v}
        if b:
            vec[rhs_key] = -(one * b)
        if vec:
            space.insert(vec)
    if rhs_key in space.rows:
        raise InconsistentSystemError("sparse affine system has no solution")
    particular = {}
    for p, row in space.rows.items():
        c = row.get(rhs_key)
        if c:
            particular[p] = -c
    variables = list(variables)
    kernel = []
    for f in variables:
        if f in space.rows:
            continue
        vec = {f: one}
        for p, row in space.rows.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        kernel.append(vec)
    return particular, kernel


class _RhsMarker:
    def __repr__(self):
        return "<rhs>"


_RHS = _RhsMarker()
