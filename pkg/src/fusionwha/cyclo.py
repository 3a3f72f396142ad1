"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are rational polynomials in zeta reduced modulo the N-th cyclotomic
polynomial, so equality is structural.  The heavy lifting is done by
``python-flint``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from numbers import Rational

import flint


class FieldMismatchError(ValueError):
    """Raised when elements of different cyclotomic fields are combined."""


@lru_cache(maxsize=None)
def _cyclotomic(N: int) -> flint.fmpq_poly:
    return flint.fmpq_poly(flint.fmpz_poly.cyclotomic(N).coeffs())


@lru_cache(maxsize=None)
def _zeta_power(N: int, k: int) -> flint.fmpq_poly:
    k %= N
    coeffs = [0] * (k + 1)
    coeffs[k] = 1
    return flint.fmpq_poly(coeffs) % _cyclotomic(N)


def _to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, Rational):
        return flint.fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


class CycloNumber:
    """An element of Q(zeta_N) in the power basis, reduced mod Phi_N."""

    __slots__ = ("N", "poly")

    def __init__(self, N: int, poly: flint.fmpq_poly, *, reduced: bool = False):
        if N < 1:
            raise ValueError("conductor must be positive")
        self.N = N
        self.poly = poly if reduced else poly % _cyclotomic(N)

    # -- constructors -------------------------------------------------
    @classmethod
    def zeta(cls, N: int, k: int = 1) -> CycloNumber:
        return cls(N, _zeta_power(N, k), reduced=True)

    @classmethod
    def rational(cls, N: int, value) -> CycloNumber:
        return cls(N, flint.fmpq_poly([_to_fmpq(value)]), reduced=True)

    @classmethod
    def from_coeffs(cls, N: int, coeffs) -> CycloNumber:
        return cls(N, flint.fmpq_poly([_to_fmpq(c) for c in coeffs]))

    # -- coercion -------------------------------------------------------
    def _coerce(self, other) -> flint.fmpq_poly | None:
        if isinstance(other, CycloNumber):
            if other.N != self.N:
                raise FieldMismatchError(
                    f"cannot combine elements of Q(zeta_{self.N}) and Q(zeta_{other.N})"
                )
            return other.poly
        if isinstance(other, (int, Rational, flint.fmpq)):
            return flint.fmpq_poly([_to_fmpq(other)])
        return None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return CycloNumber(self.N, self.poly + p, reduced=True)

    __radd__ = __add__

    def __sub__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return CycloNumber(self.N, self.poly - p, reduced=True)

    def __rsub__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return CycloNumber(self.N, p - self.poly, reduced=True)

    def __neg__(self):
        return CycloNumber(self.N, -self.poly, reduced=True)

    def __pos__(self):
        return self

    def __mul__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        if p.degree() <= 0:
            return CycloNumber(self.N, self.poly * p, reduced=True)
        return CycloNumber(self.N, self.poly * p)

    __rmul__ = __mul__

    def inverse(self) -> CycloNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.poly.degree() == 0:
            return CycloNumber(self.N, flint.fmpq_poly([1 / self.poly[0]]), reduced=True)
        g, s, _ = self.poly.xgcd(_cyclotomic(self.N))
        # Phi_N is irreducible, so g is a nonzero constant
        return CycloNumber(self.N, s / g[0])

    def __truediv__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        if isinstance(other, CycloNumber):
            return self * other.inverse()
        if p.is_zero():
            raise ZeroDivisionError("division by zero")
        return CycloNumber(self.N, self.poly / p[0], reduced=True)

    def __rtruediv__(self, other):
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return CycloNumber(self.N, p, reduced=True) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = CycloNumber(self.N, flint.fmpq_poly([1]), reduced=True)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycloNumber):
            return self.N == other.N and self.poly == other.poly
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return self.poly == p

    def __hash__(self):
        return hash((self.N, tuple(self.poly.coeffs())))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __bool__(self):
        return not self.poly.is_zero()

    # -- inspection -----------------------------------------------------
    def coefficients(self) -> list[Fraction]:
        """Power-basis coefficients, padded to the field degree."""
        deg = _cyclotomic(self.N).degree()
        cs = [Fraction(int(c.p), int(c.q)) for c in self.poly.coeffs()]
        return cs + [Fraction(0)] * (deg - len(cs))

    def is_rational(self) -> bool:
        return self.poly.degree() <= 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        if self.poly.is_zero():
            return Fraction(0)
        c = self.poly[0]
        return Fraction(int(c.p), int(c.q))

    def conjugate(self) -> CycloNumber:
        """Complex conjugation, zeta -> zeta^-1."""
        acc = flint.fmpq_poly()
        for k, c in enumerate(self.poly.coeffs()):
            if c != 0:
                acc += c * _zeta_power(self.N, -k)
        return CycloNumber(self.N, acc)

    def galois(self, k: int) -> CycloNumber:
        """Apply the automorphism zeta -> zeta^k (k coprime to N)."""
        if gcd(k, self.N) != 1:
            raise ValueError(f"{k} is not a unit mod {self.N}")
        acc = flint.fmpq_poly()
        for e, c in enumerate(self.poly.coeffs()):
            if c != 0:
                acc += c * _zeta_power(self.N, e * k)
        return CycloNumber(self.N, acc)

    def to_complex(self, k: int = 1) -> complex:
        """Numerical value under the embedding zeta -> exp(2 pi i k / N)."""
        import cmath

        z = cmath.exp(2j * cmath.pi * k / self.N)
        return sum(float(c) * z**e for e, c in enumerate(self.poly.coeffs()))

    def to_decimal(self, digits: int = 30, k: int = 1) -> str:
        """High precision decimal rendering of the embedded value."""
        import mpmath

        with mpmath.workdps(digits + 10):
            z = mpmath.expjpi(mpmath.mpf(2 * k) / self.N)
            val = mpmath.mpf(0)
            for e, c in enumerate(self.poly.coeffs()):
                if c != 0:
                    val += mpmath.mpf(int(c.p)) / int(c.q) * z**e
            # working precision carries 10 guard digits; anything below is rounding noise
            val = mpmath.chop(val, tol=mpmath.mpf(10) ** (-digits - 5))
            return mpmath.nstr(val, digits)

    def __repr__(self):
        terms = []
        for e, c in enumerate(self.poly.coeffs()):
            if c == 0:
                continue
            mono = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
            coef = str(c)
            if mono and coef == "1":
                terms.append(mono)
            elif mono and coef == "-1":
                terms.append("-" + mono)
            else:
                terms.append(f"{coef}*{mono}" if mono else coef)
        body = " + ".join(terms) if terms else "0"
        return f"CycloNumber[{self.N}]({body})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "N": self.N,
            "coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coefficients()],
        }

    @classmethod
    def from_json(cls, data: dict) -> CycloNumber:
        coeffs = [Fraction(int(n), int(d)) for n, d in data["coeffs"]]
        return cls.from_coeffs(int(data["N"]), coeffs)


@dataclass(frozen=True)
class CycloField:
    """The field Q(zeta_N); N = 1 gives the rationals."""

    N: int

    def zero(self) -> CycloNumber:
        return CycloNumber.rational(self.N, 0)

    def one(self) -> CycloNumber:
        return CycloNumber.rational(self.N, 1)

    def zeta(self, k: int = 1) -> CycloNumber:
        return CycloNumber.zeta(self.N, k)

    def __call__(self, value) -> CycloNumber:
        if isinstance(value, CycloNumber):
            if value.N != self.N:
                raise FieldMismatchError(f"element of Q(zeta_{value.N}) in Q(zeta_{self.N})")
            return value
        return CycloNumber.rational(self.N, value)


RATIONALS = CycloField(1)


@dataclass(frozen=True)
class LevelField(CycloField):
    """The cyclotomic field attached to the level r and a primitive root choice.

    ``A`` is a primitive 4r-th root of unity, ``q = A^2`` and the chosen
    square root of q is A itself.
    """

    r: int = 3
    root_exponent: int = 1

    @property
    def A(self) -> CycloNumber:
        return CycloNumber.zeta(self.N, (self.N // (4 * self.r)) * self.root_exponent)

    @property
    def q(self) -> CycloNumber:
        return self.A * self.A

    @property
    def sqrt_q(self) -> CycloNumber:
        return self.A

    @property
    def sqrt2(self) -> CycloNumber:
        z8 = CycloNumber.zeta(self.N, self.N // 8)
        return z8 + z8.inverse()

    def qint(self, n: int) -> CycloNumber:
        return quantum_integer(n, self)

    def qfactorial(self, n: int) -> CycloNumber:
        out = self.one()
        for k in range(2, n + 1):
            out = out * self.qint(k)
        return out


def field_for_level(r: int, root_exponent: int = 1) -> LevelField:
    """Smallest cyclotomic field holding A = exp(2 pi i k / 4r) and sqrt(2)."""
    if r < 3:
        raise ValueError("level r must be at least 3")
    if gcd(root_exponent, 4 * r) != 1:
        raise ValueError(f"root exponent {root_exponent} is not coprime to {4 * r}")
    return LevelField(lcm(4 * r, 8), r, root_exponent % (4 * r))


_QINT_CACHE: dict[tuple[int, int, int], CycloNumber] = {}


def quantum_integer(n: int, field: LevelField) -> CycloNumber:
    """[n] = q^(n-1) + q^(n-3) + ... + q^(1-n); [-n] = -[n]."""
    key = (field.N, field.root_exponent * (field.N // (4 * field.r)), n)
    hit = _QINT_CACHE.get(key)
    if hit is not None:
        return hit
    if n < 0:
        val = -quantum_integer(-n, field)
    else:
        step = 2 * key[1]  # exponent of q in terms of zeta_N
        acc = flint.fmpq_poly()
        for i in range(n):
            acc += _zeta_power(field.N, step * (n - 1 - 2 * i))
        val = CycloNumber(field.N, acc)
    _QINT_CACHE[key] = val
    return val
