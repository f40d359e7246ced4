"""Exact arithmetic in Z[zeta_p] (and its fraction field) for prime p.

Elements are stored as coefficient vectors of length p-1 in the basis
1, zeta, ..., zeta^(p-2), with the canonical reduction
1 + zeta + ... + zeta^(p-1) = 0 applied on construction.  For p = 2 the
basis has length 1 and the ring is just Z.  Coefficients are ints or
Fractions; a value is "integral" when every coefficient is an integer.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import MixedCyclotomicOrder


class Cyclotomic:
    """An element of Q(zeta_p), exact; integral iff all coefficients are ints."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p, coeffs):
        if len(coeffs) != p - 1:
            raise ValueError(f"need {p - 1} coefficients for p={p}, got {len(coeffs)}")
        self.p = p
        self.coeffs = tuple(_norm_scalar(c) for c in coeffs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def integer(cls, p, n):
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta_power(cls, p, e):
        """zeta_p^e, reduced to the canonical basis."""
        e %= p
        if e < p - 1:
            coeffs = [0] * (p - 1)
            coeffs[e] = 1
            return cls(p, coeffs)
        # zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
        return cls(p, (-1,) * (p - 1))

    @classmethod
    def from_exponent_counts(cls, p, counts):
        """Sum of counts[e] * zeta^e over e in range(p)."""
        coeffs = [counts[e] for e in range(p - 1)]
        top = counts[p - 1] if len(counts) == p else 0
        return cls(p, [c - top for c in coeffs])

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise MixedCyclotomicOrder(f"p={self.p} vs p={other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.integer(self.p, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Cyclotomic(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.p, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        p = self.p
        # convolution with exponents mod p, then fold zeta^(p-1) away
        full = [0] * p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                full[(i + j) % p] += a * b
        top = full[p - 1]
        return Cyclotomic(p, [full[e] - top for e in range(p - 1)])

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic.integer(self.p, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        """Multiplicative inverse in Q(zeta_p), via the multiplication matrix."""
        p = self.p
        n = p - 1
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        # columns: self * zeta^j expressed in the basis
        cols = [(self * Cyclotomic.zeta_power(p, j)).coeffs for j in range(n)]
        mat = [[Fraction(cols[j][i]) for j in range(n)] for i in range(n)]
        rhs = [Fraction(1)] + [Fraction(0)] * (n - 1)
        sol = _solve_fraction_system(mat, rhs)
        return Cyclotomic(p, sol)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, 1) * Fraction(other) ** -1
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- predicates and conversions ---------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_integral(self):
        return all(isinstance(c, int) for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def to_integral(self):
        """Assert integrality and return a copy with int coefficients."""
        coeffs = []
        for c in self.coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"non-integral coefficient {c}")
                c = c.numerator
            coeffs.append(c)
        return Cyclotomic(self.p, coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        if self.is_rational():
            return f"Cyclo(p={self.p}, {self.coeffs[0]})"
        terms = " + ".join(f"{c}*z^{e}" for e, c in enumerate(self.coeffs) if c != 0)
        return f"Cyclo(p={self.p}, {terms})"

    def to_json(self):
        return [int(c) if isinstance(c, int) else str(c) for c in self.coeffs]


def _norm_scalar(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    if isinstance(c, bool):
        return int(c)
    return c


def _solve_fraction_system(mat, rhs):
    """Gaussian elimination over Q; mat is modified in place."""
    n = len(mat)
    for col in range(n):
        pivot = next(r for r in range(col, n) if mat[r][col] != 0)
        mat[col], mat[pivot] = mat[pivot], mat[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = 1 / mat[col][col]
        mat[col] = [x * inv for x in mat[col]]
        rhs[col] *= inv
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
                rhs[r] -= f * rhs[col]
    return rhs
