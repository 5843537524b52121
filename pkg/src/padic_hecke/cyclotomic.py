"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis 1, z, ..., z^(phi(N)-1) of
Z[zeta_N] as an integer vector together with a positive common denominator.
Elements of different conductors are compared and combined in Q(zeta_lcm).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    assert not any(num), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def reduction_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j holds the power-basis coordinates of zeta_n^j, 0 <= j < n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by z and reduce with z^deg = -sum(phi[i] z^i)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _sparse_rows(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    return tuple(tuple((i, c) for i, c in enumerate(row) if c) for row in reduction_table(n))


def reduce_exponent_vector(vec, n: int) -> list[int]:
    """Collapse integer coefficients of zeta_n^0..zeta_n^(n-1) into the power basis."""
    rows = _sparse_rows(n)
    out = [0] * euler_phi(n)
    for j, c in enumerate(vec):
        if c:
            for i, r in rows[j]:
                out[i] += c * r
    return out


class Cyclo:
    """An element of Q(zeta_N) in the power basis with a common denominator."""

    __slots__ = ("N", "num", "den")

    def __init__(self, N: int, num, den: int = 1):
        deg = euler_phi(N)
        num = list(num) + [0] * (deg - len(num))
        if len(num) != deg:
            raise ValueError("coefficient vector longer than the field degree")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = [-c for c in num], -den
        g = den
        for c in num:
            g = gcd(g, c)
            if g == 1:
                break
        if g > 1:
            num = [c // g for c in num]
            den //= g
        if not any(num):
            den = 1
        self.N = N
        self.num = tuple(num)
        self.den = den

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, N: int = 1) -> "Cyclo":
        return cls(N, [], 1)

    @classmethod
    def one(cls, N: int = 1) -> "Cyclo":
        return cls(N, [1], 1)

    @classmethod
    def rational(cls, q, N: int = 1) -> "Cyclo":
        q = Fraction(q)
        return cls(N, [q.numerator], q.denominator)

    @classmethod
    def root(cls, N: int, k: int = 1) -> "Cyclo":
        """zeta_N^k."""
        return cls(N, reduction_table(N)[k % N], 1)

    @classmethod
    def from_exponent_vector(cls, N: int, vec, den: int = 1) -> "Cyclo":
        return cls(N, reduce_exponent_vector(vec, N), den)

    @classmethod
    def from_angle(cls, angle: Fraction) -> "Cyclo":
        """exp(2 pi i angle) for a rational angle."""
        angle = Fraction(angle) % 1
        return cls.root(angle.denominator, angle.numerator)

    # structure --------------------------------------------------------

    def lift(self, M: int) -> "Cyclo":
        if M == self.N:
            return self
        if M % self.N:
            raise ValueError(f"Q(zeta_{self.N}) is not contained in Q(zeta_{M})")
        step = M // self.N
        vec = [0] * M
        for j, c in enumerate(self.num):
            vec[(j * step) % M] += c
        return Cyclo.from_exponent_vector(M, vec, self.den)

    def exponent_vector(self, M: int | None = None) -> list[int]:
        """Numerators on zeta_M^j (not unique); together with ``den``."""
        M = self.N if M is None else M
        step = M // self.N
        vec = [0] * M
        for j, c in enumerate(self.num):
            vec[(j * step) % M] += c
        return vec

    def _common(self, other):
        if type(other) is Cyclo and other.N == self.N:
            return self, other
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(other, self.N)
        if not isinstance(other, Cyclo):
            return None, None
        M = _lcm(self.N, other.N)
        return self.lift(M), other.lift(M)

    def __add__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        den = _lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclo(a.N, [x * fa + y * fb for x, y in zip(a.num, b.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.N, [-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclo) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return Cyclo(self.N, [c * q.numerator for c in self.num], self.den * q.denominator)
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        N = a.N
        bs = [(j, y) for j, y in enumerate(b.num) if y]
        if not bs:
            return Cyclo(N, [], 1)
        vec = [0] * N
        for i, x in enumerate(a.num):
            if x:
                for j, y in bs:
                    vec[(i + j) % N] += x * y
        return Cyclo.from_exponent_vector(N, vec, a.den * b.den)

    __rmul__ = __mul__

    def galois(self, a: int) -> "Cyclo":
        """Image under zeta_N -> zeta_N^a (a prime to N)."""
        if gcd(a, self.N) != 1:
            raise ValueError("not a Galois automorphism")
        vec = [0] * self.N
        for j, c in enumerate(self.num):
            vec[(j * a) % self.N] += c
        return Cyclo.from_exponent_vector(self.N, vec, self.den)

    def conjugate(self) -> "Cyclo":
        return self.galois(-1 % self.N) if self.N > 2 else self

    def norm(self) -> Fraction:
        prod_ = Cyclo.one(self.N)
        for a in range(1, max(self.N, 2)):
            if gcd(a, self.N) == 1:
                prod_ = prod_ * self.galois(a)
        r = prod_.rational_value()
        assert r is not None
        return r

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0 in a cyclotomic field")
        others = Cyclo.one(self.N)
        for a in range(2, self.N):
            if gcd(a, self.N) == 1:
                others = others * self.galois(a)
        n = (others * self).rational_value()
        return others * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r, b = Cyclo.one(self.N), self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self) -> bool:
        return not any(self.num)

    def rational_value(self) -> Fraction | None:
        if any(self.num[1:]):
            return None
        return Fraction(self.num[0] if self.num else 0, self.den)

    def minimal_conductor(self) -> "Cyclo":
        """The same element expressed over the smallest Q(zeta_d) containing it."""
        for d in _divisors(self.N):
            if d == self.N:
                return self
            if d % 4 == 2:
                continue
            # fixed by every automorphism trivial on zeta_d
            fixed = all(self.galois(a) == self for a in range(1, self.N)
                        if gcd(a, self.N) == 1 and (a - 1) % d == 0)
            if fixed:
                return self._descend(d)
        return self

    def _descend(self, d: int) -> "Cyclo":
        # solve in the basis of Q(zeta_d) by matching lifts of basis vectors
        deg = euler_phi(d)
        cols = [Cyclo.root(d, k).lift(self.N).num for k in range(deg)]
        from sympy import Matrix
        A = Matrix([[cols[k][i] for k in range(deg)] for i in range(len(self.num))])
        b = Matrix([Fraction(c, self.den) for c in self.num])
        sol, params = A.gauss_jordan_solve(b)
        coeffs = [Fraction(str(x)) for x in sol]
        den = 1
        for c in coeffs:
            den = _lcm(den, c.denominator)
        return Cyclo(d, [int(c * den) for c in coeffs], den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(other, self.N)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._common(other)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        m = self.minimal_conductor()
        return hash((m.N, m.num, m.den))

    def to_complex(self, dps: int | None = None) -> mpmath.mpc:
        with mpmath.workdps(dps or mpmath.mp.dps):
            z = mpmath.mpc(0)
            for j, c in enumerate(self.num):
                if c:
                    z += c * mpmath.expjpi(mpmath.mpf(2 * j) / self.N)
            return z / self.den

    def triples(self) -> list[list[int]]:
        """(numerator, denominator, zeta-exponent) triples for serialization."""
        return [[c, self.den, j] for j, c in enumerate(self.num) if c]

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for j, c in enumerate(self.num):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z{self.N}^{j}")
        s = " + ".join(terms)
        return f"({s})/{self.den}" if self.den != 1 else s
