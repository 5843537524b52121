"""Fixed-precision arithmetic in Zp, Qp and their unramified extensions.

Elements are stored as ``p^v * u + O(p^N)`` where ``u`` is a polynomial in a
fixed generator ``t`` of the unramified extension of degree ``f``, with
coefficients reduced modulo ``p^(N - v)``.  ``N`` is the absolute precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product


class PadicError(ArithmeticError):
    pass


class DivisionByZeroAtPrecision(PadicError):
    pass


class IncompatibleStructures(PadicError):
    pass


class NotAUnit(PadicError):
    pass


class ConvergenceDomainViolated(PadicError):
    pass


def valuation_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _poly_mulmod_fp(a, b, g, p):
    """Multiply residue polynomials modulo the monic ``g`` and ``p``."""
    f = len(g) - 1
    prod_ = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod_[i + j] = (prod_[i + j] + x * y) % p
    for k in range(len(prod_) - 1, f - 1, -1):
        c = prod_[k]
        if c:
            for j in range(f):
                prod_[k - f + j] = (prod_[k - f + j] - c * g[j]) % p
    return tuple(prod_[:f])


def _is_primitive_mod_p(g, p):
    """True when ``t`` generates the unit group of F_p[t]/(g)."""
    f = len(g) - 1
    order = p ** f - 1
    one = (1,) + (0,) * (f - 1)

    def powmod(base, e):
        r, b = one, base
        while e:
            if e & 1:
                r = _poly_mulmod_fp(r, b, g, p)
            b = _poly_mulmod_fp(b, b, g, p)
            e >>= 1
        return r

    t = (0, 1) + (0,) * (f - 2)
    if powmod(t, order) != one:
        return False
    q = order
    primes = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            primes.append(d)
            while q % d == 0:
                q //= d
        d += 1
    if q > 1:
        primes.append(q)
    return all(powmod(t, order // r) != one for r in primes)


@lru_cache(maxsize=None)
def defining_polynomial(p: int, f: int) -> tuple[int, ...]:
    """Monic integer polynomial (low to high) defining the degree ``f`` unramified extension.

    The lexicographically first monic polynomial over F_p whose root is a
    primitive element is used, so the choice is deterministic per (p, f).
    """
    if f == 1:
        return (0, 1)
    for tail in product(range(p), repeat=f):
        g = tuple(reversed(tail)) + (1,)
        if g[0] == 0:
            continue
        if _is_primitive_mod_p(g, p):
            return g
    raise PadicError(f"no primitive polynomial of degree {f} mod {p}")


def _poly_mul(a, b, g, mod):
    f = len(g) - 1
    if f == 1:
        return ((a[0] * b[0]) % mod,)
    prod_ = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod_[i + j] += x * y
    for k in range(len(prod_) - 1, f - 1, -1):
        c = prod_[k]
        if c:
            for j in range(f):
                prod_[k - f + j] -= c * g[j]
    return tuple(c % mod for c in prod_[:f])


def _poly_inv_mod_p(a, g, p):
    """Inverse of a nonzero residue polynomial in F_p[t]/(g) via a^(q-2)."""
    f = len(g) - 1
    e = p ** f - 2
    r = (1,) + (0,) * (f - 1)
    b = tuple(x % p for x in a)
    while e:
        if e & 1:
            r = _poly_mulmod_fp(r, b, g, p)
        b = _poly_mulmod_fp(b, b, g, p)
        e >>= 1
    return r


def _poly_inv(a, g, p, k):
    """Inverse of a unit polynomial modulo p^k by Newton iteration."""
    f = len(g) - 1
    mod = p ** k
    if f == 1:
        return (pow(a[0], -1, mod),)
    y = _poly_inv_mod_p(a, g, p)
    prec = 1
    two = (2,) + (0,) * (f - 1)
    while prec < k:
        prec = min(2 * prec, k)
        m = p ** prec
        ay = _poly_mul(a, y, g, m)
        y = _poly_mul(y, tuple((t - s) % m for t, s in zip(two, ay)), g, m)
    return tuple(c % mod for c in y)


def _poly_pow(a, e, g, mod):
    f = len(g) - 1
    r = (1 % mod,) + (0,) * (f - 1)
    b = a
    while e:
        if e & 1:
            r = _poly_mul(r, b, g, mod)
        b = _poly_mul(b, b, g, mod)
        e >>= 1
    return r


@dataclass(frozen=True)
class PadicNumber:
    """``p^valuation * sum(coeffs[j] t^j) + O(p^abs_precision)``.

    ``coeffs`` are reduced modulo ``p^(abs_precision - valuation)`` and at least
    one of them is a unit, unless the element is zero at this precision, in
    which case ``valuation == abs_precision`` and all coefficients vanish.
    """

    prime: int
    ext_degree: int
    coeffs: tuple[int, ...]
    valuation: int
    abs_precision: int

    # construction -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, p: int, coeffs, N: int, f: int | None = None, shift: int = 0) -> "PadicNumber":
        """Normalize ``p^shift * sum(coeffs[j] t^j) + O(p^N)``; coefficients may be any integers."""
        f = len(coeffs) if f is None else f
        cs = list(coeffs) + [0] * (f - len(coeffs))
        nonzero = [c for c in cs if c]
        if not nonzero:
            return cls.zero(p, N, f)
        v = min(valuation_int(c, p) for c in nonzero)
        val = shift + v
        if val >= N:
            return cls.zero(p, N, f)
        mod = p ** (N - val)
        pv = p ** v
        return cls(p, f, tuple((c // pv) % mod for c in cs), val, N)

    @classmethod
    def zero(cls, p: int, N: int, f: int = 1) -> "PadicNumber":
        return cls(p, f, (0,) * f, N, N)

    @classmethod
    def from_int(cls, p: int, n: int, N: int, f: int = 1) -> "PadicNumber":
        return cls.from_coeffs(p, [n] + [0] * (f - 1), N, f)

    @classmethod
    def from_rational(cls, p: int, q, N: int, f: int = 1) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, N, f)
        num = cls.from_int(p, q.numerator, N + 2 * max(0, valuation_int(q.denominator, p)) + 1, f)
        den = cls.from_int(p, q.denominator, N + 2 * max(0, valuation_int(q.denominator, p)) + 1, f)
        return (num / den).with_precision(N)

    def with_precision(self, N: int) -> "PadicNumber":
        """Reduce (never raise) the absolute precision to ``N``."""
        if N >= self.abs_precision:
            return self
        return PadicNumber.from_coeffs(self.prime, self.coeffs, N, self.ext_degree, self.valuation)

    def lift_precision(self, N: int) -> "PadicNumber":
        """Declare extra digits of precision by padding with zeros (used internally)."""
        if N <= self.abs_precision:
            return self.with_precision(N)
        if self.is_zero():
            return PadicNumber.zero(self.prime, N, self.ext_degree)
        return PadicNumber(self.prime, self.ext_degree, self.coeffs, self.valuation, N)

    # predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.valuation >= self.abs_precision

    def is_unit(self) -> bool:
        return self.valuation == 0 and not self.is_zero()

    @property
    def relative_precision(self) -> int:
        return self.abs_precision - self.valuation

    def residues(self) -> tuple[int, ...]:
        """Coefficients of the element itself modulo p^N (requires valuation >= 0)."""
        if self.valuation < 0:
            raise ValueError("element is not integral")
        mod = self.prime ** self.abs_precision
        pv = self.prime ** self.valuation
        return tuple((c * pv) % mod for c in self.coeffs)

    # arithmetic -------------------------------------------------------

    def _check(self, other: "PadicNumber"):
        if self.prime != other.prime or self.ext_degree != other.ext_degree:
            raise IncompatibleStructures(
                f"p={self.prime}, f={self.ext_degree} vs p={other.prime}, f={other.ext_degree}")

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            extra = 0 if q == 0 else abs(valuation_int(q.numerator, self.prime)) if q.numerator % self.prime == 0 else 0
            if q != 0 and q.denominator % self.prime == 0:
                extra += valuation_int(q.denominator, self.prime)
            N = 2 * self.abs_precision + 2 * abs(self.valuation) + extra + 2
            return PadicNumber.from_rational(self.prime, q, N, self.ext_degree)
        return NotImplemented

    @property
    def _g(self):
        return defining_polynomial(self.prime, self.ext_degree)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        N = min(self.abs_precision, other.abs_precision)
        v0 = min(self.valuation, other.valuation, N)
        p = self.prime
        cs = []
        for a, b in zip(self.coeffs, other.coeffs):
            cs.append(a * p ** (self.valuation - v0) + b * p ** (other.valuation - v0))
        return PadicNumber.from_coeffs(p, cs, N, self.ext_degree, v0)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.prime ** self.relative_precision
        return PadicNumber(self.prime, self.ext_degree, tuple((-c) % mod for c in self.coeffs),
                           self.valuation, self.abs_precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        N = min(self.abs_precision + other.valuation, other.abs_precision + self.valuation)
        v = self.valuation + other.valuation
        if self.is_zero() or other.is_zero() or v >= N:
            return PadicNumber.zero(self.prime, N, self.ext_degree)
        mod = self.prime ** (N - v)
        cs = _poly_mul(self.coeffs, other.coeffs, self._g, mod)
        return PadicNumber.from_coeffs(self.prime, cs, N, self.ext_degree, v)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise DivisionByZeroAtPrecision(f"inverse of O({self.prime}^{self.abs_precision})")
        rel = self.relative_precision
        inv = _poly_inv(self.coeffs, self._g, self.prime, rel)
        return PadicNumber(self.prime, self.ext_degree, inv, -self.valuation, rel - self.valuation)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroAtPrecision(
                f"divisor indistinguishable from 0 at precision {other.abs_precision}")
        if self.is_zero():
            return PadicNumber.zero(self.prime, self.abs_precision - other.valuation, self.ext_degree)
        v = self.valuation - other.valuation
        rel = min(self.relative_precision, other.relative_precision)
        mod = self.prime ** rel
        inv = _poly_inv(other.coeffs, self._g, self.prime, rel)
        cs = _poly_mul(tuple(c % mod for c in self.coeffs), inv, self._g, mod)
        return PadicNumber.from_coeffs(self.prime, cs, v + rel, self.ext_degree, v)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicNumber.from_int(self.prime, 1, self.relative_precision, self.ext_degree)
        if self.is_zero():
            return PadicNumber.zero(self.prime, self.abs_precision + (e - 1) * self.valuation, self.ext_degree)
        rel = self.relative_precision
        cs = _poly_pow(self.coeffs, e, self._g, self.prime ** rel)
        v = e * self.valuation
        return PadicNumber(self.prime, self.ext_degree, cs, v, v + rel)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        if self.prime != other.prime or self.ext_degree != other.ext_degree:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.prime, self.ext_degree, self.valuation))

    def equals_exactly(self, other: "PadicNumber") -> bool:
        """Same digits and same declared precision."""
        return (self.prime, self.ext_degree, self.coeffs, self.valuation, self.abs_precision) == (
            other.prime, other.ext_degree, other.coeffs, other.valuation, other.abs_precision)

    def reduce_mod_p(self) -> tuple[int, ...]:
        """Residue in F_q of a unit, as a coefficient tuple."""
        if not self.is_unit():
            raise NotAUnit("residue of a non-unit")
        return tuple(c % self.prime for c in self.coeffs)

    # serialization ----------------------------------------------------

    def digits(self) -> list[list[int]]:
        """Base-p digits of every coefficient of the unit part."""
        p = self.prime
        out = []
        for c in self.coeffs:
            ds = []
            for _ in range(self.relative_precision):
                ds.append(c % p)
                c //= p
            out.append(ds)
        return out

    def serialize(self) -> str:
        p, N = self.prime, self.abs_precision
        if self.is_zero():
            return f"O({p}^{N})"

        def series(ds):
            terms = []
            for k, d in enumerate(ds):
                if d:
                    terms.append(str(d) if k == 0 else f"{d}*{p}" if k == 1 else f"{d}*{p}^{k}")
            return " + ".join(terms) if terms else "0"

        dig = self.digits()
        if self.ext_degree == 1:
            body = series(dig[0])
        else:
            parts = []
            for j, ds in enumerate(dig):
                s = series(ds)
                if s == "0":
                    continue
                parts.append(f"({s})" if j == 0 else f"({s})*t" if j == 1 else f"({s})*t^{j}")
            body = " + ".join(parts)
        return f"{p}^{self.valuation} * ({body}) + O({p}^{N})"

    def __repr__(self):
        return self.serialize()

    def to_json(self) -> dict:
        return {"prime": self.prime, "ext_degree": self.ext_degree, "valuation": self.valuation,
                "abs_precision": self.abs_precision, "coeffs": list(self.coeffs), "text": self.serialize()}


def arith(a: PadicNumber, b: PadicNumber, op: str) -> PadicNumber:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def teichmuller(x: PadicNumber) -> PadicNumber:
    """The root of unity of order prime to p congruent to ``x`` modulo p."""
    if not x.is_unit():
        raise NotAUnit("Teichmuller lift needs a unit")
    q = x.prime ** x.ext_degree
    N = x.abs_precision
    mod = x.prime ** N
    y = x.coeffs
    for _ in range(N):
        y_next = _poly_pow(y, q, x._g, mod)
        if y_next == y:
            break
        y = y_next
    return PadicNumber(x.prime, x.ext_degree, y, 0, N)


def _min_one_unit_valuation(p: int) -> int:
    return 2 if p == 2 else 1


def plog(u: PadicNumber, one_unit: bool = True) -> PadicNumber:
    """p-adic logarithm; without ``one_unit`` the Teichmuller part is removed first."""
    if not u.is_unit():
        raise ConvergenceDomainViolated("logarithm needs a unit")
    if not one_unit:
        u = u / teichmuller(u)
    x = u - 1
    if x.is_zero():
        return PadicNumber.zero(u.prime, u.abs_precision, u.ext_degree)
    if x.valuation < 1:
        raise ConvergenceDomainViolated("logarithm series needs u = 1 mod p")
    p, N, f = u.prime, u.abs_precision, u.ext_degree
    k0 = x.valuation
    K = 1
    while True:
        # every term beyond K has valuation >= N
        ok = all(k * k0 - _vp(k, p) >= N for k in range(K + 1, K + 2 * p + 2))
        if ok and K * k0 >= N:
            break
        K += 1
    extra = max(_vp(k, p) for k in range(1, K + 1))
    W = N + extra
    mod = p ** W
    g = defining_polynomial(p, f)
    xc = tuple((c * p ** k0) % mod for c in x.coeffs)
    total = [0] * f
    power = xc
    for k in range(1, K + 1):
        e = _vp(k, p)
        kk = k // p ** e
        inv = pow(kk, -1, mod)
        sign = 1 if k % 2 else -1
        for j in range(f):
            total[j] += sign * (power[j] // p ** e) * inv
        power = _poly_mul(power, xc, g, mod)
    return PadicNumber.from_coeffs(p, [t % p ** N for t in total], N, f)


def _vp(k: int, p: int) -> int:
    return valuation_int(k, p)


def pexp(v: PadicNumber) -> PadicNumber:
    """p-adic exponential on its disc of convergence."""
    p, N, f = v.prime, v.abs_precision, v.ext_degree
    if v.is_zero():
        return PadicNumber.from_int(p, 1, N, f)
    if v.valuation < _min_one_unit_valuation(p):
        raise ConvergenceDomainViolated(
            f"exponential needs valuation >= {_min_one_unit_valuation(p)} for p={p}")
    k0 = v.valuation
    K = 1
    while (K + 1) * k0 - _vp_fact(K + 1, p) < N or K * k0 - _vp_fact(K, p) < N:
        K += 1
    K += 1
    extra = _vp_fact(K, p)
    W = N + extra
    mod = p ** W
    g = defining_polynomial(p, f)
    xc = tuple((c * p ** k0) % mod for c in v.coeffs)
    total = [1] + [0] * (f - 1)
    power = xc
    fact = 1
    for k in range(1, K + 1):
        fact *= k
        e = _vp_fact(k, p)
        inv = pow(fact // p ** e, -1, mod)
        for j in range(f):
            total[j] += (power[j] // p ** e) * inv
        power = _poly_mul(power, xc, g, mod)
    return PadicNumber.from_coeffs(p, [t % p ** N for t in total], N, f)


def _vp_fact(k: int, p: int) -> int:
    s, q = 0, p
    while q <= k:
        s += k // q
        q *= p
    return s


def residue_field_generator(p: int, f: int, N: int) -> PadicNumber:
    """The class of ``t`` itself; its reduction generates F_q^x by construction."""
    if f == 1:
        for a in range(2, p + 1):
            if a % p and _order_mod(a, p) == p - 1:
                return PadicNumber.from_int(p, a, N)
        return PadicNumber.from_int(p, 1, N)
    return PadicNumber(p, f, (0, 1) + (0,) * (f - 2), 0, N)


def _order_mod(a: int, p: int) -> int:
    k, x = 1, a % p
    while x != 1:
        x = (x * a) % p
        k += 1
    return k


def root_of_unity(p: int, f: int, order: int, N: int) -> PadicNumber:
    """Deterministic primitive root of unity of the given order (prime to p) in Q_{p^f}."""
    q = p ** f
    if (q - 1) % order:
        raise PadicError(f"no {order}-th roots of unity in the degree {f} unramified extension of Q_{p}")
    gen = teichmuller(residue_field_generator(p, f, N))
    return gen ** ((q - 1) // order)


def sqrt_in_unramified(a: int, p: int, f: int, N: int) -> PadicNumber:
    """Deterministic square root of a nonzero integer unit ``a`` (p odd).

    Among the two roots the one whose Teichmuller digit sequence is
    lexicographically smaller is returned.
    """
    if p == 2:
        raise PadicError("square roots for p = 2 are not needed here")
    if a % p == 0:
        raise NotAUnit("square root of a non-unit")
    q = p ** f
    g = defining_polynomial(p, f)
    # residue square root by exhaustive search in F_q
    target = (a % p,) + (0,) * (f - 1)
    root = None
    for cs in product(range(p), repeat=f):
        if _poly_mulmod_fp(cs, cs, g, p) == target:
            root = cs
            break
    if root is None:
        raise PadicError(f"{a} is not a square in F_{q}")
    # Hensel lift of y^2 = a
    y = PadicNumber(p, f, tuple(root), 0, 1)
    A = PadicNumber.from_int(p, a, N, f)
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        y = y.lift_precision(prec)
        y = y - (y * y - A.with_precision(prec)) / (2 * y)
    y = y.with_precision(N)
    other = -y
    ty, to = teichmuller(y).digits(), teichmuller(other).digits()
    return y if ty <= to else other
