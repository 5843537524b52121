"""Imaginary quadratic fields of class number one: elements, ideals, ray classes,
algebraic Hecke characters and their p-adic avatars.

Every ideal is principal, so ray classes modulo m are (O/m)^x modulo the
image of a unit group and a Hecke character is pinned down by a finite
order character psi of (O/m)^x with psi(u) = u^alpha on units:

    chi((xi)) = psi(xi) * xi^(-alpha).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, isqrt

import mpmath

from .cyclotomic import Cyclo
from .fourier import (AnalyticityCondition, CharacterPoint, TorsionFunction, char_hat,
                      norm_form_units, point_to_character, trace_pairing_matrix,
                      transform_on_points, PrecisionInsufficient)
from .padic_core import PadicNumber, pexp, root_of_unity, sqrt_in_unramified, teichmuller

CLASS_NUMBER_ONE = (-3, -4, -7, -8, -11, -19, -43, -67, -163)


class UnsupportedClassNumber(ValueError):
    pass


class ZeroIdeal(ValueError):
    pass


class NotCoprimeToConductor(ValueError):
    pass


class DegenerateDecomposition(ValueError):
    pass


class InvalidCharacter(ValueError):
    pass


# field and elements ------------------------------------------------------------


@dataclass(frozen=True)
class ImagQuadField:
    disc: int

    def __post_init__(self):
        if self.disc not in CLASS_NUMBER_ONE:
            raise UnsupportedClassNumber(f"discriminant {self.disc} is not one of {CLASS_NUMBER_ONE}")

    @property
    def trace_w(self) -> int:
        return 1 if self.disc % 4 == 1 else 0

    @property
    def norm_w(self) -> int:
        d = self.disc
        return (1 - d) // 4 if d % 4 == 1 else -d // 4

    @property
    def gram(self):
        return trace_pairing_matrix(self.trace_w, self.norm_w)

    def elt(self, a, b=0) -> "QuadElement":
        return QuadElement(self, Fraction(a), Fraction(b))

    @property
    def w(self) -> "QuadElement":
        return self.elt(0, 1)

    @cached_property
    def units(self) -> tuple[tuple["QuadElement", Fraction], ...]:
        """Roots of unity in L paired with their angle in Q/Z."""
        if self.disc == -4:
            gen, order = self.w, 4
        elif self.disc == -3:
            gen, order = self.w, 6
        else:
            gen, order = self.elt(-1), 2
        out, x = [], self.elt(1)
        for k in range(order):
            out.append((x, Fraction(k, order)))
            x = x * gen
        return tuple(out)

    @property
    def root_of_unity_generator(self) -> tuple["QuadElement", int]:
        u = self.units
        return u[1][0], len(u)

    def complex_w(self) -> mpmath.mpc:
        return (self.trace_w + mpmath.sqrt(mpmath.mpc(self.disc))) / 2

    def small_elements(self, max_norm: int):
        """Integral elements x + y w with 0 < N <= max_norm, ordered by (norm, x, y)."""
        T, Nw = self.trace_w, self.norm_w
        # N(x + y w) = (x + T y/2)^2 + |d| y^2 / 4
        ybound = isqrt(4 * max_norm // abs(self.disc)) + 1
        out = []
        for y in range(-ybound, ybound + 1):
            xb = isqrt(max_norm) + abs(T * y) + 1
            for x in range(-xb, xb + 1):
                n = x * x + T * x * y + Nw * y * y
                if 0 < n <= max_norm:
                    out.append((n, -x, -y))
        out.sort()
        return [(self.elt(-x, -y), n) for n, x, y in out]

    def label(self) -> str:
        return f"Q(sqrt({self.disc}))"


@dataclass(frozen=True)
class QuadElement:
    """a + b w with rational a, b."""

    field: ImagQuadField
    a: Fraction
    b: Fraction

    def _coerce(self, other):
        if isinstance(other, QuadElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.elt(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        T, Nw = self.field.trace_w, self.field.norm_w
        bb = self.b * o.b
        return QuadElement(self.field, self.a * o.a - Nw * bb, self.a * o.b + self.b * o.a + T * bb)

    __rmul__ = __mul__

    def conj(self) -> "QuadElement":
        return QuadElement(self.field, self.a + self.field.trace_w * self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.field.trace_w * self.a * self.b + self.field.norm_w * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.field.trace_w * self.b

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0")
        c = self.conj()
        return QuadElement(self.field, c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r, b = self.field.elt(1), self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def denominator(self) -> int:
        return self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)

    def coords(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def to_complex(self) -> mpmath.mpc:
        return mpmath.mpf(self.a.numerator) / self.a.denominator + \
            mpmath.mpf(self.b.numerator) / self.b.denominator * self.field.complex_w()

    def __repr__(self):
        return f"({self.a} + {self.b}*w)"


# ideals -------------------------------------------------------------------------


def _hnf2(vectors) -> tuple[int, int, int]:
    """HNF (a, b, c) of the Z-span of integer vectors (x, y): basis (a, 0), (b, c)."""
    vecs = [list(v) for v in vectors if v[0] or v[1]]
    if not vecs:
        raise ZeroIdeal("zero module")
    # gcd on the second coordinate
    c, row = 0, [0, 0]
    col0 = []
    for v in vecs:
        if v[1] == 0:
            col0.append(v[0])
            continue
        if row[1] == 0:
            row = v
            continue
        # extended gcd combination
        g, s, t = _xgcd(row[1], v[1])
        new = [s * row[0] + t * v[0], g]
        other = [(v[1] // g) * row[0] - (row[1] // g) * v[0], 0]
        col0.append(other[0])
        row = new
    c = abs(row[1])
    if row[1] < 0:
        row = [-row[0], -row[1]]
    a = 0
    for x in col0:
        a = gcd(a, x)
    if c == 0:
        raise ZeroIdeal("module has rank < 2")
    if a == 0:
        raise ZeroIdeal("module has rank < 2")
    b = row[0] % a
    return a, b, c


def _xgcd(a: int, b: int):
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


@dataclass(frozen=True)
class IdealRep:
    """Fractional ideal (1/den) * (aZ + (b + c w)Z) with a generator (class number one)."""

    field: ImagQuadField
    hnf: tuple[int, int, int]
    den: int
    generator: QuadElement

    @classmethod
    def principal(cls, x: QuadElement) -> "IdealRep":
        if x.is_zero():
            raise ZeroIdeal("(0)")
        F = x.field
        den = x.denominator()
        xi = x * den
        vecs = []
        for y in (F.elt(1), F.w):
            v = xi * y
            vecs.append((int(v.a), int(v.b)))
        a, b, c = _hnf2(vecs)
        g = gcd(gcd(a, b), c)
        g = gcd(g, den)
        # keep den minimal: divide through by common content when possible
        if g > 1 and a % g == 0 and b % g == 0 and c % g == 0:
            a, b, c, den = a // g, b // g, c // g, den // g
        return cls(F, (a, b, c), den, x)

    @classmethod
    def of(cls, F: ImagQuadField, a, b=0) -> "IdealRep":
        return cls.principal(F.elt(a, b))

    @property
    def norm(self) -> Fraction:
        a, _, c = self.hnf
        return Fraction(a * c, self.den * self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def contains(self, x: QuadElement) -> bool:
        a, b, c = self.hnf
        y = x * self.den
        if not y.is_integral():
            return False
        yb = int(y.b)
        if yb % c:
            return False
        return (int(y.a) - (yb // c) * b) % a == 0

    def __mul__(self, other: "IdealRep") -> "IdealRep":
        return IdealRep.principal(self.generator * other.generator)

    def inverse(self) -> "IdealRep":
        return IdealRep.principal(self.generator.inverse())

    def __eq__(self, other):
        if not isinstance(other, IdealRep):
            return NotImplemented
        return self.hnf == other.hnf and self.den == other.den

    def __hash__(self):
        return hash((self.hnf, self.den))

    def is_coprime(self, other: "IdealRep") -> bool:
        for q in self.prime_factors():
            if other.valuation(q) != 0:
                return False
        return True

    def prime_factors(self) -> list["PrimeIdeal"]:
        n = self.norm
        ps = set(_prime_divisors(n.numerator)) | set(_prime_divisors(n.denominator))
        out = []
        for p in sorted(ps):
            for q in factor_over(self.field, p):
                if self.valuation(q) != 0:
                    out.append(q)
        return out

    def valuation(self, q: "PrimeIdeal") -> int:
        return q.valuation(self.generator)

    def factorization(self) -> list[tuple["PrimeIdeal", int]]:
        return [(q, self.valuation(q)) for q in self.prime_factors()]

    def __repr__(self):
        return f"Ideal{self.generator}"


def ideal_ops(a: IdealRep, b: IdealRep | None, op: str, p: int | None = None):
    if op == "mul":
        return a * b
    if op == "inverse":
        return a.inverse()
    if op == "norm":
        return a.norm
    if op == "is_coprime":
        return a.is_coprime(b)
    if op == "factor_over":
        return factor_over(a.field, p)
    raise ValueError(f"unknown ideal operation {op!r}")


def _prime_divisors(n: int) -> list[int]:
    n = abs(n)
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    field: ImagQuadField
    p: int
    generator: QuadElement
    residue_degree: int
    ramified: bool = False

    @property
    def norm(self) -> int:
        return self.p ** self.residue_degree

    @cached_property
    def ideal(self) -> IdealRep:
        return IdealRep.principal(self.generator)

    def valuation(self, x: QuadElement) -> int:
        if x.is_zero():
            raise ZeroIdeal("valuation of 0")
        v = 0
        # clear denominators by powers of p
        d = x.denominator()
        while d % self.p == 0:
            d //= self.p
        y = x * d
        e = 0
        den = y.denominator()
        while den % self.p == 0:
            den //= self.p
            e += 1
        y = y * self.p ** e
        v -= e * (2 if self.ramified else 1)
        ginv = self.generator.inverse()
        while True:
            z = y * ginv
            if not z.is_integral():
                return v
            y = z
            v += 1

    def __repr__(self):
        return f"Prime({self.generator}, N={self.norm})"


def find_generator(F: ImagQuadField, a: int, b: int, c: int) -> QuadElement:
    """Generator of the integral ideal aZ + (b + c w)Z, searched by norm."""
    target = a * c
    for x, n in F.small_elements(target):
        if n != target:
            continue
        I = IdealRep.principal(x)
        if I.hnf == (a, b % a, c):
            return x
    raise UnsupportedClassNumber("no generator found")


@lru_cache(maxsize=None)
def factor_over(F: ImagQuadField, p: int) -> tuple[PrimeIdeal, ...]:
    """Primes above p via Kummer-Dedekind on the minimal polynomial of w."""
    T, Nw = F.trace_w, F.norm_w
    roots = [r for r in range(p) if (r * r - T * r + Nw) % p == 0]
    if not roots:
        return (PrimeIdeal(F, p, F.elt(p), 2),)
    if len(roots) == 1 or (p == 2 and len(roots) == 1):
        r = roots[0]
        g = find_generator(F, p, (-r) % p, 1)
        return (PrimeIdeal(F, p, g, 1, ramified=True),)
    out = []
    for r in roots:
        out.append(PrimeIdeal(F, p, _canonical_generator(find_generator(F, p, (-r) % p, 1)), 1))
    return tuple(out)


def _canonical_generator(x: QuadElement) -> QuadElement:
    """Deterministic associate: largest (a, b) among unit multiples."""
    cands = [x * u for u, _ in x.field.units]
    return max(cands, key=lambda y: (y.a, y.b))


def is_split(F: ImagQuadField, p: int) -> bool:
    ps = factor_over(F, p)
    return len(ps) == 2


# residues modulo an ideal -------------------------------------------------------


@dataclass(frozen=True)
class ResidueRing:
    """O/m for an integral ideal m, with canonical residue tuples."""

    modulus: IdealRep

    @property
    def field(self) -> ImagQuadField:
        return self.modulus.field

    def reduce(self, x: QuadElement) -> tuple[int, int]:
        """Canonical residue of an element integral at every prime of m."""
        a, b, c = self.modulus.hnf
        den = x.denominator()
        if den != 1:
            n = int(self.modulus.norm)
            if gcd(den, n) != 1:
                return self._reduce_fraction(x)
            x = x * (den * pow(den, -1, n))
        xa, xb = int(x.a), int(x.b)
        q = xb // c
        xa -= q * b
        xb -= q * c
        return xa % a, xb

    def _reduce_fraction(self, x: QuadElement) -> tuple[int, int]:
        # clear the denominator with prime generators away from m, then invert them mod m
        if any(q.valuation(x) < 0 for q in self.primes):
            raise NotCoprimeToConductor(f"{x} is not integral at the modulus")
        z = self.field.elt(1)
        for q in IdealRep.principal(x).prime_factors():
            v = q.valuation(x)
            if v < 0:
                z = z * q.generator ** (-v)
        y = self.reduce(x * z)
        zr = self.reduce(z)
        e, inv = len(self.units) - 1, (1 % self.modulus.hnf[0], 0)
        while e:
            if e & 1:
                inv = self.mul(inv, zr)
            zr = self.mul(zr, zr)
            e >>= 1
        return self.mul(y, inv)

    def elements(self):
        a, _, c = self.modulus.hnf
        return [(x, y) for y in range(c) for x in range(a)]

    def lift(self, r) -> QuadElement:
        return self.field.elt(r[0], r[1])

    @cached_property
    def primes(self) -> list[PrimeIdeal]:
        return self.modulus.prime_factors()

    def is_unit(self, x: QuadElement) -> bool:
        if not self.primes:
            return True
        if x.is_zero():
            return False
        return all(q.valuation(x) == 0 for q in self.primes)

    @cached_property
    def units(self) -> list[tuple[int, int]]:
        return [r for r in self.elements() if self.is_unit(self.lift(r))]

    def mul(self, r, s) -> tuple[int, int]:
        return self.reduce(self.lift(r) * self.lift(s))


@dataclass
class RayClassData:
    modulus: IdealRep
    unit_group: list[QuadElement]
    classes: dict
    representatives: list[QuadElement]

    @property
    def order(self) -> int:
        return len(self.representatives)

    def class_of(self, x: QuadElement) -> int:
        R = ResidueRing(self.modulus)
        if not R.is_unit(x):
            raise NotCoprimeToConductor(f"{x} is not prime to the modulus")
        return self.classes[R.reduce(x)]

    def representative_ideals(self) -> list[IdealRep]:
        return [IdealRep.principal(x) for x in self.representatives]


def ray_class_group(m: IdealRep, units_mode: str = "global_units", f: IdealRep | None = None,
                    avoid: tuple[IdealRep, ...] = ()) -> RayClassData:
    """(O/m)^x modulo the image of the units; representatives prime to ``avoid``."""
    F = m.field
    R = ResidueRing(m)
    if units_mode == "global_units":
        units = [u for u, _ in F.units]
    elif units_mode == "one_units_mod_f":
        Rf = ResidueRing(f)
        units = [u for u, _ in F.units if Rf.reduce(u - 1) == (0, 0)]
    else:
        raise ValueError(f"unknown unit mode {units_mode!r}")
    classes: dict = {}
    reps: list[QuadElement] = []
    avoid_primes = [q for I in avoid for q in I.prime_factors()]
    for r in R.units:
        if r in classes:
            continue
        idx = len(reps)
        for u in units:
            classes[R.reduce(R.lift(r) * u)] = idx
        reps.append(None)
    # smallest-norm representative of each class that avoids the given primes
    need = set(range(len(reps)))
    bound = 4
    while need:
        for x, _ in F.small_elements(bound):
            if not R.is_unit(x) or any(q.valuation(x) for q in avoid_primes):
                continue
            k = classes[R.reduce(x)]
            if k in need:
                reps[k] = x
                need.discard(k)
        bound *= 4
    return RayClassData(m, units, classes, reps)


# finite order characters of (O/q)^x ----------------------------------------------


@dataclass(frozen=True)
class PrimeComponent:
    """psi_q(x) = exp(2 pi i * exponent * log_g(x) / order) on (O/q)^x, q prime."""

    prime: PrimeIdeal
    order: int
    exponent: int

    @cached_property
    def ring(self) -> ResidueRing:
        return ResidueRing(self.prime.ideal)

    @cached_property
    def _log_table(self) -> dict:
        R = self.ring
        size = self.prime.norm - 1
        if size % self.order:
            raise InvalidCharacter(f"order {self.order} does not divide {size}")
        for g in sorted(R.units):
            table, x = {}, (1 % R.modulus.hnf[0], 0)
            for k in range(size):
                if x in table:
                    break
                table[x] = k
                x = R.mul(x, g)
            if len(table) == size:
                return table
        raise InvalidCharacter("residue field without generator")

    @property
    def generator(self) -> tuple[int, int]:
        return next(r for r, k in self._log_table.items() if k == 1)

    def angle(self, x: QuadElement) -> Fraction:
        r = self.ring.reduce(x)
        if r not in self._log_table:
            raise NotCoprimeToConductor(f"{x} is divisible by {self.prime}")
        return Fraction(self.exponent * self._log_table[r], self.order) % 1

    def is_trivial(self) -> bool:
        return self.exponent % self.order == 0


@dataclass(frozen=True)
class HeckeValue:
    """exp(2 pi i angle) * element: a value of an algebraic Hecke character."""

    angle: Fraction
    element: QuadElement

    def __mul__(self, other: "HeckeValue") -> "HeckeValue":
        return HeckeValue((self.angle + other.angle) % 1, self.element * other.element)

    def inverse(self) -> "HeckeValue":
        return HeckeValue((-self.angle) % 1, self.element.inverse())

    def to_complex(self) -> mpmath.mpc:
        return mpmath.expjpi(2 * mpmath.mpf(self.angle.numerator) / self.angle.denominator) * \
            self.element.to_complex()

    def root_part(self) -> Cyclo:
        return Cyclo.from_angle(self.angle)


@dataclass(frozen=True)
class AlgebraicProduct:
    """cyclotomic number times field element, kept exact for reports."""

    cyclo: Cyclo
    element: QuadElement

    def to_complex(self) -> mpmath.mpc:
        return self.cyclo.to_complex() * self.element.to_complex()

    def __mul__(self, other: "AlgebraicProduct") -> "AlgebraicProduct":
        return AlgebraicProduct(self.cyclo * other.cyclo, self.element * other.element)


@dataclass(frozen=True)
class HeckeCharacter:
    """chi((xi)) = psi(xi) xi^(-alpha), psi = product of prime components."""

    field: ImagQuadField
    alpha: int
    components: tuple[PrimeComponent, ...] = ()
    modulus_f: IdealRep | None = None

    def __post_init__(self):
        if self.alpha < 1:
            raise InvalidCharacter("alpha must be at least 1")
        for u, ang in self.field.units:
            if (self.psi_angle(u) - self.alpha * ang) % 1:
                raise InvalidCharacter(
                    f"psi({u}) must equal u^alpha for well-definedness on ideals")

    def psi_angle(self, x: QuadElement) -> Fraction:
        return sum((c.angle(x) for c in self.components if not c.is_trivial()), Fraction(0)) % 1

    @property
    def nontrivial_components(self):
        return [c for c in self.components if not c.is_trivial()]

    def conductor(self) -> IdealRep:
        g = self.field.elt(1)
        for c in self.nontrivial_components:
            g = g * c.prime.generator
        return IdealRep.principal(g)

    def conductor_primes(self) -> list[PrimeIdeal]:
        return [c.prime for c in self.nontrivial_components]

    def is_ramified_at(self, q: PrimeIdeal) -> bool:
        return any(c.prime == q for c in self.nontrivial_components)

    def __call__(self, I: IdealRep) -> HeckeValue:
        return hecke_eval(self, I)

    def describe(self) -> dict:
        return {
            "disc": self.field.disc, "alpha": self.alpha,
            "components": [{"prime": str(c.prime.generator), "norm": c.prime.norm,
                            "order": c.order, "exponent": c.exponent} for c in self.components],
        }


def hecke_eval(chi: HeckeCharacter, I: IdealRep) -> HeckeValue:
    for q in chi.conductor_primes():
        if I.valuation(q) != 0:
            raise NotCoprimeToConductor(f"{I} is not prime to {q}")
    xi = I.generator
    return HeckeValue(chi.psi_angle(xi), xi ** (-chi.alpha))


def make_character(F: ImagQuadField, alpha: int, spec, f: IdealRep | None = None) -> HeckeCharacter:
    """``spec`` lists (prime generator (a, b), order, exponent) triples."""
    comps = []
    for (a, b), order, exponent in spec:
        g = F.elt(a, b)
        n = g.norm()
        ps = _prime_divisors(int(n))
        if len(ps) != 1:
            raise InvalidCharacter(f"{g} does not generate a prime ideal")
        match = [q for q in factor_over(F, ps[0]) if q.valuation(g) == 1 and q.norm == n]
        if not match:
            raise InvalidCharacter(f"{g} does not generate a prime ideal")
        comps.append(PrimeComponent(match[0], order, exponent))
    return HeckeCharacter(F, alpha, tuple(comps), f)


def p_part(chi: HeckeCharacter, p: int) -> list[PrimeComponent]:
    return [c for c in chi.nontrivial_components if c.prime.p == p]


def conductor_exponents(chi: HeckeCharacter, p: int) -> dict:
    """m_P for each prime P above p (components are of exponent one)."""
    return {q: (1 if chi.is_ramified_at(q) else 0) for q in factor_over(chi.field, p)}


# p-adic side ----------------------------------------------------------------


def frac_class(y: QuadElement, p: int, n: int) -> tuple[int, int]:
    """Coordinates c with y = (c1 + c2 w)/p^n modulo O (x) Zp."""
    d = y.denominator()
    e, dd = 0, d
    while dd % p == 0:
        dd //= p
        e += 1
    num = y * d
    a, b = int(num.a), int(num.b)
    M = p ** n
    if e > n:
        k = e - n
        if a % p ** k or b % p ** k:
            raise ValueError(f"{y} is not p^-{n}-integral")
        a, b, e = a // p ** k, b // p ** k, n
    inv = pow(dd, -1, M)
    s = p ** (n - e)
    return (a * inv * s) % M, (b * inv * s) % M


@dataclass(frozen=True)
class PadicEmbedding:
    """iota_p : L -> unramified extension of Qp of degree ``ext_degree``."""

    field: ImagQuadField
    p: int
    precision: int
    ext_degree: int

    @cached_property
    def w_image(self) -> PadicNumber:
        F, p, N = self.field, self.p, self.precision
        split = is_split(F, p)
        f0 = 1 if split else 2
        if self.ext_degree % f0:
            raise ValueError("extension degree must contain the residue degree of p")
        s = sqrt_in_unramified(F.disc, p, f0, N + 2)
        T = F.trace_w
        roots = [(s + T) / 2, (-s + T) / 2]

        def key(r):
            return teichmuller(r).digits() if r.is_unit() else r.digits()

        root = min(roots, key=key).with_precision(N)
        return self._embed(root)

    def _embed(self, x: PadicNumber) -> PadicNumber:
        if x.ext_degree == self.ext_degree:
            return x
        if x.ext_degree != 1:
            raise ValueError("cannot embed a quadratic extension element into another tower")
        return PadicNumber(x.prime, self.ext_degree, x.coeffs + (0,) * (self.ext_degree - 1),
                           x.valuation, x.abs_precision)

    def __call__(self, x: QuadElement) -> PadicNumber:
        N, f = self.precision, self.ext_degree
        a = PadicNumber.from_rational(self.p, x.a, N + 4, f)
        b = PadicNumber.from_rational(self.p, x.b, N + 4, f)
        return (a + b * self.w_image).with_precision(N)

    @cached_property
    def _root_generator(self) -> PadicNumber:
        """Generator G of mu_(q-1) compatible with the roots of unity of L."""
        q = self.p ** self.ext_degree
        G = root_of_unity(self.p, self.ext_degree, q - 1, self.precision)
        gen, order = self.field.root_of_unity_generator
        if (q - 1) % order:
            return G
        target = self(gen)
        for j in range(1, q - 1):
            if gcd(j, q - 1) == 1:
                H = G ** j
                if H ** ((q - 1) // order) == target:
                    return H
        raise ValueError("no compatible root of unity")

    def root_of_unity(self, angle: Fraction) -> PadicNumber:
        angle = Fraction(angle) % 1
        q = self.p ** self.ext_degree
        if (q - 1) % angle.denominator:
            raise ValueError(f"exp(2 pi i {angle}) is not in the degree {self.ext_degree} extension")
        return self._root_generator ** (angle.numerator * (q - 1) // angle.denominator)

    def cyclo(self, z: Cyclo) -> PadicNumber:
        total = PadicNumber.zero(self.p, self.precision, self.ext_degree)
        for j, c in enumerate(z.num):
            if c:
                total = total + self.root_of_unity(Fraction(j, z.N)) * c
        return total / z.den

    def value(self, v: HeckeValue) -> PadicNumber:
        return self.root_of_unity(v.angle) * self(v.element)


def padic_avatar(chi: HeckeCharacter, p: int, N: int, ext_degree: int | None = None):
    """I -> iota_p(chi(I)) on ideals prime to p and the conductor."""
    f0 = 1 if is_split(chi.field, p) else 2
    iota = PadicEmbedding(chi.field, p, N, ext_degree or f0)

    def avatar(I: IdealRep) -> PadicNumber:
        if any(I.valuation(q) for q in factor_over(chi.field, p)):
            raise NotCoprimeToConductor(f"{I} is not prime to {p}")
        return iota.value(hecke_eval(chi, I))

    avatar.embedding = iota
    return avatar


def teichmuller_twist(chi: HeckeCharacter, p: int, N: int, ext_degree: int | None = None):
    """(omega_chi, <chi>) with avatar = omega_chi * <chi>."""
    avatar = padic_avatar(chi, p, N, ext_degree)

    def omega(I: IdealRep) -> PadicNumber:
        return teichmuller(avatar(I))

    def bracket(I: IdealRep) -> PadicNumber:
        v = avatar(I)
        return v / teichmuller(v)

    return omega, bracket, avatar


# characters of T = O (x) Zp and the Sigma-analyticity condition ---------------


def _residue_degree(F: ImagQuadField, p: int) -> int:
    return 1 if is_split(F, p) else 2


def sigma_condition(F: ImagQuadField, p: int, N: int) -> AnalyticityCondition:
    """W(Sigma): the line spanned by t -> iota_p(t1 + t2 w) in Hom(T, Cp)."""
    iota = PadicEmbedding(F, p, N, _residue_degree(F, p))
    one = PadicNumber.from_int(p, 1, N, iota.ext_degree)
    return AnalyticityCondition(p, 2, ((one, iota.w_image),), "identity")


def sigma_character_point(F: ImagQuadField, p: int, alpha: int, N: int) -> CharacterPoint:
    """t -> iota_p(exp(p t))^(-alpha), the avatar direction of infinity type -alpha."""
    iota = PadicEmbedding(F, p, N, _residue_degree(F, p))
    c = PadicNumber.from_int(p, -alpha * p, N, iota.ext_degree)
    return CharacterPoint((((1, 0), pexp(c)), ((0, 1), pexp(c * iota.w_image))))


def norm_character_point(F: ImagQuadField, z: PadicNumber) -> CharacterPoint:
    """t -> z^Tr(t): the direction of the inverse norm, which meets both embeddings."""
    return CharacterPoint.single((2, F.trace_w), z)


def chi_fin(chi: HeckeCharacter, p: int, n: int) -> TorsionFunction:
    """The locally constant character of (O (x) Zp)^x on T/p^nT (zero off the units)."""
    F = chi.field
    comps = p_part(chi, p)
    unit = norm_form_units(p, F.trace_w, F.norm_w)

    def value(t):
        if not unit(t):
            return 0
        x = F.elt(t[0], t[1])
        return Cyclo.from_angle(sum((c.angle(x) for c in comps), Fraction(0)))

    return TorsionFunction.from_callable(p ** n, 2, value, "O", p)


def local_F(chi: HeckeCharacter, p: int, n: int) -> TorsionFunction:
    """F = prod_P F_P: inverse of the ramified local characters, zero where they are not units."""
    F = chi.field

    def value(t):
        x = F.elt(t[0], t[1])
        out = Fraction(0)
        for c in p_part(chi, p):
            r = c.ring.reduce(x)
            if r == (0, 0):
                return 0
            out -= c.angle(x)
        return Cyclo.from_angle(out)

    return TorsionFunction.from_callable(p ** n, 2, value, "O", p)


@dataclass(frozen=True)
class LocalFactor:
    value: AlgebraicProduct
    c: QuadElement
    n_generator: QuadElement
    F_hat: Cyclo

    def to_complex(self) -> mpmath.mpc:
        return self.value.to_complex()


def local_factor(chi: HeckeCharacter, p: int, f: IdealRep, choice: int = 0) -> LocalFactor:
    """F^(c^-1) / (chi(n) c^-alpha) for prod P^(m_P) = (c) n with c = 1 mod^x f.

    ``choice`` selects among the valid decompositions so that independence of
    the decomposition can be tested.
    """
    F = chi.field
    m = conductor_exponents(chi, p)
    if not any(m.values()):
        one = F.elt(1)
        return LocalFactor(AlgebraicProduct(Cyclo.one(), one), one, one, Cyclo.one())
    P = F.elt(1)
    for q, k in m.items():
        P = P * q.generator ** k
    n = max(m.values())
    Rf = ResidueRing(f)
    bad = [q for q in factor_over(F, p)] + list(f.prime_factors())
    found = []
    for u, _ in F.units:
        target = u * P
        for k, _ in [(F.elt(0), 0)] + F.small_elements(60):
            nu = target + f.generator * k
            if nu.is_zero() or any(q.valuation(nu) for q in bad):
                continue
            found.append((nu, target / nu))
            if len(found) > choice + 8:
                break
        if len(found) > choice + 8:
            break
    if len(found) <= choice:
        raise DegenerateDecomposition("no decomposition (c) n with n prime to p f")
    nu, c = found[choice]
    assert Rf.reduce(c - 1) == (0, 0)
    Fh = transform_on_points(local_F(chi, p, n), F.gram)
    fh = Fh(frac_class(c.inverse(), p, n))
    if fh.is_zero():
        raise DegenerateDecomposition("F^ vanishes at c^-1")
    chi_n = hecke_eval(chi, IdealRep.principal(nu))
    # F^ / (chi(n) c^-alpha) = F^ * exp(-2 pi i angle) * nu^alpha * c^alpha
    cyc = fh * Cyclo.from_angle(-chi_n.angle)
    elt = (nu * c) ** chi.alpha
    return LocalFactor(AlgebraicProduct(cyc, elt), c, nu, fh)


def euler_factor(chi: HeckeCharacter, p: int) -> mpmath.mpc:
    """prod over unramified P | p of (1 - chi(P^-1)/NP); ramified primes contribute 1."""
    total = mpmath.mpc(1)
    for q in factor_over(chi.field, p):
        if chi.is_ramified_at(q):
            continue
        v = hecke_eval(chi, q.ideal).inverse()
        total *= 1 - v.to_complex() / q.norm
    return total


def euler_factor_terms(chi: HeckeCharacter, p: int) -> list[dict]:
    out = []
    for q in factor_over(chi.field, p):
        if chi.is_ramified_at(q):
            out.append({"prime": str(q.generator), "ramified": True})
            continue
        v = hecke_eval(chi, q.ideal).inverse()
        out.append({"prime": str(q.generator), "norm": q.norm, "ramified": False,
                    "chi_inverse_angle": str(v.angle), "chi_inverse_element": str(v.element)})
    return out


def char_hat_ideal(q: PrimeIdeal, I: IdealRep) -> Fraction:
    return char_hat(q.norm, I.valuation(q))
