"""Finite-level Fourier analysis on T = O_L (x) Zp and its torsion dual.

Functions on T/p^nT and on torsion subgroups of Q (x) Lambda / Lambda are both
stored as ``TorsionFunction``: a sparse map from coordinate tuples modulo an
integer ``modulus`` to exact cyclotomic values.  On the T side a tuple ``t``
is the residue class of sum t_j b_j; on the torsion side it is the point
sum t_j b_j / modulus of Q (x) Lambda / Lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, gcd
from typing import Callable, Mapping

import numpy as np

from .cyclotomic import Cyclo, _lcm, reduction_table
from .padic_core import PadicNumber, plog


class LevelMismatch(ValueError):
    pass


class LatticeMismatch(ValueError):
    pass


class MissingCharacterValue(KeyError):
    pass


class PrecisionInsufficient(ArithmeticError):
    pass


class TruncationOverflow(ValueError):
    pass


def _as_cyclo(v) -> Cyclo:
    return v if isinstance(v, Cyclo) else Cyclo.rational(v)


@dataclass(frozen=True)
class TorsionFunction:
    modulus: int
    rank: int
    values: Mapping[tuple, Cyclo] = field(default_factory=dict)
    lattice_label: str = "O"
    prime: int | None = None

    def __post_init__(self):
        clean = {}
        for t, v in self.values.items():
            t = tuple(int(x) % self.modulus for x in t)
            if len(t) != self.rank:
                raise ValueError(f"point {t} does not have rank {self.rank}")
            v = _as_cyclo(v)
            if not v.is_zero():
                clean[t] = clean[t] + v if t in clean else v
        object.__setattr__(self, "values", {t: v for t, v in clean.items() if not v.is_zero()})

    # construction -----------------------------------------------------

    @classmethod
    def on_level(cls, p: int, n: int, rank: int, values=None, lattice_label="O") -> "TorsionFunction":
        return cls(p ** n, rank, dict(values or {}), lattice_label, p)

    @classmethod
    def from_callable(cls, modulus: int, rank: int, fn: Callable, lattice_label="O",
                      prime=None) -> "TorsionFunction":
        vals = {t: fn(t) for t in product(range(modulus), repeat=rank)}
        return cls(modulus, rank, vals, lattice_label, prime)

    @classmethod
    def delta(cls, modulus: int, point, lattice_label="O", prime=None) -> "TorsionFunction":
        point = tuple(point)
        return cls(modulus, len(point), {point: Cyclo.one()}, lattice_label, prime)

    @classmethod
    def constant(cls, modulus: int, rank: int, c=1, lattice_label="O", prime=None) -> "TorsionFunction":
        return cls.from_callable(modulus, rank, lambda t: c, lattice_label, prime)

    # access -----------------------------------------------------------

    @property
    def level(self) -> int:
        if self.prime is None:
            raise LevelMismatch("level is only defined for prime power moduli")
        n, m = 0, self.modulus
        while m % self.prime == 0:
            m //= self.prime
            n += 1
        if m != 1:
            raise LevelMismatch(f"modulus {self.modulus} is not a power of {self.prime}")
        return n

    def __call__(self, t) -> Cyclo:
        t = tuple(int(x) % self.modulus for x in t)
        return self.values.get(t, Cyclo.zero())

    def points(self):
        return product(range(self.modulus), repeat=self.rank)

    def support(self) -> set:
        return set(self.values)

    def _same_space(self, other: "TorsionFunction"):
        if self.rank != other.rank or self.lattice_label != other.lattice_label:
            raise LatticeMismatch(f"{self.lattice_label}/{self.rank} vs {other.lattice_label}/{other.rank}")

    def __add__(self, other: "TorsionFunction") -> "TorsionFunction":
        self._same_space(other)
        M = _lcm(self.modulus, other.modulus)
        a, b = self.zero_pad(M), other.zero_pad(M)
        vals = dict(a.values)
        for t, v in b.values.items():
            vals[t] = vals[t] + v if t in vals else v
        return TorsionFunction(M, self.rank, vals, self.lattice_label, self.prime or other.prime)

    def scale(self, c) -> "TorsionFunction":
        c = _as_cyclo(c)
        q = c.rational_value()
        c = c if q is None else q
        return TorsionFunction(self.modulus, self.rank, {t: v * c for t, v in self.values.items()},
                               self.lattice_label, self.prime)

    def __eq__(self, other):
        if not isinstance(other, TorsionFunction):
            return NotImplemented
        if self.rank != other.rank or self.lattice_label != other.lattice_label:
            return False
        M = _lcm(self.modulus, other.modulus)
        a, b = self.zero_pad(M), other.zero_pad(M)
        if set(a.values) != set(b.values):
            return False
        return all(a.values[t] == b.values[t] for t in a.values)

    def __hash__(self):
        return hash((self.rank, self.lattice_label, len(self.values)))

    # level change -----------------------------------------------------

    def zero_pad(self, M: int) -> "TorsionFunction":
        """View a function on the points of order dividing ``modulus`` inside the larger torsion group."""
        if M == self.modulus:
            return self
        if M % self.modulus:
            raise LevelMismatch(f"{self.modulus} does not divide {M}")
        k = M // self.modulus
        return TorsionFunction(M, self.rank, {tuple(x * k for x in t): v for t, v in self.values.items()},
                               self.lattice_label, self.prime)

    def coarsen(self, M: int) -> "TorsionFunction":
        """Inverse of ``zero_pad``; the support must lie in the smaller torsion group."""
        if self.modulus % M:
            raise LevelMismatch(f"{M} does not divide {self.modulus}")
        k = self.modulus // M
        vals = {}
        for t, v in self.values.items():
            if any(x % k for x in t):
                raise LevelMismatch(f"point {t} is not {M}-torsion")
            vals[tuple(x // k for x in t)] = v
        return TorsionFunction(M, self.rank, vals, self.lattice_label, self.prime)

    def pullback(self, M: int) -> "TorsionFunction":
        """Pull a function on T/mT back along T/MT -> T/mT."""
        if M % self.modulus:
            raise LevelMismatch(f"{self.modulus} does not divide {M}")
        return TorsionFunction.from_callable(M, self.rank, lambda t: self(t), self.lattice_label, self.prime)

    def pushforward(self, m: int) -> "TorsionFunction":
        """Sum over the fibres of T/MT -> T/mT (coarsening of a measure table)."""
        if self.modulus % m:
            raise LevelMismatch(f"{m} does not divide {self.modulus}")
        vals: dict = {}
        for t, v in self.values.items():
            s = tuple(x % m for x in t)
            vals[s] = vals[s] + v if s in vals else v
        return TorsionFunction(m, self.rank, vals, self.lattice_label, self.prime)

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus, "rank": self.rank, "prime": self.prime,
            "lattice": self.lattice_label,
            "values": [{"point": list(t), "value": v.triples(), "conductor": v.N}
                       for t, v in sorted(self.values.items())],
        }


@dataclass(frozen=True)
class FiniteCharacter:
    """t -> zeta_modulus^(exponents . t) on (Z/modulus)^rank."""

    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) % self.modulus for e in self.exponents))

    def __call__(self, t) -> Cyclo:
        return Cyclo.root(self.modulus, sum(e * x for e, x in zip(self.exponents, t)))

    def __mul__(self, other: "FiniteCharacter") -> "FiniteCharacter":
        return FiniteCharacter(self.modulus, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def as_function(self, lattice_label="O", prime=None) -> TorsionFunction:
        return TorsionFunction.from_callable(self.modulus, len(self.exponents), self, lattice_label, prime)


def all_characters(modulus: int, rank: int):
    return [FiniteCharacter(modulus, e) for e in product(range(modulus), repeat=rank)]


# Fourier transform -------------------------------------------------------

def _transform_arrays(fn: TorsionFunction, sign: int):
    """Sum_t zeta_m^(sign e.t) fn(t) for every e; integer arrays over exponents of zeta_K."""
    m, r = fn.modulus, fn.rank
    K = m
    den = 1
    for v in fn.values.values():
        K = _lcm(K, v.N)
        den = _lcm(den, v.den)
    bound = sum(max(map(abs, v.num), default=0) * (den // v.den) * len(v.num) for v in fn.values.values())
    dtype = np.int64 if bound * m ** r < 2 ** 60 else object
    A = np.zeros((m,) * r + (K,), dtype=dtype)
    for t, v in fn.values.items():
        vec = v.exponent_vector(K)
        scale = den // v.den
        A[t] += np.array([c * scale for c in vec], dtype=dtype)
    step = K // m
    ks = np.arange(K)
    for axis in range(r):
        A0 = np.moveaxis(A, axis, 0)
        shape = A0.shape
        A0 = A0.reshape(m, -1, K)
        B = np.zeros_like(A0)
        ts = np.arange(m)
        for e in range(m):
            # multiplying by zeta_K^shift rotates the exponent axis
            shifts = (sign * e * ts * step) % K
            idx = (ks[None, :] - shifts[:, None]) % K
            B[e] = A0[ts[:, None, None], np.arange(A0.shape[1])[None, :, None], idx[:, None, :]].sum(axis=0)
        A = np.moveaxis(B.reshape(shape), 0, axis)
    return A, K, den


def _reduce_rows(A, K: int):
    """Power-basis coordinates for every exponent vector on the last axis."""
    flat = A.reshape(-1, K)
    table = np.array(reduction_table(K), dtype=object)
    if flat.dtype != object and flat.size:
        big = int(np.abs(flat).max()) * K * max(abs(int(x)) for x in table.flat)
        if big < 2 ** 62:
            return flat.dot(table.astype(np.int64))
        flat = flat.astype(object)
    return flat.dot(table)


def finite_fourier(rho: TorsionFunction, n: int | None = None) -> TorsionFunction:
    """rho^(chi) = (1/#) sum_s chi(s)^(-1) rho(s); the result is keyed by character exponents."""
    if n is not None:
        if rho.prime is None:
            raise LevelMismatch("a level needs a prime")
        M = rho.prime ** n
        if M % rho.modulus:
            raise LevelMismatch(f"function of modulus {rho.modulus} does not factor through level {n}")
        rho = rho.pullback(M)
    A, K, den = _transform_arrays(rho, -1)
    total = den * rho.modulus ** rho.rank
    red = _reduce_rows(A, K)
    vals = {}
    for e, row in zip(product(range(rho.modulus), repeat=rho.rank), red):
        if row.any():
            vals[e] = Cyclo(K, [int(c) for c in row], total)
    return TorsionFunction(rho.modulus, rho.rank, vals, "dual:" + rho.lattice_label, rho.prime)


def inverse_finite_fourier(table: TorsionFunction) -> TorsionFunction:
    """rho(t) = sum_chi chi(t) table(chi)."""
    A, K, den = _transform_arrays(table, +1)
    red = _reduce_rows(A, K)
    vals = {}
    for t, row in zip(product(range(table.modulus), repeat=table.rank), red):
        if row.any():
            vals[t] = Cyclo(K, [int(c) for c in row], den)
    label = table.lattice_label[5:] if table.lattice_label.startswith("dual:") else table.lattice_label
    return TorsionFunction(table.modulus, table.rank, vals, label, table.prime)


def character_value(chi: FiniteCharacter, table: TorsionFunction) -> Cyclo:
    return table(chi.exponents)


def convolve(f1: TorsionFunction, f2: TorsionFunction) -> TorsionFunction:
    """(f1 * f2)(z) = sum_{x + y = z} f1(x) f2(y)."""
    f1._same_space(f2)
    M = _lcm(f1.modulus, f2.modulus)
    a, b = f1.zero_pad(M), f2.zero_pad(M)
    vals: dict = {}
    for x, u in a.values.items():
        for y, v in b.values.items():
            z = tuple((i + j) % M for i, j in zip(x, y))
            w = u * v
            vals[z] = vals[z] + w if z in vals else w
    return TorsionFunction(M, f1.rank, vals, f1.lattice_label, f1.prime or f2.prime)


def _stack(vals, K: int, conj: bool = False):
    """Exponent-vector array of a list of cyclotomic numbers over a common denominator."""
    den = 1
    for v in vals:
        den = _lcm(den, v.den)
    rows = []
    for v in vals:
        vec = list(v.num) + [0] * (K - len(v.num)) if v.N == K else v.exponent_vector(K)
        if conj:
            vec = [vec[0]] + vec[:0:-1]
        k = den // v.den
        rows.append([c * k for c in vec])
    return rows, den


def _int_array(rows, n: int, K: int):
    try:
        return np.array(rows, dtype=np.int64).reshape(n, K)
    except OverflowError:
        return np.array(rows, dtype=object).reshape(n, K)


def _products(us, vs, conj: bool = False):
    """Exact termwise products u * v (or u * conj(v)) as exponent arrays mod zeta_K."""
    K = 1
    for v in list(us) + list(vs):
        K = _lcm(K, v.N)
    a, da = _stack(us, K)
    b, db = _stack(vs, K, conj)
    A, B = _int_array(a, len(us), K), _int_array(b, len(vs), K)
    bound = int(np.abs(A).max(initial=0)) * int(np.abs(B).max(initial=0))
    if bound * K * K >= 2 ** 60:
        A, B = A.astype(object), B.astype(object)
    out = np.zeros_like(A)
    for j in range(K):
        out += np.roll(A, j, axis=1) * B[:, j:j + 1]
    return out, K, da * db


def pointwise(f1: TorsionFunction, f2: TorsionFunction) -> TorsionFunction:
    if f1.modulus != f2.modulus:
        M = _lcm(f1.modulus, f2.modulus)
        f1, f2 = f1.pullback(M), f2.pullback(M)
    keys = [t for t in f1.values if t in f2.values]
    if not keys:
        return TorsionFunction(f1.modulus, f1.rank, {}, f1.lattice_label, f1.prime)
    out, K, den = _products([f1.values[t] for t in keys], [f2.values[t] for t in keys])
    red = _reduce_rows(out, K)
    vals = {t: Cyclo(K, [int(c) for c in row], den) for t, row in zip(keys, red)}
    return TorsionFunction(f1.modulus, f1.rank, vals, f1.lattice_label, f1.prime)


def conjugate(f: TorsionFunction) -> TorsionFunction:
    return TorsionFunction(f.modulus, f.rank, {t: v.conjugate() for t, v in f.values.items()},
                           f.lattice_label, f.prime)


def inner(f1: TorsionFunction, f2: TorsionFunction) -> Cyclo:
    """sum_t f1(t) * conj(f2(t))."""
    keys = [t for t in f1.values if tuple(x % f2.modulus for x in t) in f2.values]
    if not keys:
        return Cyclo.zero()
    out, K, den = _products([f1.values[t] for t in keys], [f2(t) for t in keys], conj=True)
    return Cyclo.from_exponent_vector(K, [int(c) for c in out.sum(axis=0)], den)


def rank_one_units(p: int) -> Callable:
    return lambda t: t[0] % p != 0


def norm_form_units(p: int, trace: int, norm: int) -> Callable:
    """Unit test for c1 + c2 w in O (x) Zp, where w has the given trace and norm."""
    return lambda t: (t[0] * t[0] + trace * t[0] * t[1] + norm * t[1] * t[1]) % p != 0


def extend_by_zero(rho: TorsionFunction, is_unit: Callable | None = None) -> TorsionFunction:
    """j_! rho: keep the values at units and put 0 elsewhere."""
    if is_unit is None:
        p = rho.prime
        is_unit = (lambda t: all(x % p for x in t))
    vals = {t: v for t, v in rho.values.items() if is_unit(t)}
    return TorsionFunction(rho.modulus, rho.rank, vals, rho.lattice_label, rho.prime)


def char_hat(norm_p: int, v: int) -> Fraction:
    """Fourier transform of the indicator of the units at a prime of norm ``norm_p``,
    evaluated at a point of valuation ``v``."""
    if v >= 0:
        return 1 - Fraction(1, norm_p)
    if v == -1:
        return -Fraction(1, norm_p)
    return Fraction(0)


def trace_pairing_matrix(trace_w: int, norm_w: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Gram matrix of (x, y) -> Tr(xy) on the basis (1, w)."""
    tr_w2 = trace_w * trace_w - 2 * norm_w
    return ((2, trace_w), (trace_w, tr_w2))


def point_to_character(c, modulus: int, gram) -> tuple[int, ...]:
    """Exponents of t -> exp(2 pi i Tr(x t)) for the torsion point x = (c1 + c2 w)/modulus."""
    return tuple(sum(gram[j][i] * c[i] for i in range(len(c))) % modulus for j in range(len(c)))


def character_to_point(e, modulus: int, gram) -> tuple[int, ...]:
    det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
    inv = pow(det, -1, modulus)
    adj = ((gram[1][1], -gram[0][1]), (-gram[1][0], gram[0][0]))
    return tuple((inv * sum(adj[i][j] * e[j] for j in range(2))) % modulus for i in range(2))


def transform_on_points(rho: TorsionFunction, gram) -> TorsionFunction:
    """rho^ transported from characters to torsion points through the trace pairing."""
    table = finite_fourier(rho)
    vals = {character_to_point(e, rho.modulus, gram): v for e, v in table.values.items()}
    return TorsionFunction(rho.modulus, rho.rank, vals, "torsion:" + rho.lattice_label, rho.prime)


def integrate_against(rho: TorsionFunction, f_values: Mapping[tuple, object], xi=None):
    """sum_chi rho^(chi) (Xi.f)(chi); ``f_values`` is keyed by character exponents."""
    table = finite_fourier(rho)
    total = 0
    for e, coeff in table.values.items():
        if e not in f_values:
            raise MissingCharacterValue(e)
        val = f_values[e]
        if isinstance(val, Cyclo):
            total = coeff * val + total
        else:
            total = total + coeff.to_complex() * val
    return total


# Amice transform ----------------------------------------------------------

def _binom_general(a: int, k: int):
    if a >= 0:
        return comb(a, k)
    return (-1) ** k * comb(-a + k - 1, k)


@dataclass(frozen=True)
class AmiceSeries:
    """Power series in X_1..X_r truncated at total degree ``degree``."""

    rank: int
    degree: int
    coeffs: Mapping[tuple, object]

    def __getitem__(self, mono):
        return self.coeffs.get(tuple(mono), 0)

    def __mul__(self, other: "AmiceSeries") -> "AmiceSeries":
        D = min(self.degree, other.degree)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            d1 = sum(m1)
            for m2, c2 in other.coeffs.items():
                if d1 + sum(m2) > D:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return AmiceSeries(self.rank, D, out)

    def __add__(self, other: "AmiceSeries") -> "AmiceSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return AmiceSeries(self.rank, min(self.degree, other.degree), out)

    def equals(self, other: "AmiceSeries") -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self[k] == other[k] for k in keys)

    def truncate(self, D: int) -> "AmiceSeries":
        if D > self.degree:
            raise TruncationOverflow(f"series only known to degree {self.degree}")
        return AmiceSeries(self.rank, D, {m: c for m, c in self.coeffs.items() if sum(m) <= D})


def dirac_series(a, D: int) -> AmiceSeries:
    """prod_j (1 + X_j)^(a_j) truncated at total degree D."""
    a = tuple(a)
    r = len(a)
    coeffs = {}
    for m in product(range(D + 1), repeat=r):
        if sum(m) <= D:
            c = 1
            for aj, mj in zip(a, m):
                c *= _binom_general(aj, mj)
            if c:
                coeffs[m] = c
    return AmiceSeries(r, D, coeffs)


def amice_transform(mu: Mapping[tuple, object], D: int = 16) -> AmiceSeries:
    """Transform of the finite combination sum_a mu[a] delta_a of Dirac measures on Zp^r."""
    if not mu:
        raise ValueError("empty distribution; rank unknown")
    r = len(next(iter(mu)))
    total = AmiceSeries(r, D, {})
    for a, w in mu.items():
        s = dirac_series(a, D)
        total = total + AmiceSeries(r, D, {m: c * w for m, c in s.coeffs.items()})
    return total


def convolve_measures(mu: Mapping[tuple, object], nu: Mapping[tuple, object]) -> dict:
    out: dict = {}
    for a, u in mu.items():
        for b, v in nu.items():
            c = tuple(x + y for x, y in zip(a, b))
            out[c] = out.get(c, 0) + u * v
    return out


def measure_on_level(mu: Mapping[tuple, object], p: int, n: int) -> dict:
    """Coset values mu(a + p^n Zp^r) of a Dirac combination."""
    out: dict = {}
    for a, w in mu.items():
        c = tuple(x % p ** n for x in a)
        out[c] = out.get(c, 0) + w
    return out


def reduce_mod_level(series: AmiceSeries, p: int, n: int) -> tuple:
    """Remainder of a one-variable polynomial transform modulo (1+X)^(p^n) - 1.

    Measures with equal coset values at level n have equal remainders, so
    this is the level-n shadow of the transform.  The series must be an
    honest polynomial of degree below its truncation bound.
    """
    if series.rank != 1:
        raise ValueError("only rank one is supported")
    top = max((m[0] for m, c in series.coeffs.items() if c), default=0)
    if top >= series.degree:
        raise TruncationOverflow("series may be truncated; raise the degree")
    M = p ** n
    modpoly = [comb(M, k) for k in range(M + 1)]
    modpoly[0] -= 1
    rem = [series[(k,)] for k in range(top + 1)]
    for k in range(len(rem) - 1, M - 1, -1):
        c = rem[k]
        if c:
            for j in range(M + 1):
                rem[k - M + j] -= c * modpoly[j]
    rem = rem[:M] + [0] * max(0, M - len(rem))
    return tuple(rem)


# Character points and W-analyticity ---------------------------------------

@dataclass(frozen=True)
class CharacterPoint:
    """chi(g) = prod_k z_k^(beta_k . g), each z_k a one-unit."""

    factors: tuple[tuple[tuple[int, ...], PadicNumber], ...]

    def __post_init__(self):
        for beta, z in self.factors:
            if (z - 1).valuation < 1:
                raise ValueError("z - 1 must have positive valuation")

    @classmethod
    def single(cls, beta, z: PadicNumber) -> "CharacterPoint":
        return cls(((tuple(beta), z),))

    @property
    def rank(self) -> int:
        return len(self.factors[0][0])

    def differential(self) -> list[PadicNumber]:
        """(d chi)(e_j) = sum_k beta_{k,j} log z_k."""
        out = None
        for beta, z in self.factors:
            lz = plog(z)
            terms = [lz * b for b in beta]
            out = terms if out is None else [a + b for a, b in zip(out, terms)]
        return out

    def evaluate(self, g) -> PadicNumber:
        val = None
        for beta, z in self.factors:
            e = sum(b * x for b, x in zip(beta, g))
            term = z ** e
            val = term if val is None else val * term
        return val


@dataclass(frozen=True)
class AnalyticityCondition:
    """Row span W of linear forms on T, with an optional CM-type tag."""

    prime: int
    rank: int
    rows: tuple[tuple[PadicNumber, ...], ...]
    sigma: str = ""

    def transformed(self, matrix) -> "AnalyticityCondition":
        """Rows replaced by ``matrix`` times rows (same span when the matrix is invertible)."""
        new = []
        for mrow in matrix:
            acc = None
            for coef, row in zip(mrow, self.rows):
                scaled = [x * coef for x in row]
                acc = scaled if acc is None else [a + b for a, b in zip(acc, scaled)]
            new.append(tuple(acc))
        return AnalyticityCondition(self.prime, self.rank, tuple(new), self.sigma)


def _residual(rows, v):
    """Component of v left after eliminating the span of rows (p-adic Gaussian elimination)."""
    rows = [list(r) for r in rows]
    v = list(v)
    used = set()
    for r in rows:
        # pivot on the coordinate of smallest valuation
        cand = [(x.valuation, j) for j, x in enumerate(r) if j not in used and not x.is_zero()]
        if not cand:
            continue
        _, j = min(cand)
        used.add(j)
        factor = v[j] / r[j]
        v = [a - factor * b for a, b in zip(v, r)]
        rows = [[a - (rr[j] / r[j]) * b for a, b in zip(rr, r)] if rr is not r else rr for rr in rows]
    return v


def is_W_analytic(chi: CharacterPoint, W: AnalyticityCondition) -> bool:
    """Decide whether d chi lies in the span of W at the working precision."""
    v = chi.differential()
    if all(x.is_zero() for x in v):
        return True
    res = _residual(W.rows, v)
    if all(x.is_zero() for x in res):
        return True
    vmin = min(x.valuation for x in v if not x.is_zero())
    N = min(x.abs_precision for x in v)
    rmin = min(x.valuation for x in res if not x.is_zero())
    if rmin < vmin + (N - vmin) // 2:
        return False
    raise PrecisionInsufficient(
        f"residual of valuation {rmin} at working precision {N} does not decide membership")
