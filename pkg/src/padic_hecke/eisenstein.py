"""Eisenstein series over lattices of imaginary quadratic fields.

The core quantity is the shifted lattice sum

    K(z, k, s) = sum_{w in z + Lambda, w != 0} conj(w)^k |w|^(-2s),

so that 1/(lambda^alpha N(lambda)^s) is the summand with k = alpha and
s -> alpha + s.  It is evaluated by splitting the Mellin integral of
|w|^(-2s) at t = 1 (Ewald's method).  With A the covolume,
x_w = pi |w|^2 / A and y_xi = pi A |xi|^2:

    Gamma(s) (pi/A)^(-s) K = sum_w conj(w)^k Gamma(s, x_w) x_w^(-s)
        + (-i)^k A^k sum_{xi != 0} conj(xi)^k e^(2 pi i <z, xi>) Gamma(k+1-s, y_xi) y_xi^(s-k-1)

where xi runs over the dual lattice {xi : Re(w conj(xi)) in Z} and
<z, xi> = Re(z conj(xi)).  Both sums converge for every s, which also gives
the continuation used for weights 1 and 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd

import mpmath

from .cyclotomic import Cyclo, euler_phi
from .fourier import TorsionFunction
from .hecke_field import (HeckeCharacter, IdealRep, ImagQuadField, QuadElement, RayClassData,
                          ResidueRing, factor_over, hecke_eval, ray_class_group)


class NotGammaInvariant(ValueError):
    pass


class ConvergenceNotGuaranteed(ValueError):
    pass


class CoprimalityViolation(ValueError):
    pass


class UnsupportedField(ValueError):
    pass


class RecognitionFailed(ValueError):
    pass


def _ulp(v):
    """Rounding bound for one operation at the current working precision."""
    return 4 * abs(v) * mpmath.mpf(2) ** (-mpmath.mp.prec)


@dataclass(frozen=True)
class EisensteinValue:
    value: mpmath.mpc
    abs_error: mpmath.mpf
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __add__(self, other: "EisensteinValue") -> "EisensteinValue":
        v = self.value + other.value
        return EisensteinValue(v, self.abs_error + other.abs_error + _ulp(v), {})

    def __sub__(self, other: "EisensteinValue") -> "EisensteinValue":
        v = self.value - other.value
        return EisensteinValue(v, self.abs_error + other.abs_error + _ulp(v), {})

    def scale(self, c) -> "EisensteinValue":
        c = mpmath.mpmathify(c)
        v = self.value * c
        return EisensteinValue(v, self.abs_error * abs(c) + _ulp(v), self.meta)

    def to_json(self, digits: int = 25) -> dict:
        v = mpmath.mpc(self.value)
        return {"re": mpmath.nstr(v.real, digits), "im": mpmath.nstr(v.imag, digits),
                "abs_error": mpmath.nstr(self.abs_error, 3)}


# lattices -----------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeC:
    """Lambda = g * O inside C, with basis (g, g w)."""

    field: ImagQuadField
    generator: QuadElement

    @property
    def basis_exact(self) -> tuple[QuadElement, QuadElement]:
        return self.generator, self.generator * self.field.w

    def basis(self):
        b1, b2 = self.basis_exact
        return b1.to_complex(), b2.to_complex()

    def covolume(self):
        w1, w2 = self.basis()
        return abs((mpmath.conj(w1) * w2).imag)

    def diameter(self):
        w1, w2 = self.basis()
        return max(abs(w1 + w2), abs(w1 - w2))

    def dual_basis(self):
        """xi_1, xi_2 with Re(w_i conj(xi_j)) = delta_ij."""
        w1, w2 = self.basis()
        M = mpmath.matrix([[w1.real, w1.imag], [w2.real, w2.imag]])
        Minv = M ** -1
        # columns of M^-1 are the dual vectors
        return (mpmath.mpc(Minv[0, 0], Minv[1, 0]), mpmath.mpc(Minv[0, 1], Minv[1, 1]))

    def coords(self, x: QuadElement) -> tuple[Fraction, Fraction]:
        """Rational coordinates of x in the basis (g, g w)."""
        y = x / self.generator
        return y.a, y.b

    def point(self, t, M: int) -> QuadElement:
        return self.generator * self.field.elt(Fraction(t[0], M), Fraction(t[1], M))

    def scaled(self, u: QuadElement) -> "LatticeC":
        return LatticeC(self.field, self.generator * u)

    @property
    def label(self) -> str:
        g = self.generator
        return f"({g.a}+{g.b}w)O"


# incomplete gamma helpers ------------------------------------------------------


def _upper_gamma(a, x):
    """Gamma(a, x) for x > 0, with closed forms at integer a."""
    if isinstance(a, int) or (mpmath.im(a) == 0 and mpmath.re(a) == int(mpmath.re(a))):
        n = int(mpmath.re(a))
        if n >= 1:
            term = mpmath.mpf(1)
            total = mpmath.mpf(1)
            for j in range(1, n):
                term = term * x / j
                total += term
            return mpmath.factorial(n - 1) * mpmath.exp(-x) * total
        g = mpmath.e1(x)
        ex = mpmath.exp(-x)
        for m in range(0, -n):
            # Gamma(-m-1, x) = (Gamma(-m, x) - x^(-m-1) e^-x) / (-m-1)
            g = (g - x ** (-m - 1) * ex) / (-m - 1)
        return g
    return mpmath.gammainc(a, x)


def _tail_integral(k: int, X):
    """int_R^inf r^(k-1) exp(-c r^2) dr in units where c R^2 = X, without the c factor."""
    return mpmath.gammainc(mpmath.mpf(k) / 2, X) / 2


# the lattice sum ---------------------------------------------------------------


def _enumerate(basis, shift, R, skip_zero_shift):
    """Points (u + m) w1 + (v + n) w2 of norm <= R, u, v the shift coordinates."""
    w1, w2 = basis
    A = abs((mpmath.conj(w1) * w2).imag)
    u0, v0 = shift
    mb = int(R * abs(w2) / A) + 2
    nb = int(R * abs(w1) / A) + 2
    # float prefilter with a safety margin, exact test only near the boundary
    f1, f2 = complex(w1), complex(w2)
    fu, fv, fR = float(u0), float(v0), float(R)
    margin = 1e-9 * (fR + 1)
    mu, mv = mpmath.mpf(u0.numerator) / u0.denominator, mpmath.mpf(v0.numerator) / v0.denominator
    out = []
    for n in range(-nb - 1, nb + 1):
        cv = fv + n
        for m in range(-mb - 1, mb + 1):
            r = abs((fu + m) * f1 + cv * f2)
            if r > fR + margin:
                continue
            if skip_zero_shift and u0 == -m and v0 == -n:
                continue
            w = (mu + m) * w1 + (mv + n) * w2
            if r >= fR - margin and abs(w) > R:
                continue
            out.append(((m, n), w))
    return out


@lru_cache(maxsize=200000)
def _lattice_sum_cached(field_disc, gen_ab, u0, v0, k, s_re, s_im, dps):
    with mpmath.workdps(dps + 10):
        return _lattice_sum(field_disc, gen_ab, (u0, v0), k, s_re, s_im, dps)


def _parse_s(s_re, s_im):
    return mpmath.mpc(s_re, s_im) if s_im else mpmath.mpf(s_re)


def lattice_sum(lat: LatticeC, coords, k: int, s, dps: int | None = None) -> EisensteinValue:
    """K(z, k, s) for z with rational coordinates ``coords`` in the basis of ``lat``."""
    dps = dps or mpmath.mp.dps
    u0, v0 = (Fraction(c) % 1 for c in coords)
    s = mpmath.mpmathify(s)
    g = lat.generator
    val, err, meta = _lattice_sum_cached(lat.field.disc, (g.a, g.b), u0, v0, k,
                                         mpmath.nstr(mpmath.re(s), dps + 5),
                                         mpmath.nstr(mpmath.im(s), dps + 5) if mpmath.im(s) else 0,
                                         dps)
    return EisensteinValue(val, err, dict(meta))


@lru_cache(maxsize=256)
def _roots_table(M: int, dps: int):
    with mpmath.workdps(dps + 10):
        return tuple(mpmath.expjpi(mpmath.mpf(2 * j) / M) for j in range(M))


@lru_cache(maxsize=1024)
def _setup(field_disc, gen_ab, k, s_re, s_im, dps):
    """Cutoffs, tail bounds and the shift-independent reciprocal terms."""
    F = ImagQuadField(field_disc)
    lat = LatticeC(F, F.elt(*gen_ab))
    s = _parse_s(s_re, s_im)
    A = lat.covolume()
    d = lat.diameter()
    pi = mpmath.pi
    sigma = mpmath.re(s)
    a_rec = k + 1 - s
    a_re = mpmath.re(a_rec)
    target = mpmath.mpf(10) ** (-dps - 3)
    X = mpmath.mpf(dps) * mpmath.log(10) + 10 + k
    X = max(X, 2 * (sigma - 1) + 1, 2 * (a_re - 1) + 1, 1)
    while True:
        R = mpmath.sqrt(X * A / pi)
        Rd = mpmath.sqrt(X / (pi * A))
        # tails of both sums, see the module docstring for the comparison argument
        gR = R ** k * 2 * mpmath.exp(-X) / X
        tail_r = (pi / A) * ((R + d) ** 2 * gR
                             + 4 * (1 + d / R) * (A / pi) * (A / pi) ** (mpmath.mpf(k) / 2) * _tail_integral(k, X))
        dstar = d / A
        gQ = A ** k * Rd ** k * 2 * mpmath.exp(-X) / X
        tail_q = (pi * A) * ((Rd + dstar) ** 2 * gQ
                             + 4 * A ** k * (1 + dstar / Rd) * (1 / (pi * A)) * (1 / (pi * A)) ** (mpmath.mpf(k) / 2)
                             * _tail_integral(k, X))
        if tail_r + tail_q < target or X > 10 * dps + 200:
            break
        X += 5
    xi1, xi2 = lat.dual_basis()
    rec = []
    mag = mpmath.mpf(0)
    for (a, b), xi in _enumerate((xi1, xi2), (0, 0), Rd, True):
        y = pi * A * abs(xi) ** 2
        t = mpmath.conj(xi) ** k * _upper_gamma(a_rec, y) * y ** (-a_rec)
        rec.append((a, b, t))
        mag += abs(t) * A ** k
    pref = (pi / A) ** s / mpmath.gamma(s)
    return lat.basis(), A, R, Rd, tail_r, tail_q, tuple(rec), mag, pref


def _lattice_sum(field_disc, gen_ab, shift, k: int, s_re, s_im, dps: int):
    basis, A, R, Rd, tail_r, tail_q, rec, rec_mag, pref = _setup(field_disc, gen_ab, k, s_re, s_im, dps)
    s = _parse_s(s_re, s_im)
    pi = mpmath.pi
    real_pts = _enumerate(basis, shift, R, True)
    rs = mpmath.mpc(0)
    mag = mpmath.mpf(rec_mag)
    for _, w in real_pts:
        x = pi * abs(w) ** 2 / A
        t = mpmath.conj(w) ** k * _upper_gamma(s, x) * x ** (-s)
        rs += t
        mag += abs(t)
    u0, v0 = shift
    M = u0.denominator * v0.denominator // gcd(u0.denominator, v0.denominator)
    roots = _roots_table(M, dps)
    iu, iv = int(u0 * M), int(v0 * M)
    qs = mpmath.mpc(0)
    for a, b, t in rec:
        qs += roots[(iu * a + iv * b) % M] * t
    total = pref * (rs + (-1j) ** k * A ** k * qs)
    rounding = (len(real_pts) + len(rec) + 10) * mag * mpmath.mpf(2) ** (-mpmath.mp.prec + 4)
    err = abs(pref) * (tail_r + tail_q + rounding)
    meta = (("radius", mpmath.nstr(R, 8)), ("dual_radius", mpmath.nstr(Rd, 8)),
            ("terms", len(real_pts) + len(rec)))
    # the value keeps the guard digits; the bound also covers rounding to dps digits
    err += abs(total) * mpmath.mpf(10) ** (-dps)
    return total, err, meta


def brute_force_sum(lat: LatticeC, coords, k: int, s, R) -> EisensteinValue:
    """Direct summation over square shells of coordinates up to Euclidean radius R.

    The tail bound uses N(r) <= pi (r + d)^2 / A for the number of shifted
    lattice points of norm at most r and needs 2 Re(s) - k > 2.
    """
    u0, v0 = (Fraction(c) % 1 for c in coords)
    w1, w2 = lat.basis()
    A = lat.covolume()
    d = lat.diameter()
    sigma = mpmath.re(mpmath.mpmathify(s))
    m = 2 * sigma - k
    if m <= 2:
        raise ConvergenceNotGuaranteed("direct summation needs 2 Re(s) - k > 2")
    R = mpmath.mpf(R)
    mb = int(R * abs(w2) / A) + 2
    nb = int(R * abs(w1) / A) + 2
    B = max(mb, nb)
    total = mpmath.mpc(0)
    count = 0
    # shells of constant max(|m|, |n|), walked from the outside in
    for shell in range(B, -1, -1):
        pts = set()
        for j in range(-shell, shell + 1):
            pts.update({(shell, j), (-shell, j), (j, shell), (j, -shell)})
        for mm, nn in sorted(pts, reverse=True):
            cu, cv = u0 + mm, v0 + nn
            if cu == 0 and cv == 0:
                continue
            w = cu * w1 + cv * w2
            r = abs(w)
            if r <= R:
                total += mpmath.conj(w) ** k * r ** (-2 * s)
                count += 1
    tail = (mpmath.pi / A) * (1 + d / R) ** 2 * m / (m - 2) * R ** (2 - m)
    rounding = count * mpmath.mpf(2) ** (-mpmath.mp.prec + 6)
    return EisensteinValue(total, tail + rounding, {"radius": str(R), "terms": count})


# Eisenstein series -------------------------------------------------------------


def unit_action(lat: LatticeC, gamma: QuadElement, t, M: int) -> tuple[int, int]:
    """Coordinates of gamma * z for the torsion point z = g (t1 + t2 w) / M."""
    y = gamma * lat.field.elt(t[0], t[1])
    return int(y.a) % M, int(y.b) % M


def check_gamma_invariance(f: TorsionFunction, alpha: int, lat: LatticeC, gamma_group) -> None:
    """f(gamma z) = gamma^alpha f(z) for gamma in the group (roots of unity of L)."""
    angles = {u: a for u, a in lat.field.units}
    for gam in gamma_group:
        ang = angles[gam]
        rot = Cyclo.from_angle(ang * alpha)
        for t, v in f.values.items():
            if f(unit_action(lat, gam, t, f.modulus)) != v * rot:
                raise NotGammaInvariant(f"f is not invariant under {gam} at {t}")


def eisenstein_series(f: TorsionFunction, alpha: int, s, lat: LatticeC, gamma_group=None,
                      dps: int | None = None, experimental: bool = False,
                      check: bool = True) -> EisensteinValue:
    """E^{0,alpha}(f, s, Lambda, Gamma) = (1/|Gamma|) sum_t f(t) K(z_t, alpha, alpha + s)."""
    gamma_group = gamma_group or [lat.field.elt(1)]
    s = mpmath.mpmathify(s)
    if not experimental and 2 * mpmath.re(s) + alpha <= 2:
        raise ConvergenceNotGuaranteed(
            f"alpha={alpha}, s={s}: enable the experimental continuation for low weight")
    if check:
        check_gamma_invariance(f, alpha, lat, gamma_group)
    n = len(gamma_group)
    with mpmath.workdps(max(dps or 0, mpmath.mp.dps)):
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        for t, v in f.values.items():
            K = lattice_sum(lat, (Fraction(t[0], f.modulus), Fraction(t[1], f.modulus)), alpha, alpha + s, dps)
            c = v.to_complex()
            total += c * K.value
            err += abs(c) * K.abs_error + 2 * _ulp(c * K.value)
        total /= n
        err = err / n + _ulp(total)
    return EisensteinValue(total, err, {"alpha": alpha, "s": str(s), "lattice": lat.label, "gamma_order": n})


def _unit_maps(F: ImagQuadField, gamma_group):
    """Integer matrices of x + y w -> u (x + y w) for u in the group."""
    T, Nw = F.trace_w, F.norm_w
    maps = []
    for u in gamma_group:
        ua, ub = int(u.a), int(u.b)
        maps.append((ua, -Nw * ub, ub, ua + T * ub))
    return maps


def coset_sum_oracle(f: TorsionFunction, alpha: int, s, lat: LatticeC, gamma_group, R) -> EisensteinValue:
    """Brute-force sum over orbit representatives of the Gamma action on the nonzero points."""
    w1, w2 = lat.basis()
    A = lat.covolume()
    M = f.modulus
    maps = _unit_maps(lat.field, gamma_group)
    seen = set()
    total = mpmath.mpc(0)
    R2 = mpmath.mpf(R) ** 2
    mb = int(R * abs(w2) / A) + 2
    nb = int(R * abs(w1) / A) + 2
    e = -(alpha + mpmath.mpmathify(s))
    for t, v in f.values.items():
        c = v.to_complex()
        for m in range(-mb - 1, mb + 2):
            for n in range(-nb - 1, nb + 2):
                key = (t[0] + M * m, t[1] + M * n)
                if key == (0, 0) or key in seen:
                    continue
                w = (key[0] * w1 + key[1] * w2) / M
                r2 = w.real ** 2 + w.imag ** 2
                if r2 > R2:
                    continue
                seen.update((a * key[0] + b * key[1], g * key[0] + h * key[1]) for a, b, g, h in maps)
                total += c * mpmath.conj(w) ** alpha * r2 ** e
    m_exp = 2 * (alpha + mpmath.re(s)) - alpha
    d = lat.diameter()
    tail = len(f.values) * (mpmath.pi / A) * (1 + d / R) ** 2 * m_exp / (m_exp - 2) * R ** (2 - m_exp)
    return EisensteinValue(total, tail * max(abs(v.to_complex()) for v in f.values.values()))


def transport(f: TorsionFunction, lat: LatticeC, new: LatticeC, M_new: int) -> TorsionFunction:
    """The same points of Q (x) L, recorded in coordinates of another lattice."""
    vals = {}
    for t, v in f.values.items():
        z = lat.point(t, f.modulus)
        c = new.coords(z)
        key = (int(c[0] * M_new) % M_new, int(c[1] * M_new) % M_new)
        if Fraction(key[0], M_new) != c[0] % 1 or Fraction(key[1], M_new) != c[1] % 1:
            raise ValueError(f"point {t} is not {M_new}-torsion for the new lattice")
        vals[key] = vals[key] + v if key in vals else v
    return TorsionFunction(M_new, 2, vals, new.label, f.prime)


def smoothed_eisenstein(f: TorsionFunction, alpha: int, lat: LatticeC, c_gen: QuadElement,
                        gamma_group=None, dps=None, experimental=False) -> EisensteinValue:
    """N(c) E(f, 0, Lambda) - E(f, 0, c^-1 Lambda) for f already convolved with delta_1."""
    new = lat.scaled(c_gen.inverse())
    Nc = int(c_gen.norm())
    g = transport(f, lat, new, f.modulus * Nc)
    with mpmath.workdps(max(dps or 0, mpmath.mp.dps)):
        e1 = eisenstein_series(f, alpha, 0, lat, gamma_group, dps, experimental)
        e2 = eisenstein_series(g, alpha, 0, new, gamma_group, dps, experimental)
        return e1.scale(Nc) - e2


def distribution_relation_oracle(f: TorsionFunction, alpha: int, lat: LatticeC, c_gen: QuadElement,
                                 gamma_group=None, dps=None) -> EisensteinValue:
    """E(f, 0, c^-1 Lambda) as the sum of E(f translated by c^-1 Lambda / Lambda, 0, Lambda)."""
    new = lat.scaled(c_gen.inverse())
    Nc = int(c_gen.norm())
    M = f.modulus * Nc
    F = lat.field
    # coset representatives of c^-1 Lambda / Lambda in Lambda coordinates
    shifts = set()
    for x, _ in [(F.elt(0), 0)] + F.small_elements(4 * Nc * Nc):
        y = x / c_gen
        key = (int(y.a * Nc * Nc) % (Nc * Nc), int(y.b * Nc * Nc) % (Nc * Nc))
        shifts.add(key)
    # reduce to classes modulo Lambda: points of (c^-1 O)/O, counted once
    classes = {}
    for key in shifts:
        classes[(Fraction(key[0], Nc * Nc) % 1, Fraction(key[1], Nc * Nc) % 1)] = key
    if len(classes) != Nc:
        raise ValueError("did not find all translates")
    total = None
    for (a, b) in classes:
        vals = {}
        for t, v in f.values.items():
            u = (Fraction(t[0], f.modulus) + a) % 1
            w = (Fraction(t[1], f.modulus) + b) % 1
            vals[(int(u * M), int(w * M))] = v
        g = TorsionFunction(M, 2, vals, lat.label, f.prime)
        e = eisenstein_series(g, alpha, 0, lat, gamma_group, dps)
        total = e if total is None else total + e
    return total


# L-values -------------------------------------------------------------------------


def gamma_mod(F: ImagQuadField, m: IdealRep) -> list[QuadElement]:
    """Units congruent to 1 modulo m."""
    R = ResidueRing(m)
    return [u for u, _ in F.units if R.reduce(u - 1) == (0, 0)]


def full_modulus(chi: HeckeCharacter, f: IdealRep) -> IdealRep:
    """f times the conductor primes of chi that do not divide f."""
    g = f.generator
    for q in chi.conductor_primes():
        if f.valuation(q) == 0:
            g = g * q.generator
    return IdealRep.principal(g)


def delta_one(m: IdealRep, b: QuadElement) -> tuple[TorsionFunction, LatticeC]:
    """delta_1 on m^-1 Lambda / Lambda for Lambda = m b^-1."""
    F = m.field
    lat = LatticeC(F, m.generator / b)
    M = int(m.norm)
    c = lat.coords(F.elt(1))
    t = (int(c[0] * M) % M, int(c[1] * M) % M)
    return TorsionFunction.delta(M, t, lat.label), lat


def partial_L(chi: HeckeCharacter, s, b: QuadElement, f: IdealRep, dps=None,
              experimental=False) -> EisensteinValue:
    """chi(b) N(b)^-s E^{0,alpha}(delta_1, s, m b^-1, O_m^x) with m = f times the conductor."""
    m = full_modulus(chi, f)
    if not ResidueRing(m).is_unit(b):
        raise CoprimalityViolation(f"{b} is not prime to the modulus")
    d1, lat = delta_one(m, b)
    gam = gamma_mod(chi.field, m)
    E = eisenstein_series(d1, chi.alpha, s, lat, gam, dps, experimental)
    cb = hecke_eval(chi, IdealRep.principal(b)).to_complex()
    factor = cb * mpmath.mpf(int(b.norm())) ** (-mpmath.mpmathify(s))
    out = E.scale(factor)
    out.meta.update({"class_rep": str(b), "modulus": str(m.generator)})
    return out


def ray_classes_for(chi: HeckeCharacter, f: IdealRep, avoid=()) -> RayClassData:
    return ray_class_group(full_modulus(chi, f), avoid=tuple(avoid))


def full_L(chi: HeckeCharacter, s, f: IdealRep, dps=None, experimental=False, avoid=()) -> EisensteinValue:
    rc = ray_classes_for(chi, f, avoid)
    total = None
    for b in rc.representatives:
        v = partial_L(chi, s, b, f, dps, experimental)
        total = v if total is None else total + v
    return total


def ideal_sum_oracle(chi: HeckeCharacter, s, f: IdealRep, X: int, class_rep: QuadElement | None = None):
    """sum over integral ideals prime to the modulus with norm <= X, plus a tail bound."""
    F = chi.field
    m = full_modulus(chi, f)
    R = ResidueRing(m)
    rc = ray_class_group(m) if class_rep is not None else None
    target = rc.class_of(class_rep) if rc else None
    unit_set = set(R.units)
    # multiplication by each unit as an integer map on coordinates
    umaps = []
    for u, _ in F.units:
        c1, c2 = u * F.elt(1), u * F.w
        umaps.append((int(c1.a), int(c2.a), int(c1.b), int(c2.b)))
    comps = [(c.ring, c._log_table, c.exponent, c.order) for c in chi.nontrivial_components]
    wc = F.complex_w()
    seen = set()
    total = mpmath.mpc(0)
    s = mpmath.mpmathify(s)
    for x, n in F.small_elements(X):
        a, b = int(x.a), int(x.b)
        key = min((p * a + q * b, r * a + t * b) for p, q, r, t in umaps)
        if key in seen:
            continue
        seen.add(key)
        res = R.reduce(x)
        if res not in unit_set:
            continue
        if rc is not None and rc.classes[res] != target:
            continue
        ang = sum((Fraction(e * tab[ring.reduce(x)], o) for ring, tab, e, o in comps), Fraction(0))
        val = mpmath.expjpi(2 * mpmath.mpf(ang.numerator) / ang.denominator) * (a + b * wc) ** (-chi.alpha)
        total += val * mpmath.mpf(n) ** (-s)
    beta = mpmath.mpf(chi.alpha) / 2 + mpmath.re(s)
    covol = mpmath.sqrt(abs(F.disc)) / 2
    dO = max(abs(1 + F.complex_w()), abs(1 - F.complex_w()))
    c1 = mpmath.pi / (covol * len(F.units))
    tail = c1 * (1 + dO / mpmath.sqrt(X)) ** 2 * beta / (beta - 1) * mpmath.mpf(X) ** (1 - beta)
    return EisensteinValue(total, tail, {"max_norm": X})


# periods -------------------------------------------------------------------------


MODELS = {
    -4: {"id": "y^2=4x^3-4x", "g2": 4, "g3": 0},
    -3: {"id": "y^2=4x^3-4", "g2": 0, "g3": 4},
    -7: {"j": -3375},
    -8: {"j": 8000},
    -11: {"j": -32768},
}


def _model(d: int):
    if d not in MODELS:
        raise UnsupportedField(f"no built-in CM model for discriminant {d}")
    m = dict(MODELS[d])
    if "j" in m:
        j = Fraction(m["j"])
        c = 27 * j / (j - 1728)
        m.update({"g2": c, "g3": c, "id": f"y^2=4x^3-{c}x-{c}"})
    return m


def complex_agm(a, b):
    """AGM with the optimal choice of square roots."""
    a, b = mpmath.mpc(a), mpmath.mpc(b)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 8)
    for _ in range(200):
        if abs(a - b) <= eps * abs(a):
            return a
        a1 = (a + b) / 2
        b1 = mpmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
    raise ArithmeticError("AGM did not converge")


def _reduce_basis(w1, w2):
    """Lagrange-Gauss reduction of a complex lattice basis."""
    for _ in range(1000):
        if abs(w2) < abs(w1):
            w1, w2 = w2, w1
        mu = mpmath.nint((w2 / w1).real)
        if mu == 0:
            break
        w2 = w2 - mu * w1
    if (w2 / w1).imag < 0:
        w2 = -w2
    return w1, w2


def model_periods(g2, g3):
    """A basis of the period lattice of y^2 = 4x^3 - g2 x - g3."""
    g2, g3 = (mpmath.mpf(Fraction(g).numerator) / Fraction(g).denominator for g in (g2, g3))
    roots = mpmath.polyroots([4, 0, -g2, -g3], maxsteps=200, extraprec=60)
    cands = []
    import itertools
    for e1, e2, e3 in itertools.permutations(roots):
        cands.append(mpmath.pi / complex_agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2)))
    # pick two R-independent candidates and reduce
    w1 = min(cands, key=abs)
    w2 = None
    for c in sorted(cands, key=abs):
        if abs((c / w1).imag) > mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
            w2 = c
            break
    return _reduce_basis(w1, w2)


@dataclass(frozen=True)
class PeriodData:
    field: ImagQuadField
    model_id: str
    omega: mpmath.mpc
    g2: Fraction
    g3: Fraction

    def to_json(self, digits=30) -> dict:
        return {"disc": self.field.disc, "model": self.model_id,
                "omega_re": mpmath.nstr(self.omega.real, digits),
                "omega_im": mpmath.nstr(self.omega.imag, digits),
                "provenance": "period lattice of the built-in Weierstrass model via complex AGM"}


def period_omega(F: ImagQuadField, dps: int | None = None) -> PeriodData:
    """Omega with period lattice = Omega * O for the built-in model."""
    m = _model(F.disc)
    with mpmath.workdps((dps or mpmath.mp.dps) + 20):
        w1, w2 = model_periods(m["g2"], m["g3"])
        # compare the reduced shape with O = Z + Z w
        o1, o2 = _reduce_basis(mpmath.mpc(1), F.complex_w())
        tau, tau_o = w2 / w1, o2 / o1
        # the shapes agree up to the finite ambiguity of the fundamental domain boundary
        cands = []
        for u, _ in F.units:
            cands.append(w1 / o1 * u.to_complex())
        omega = None
        for c in cands:
            if abs(mpmath.arg(c)) < mpmath.pi / len(F.units) + mpmath.mpf(10) ** -10 and \
                    mpmath.arg(c) > -mpmath.pi / len(F.units) + mpmath.mpf(10) ** -10:
                omega = c
                break
        if omega is None:
            omega = cands[0]
        if abs(tau - tau_o) > mpmath.mpf(10) ** -10 and abs(tau - (-mpmath.conj(tau_o))) > mpmath.mpf(10) ** -10:
            raise UnsupportedField(f"model lattice shape {tau} does not match O ({tau_o})")
    with mpmath.workdps((dps or mpmath.mp.dps) + 10):
        return PeriodData(F, m["id"], +omega, Fraction(m["g2"]), Fraction(m["g3"]))


def lemniscate_constant():
    """varpi = pi / AGM(1, sqrt 2)."""
    return mpmath.pi / mpmath.agm(1, mpmath.sqrt(2))


# recognition --------------------------------------------------------------------


def recognize_algebraic(z, err, k: int, B: int, verify_factor: int = 10) -> Cyclo:
    """Find x in Q(zeta_k) with denominator <= B and |z - x| <= verify_factor * err."""
    from sympy.polys.matrices import DomainMatrix
    from sympy import ZZ

    z = mpmath.mpc(z)
    err = mpmath.mpf(err)
    phi = euler_phi(k)
    basis = [mpmath.expjpi(2 * mpmath.mpf(j) / k) for j in range(phi)]
    # unknowns (D, n_0, ..., n_{phi-1}) with D z - sum n_j zeta^j ~ 0
    scale = 1 / max(err * B, mpmath.mpf(10) ** (-mpmath.mp.dps + 5))
    cols_re = [z.real] + [-b.real for b in basis]
    cols_im = [z.imag] + [-b.imag for b in basis]
    n = phi + 1
    rows = []
    for i in range(n):
        row = [1 if j == i else 0 for j in range(n)]
        row += [int(mpmath.nint(cols_re[i] * scale)), int(mpmath.nint(cols_im[i] * scale))]
        rows.append(row)
    M = DomainMatrix([[ZZ(x) for x in r] for r in rows], (n, n + 2), ZZ)
    red = M.lll().to_Matrix()
    best = None
    for i in range(red.rows):
        vec = [int(red[i, j]) for j in range(n)]
        D = vec[0]
        if D == 0 or abs(D) > B:
            continue
        if D < 0:
            vec = [-x for x in vec]
            D = -D
        x = Cyclo(k, vec[1:], D)
        if abs(x.to_complex() - z) <= verify_factor * err:
            if best is None or x.den < best.den:
                best = x
    if best is None:
        raise RecognitionFailed(f"no element of Q(zeta_{k}) with denominator <= {B} within {err}")
    return best
