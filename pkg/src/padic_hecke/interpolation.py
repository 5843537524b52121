"""Both sides of the interpolation formula, and finite-level measure checks.

The left side is assembled from Eisenstein values at the torsion points
1 + y of f b^-1, weighted by the Fourier transform of the extension by zero
of chi_fin^-1.  The right side is the product of the local factor, the
smoothing factor N(c) - chi(c^-1), the Euler factor above p and L_f(chi, 0).
Both are divided by Omega^alpha for the same built-in model.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial

import mpmath

from .cyclotomic import Cyclo
from .eisenstein import (EisensteinValue, LatticeC, eisenstein_series, full_L, gamma_mod,
                         period_omega, recognize_algebraic, smoothed_eisenstein)
from .fourier import (TorsionFunction, char_hat, extend_by_zero, norm_form_units,
                      transform_on_points)
from .hecke_field import (HeckeCharacter, IdealRep, PadicEmbedding, QuadElement, ResidueRing,
                          chi_fin, euler_factor, euler_factor_terms, factor_over, frac_class,
                          hecke_eval, is_split, local_factor, ray_class_group)
from .padic_core import PadicNumber


class LevelTooSmall(ValueError):
    pass


class NonOrdinaryUnsupported(ValueError):
    pass


def _c(z) -> str:
    z = mpmath.mpc(z)
    return f"{mpmath.nstr(z.real, 17)}{'+' if z.imag >= 0 else '-'}{mpmath.nstr(abs(z.imag), 17)}i"


class ConductorOutsideLevel(ValueError):
    pass


def _check_c(chi: HeckeCharacter, p: int, f: IdealRep, c: QuadElement) -> None:
    for q in chi.conductor_primes():
        if q.p != p and f.valuation(q) == 0:
            raise ConductorOutsideLevel(f"the conductor prime {q} divides neither p = {p} nor f")
    C = IdealRep.principal(c)
    bad = list(factor_over(chi.field, p)) + list(f.prime_factors()) + chi.conductor_primes()
    if any(C.valuation(q) for q in bad):
        raise ValueError(f"c = {c} must be prime to p, f and the conductor")


def class_reps(chi: HeckeCharacter, p: int, f: IdealRep, c: QuadElement) -> list[QuadElement]:
    """Representatives of the ray classes mod f, prime to p f c."""
    avoid = (IdealRep.principal(chi.field.elt(p)), IdealRep.principal(c))
    return ray_class_group(f, avoid=avoid).representatives


def conductor_level(chi: HeckeCharacter, p: int) -> int:
    return 1 if any(q.p == p for q in chi.conductor_primes()) else 0


def j_hat(chi: HeckeCharacter, p: int, n: int) -> TorsionFunction:
    """Fourier transform of j_! chi_fin^-1, as a function of p^-n O / O."""
    F = chi.field
    cf = chi_fin(chi, p, n)
    inv = TorsionFunction(cf.modulus, 2, {t: v.inverse() for t, v in cf.values.items()}, "O", p)
    rho = extend_by_zero(inv, norm_form_units(p, F.trace_w, F.norm_w))
    return transform_on_points(rho, F.gram)


def shifted_function(jh: TorsionFunction, lat: LatticeC, p: int, n: int) -> TorsionFunction:
    """j^ * delta_1 on p^-n f^-1 Lambda / Lambda, in the coordinates of ``lat``."""
    F = lat.field
    M = None
    pts = {}
    for c in product(range(p ** n), repeat=2):
        y = lat.generator * F.elt(Fraction(c[0], p ** n), Fraction(c[1], p ** n))
        v = jh(frac_class(y, p, n))
        if v.is_zero():
            continue
        z = lat.coords(F.elt(1) + y)
        pts[z] = v
    den = 1
    for z in pts:
        for x in z:
            den = den * x.denominator // _gcd(den, x.denominator)
    M = den
    vals = {}
    for (u, w), v in pts.items():
        key = (int(u * M) % M, int(w * M) % M)
        vals[key] = vals[key] + v if key in vals else v
    return TorsionFunction(M, 2, vals, lat.label, p)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass
class SideValue:
    value: mpmath.mpc
    abs_error: mpmath.mpf
    items: dict = field(default_factory=dict)


def lhs_via_eisenstein(chi: HeckeCharacter, p: int, f: IdealRep, c: QuadElement, n: int | None = None,
                       dps: int = 25, omega=None, experimental: bool = False) -> SideValue:
    """(alpha-1)!/Omega^alpha sum_i chi(b_i) (N c E(j^ * d1, f b_i^-1) - E(j^ * d1, f c^-1 b_i^-1))."""
    _check_c(chi, p, f, c)
    need = conductor_level(chi, p)
    n = max(need, 1) if n is None else n
    if n < need:
        raise LevelTooSmall(f"chi_fin needs level {need}")
    F = chi.field
    jh = j_hat(chi, p, n)
    gam = gamma_mod(F, f)
    with mpmath.workdps(dps + 10):
        omega = omega if omega is not None else period_omega(F, dps).omega
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        per_class = []
        for b in class_reps(chi, p, f, c):
            lat = LatticeC(F, f.generator / b)
            g = shifted_function(jh, lat, p, n)
            sm = smoothed_eisenstein(g, chi.alpha, lat, c, gam, dps, experimental)
            cb = hecke_eval(chi, IdealRep.principal(b)).to_complex()
            total += cb * sm.value
            err += abs(cb) * sm.abs_error
            per_class.append({"b": str(b), "smoothed": _c(sm.value), "points": len(g.values)})
        norm = mpmath.factorial(chi.alpha - 1) / omega ** chi.alpha
        digest = hashlib.sha256(json.dumps(jh.to_json(), sort_keys=True).encode()).hexdigest()[:16]
        return SideValue(total * norm, err * abs(norm),
                         {"level": n, "classes": per_class, "j_hat_digest": digest,
                          "j_hat_support": len(jh.values)})


def rhs_interpolation(chi: HeckeCharacter, p: int, f: IdealRep, c: QuadElement, dps: int = 25,
                      omega=None, local_scale=1, experimental: bool = False) -> SideValue:
    """(alpha-1)! Local (N c - chi(c^-1)) Euler L_f(chi, 0) / Omega^alpha."""
    _check_c(chi, p, f, c)
    F = chi.field
    with mpmath.workdps(dps + 10):
        omega = omega if omega is not None else period_omega(F, dps).omega
        loc = local_factor(chi, p, f)
        local = loc.to_complex() * mpmath.mpmathify(local_scale)
        C = IdealRep.principal(c)
        cfac = int(c.norm()) - hecke_eval(chi, C.inverse()).to_complex()
        eul = euler_factor(chi, p)
        L = full_L(chi, 0, f, dps, experimental)
        norm = mpmath.factorial(chi.alpha - 1) / omega ** chi.alpha
        prod_ = local * cfac * eul
        value = prod_ * L.value * norm
        return SideValue(value, abs(prod_ * norm) * L.abs_error,
                         {"local": _c(local), "c_factor": _c(cfac), "euler": _c(eul),
                          "euler_terms": euler_factor_terms(chi, p),
                          "L_f": _c(L.value), "omega": _c(omega),
                          "local_c": str(loc.c), "local_n": str(loc.n_generator)})


@dataclass
class InterpolationReport:
    character: dict
    prime: int
    c: str
    lhs: str
    rhs: str
    lhs_error: str
    rhs_error: str
    discrepancy: float
    tolerance: float
    passed: bool
    factors: dict
    lhs_items: dict

    def to_json(self) -> dict:
        return dict(self.__dict__)


def discrepancy(a, b, eps=mpmath.mpf(10) ** -30):
    return abs(a - b) / max(abs(a), abs(b), eps)


def verify_theorem_A(chi: HeckeCharacter, p: int, f: IdealRep, c: QuadElement, tol: float = 1e-6,
                     dps: int = 25, n: int | None = None, experimental: bool = False,
                     local_scale=1) -> InterpolationReport:
    if chi.alpha < 3 and not experimental:
        raise ValueError("alpha in {1, 2} needs the experimental low-weight flag")
    omega = period_omega(chi.field, dps).omega
    lhs = lhs_via_eisenstein(chi, p, f, c, n, dps, omega, experimental)
    rhs = rhs_interpolation(chi, p, f, c, dps, omega, local_scale, experimental)
    d = discrepancy(lhs.value, rhs.value)
    return InterpolationReport(chi.describe(), p, str(c), _c(lhs.value), _c(rhs.value),
                               mpmath.nstr(lhs.abs_error, 3), mpmath.nstr(rhs.abs_error, 3),
                               float(d), tol, bool(d < tol), rhs.items, lhs.items)


def c_independence(chi: HeckeCharacter, p: int, f: IdealRep, c1: QuadElement, c2: QuadElement,
                   dps: int = 25, n: int | None = None) -> tuple[mpmath.mpc, mpmath.mpc, float]:
    """lhs / (N c - chi(c^-1)) for two choices of c."""
    out = []
    for c in (c1, c2):
        lhs = lhs_via_eisenstein(chi, p, f, c, n, dps)
        cfac = int(c.norm()) - hecke_eval(chi, IdealRep.principal(c).inverse()).to_complex()
        out.append(lhs.value / cfac)
    return out[0], out[1], float(discrepancy(out[0], out[1]))


# the Euler rearrangement as formal series -----------------------------------------


def euler_telescope_check(norm_p: int, M: int = 12) -> bool:
    """sum_{n >= -1} u^n Char^(P^n) = (1 - 1/(NP u)) / (1 - u), coefficients of u^-1 .. u^M."""
    if M < 3:
        raise ValueError("truncation order must be at least 3")
    q = Fraction(1, norm_p)
    lhs = {n: char_hat(norm_p, n) for n in range(-1, M + 1)}
    # (1 - q u^-1) * sum_{k >= 0} u^k
    rhs = {n: Fraction(0) for n in range(-1, M + 1)}
    for k in range(0, M + 2):
        if k <= M:
            rhs[k] += 1
        if k - 1 >= -1 and k - 1 <= M:
            rhs[k - 1] -= q
    return all(lhs[n] == rhs[n] for n in range(-1, M + 1))


# finite-level measures ----------------------------------------------------------


@dataclass
class MeasureTable:
    prime: int
    level: int
    alpha: int
    c: str
    values: dict  # (class index, coset) -> EisensteinValue
    gamma: dict

    def coset_sum(self, i: int, coarse, level: int) -> EisensteinValue:
        """Sum of the level-``self.level`` values refining a coset at a lower level."""
        M = self.prime ** level
        total = None
        for (j, t), v in self.values.items():
            if j == i and (t[0] % M, t[1] % M) == tuple(coarse):
                total = v if total is None else total + v
        return total


def coset_delta(p: int, n: int, a) -> TorsionFunction:
    return TorsionFunction.delta(p ** n, a, "O", p)


def smoothed_for_rho(rho: TorsionFunction, chi_alpha: int, F, p: int, f: IdealRep, b: QuadElement,
                     c: QuadElement, dps: int = 20) -> EisensteinValue:
    """N c E(rho^ * d1, f b^-1) - E(rho^ * d1, f c^-1 b^-1) for a function rho on O / p^n."""
    n = rho.level
    jh = transform_on_points(rho, F.gram)
    lat = LatticeC(F, f.generator / b)
    g = shifted_function(jh, lat, p, n)
    if not g.values:
        return EisensteinValue(mpmath.mpc(0), mpmath.mpf(0), {})
    return smoothed_eisenstein(g, chi_alpha, lat, c, gamma_mod(F, f), dps)


def build_measure_table(F, alpha: int, p: int, f: IdealRep, c: QuadElement, n: int,
                        dps: int = 20) -> MeasureTable:
    """Smoothed values attached to rho = delta_a for every unit coset a mod p^n and every class."""
    unit = norm_form_units(p, F.trace_w, F.norm_w)
    reps = ray_class_group(f, avoid=(IdealRep.principal(F.elt(p)), IdealRep.principal(c))).representatives
    vals = {}
    for i, b in enumerate(reps):
        for a in product(range(p ** n), repeat=2):
            if not unit(a):
                continue
            vals[(i, a)] = smoothed_for_rho(coset_delta(p, n, a), alpha, F, p, f, b, c, dps)
    gam = gamma_mod(F, f)
    return MeasureTable(p, n, alpha, str(c), vals,
                        {"gamma_order": len(gam), "classes": [str(b) for b in reps]})


def refinement_check(F, alpha: int, p: int, f: IdealRep, c: QuadElement, n: int, b_index: int = 0,
                     dps: int = 20) -> dict:
    """Level-n coset values against sums of their level-(n+1) refinements.

    Checked exactly on the Fourier side and numerically after evaluation.
    """
    unit = norm_form_units(p, F.trace_w, F.norm_w)
    reps = ray_class_group(f, avoid=(IdealRep.principal(F.elt(p)), IdealRep.principal(c))).representatives
    b = reps[b_index]
    M, M1 = p ** n, p ** (n + 1)
    exact = True
    worst = mpmath.mpf(0)
    cosets = [a for a in product(range(M), repeat=2) if unit(a)] if n > 0 else [(0, 0)]
    for a in cosets:
        coarse = coset_delta(p, n, a) if n > 0 else TorsionFunction.constant(1, 2, 1, "O", p)
        coarse = extend_by_zero(coarse.pullback(M1), unit)
        fine = [coset_delta(p, n + 1, t) for t in product(range(M1), repeat=2)
                if (t[0] % M, t[1] % M) == (a[0] % M, a[1] % M) and unit(t)]
        s = fine[0]
        for g in fine[1:]:
            s = s + g
        if transform_on_points(s, F.gram) != transform_on_points(coarse, F.gram):
            exact = False
        v0 = smoothed_for_rho(coarse, alpha, F, p, f, b, c, dps)
        v1 = None
        for g in fine:
            v = smoothed_for_rho(g, alpha, F, p, f, b, c, dps)
            v1 = v if v1 is None else v1 + v
        worst = max(worst, abs(v0.value - v1.value) / max(abs(v0.value), 1))
    return {"exact_fourier": exact, "max_relative_gap": float(worst), "cosets": len(cosets)}


def congruence_check(F, alpha: int, alpha2: int, p: int, f: IdealRep, cs, k: int = 1,
                     dps: int = 100, cyclo_conductor: int = 12, bound: int = 10 ** 6) -> dict:
    """Kummer congruence between weights alpha and alpha2 on every ray class and every c.

    The measure attached to each class is integrated against z^alpha on the
    whole unit group.  Each value (alpha-1)! E_smoothed / Omega^alpha is
    recognized in Q(zeta_k) and embedded by iota_p.  Complex and p-adic periods
    differ, so the moments agree only up to one unit u common to all cases:
    the check is x_alpha = u x_alpha2 modulo p^(k + v), v the smallest
    valuation, with u read off from the first case.
    """
    if not is_split(F, p):
        raise NonOrdinaryUnsupported("congruences are only asserted for split p")
    if (alpha2 - alpha) % ((p - 1) * p ** (k - 1)):
        raise ValueError("weights must agree modulo (p-1) p^(k-1)")
    unit = norm_form_units(p, F.trace_w, F.norm_w)
    iota = PadicEmbedding(F, p, k + 12, 2)
    rho = extend_by_zero(TorsionFunction.constant(p, 2, 1, "O", p), unit)
    cases = []
    with mpmath.workdps(dps + 10):
        omega = period_omega(F, dps).omega
        for c in cs:
            reps = ray_class_group(f, avoid=(IdealRep.principal(F.elt(p)), IdealRep.principal(c))).representatives
            for b in reps:
                vals = []
                for al in (alpha, alpha2):
                    v = smoothed_for_rho(rho, al, F, p, f, b, c, dps)
                    norm = mpmath.factorial(al - 1) / omega ** al
                    err = max(v.abs_error * abs(norm), mpmath.mpf(10) ** (-dps + 10))
                    vals.append(recognize_algebraic(v.value * norm, err, cyclo_conductor, bound))
                cases.append({"c": str(c), "class": str(b), "values": vals,
                              "padic": [iota.cyclo(x) for x in vals]})
    x0, y0 = cases[0]["padic"]
    u = x0 / y0
    vmin = min(min(x.valuation for x in r["padic"] if not x.is_zero()) for r in cases)
    out = []
    for r in cases:
        x, y = r["padic"]
        d = x - u * y
        ok = d.is_zero() or d.valuation >= k + vmin
        out.append({"c": r["c"], "class": r["class"], "alpha": str(r["values"][0]),
                    "alpha2": str(r["values"][1]), "difference_valuation": None if d.is_zero() else d.valuation,
                    "ok": bool(ok)})
    return {"prime": p, "k": k, "weights": [alpha, alpha2], "common_unit": u.serialize(),
            "min_valuation": vmin, "cases": out, "passed": all(r["ok"] for r in out)}
