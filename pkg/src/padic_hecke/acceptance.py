"""The nine acceptance criteria as runnable checks.

Each ``criterion_k`` returns a ``CriterionResult``; a criterion passes only if
every check inside it holds and it finishes within its time budget.  The test
module and the ``selftest`` subcommand both call ``run_all``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

from .cyclotomic import Cyclo
from .eisenstein import (LatticeC, RecognitionFailed, brute_force_sum, coset_sum_oracle,
                         eisenstein_series, full_L, full_modulus, ideal_sum_oracle, partial_L,
                         period_omega,
                         ray_classes_for, recognize_algebraic)
from .fourier import (TorsionFunction, all_characters, char_hat, convolve, finite_fourier,
                      inner, inverse_finite_fourier, is_W_analytic, pointwise, CharacterPoint)
from .hecke_field import (IdealRep, ImagQuadField, make_character, norm_character_point,
                          padic_avatar, sigma_character_point,
                          sigma_condition)
from .interpolation import (c_independence, congruence_check, euler_telescope_check,
                            refinement_check, verify_theorem_A)
from .padic_core import PadicNumber, pexp, plog, teichmuller

# (alpha, finite part) for Q(i), f = (3); finite parts are (prime generator, order, exponent)
THEOREM_A_CASES = {
    5: [
        (3, (((2, 1), 4, 1),)),
        (4, ()),
        (4, (((2, 1), 4, 1), ((2, -1), 4, 1))),
        (5, (((2, 1), 4, 3),)),
    ],
    7: [
        (3, (((3, 0), 8, 1),)),
        (4, ()),
        (4, (((7, 0), 4, 1),)),
        (5, (((3, 0), 8, 3),)),
        (3, (((3, 0), 8, 1), ((7, 0), 4, 1))),
    ],
}
SMOOTHING = {5: (7, 0), 7: (5, 0)}
# characters with no ramification beyond f = (3); odd alpha forces psi(-1) = -1 on (O/3)^x
UNRAMIFIED_OUTSIDE_F = {3: (((3, 0), 8, 1),), 4: ()}
SECOND_C = (2, 3)
RECOGNITION_FIELDS = (12, 8, 9, 10, 11, 7)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.number}: {self.title} ({self.seconds:.1f}s, budget {self.budget:.0f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "budget": self.budget, "details": self.details}


def _timed(number: int, title: str, budget: float, body) -> CriterionResult:
    t0 = time.perf_counter()
    ok, details = body()
    dt = time.perf_counter() - t0
    details["within_budget"] = dt < budget
    return CriterionResult(number, title, bool(ok and dt < budget), dt, budget, details)


def _character(alpha, spec):
    F = ImagQuadField(-4)
    return make_character(F, alpha, [tuple(x) for x in spec])


def _label(alpha, spec) -> str:
    parts = [f"psi_({a}{b:+d}i) order {o} exp {e}" for (a, b), o, e in spec]
    return f"alpha={alpha}" + (" " + " x ".join(parts) if parts else " trivial")


# 1 ----------------------------------------------------------------------------


def _random_function(rng, p, n, r, k=4):
    M = p ** n
    vals = {}
    for _ in range(k):
        t = tuple(rng.randrange(M) for _ in range(r))
        vals[t] = Cyclo.root(M, rng.randrange(M)) * Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return TorsionFunction.on_level(p, n, r, vals)


def criterion_1(cases: int = 1000, seed: int = 0) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        shapes = [(p, r, n) for p in (2, 3, 5) for r in (1, 2) for n in (0, 1, 2)]
        failures = []
        for i in range(cases):
            p, r, n = shapes[i % len(shapes)]
            f, g = _random_function(rng, p, n, r), _random_function(rng, p, n, r)
            size = p ** (n * r)
            F, G = finite_fourier(f), finite_fourier(g)
            checks = {
                "inversion": inverse_finite_fourier(F) == f,
                "parseval": inner(f, f) == inner(F, F) * size,
                "convolution": finite_fourier(convolve(f, g)) == pointwise(F, G).scale(size),
            }
            chars = all_characters(p ** n, r)
            a, b = rng.choice(chars), rng.choice(chars)
            expected = size if a.exponents == b.exponents else 0
            checks["orthogonality"] = inner(a.as_function(), b.as_function()) == Cyclo.rational(expected)
            bad = [k for k, v in checks.items() if not v]
            if bad:
                failures.append({"case": i, "shape": [p, r, n], "failed": bad})
        return not failures, {"cases": cases, "failures": failures[:10]}

    return _timed(1, "finite Fourier inversion, Parseval, orthogonality, convolution", 10, body)


# 2 ----------------------------------------------------------------------------


def criterion_2() -> CriterionResult:
    def body():
        table = []
        for q in (2, 3, 4, 5, 7, 9, 25, 49):
            for v in range(-4, 4):
                want = 1 - Fraction(1, q) if v >= 0 else (-Fraction(1, q) if v == -1 else Fraction(0))
                table.append(char_hat(q, v) == want)
        tele = {q: euler_telescope_check(q, 12) for q in (2, 3, 4, 5, 7, 9, 25, 49)}
        return all(table) and all(tele.values()), {"char_hat_entries": len(table),
                                                    "char_hat_ok": all(table), "telescope": tele}

    return _timed(2, "local character transform table and Euler telescope", 1, body)


# 3 ----------------------------------------------------------------------------


def equivariant_orbit_function(F: ImagQuadField, M: int, t0, alpha: int) -> TorsionFunction:
    """f(u t0) = u^alpha on the unit orbit of t0 / M, zero elsewhere."""
    vals = {}
    for u, ang in F.units:
        y = u * F.elt(*t0)
        key = (int(y.a) % M, int(y.b) % M)
        if key in vals:
            raise ValueError("orbit is not free")
        vals[key] = Cyclo.from_angle(ang * alpha)
    return TorsionFunction(M, 2, vals, "O")


def criterion_3(dps: int = 20, radius: int = 30) -> CriterionResult:
    def body():
        rows = []
        ok = True
        for disc, M, subgroups in ((-4, 5, (1, 2)), (-3, 7, (1, 2, 3))):
            F = ImagQuadField(disc)
            lat = LatticeC(F, F.elt(1))
            units = [u for u, _ in F.units]
            for alpha in (3, 4, 5, 6):
                f = equivariant_orbit_function(F, M, (1, 0), alpha)
                with mpmath.workdps(dps):
                    E = eisenstein_series(f, alpha, 0, lat, units, dps)
                    # shell-by-shell oracle at a different radius, summed point by point
                    brute = None
                    for t, v in f.values.items():
                        b = brute_force_sum(lat, (Fraction(t[0], M), Fraction(t[1], M)), alpha, alpha, radius)
                        b = b.scale(v.to_complex())
                        brute = b if brute is None else brute + b
                    brute = brute.scale(mpmath.mpf(1) / len(units))
                    gap = abs(E.value - brute.value)
                    agree = gap <= E.abs_error + brute.abs_error
                    # finite index rule on orbit representatives
                    full = coset_sum_oracle(f, alpha, 0, lat, units, radius)
                    index_gaps = []
                    for k in subgroups:
                        sub = [u for u in units if u ** k == F.elt(1)] if k > 1 else [F.elt(1)]
                        part = coset_sum_oracle(f, alpha, 0, lat, sub, radius)
                        idx = len(units) // len(sub)
                        index_gaps.append(float(abs(part.value - idx * full.value)))
                        Esub = eisenstein_series(f, alpha, 0, lat, sub, dps)
                        index_gaps.append(float(abs(Esub.value - idx * E.value)))
                    index_ok = max(index_gaps) < 1e-10
                ok = ok and agree and index_ok
                rows.append({"disc": disc, "alpha": alpha, "engine_error": mpmath.nstr(E.abs_error, 3),
                             "oracle_error": mpmath.nstr(brute.abs_error, 3),
                             "gap": mpmath.nstr(gap, 3), "agree": bool(agree),
                             "max_index_gap": max(index_gaps)})
        return ok, {"cases": rows}

    return _timed(3, "Eisenstein engine against brute-force lattice sums", 60, body)


# 4 ----------------------------------------------------------------------------


def criterion_4(dps: int = 25, max_norm: int = 1000) -> CriterionResult:
    def body():
        F = ImagQuadField(-4)
        f = IdealRep.of(F, 3)
        rows = []
        ok = True
        with mpmath.workdps(dps):
            for alpha in (3, 4):
                chi = make_character(F, alpha, list(UNRAMIFIED_OUTSIDE_F[alpha]))
                reps = ray_classes_for(chi, f).representatives
                for s in (3, 4, 5):
                    worst = 0.0
                    for b in reps:
                        E = partial_L(chi, s, b, f, dps)
                        O = ideal_sum_oracle(chi, s, f, max_norm, b)
                        worst = max(worst, float(abs(E.value - O.value)))
                        ok = ok and O.abs_error < 1e-8
                    total = full_L(chi, s, f, dps)
                    O = ideal_sum_oracle(chi, s, f, max_norm)
                    worst = max(worst, float(abs(total.value - O.value)))
                    ok = ok and worst < 1e-8
                    rows.append({"alpha": alpha, "s": s, "classes": len(reps), "max_gap": worst})
        return ok, {"cases": rows}

    return _timed(4, "partial L-values against ideal enumeration", 60, body)


# 5 ----------------------------------------------------------------------------


def criterion_5(dps: int = 20, tol: float = 1e-6) -> CriterionResult:
    def body():
        F = ImagQuadField(-4)
        f = IdealRep.of(F, 3)
        rows = []
        ok = True
        for p, cases in THEOREM_A_CASES.items():
            c = F.elt(*SMOOTHING[p])
            for alpha, spec in cases:
                chi = _character(alpha, spec)
                rep = verify_theorem_A(chi, p, f, c, tol, dps)
                _, _, cdisc = c_independence(chi, p, f, c, F.elt(*SECOND_C), dps)
                err = max(float(rep.lhs_error), float(rep.rhs_error))
                case_ok = rep.passed and cdisc < tol and err < tol / 10
                ok = ok and case_ok
                rows.append({"p": p, "c": str(c), "character": _label(alpha, spec),
                             "discrepancy": rep.discrepancy, "c_independence": cdisc,
                             "certified_error": err, "passed": case_ok})
        return ok, {"cases": rows}

    return _timed(5, "interpolation identity, both sides, two smoothing ideals", 600, body)


# 6 ----------------------------------------------------------------------------


def normalized_L(chi, f, dps):
    with mpmath.workdps(dps + 10):
        L = full_L(chi, 0, f, dps)
        omega = period_omega(chi.field, dps).omega
        norm = factorial(chi.alpha - 1) / omega ** chi.alpha
        return L.value * norm, L.abs_error * abs(norm)


def recognize_in_small_fields(z, err, bound: int = 10 ** 6):
    for k in RECOGNITION_FIELDS:
        try:
            return k, recognize_algebraic(z, err, k, bound)
        except RecognitionFailed:
            continue
    return None, None


def criterion_6(precision: int = 40) -> CriterionResult:
    def body():
        F = ImagQuadField(-4)
        f = IdealRep.of(F, 3)
        rows = []
        ok = True
        seen = set()
        for p, cases in THEOREM_A_CASES.items():
            for alpha, spec in cases:
                if (alpha, spec) in seen:
                    continue
                seen.add((alpha, spec))
                chi = _character(alpha, spec)
                found = []
                for P in (precision, 2 * precision):
                    with mpmath.workdps(P + 10):
                        z, err = normalized_L(chi, f, P)
                        err = max(err, mpmath.mpf(10) ** (-P + 5))
                        k, x = recognize_in_small_fields(z, err)
                    found.append(None if x is None else (k, x.minimal_conductor()))
                same = found[0] is not None and found[0] == found[1]
                ok = ok and same
                rows.append({"character": _label(alpha, spec),
                             "recognized": [None if r is None else str(r[1]) for r in found],
                             "stable": same})
        return ok, {"cases": rows}

    return _timed(6, "algebraicity of normalized L-values in small cyclotomic fields", 300, body)


# 7 ----------------------------------------------------------------------------


def criterion_7(dps: int = 20) -> CriterionResult:
    def body():
        F = ImagQuadField(-4)
        f = IdealRep.of(F, 3)
        refinements = []
        ok = True
        for p, n in ((5, 0), (5, 1), (7, 0)):
            r = refinement_check(F, 4, p, f, F.elt(*SMOOTHING[p]), n, 0, dps)
            r.update({"p": p, "n": n})
            refinements.append(r)
            ok = ok and r["exact_fourier"] and r["max_relative_gap"] < 1e-9
        cong = congruence_check(F, 4, 8, 5, f, [F.elt(7), F.elt(*SECOND_C)], k=1)
        ok = ok and cong["passed"]
        return ok, {"refinement": refinements, "congruence": cong}

    return _timed(7, "measure refinement and Kummer congruence at p = 5", 600, body)


# 8 ----------------------------------------------------------------------------


def _random_padic(rng, p, N, f, unit=False):
    coeffs = [rng.randrange(p ** N) for _ in range(f)]
    if unit and all(c % p == 0 for c in coeffs):
        coeffs[0] += 1
    return PadicNumber.from_coeffs(p, coeffs, N, f)


def criterion_8(cases: int = 1000, N: int = 20, seed: int = 0) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        counts = {"ring": 0, "teichmuller": 0, "log_exp": 0, "avatar": 0}
        failures = []
        shapes = [(p, f) for p in (2, 3, 5, 7) for f in (1, 2)]
        for i in range(cases):
            p, f = shapes[i % len(shapes)]
            a, b, c = (_random_padic(rng, p, N, f) for _ in range(3))
            ring = ((a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
                    and a * (b + c) == a * b + a * c and a * b == b * a and a - a == a * 0)
            counts["ring"] += 1
            x, y = _random_padic(rng, p, N, f, True), _random_padic(rng, p, N, f, True)
            tm = teichmuller(x * y) == teichmuller(x) * teichmuller(y)
            counts["teichmuller"] += 1
            v0 = 2 if p == 2 else 1
            one = PadicNumber.from_int(p, 1, N, f)
            u = one + _random_padic(rng, p, N, f) * p ** v0
            le = pexp(plog(u)).with_precision(N - 1) == u.with_precision(N - 1)
            counts["log_exp"] += 1
            if not (ring and tm and le):
                failures.append({"case": i, "p": p, "f": f, "ring": ring, "teichmuller": tm, "log_exp": le})
        F = ImagQuadField(-4)
        f_ideal = IdealRep.of(F, 3)
        for p, cases_p in THEOREM_A_CASES.items():
            for alpha, spec in cases_p:
                chi = _character(alpha, spec)
                avatar = padic_avatar(chi, p, N)
                m = full_modulus(chi, f_ideal).generator
                for n in (1, 2, 3):
                    for _ in range(4):
                        beta = F.elt(rng.randint(-9, 9), rng.randint(-9, 9))
                        xi = F.elt(1) + m * beta * p ** n
                        val = avatar(IdealRep.principal(xi)) - 1
                        good = val.is_zero() or val.valuation >= n
                        counts["avatar"] += 1
                        if not good:
                            failures.append({"avatar": _label(alpha, spec), "p": p, "n": n, "xi": str(xi)})
        return not failures, {"counts": counts, "failures": failures[:10]}

    return _timed(8, "p-adic kernel and avatar congruence at 20 digits", 10, body)


# 9 ----------------------------------------------------------------------------


def criterion_9(N: int = 20) -> CriterionResult:
    def body():
        rows = []
        ok = True
        F = ImagQuadField(-4)
        for p in (5, 7):
            W = sigma_condition(F, p, N)
            f = W.rows[0][0].ext_degree
            one = PadicNumber.from_int(p, 1, N, f)
            trivial = CharacterPoint.single((1, 0), one)
            generic = one + PadicNumber.from_coeffs(p, [p * 3 + p * p] + [p] * (f - 1), N, f)
            # the same line spanned by a rescaled row
            unit = PadicNumber.from_int(p, 3, N, f)
            W2 = W.transformed([[unit]])
            verdicts = {}
            for name, chi, want in (("trivial", trivial, True),
                                    ("avatar alpha=4", sigma_character_point(F, p, 4, N), True),
                                    ("avatar alpha=3", sigma_character_point(F, p, 3, N), True),
                                    ("inverse norm", norm_character_point(F, generic), False)):
                got = is_W_analytic(chi, W)
                got2 = is_W_analytic(chi, W2)
                verdicts[name] = got
                ok = ok and got == want and got2 == want
            rows.append({"p": p, "residue_degree": f, "W_dimension": len(W.rows),
                         "verdicts": verdicts})
        return ok, {"cases": rows}

    return _timed(9, "Sigma-analyticity classifier", 5, body)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def run_all(selection=None, echo=print) -> list[CriterionResult]:
    out = []
    for k in selection or sorted(CRITERIA):
        r = CRITERIA[k]()
        if echo:
            echo(r.line())
        out.append(r)
    return out
