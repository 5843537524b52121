from fractions import Fraction
from itertools import product

import mpmath
import pytest

from padic_hecke.fourier import TorsionFunction, char_hat, extend_by_zero, norm_form_units
from padic_hecke.hecke_field import IdealRep, ImagQuadField, factor_over, make_character
from padic_hecke.interpolation import (ConductorOutsideLevel, LevelTooSmall, NonOrdinaryUnsupported,
                                       build_measure_table, c_independence, congruence_check,
                                       coset_delta, euler_telescope_check, j_hat, lhs_via_eisenstein,
                                       refinement_check, rhs_interpolation, smoothed_for_rho,
                                       verify_theorem_A)

QI = ImagQuadField(-4)
F3 = IdealRep.of(QI, 3)
DPS = 25


# Euler rearrangement ----------------------------------------------------------------

@pytest.mark.parametrize("norm_p", [2, 3, 4, 5, 7, 9, 25, 49])
def test_euler_telescope(norm_p):
    assert euler_telescope_check(norm_p, 12)


def test_euler_telescope_needs_order_three():
    with pytest.raises(ValueError):
        euler_telescope_check(5, 2)


def test_euler_telescope_by_series_expansion():
    # independent route: expand (1 - q/u)/(1 - u) with sympy and read off coefficients
    import sympy
    u = sympy.symbols("u")
    for Np in (5, 49):
        q = sympy.Rational(1, Np)
        ser = sympy.series((1 - q / u) / (1 - u), u, 0, 11).removeO()
        for n in range(-1, 11):
            assert ser.coeff(u, n) == sympy.Rational(char_hat(Np, n))
    # the u^-1 term is -1/Np; as Np grows the coefficients tend to the geometric series
    assert char_hat(10 ** 9, -1) == Fraction(-1, 10 ** 9)
    assert abs(char_hat(10 ** 9, 3) - 1) < Fraction(1, 10 ** 8)


# Fourier data ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [5, 7])
def test_j_hat_unramified_is_char_hat_product(p):
    chi = make_character(QI, 4, [])
    jh = j_hat(chi, p, 1)
    primes = factor_over(QI, p)
    for c in product(range(p), repeat=2):
        x = QI.elt(c[0], c[1]) / p
        expected = Fraction(1)
        for q in primes:
            v = 0 if x.is_zero() else q.valuation(x)
            expected *= char_hat(q.norm, v)
        assert jh(c).rational_value() == expected


def test_smoothed_values_are_linear_in_rho():
    unit = norm_form_units(5, 0, 1)
    a = coset_delta(5, 1, (1, 0))
    b = coset_delta(5, 1, (2, 3))
    c = QI.elt(7)
    va = smoothed_for_rho(a, 4, QI, 5, F3, QI.elt(1), c, DPS)
    vb = smoothed_for_rho(b, 4, QI, 5, F3, QI.elt(1), c, DPS)
    vab = smoothed_for_rho(a + b, 4, QI, 5, F3, QI.elt(1), c, DPS)
    with mpmath.workdps(DPS):
        gap = abs(vab.value - va.value - vb.value)
    assert gap <= va.abs_error + vb.abs_error + vab.abs_error
    assert gap < mpmath.mpf(10) ** -15
    assert unit((1, 0)) and unit((2, 3))


# both sides ------------------------------------------------------------------------------

def test_headline_inert_case():
    chi = make_character(QI, 4, [])
    rep = verify_theorem_A(chi, 7, F3, QI.elt(5), 1e-6, DPS)
    assert rep.passed and rep.discrepancy < 1e-6
    js = rep.to_json()
    for key in ("local", "c_factor", "euler", "L_f", "omega"):
        assert key in js["factors"]


def test_split_case():
    chi = make_character(QI, 4, [])
    assert verify_theorem_A(chi, 5, F3, QI.elt(7), 1e-6, DPS).passed


def test_twisted_split_case():
    chi = make_character(QI, 3, [((2, 1), 4, 1)])
    assert verify_theorem_A(chi, 5, F3, QI.elt(7), 1e-6, DPS).passed


def test_corrupted_local_factor_fails():
    chi = make_character(QI, 4, [])
    rep = verify_theorem_A(chi, 7, F3, QI.elt(5), 1e-6, DPS, local_scale=1 + mpmath.mpf(10) ** -3)
    assert not rep.passed
    assert rep.discrepancy > 1e-4


def test_vanishing_smoothing_factor():
    # c = (1): N c - chi(c^-1) = 0, so both sides vanish
    chi = make_character(QI, 4, [])
    lhs = lhs_via_eisenstein(chi, 5, F3, QI.elt(1), dps=DPS)
    rhs = rhs_interpolation(chi, 5, F3, QI.elt(1), DPS)
    assert rhs.value == 0
    assert abs(lhs.value) <= 10 * lhs.abs_error + mpmath.mpf(10) ** -20


def test_lhs_stable_in_level():
    chi = make_character(QI, 4, [])
    a = lhs_via_eisenstein(chi, 5, F3, QI.elt(7), 1, DPS)
    b = lhs_via_eisenstein(chi, 5, F3, QI.elt(7), 2, DPS)
    assert abs(a.value - b.value) <= a.abs_error + b.abs_error + abs(a.value) * mpmath.mpf(10) ** -15


def test_c_independence():
    chi = make_character(QI, 4, [])
    _, _, d = c_independence(chi, 7, F3, QI.elt(5), QI.elt(2, 3), DPS)
    assert d < 1e-6


def test_level_too_small():
    chi = make_character(QI, 3, [((2, 1), 4, 1)])
    with pytest.raises(LevelTooSmall):
        lhs_via_eisenstein(chi, 5, F3, QI.elt(7), 0, DPS)


def test_conductor_outside_level():
    chi = make_character(QI, 3, [((3, 2), 4, 3)])  # a prime over 13 divides neither p nor f
    with pytest.raises(ConductorOutsideLevel):
        verify_theorem_A(chi, 7, F3, QI.elt(5), 1e-6, DPS)


def test_c_must_be_prime_to_p():
    chi = make_character(QI, 4, [])
    with pytest.raises(ValueError):
        verify_theorem_A(chi, 5, F3, QI.elt(2, 1), 1e-6, DPS)


# measures ---------------------------------------------------------------------------------

def test_refinement_level_zero():
    r = refinement_check(QI, 4, 7, F3, QI.elt(5), 0)
    assert r["exact_fourier"] and r["max_relative_gap"] < 1e-9


def test_measure_table_sums_to_whole_unit_group():
    c = QI.elt(7)
    table = build_measure_table(QI, 4, 5, F3, c, 1)
    unit = norm_form_units(5, 0, 1)
    whole = extend_by_zero(TorsionFunction.constant(5, 2, 1, "O", 5), unit)
    for i, b in enumerate(table.gamma["classes"]):
        bb = QI.elt(1) if i == 0 else QI.elt(1, 1)
        assert b == str(bb)
        v = smoothed_for_rho(whole, 4, QI, 5, F3, bb, c)
        s = table.coset_sum(i, (0, 0), 0)
        assert abs(s.value - v.value) < mpmath.mpf(10) ** -9 * max(1, abs(v.value))


def test_congruence_preconditions():
    with pytest.raises(NonOrdinaryUnsupported):
        congruence_check(QI, 4, 10, 7, F3, [QI.elt(5)])
    with pytest.raises(ValueError):
        congruence_check(QI, 4, 7, 5, F3, [QI.elt(7)])
