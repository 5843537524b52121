from fractions import Fraction

import mpmath
import pytest

from padic_hecke.cyclotomic import Cyclo
from padic_hecke.eisenstein import (ConvergenceNotGuaranteed, CoprimalityViolation, LatticeC,
                                    NotGammaInvariant, RecognitionFailed, UnsupportedField,
                                    brute_force_sum, coset_sum_oracle, delta_one,
                                    distribution_relation_oracle, eisenstein_series, full_L,
                                    ideal_sum_oracle, lemniscate_constant, partial_L, period_omega,
                                    recognize_algebraic, smoothed_eisenstein, transport)
from padic_hecke.fourier import TorsionFunction
from padic_hecke.hecke_field import IdealRep, ImagQuadField, make_character

QI = ImagQuadField(-4)
QW = ImagQuadField(-3)
DPS = 30


@pytest.fixture(autouse=True)
def precision():
    with mpmath.workdps(DPS):
        yield


def G4_gaussian_rows():
    """sum' (m + n i)^-4 over Z[i], each row n -> (n - m i)^-4 summed in closed form by polygamma."""
    total = 2 * mpmath.zeta(4)
    for m in range(1, 40):
        for mm in (m, -m):
            z = -1j * mpmath.mpf(mm)
            total += (mpmath.psi(3, z) + mpmath.psi(3, 1 - z)) / 6
    return total


def whole_lattice(F, k=1):
    return TorsionFunction(k, 2, {(0, 0): 1}, LatticeC(F, F.elt(1)).label)


def test_zero_function():
    lat = LatticeC(QI, QI.elt(1))
    E = eisenstein_series(TorsionFunction(1, 2, {}, lat.label), 4, 0, lat)
    assert E.value == 0 and E.abs_error == 0


def test_gaussian_G4_three_routes():
    lat = LatticeC(QI, QI.elt(1))
    E = eisenstein_series(whole_lattice(QI), 4, 0, lat, dps=DPS)
    rows = G4_gaussian_rows()
    varpi = mpmath.pi / mpmath.agm(1, mpmath.sqrt(2))
    assert abs(rows - varpi ** 4 / 15) < mpmath.mpf(10) ** -25
    assert abs(E.value - rows) < mpmath.mpf(10) ** -20
    assert E.abs_error < mpmath.mpf(10) ** -20
    assert abs(lemniscate_constant() - varpi) < mpmath.mpf(10) ** -28
    B = brute_force_sum(lat, (0, 0), 4, 4, 60)
    assert abs(B.value - E.value) <= B.abs_error + E.abs_error


@pytest.mark.parametrize("F,point,M,alpha", [(QI, (1, 2), 5, 3), (QI, (1, 0), 3, 5), (QW, (0, 0), 1, 6),
                                             (QW, (1, 1), 4, 3), (QW, (2, 0), 7, 4)])
def test_engine_against_brute_force_two_radii(F, point, M, alpha):
    lat = LatticeC(F, F.elt(1))
    f = TorsionFunction(M, 2, {point: 1}, lat.label)
    E = eisenstein_series(f, alpha, 0, lat, dps=DPS)
    for R in (25, 50):
        B = brute_force_sum(lat, (Fraction(point[0], M), Fraction(point[1], M)), alpha, alpha, R)
        assert abs(B.value - E.value) <= B.abs_error + E.abs_error


def test_finite_index_rule():
    lat = LatticeC(QI, QI.elt(1))
    f = whole_lattice(QI)
    full = [u for u, _ in QI.units]
    half = [QI.elt(1), QI.elt(-1)]
    E_full = eisenstein_series(f, 4, 0, lat, full, DPS)
    E_half = eisenstein_series(f, 4, 0, lat, half, DPS)
    assert abs(E_half.value - 2 * E_full.value) < mpmath.mpf(10) ** -20


def test_coset_formula_against_orbit_oracle():
    lat = LatticeC(QW, QW.elt(1))
    gam = [u for u, _ in QW.units]
    f = whole_lattice(QW)
    E = eisenstein_series(f, 6, 0, lat, gam, DPS)
    O = coset_sum_oracle(f, 6, 0, lat, gam, 30)
    assert abs(E.value - O.value) <= E.abs_error + O.abs_error


def test_gamma_invariance_checked():
    lat = LatticeC(QI, QI.elt(1))
    f = TorsionFunction(3, 2, {(1, 0): 1}, lat.label)
    with pytest.raises(NotGammaInvariant):
        eisenstein_series(f, 4, 0, lat, [u for u, _ in QI.units])


def test_low_weight_needs_flag():
    lat = LatticeC(QI, QI.elt(1))
    f = TorsionFunction(3, 2, {(1, 0): 1}, lat.label)
    with pytest.raises(ConvergenceNotGuaranteed):
        eisenstein_series(f, 1, 0, lat)
    with pytest.raises(ConvergenceNotGuaranteed):
        brute_force_sum(lat, (Fraction(1, 3), 0), 2, 2, 10)


def test_homogeneity():
    lat = LatticeC(QI, QI.elt(1))
    f = TorsionFunction(5, 2, {(1, 2): 1, (3, 1): Cyclo.root(4)}, lat.label)
    u = QI.elt(2, 1)
    new = lat.scaled(u)
    # u z has the same coordinates in u Lambda as z has in Lambda
    g = TorsionFunction(5, 2, dict(f.values), new.label)
    E = eisenstein_series(f, 4, 0, lat, dps=DPS)
    Eu = eisenstein_series(g, 4, 0, new, dps=DPS)
    assert abs(Eu.value - u.to_complex() ** -4 * E.value) < mpmath.mpf(10) ** -20


# L-values -------------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [4, 8])
@pytest.mark.parametrize("s", [3, 4, 5])
def test_partial_L_against_ideal_sums(alpha, s):
    chi = make_character(QI, alpha, [])
    f = IdealRep.of(QI, 3)
    E = full_L(chi, s, f, DPS)
    O = ideal_sum_oracle(chi, s, f, 800)
    assert abs(E.value - O.value) <= O.abs_error + E.abs_error
    assert abs(E.value - O.value) < mpmath.mpf(10) ** -8


def test_partial_L_per_class_twisted():
    chi = make_character(QI, 3, [((2, 1), 4, 1)])
    f = IdealRep.of(QI, 3)
    from padic_hecke.eisenstein import ray_classes_for
    for b in ray_classes_for(chi, f).representatives:
        E = partial_L(chi, 4, b, f, DPS)
        O = ideal_sum_oracle(chi, 4, f, 800, b)
        assert abs(E.value - O.value) <= O.abs_error + E.abs_error


def test_partial_L_at_zero_and_exact_value():
    chi = make_character(QI, 4, [])
    f = IdealRep.of(QI, 3)
    E = partial_L(chi, 0, QI.elt(1), f, DPS)
    assert E.abs_error < mpmath.mpf(10) ** -10
    # ideals prime to 3: (1/4) sum over x not divisible by 3 of x^-4 = (1/4)(1 - 3^-4) G4
    varpi = mpmath.pi / mpmath.agm(1, mpmath.sqrt(2))
    expected = mpmath.mpf(1) / 4 * (1 - mpmath.mpf(3) ** -4) * varpi ** 4 / 15
    assert abs(full_L(chi, 0, f, DPS).value - expected) < mpmath.mpf(10) ** -20


def test_partial_L_rejects_bad_class():
    chi = make_character(QI, 4, [])
    with pytest.raises(CoprimalityViolation):
        partial_L(chi, 0, QI.elt(3), IdealRep.of(QI, 3))


def test_L_and_L_f_differ_by_euler_factor():
    chi = make_character(QI, 4, [])
    s = 5
    L1 = full_L(chi, s, IdealRep.of(QI, 1), DPS).value
    L3 = full_L(chi, s, IdealRep.of(QI, 3), DPS).value
    chi3 = mpmath.mpf(3) ** -4  # chi((3)) = 3^-4, N(3) = 9
    assert abs(L3 - L1 * (1 - chi3 * mpmath.mpf(9) ** -s)) < mpmath.mpf(10) ** -20


def test_transport_keeps_points():
    lat = LatticeC(QI, QI.elt(1))
    f = TorsionFunction(3, 2, {(1, 2): 1}, lat.label)
    new = lat.scaled(QI.elt(3))
    g = transport(f, lat, new, 9)
    (t, v), = g.values.items()
    assert new.point(t, 9) == lat.point((1, 2), 3)


def test_smoothed_against_distribution_relation():
    f, lat = delta_one(IdealRep.of(QI, 3), QI.elt(1))
    c = QI.elt(2, 1)
    S = smoothed_eisenstein(f, 4, lat, c, dps=DPS)
    E1 = eisenstein_series(f, 4, 0, lat, dps=DPS)
    E2 = distribution_relation_oracle(f, 4, lat, c, dps=DPS)
    assert abs(S.value - (5 * E1.value - E2.value)) < mpmath.mpf(10) ** -9
    empty = TorsionFunction(3, 2, {}, lat.label)
    assert smoothed_eisenstein(empty, 4, lat, c).value == 0


def test_smoothed_two_radii():
    f, lat = delta_one(IdealRep.of(QI, 3), QI.elt(1))
    c = QI.elt(3)
    rho = TorsionFunction(15, 2, {(5, 0): 1}, lat.label)  # delta_1 shifted by a 5-torsion point
    S = smoothed_eisenstein(rho, 4, lat, c, dps=DPS)
    new = lat.scaled(c.inverse())
    parts = []
    for R in (40, 80):
        a = brute_force_sum(lat, (Fraction(1, 3), 0), 4, 4, R).scale(9)
        b = brute_force_sum(new, new.coords(lat.point((5, 0), 15)), 4, 4, R)
        parts.append(a - b)
    for P in parts:
        assert abs(P.value - S.value) <= P.abs_error + S.abs_error


# periods and recognition ---------------------------------------------------------------

def test_period_two_precisions():
    for F in (QI, QW, ImagQuadField(-7), ImagQuadField(-8), ImagQuadField(-11)):
        with mpmath.workdps(30):
            a = period_omega(F, 30).omega
        with mpmath.workdps(60):
            b = period_omega(F, 60).omega
        assert a != 0
        assert abs(a - b) < mpmath.mpf(10) ** -20


def test_gaussian_period_against_lemniscate():
    with mpmath.workdps(40):
        ratio = period_omega(QI, 40).omega / lemniscate_constant()
        assert recognize_algebraic(ratio ** 4, mpmath.mpf(10) ** -30, 1, 10) == Cyclo.one()


def test_unsupported_field():
    with pytest.raises(UnsupportedField):
        period_omega(ImagQuadField(-19))


def test_rescaling_invariance():
    chi = make_character(QI, 4, [])
    L = full_L(chi, 0, IdealRep.of(QI, 3), DPS).value
    omega = period_omega(QI, DPS).omega
    u = QI.elt(1, 2).to_complex()
    a = 6 * L / omega ** 4
    b = 6 * L / (u * omega) ** 4 * u ** 4
    assert abs(a - b) < mpmath.mpf(10) ** -25


def test_recognize_simple_values():
    assert recognize_algebraic(mpmath.mpf("0.5"), mpmath.mpf(10) ** -20, 1, 10) == Cyclo.rational(Fraction(1, 2))
    z3 = mpmath.expjpi(mpmath.mpf(2) / 3)
    assert recognize_algebraic(z3, mpmath.mpf(10) ** -25, 3, 10) == Cyclo.root(3, 1)
    with pytest.raises(RecognitionFailed):
        recognize_algebraic(mpmath.pi, mpmath.mpf(10) ** -25, 1, 100)


def test_normalized_L_recognized_at_two_precisions():
    chi = make_character(QI, 4, [])
    out = []
    for dps in (40, 80):
        with mpmath.workdps(dps + 10):
            L = full_L(chi, 0, IdealRep.of(QI, 3), dps)
            omega = period_omega(QI, dps).omega
            z = 6 * L.value / omega ** 4
            out.append(recognize_algebraic(z, max(6 * L.abs_error / abs(omega) ** 4, mpmath.mpf(10) ** (-dps + 10)),
                                           4, 10 ** 6))
    assert out[0] == out[1] == Cyclo.rational(Fraction(8, 81))
