import cmath
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from padic_hecke.cyclotomic import Cyclo
from padic_hecke.fourier import (AnalyticityCondition, CharacterPoint, FiniteCharacter, LevelMismatch,
                                 MissingCharacterValue, PrecisionInsufficient, TorsionFunction,
                                 TruncationOverflow, all_characters, amice_transform, char_hat,
                                 convolve, convolve_measures, dirac_series, extend_by_zero,
                                 finite_fourier, inner, integrate_against, inverse_finite_fourier,
                                 is_W_analytic, measure_on_level, pointwise, rank_one_units,
                                 reduce_mod_level)
from padic_hecke.padic_core import PadicNumber


def oracle_transform(rho):
    """Direct floating-point sum over the group."""
    M, r = rho.modulus, rho.rank
    out = {}
    for e in product(range(M), repeat=r):
        s = 0
        for t in product(range(M), repeat=r):
            s += cmath.exp(-2j * cmath.pi * sum(a * b for a, b in zip(e, t)) / M) * complex(rho(t).to_complex())
        out[e] = s / M ** r
    return out


def random_function(rng, p, n, r, support=4):
    M = p ** n
    vals = {tuple(rng.randrange(M) for _ in range(r)): Cyclo.root(M, rng.randrange(M)) * rng.randint(-4, 4)
            + Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(support)}
    return TorsionFunction.on_level(p, n, r, vals)


# examples --------------------------------------------------------------------

def test_transform_of_character_is_indicator():
    chi0 = FiniteCharacter(9, (2, 5))
    table = finite_fourier(chi0.as_function(prime=3))
    assert table.support() == {(2, 5)}
    assert table((2, 5)) == Cyclo.one()


def test_transform_of_constant():
    table = finite_fourier(TorsionFunction.constant(5, 2, prime=5))
    assert table.values == {(0, 0): Cyclo.one()}


def test_transform_of_delta_zero_p3():
    table = finite_fourier(TorsionFunction.delta(3, (0,), prime=3))
    assert all(table((e,)) == Cyclo.rational(Fraction(1, 3)) for e in range(3))


def test_inverse_examples():
    ind = TorsionFunction(4, 2, {(0, 0): 1}, "dual:O", 2)
    assert inverse_finite_fourier(ind) == TorsionFunction.constant(4, 2, prime=2)
    assert inverse_finite_fourier(TorsionFunction(4, 2, {}, "dual:O", 2)).values == {}


def test_roundtrip_p2_n2_r2():
    rng = random.Random(3)
    for _ in range(10):
        rho = random_function(rng, 2, 2, 2)
        assert inverse_finite_fourier(finite_fourier(rho)) == rho


def test_transform_against_oracle():
    rng = random.Random(7)
    for p, n, r in [(3, 1, 2), (2, 2, 1), (5, 1, 1), (2, 1, 2)]:
        rho = random_function(rng, p, n, r)
        exact = finite_fourier(rho)
        for e, v in oracle_transform(rho).items():
            assert abs(complex(exact(e).to_complex()) - v) < 1e-12


def test_level_mismatch():
    rho = TorsionFunction.delta(9, (1,), prime=3)
    with pytest.raises(LevelMismatch):
        finite_fourier(rho, 1)


def test_delta_convolutions():
    d = lambda x: TorsionFunction.delta(8, x, prime=2)
    assert convolve(d((3, 1)), d((1, 0))) == d((4, 1))
    f = random_function(random.Random(1), 2, 3, 2)
    assert convolve(f, d((0, 0))) == f
    half = TorsionFunction.delta(2, (1,), prime=2)
    assert convolve(half, half) == TorsionFunction.delta(2, (0,), prime=2)


def test_extend_by_zero_rank_one():
    one = TorsionFunction.constant(3, 1, prime=3)
    j = extend_by_zero(one, rank_one_units(3))
    assert [j((t,)) for t in range(3)] == [Cyclo.zero(), Cyclo.one(), Cyclo.one()]
    assert extend_by_zero(j, rank_one_units(3)) == j


def test_extend_by_zero_transform_is_char_hat():
    # on Z_5 the units' indicator at level 1 has transform char_hat(5, v) at characters of "valuation" v
    j = extend_by_zero(TorsionFunction.constant(5, 1, prime=5), rank_one_units(5))
    table = finite_fourier(j)
    assert table((0,)) == Cyclo.rational(char_hat(5, 0))
    for e in range(1, 5):
        assert table((e,)) == Cyclo.rational(char_hat(5, -1))


def test_char_hat_table():
    assert char_hat(5, 0) == Fraction(4, 5)
    assert char_hat(5, 3) == Fraction(4, 5)
    assert char_hat(5, -1) == Fraction(-1, 5)
    assert char_hat(5, -2) == 0


def test_amice_examples():
    assert amice_transform({(0,): 1}, 8).equals(dirac_series((0,), 8))
    assert dict(dirac_series((0,), 8).coeffs) == {(0,): 1}
    s = amice_transform({(2,): 1}, 4)
    assert dict(s.coeffs) == {(0,): 1, (1,): 2, (2,): 1}
    with pytest.raises(TruncationOverflow):
        s.truncate(5)


def test_dirac_series_against_binomials():
    # (1+X)^a paired with the Mahler basis: coefficient k is binom(a, k)
    from math import comb
    for a in range(8):
        s = dirac_series((a,), 10)
        assert all(s[(k,)] == comb(a, k) for k in range(11))


def test_amice_is_algebra_map():
    rng = random.Random(11)
    for _ in range(20):
        mu = {(rng.randrange(25), rng.randrange(25)): rng.randint(-5, 5) for _ in range(3)}
        nu = {(rng.randrange(25), rng.randrange(25)): rng.randint(-5, 5) for _ in range(3)}
        D = 6
        lhs = amice_transform(convolve_measures(mu, nu), D)
        assert lhs.equals(amice_transform(mu, D) * amice_transform(nu, D))


def test_refining_measure_keeps_level_shadow():
    mu = {(1,): 2, (6,): -1, (3,): 5}
    nu = {(11,): 2, (1,): -1, (8,): 5}  # same cosets mod 5
    assert measure_on_level(mu, 5, 1) == measure_on_level(nu, 5, 1)
    assert reduce_mod_level(amice_transform(mu, 16), 5, 1) == reduce_mod_level(amice_transform(nu, 16), 5, 1)


def test_integrate_against():
    chi0 = FiniteCharacter(5, (2, 3))
    rho = chi0.as_function(prime=5)
    f_values = {e.exponents: Cyclo.rational(sum(e.exponents) * 10 + 1) for e in all_characters(5, 2)}
    assert integrate_against(rho, f_values) == f_values[(2, 3)]
    assert integrate_against(TorsionFunction(5, 2, {}, "O", 5), f_values) == 0
    approx = integrate_against(rho, {e: complex(v.to_complex()) for e, v in f_values.items()})
    assert abs(approx - 51) < 1e-12
    chi1 = FiniteCharacter(5, (4, 0))
    both = rho + chi1.as_function(prime=5)
    assert integrate_against(both, f_values) == f_values[(2, 3)] + f_values[(4, 0)]
    with pytest.raises(MissingCharacterValue):
        integrate_against(rho, {})


# W-analyticity -----------------------------------------------------------------

def test_trivial_character_always_analytic():
    p, N = 5, 12
    one = PadicNumber.from_int(p, 1, N)
    W = AnalyticityCondition(p, 2, ((PadicNumber.from_int(p, 1, N), PadicNumber.from_int(p, 3, N)),))
    assert is_W_analytic(CharacterPoint.single((4, -1), one), W)


def test_analytic_membership_and_scaling():
    p, N = 7, 15
    P = lambda n: PadicNumber.from_int(p, n, N)
    W = AnalyticityCondition(p, 2, ((P(1), P(2)),))
    z = P(1 + 7)
    assert is_W_analytic(CharacterPoint.single((3, 6), z), W)
    assert not is_W_analytic(CharacterPoint.single((1, 0), z), W)
    W3 = W.transformed([[P(3)]])
    assert is_W_analytic(CharacterPoint.single((3, 6), z), W3)
    assert not is_W_analytic(CharacterPoint.single((1, 0), z), W3)


def test_undecidable_membership_raises():
    p, N = 5, 6
    P = lambda n: PadicNumber.from_int(p, n, N)
    W = AnalyticityCondition(p, 2, ((P(1), P(1)),))
    # direction (1, 1 + 5^4): off the span only at the edge of the working precision
    with pytest.raises(PrecisionInsufficient):
        is_W_analytic(CharacterPoint.single((1, 1 + 5 ** 4), P(1 + 5)), W)


def test_character_point_needs_one_unit():
    with pytest.raises(ValueError):
        CharacterPoint.single((1,), PadicNumber.from_int(5, 2, 5))


# properties ------------------------------------------------------------------

cases = st.sampled_from([(2, 1, 1), (2, 2, 1), (2, 1, 2), (2, 2, 2), (3, 1, 1), (3, 2, 1), (3, 1, 2),
                         (5, 1, 1), (5, 1, 2)])


@settings(max_examples=60, deadline=None)
@given(cases, st.integers(0, 2 ** 32))
def test_inversion_parseval_convolution(case, seed):
    p, n, r = case
    rng = random.Random(seed)
    f, g = random_function(rng, p, n, r), random_function(rng, p, n, r)
    F, G = finite_fourier(f), finite_fourier(g)
    size = p ** (n * r)
    assert inverse_finite_fourier(F) == f
    assert inner(f, g) == inner(F, G) * size
    assert finite_fourier(convolve(f, g)) == pointwise(F, G).scale(size)


@settings(max_examples=40, deadline=None)
@given(cases, st.integers(0, 2 ** 32))
def test_convolution_algebra(case, seed):
    p, n, r = case
    rng = random.Random(seed)
    f, g, h = (random_function(rng, p, n, r, 3) for _ in range(3))
    assert convolve(f, g) == convolve(g, f)
    assert convolve(convolve(f, g), h) == convolve(f, convolve(g, h))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 1, 1), (2, 1, 2), (3, 1, 1), (3, 1, 2), (5, 1, 1)]), st.integers(0, 2 ** 32))
def test_level_compatibility(case, seed):
    p, n, r = case
    rho = random_function(random.Random(seed), p, n, r)
    fine = finite_fourier(rho, n + 1)
    coarse = finite_fourier(rho)
    # a level-n function only sees characters trivial on p^n T: those are the zero-padded ones
    assert fine == coarse.zero_pad(p ** (n + 1))


@settings(max_examples=30, deadline=None)
@given(cases, st.integers(0, 2 ** 32))
def test_zero_pad_then_coarsen(case, seed):
    p, n, r = case
    rho = random_function(random.Random(seed), p, n, r)
    assert rho.zero_pad(p ** (n + 1)).coarsen(p ** n) == rho


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 2), st.data())
def test_character_orthogonality(p, n, data):
    M = p ** n
    a = FiniteCharacter(M, (data.draw(st.integers(0, M - 1)), data.draw(st.integers(0, M - 1))))
    b = FiniteCharacter(M, (data.draw(st.integers(0, M - 1)), data.draw(st.integers(0, M - 1))))
    val = inner(a.as_function(prime=p), b.as_function(prime=p))
    assert val == Cyclo.rational(M * M if a == b else 0)
