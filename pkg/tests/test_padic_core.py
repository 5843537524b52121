from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_hecke.padic_core import (ConvergenceDomainViolated, DivisionByZeroAtPrecision,
                                    IncompatibleStructures, NotAUnit, PadicNumber, arith, pexp,
                                    plog, teichmuller)

PRIMES = [2, 3, 5, 7]


def Z(p, n, N=10, f=1):
    return PadicNumber.from_int(p, n, N, f)


def as_int(x):
    return x.residues()[0]


def test_difference_of_squares():
    assert as_int(Z(5, 6, 3) * Z(5, -4, 3)) == 101


def test_half_mod_25():
    x = PadicNumber.from_rational(5, Fraction(1, 2), 2)
    assert as_int(x) == 13


def test_additive_inverse():
    x = Z(3, 17, 6)
    assert (x + (-x)).is_zero()


def test_arith_dispatch():
    a, b = Z(7, 10), Z(7, 3)
    assert arith(a, b, "add") == Z(7, 13)
    assert arith(a, b, "sub") == Z(7, 7)
    assert arith(a, b, "mul") == Z(7, 30)
    assert arith(a, b, "div") * b == a


def test_division_by_zero_at_precision():
    with pytest.raises(DivisionByZeroAtPrecision):
        Z(5, 1, 3) / Z(5, 125, 3)


def test_incompatible_structures():
    with pytest.raises(IncompatibleStructures):
        Z(5, 1) + Z(7, 1)
    with pytest.raises(IncompatibleStructures):
        Z(5, 1) + Z(5, 1, f=2)


def test_division_loses_precision_by_valuation():
    q = Z(5, 1, 10) / Z(5, 25, 10)
    assert q.valuation == -2
    assert q.abs_precision <= 8


def test_teichmuller_fixed_point():
    assert teichmuller(Z(5, 1, 6)) == Z(5, 1, 6)


def test_teichmuller_of_two_mod_25():
    assert as_int(teichmuller(Z(5, 2, 2))) == 7


def test_teichmuller_needs_unit():
    with pytest.raises(NotAUnit):
        teichmuller(Z(5, 10))


def test_plog_of_one():
    assert plog(Z(5, 1)).is_zero()


def test_log_exp_roundtrip_one_plus_five():
    u = Z(5, 6, 4)
    assert pexp(plog(u)) == u


def test_plog_power_rule():
    for p in PRIMES:
        u = Z(p, 1 + p, 12)
        assert plog(u ** 3) == plog(u) * Z(p, 3, 12)


def test_plog_requires_one_unit():
    with pytest.raises(ConvergenceDomainViolated):
        plog(Z(5, 2))
    # after Teichmuller projection any unit is allowed
    assert plog(Z(5, 2), one_unit=False) == plog(Z(5, 2) / teichmuller(Z(5, 2)))


def test_pexp_domain():
    with pytest.raises(ConvergenceDomainViolated):
        pexp(Z(5, 1))
    with pytest.raises(ConvergenceDomainViolated):
        pexp(Z(2, 2))
    pexp(Z(2, 4))


def test_serialization():
    s = Z(5, 6, 3).serialize()
    assert s == "5^0 * (1 + 1*5) + O(5^3)"
    assert PadicNumber.zero(5, 3).serialize() == "O(5^3)"


# properties ------------------------------------------------------------------

primes = st.sampled_from(PRIMES)
degrees = st.sampled_from([1, 2])


@st.composite
def triples(draw):
    p, f, N = draw(primes), draw(degrees), draw(st.integers(2, 12))
    xs = [PadicNumber.from_coeffs(p, [draw(st.integers(-10**6, 10**6)) for _ in range(f)], N, f)
          for _ in range(3)]
    return xs


@given(triples())
def test_ring_axioms(xs):
    a, b, c = xs
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(primes, st.integers(1, 12), st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_matches_integer_arithmetic(p, N, m, n):
    mod = p ** N
    assert as_int(Z(p, m, N) * Z(p, n, N)) % mod == (m * n) % mod
    assert as_int(Z(p, m, N) + Z(p, n, N)) == (m + n) % mod


@given(primes, st.integers(2, 10), st.integers(1, 10**6))
def test_inverse_matches_pow(p, N, n):
    if n % p == 0:
        n += 1
    assert as_int(Z(p, 1, N) / Z(p, n, N)) == pow(n, -1, p ** N)


@given(primes, degrees, st.integers(2, 10), st.data())
def test_teichmuller_properties(p, f, N, data):
    def unit():
        cs = [data.draw(st.integers(0, 10**6)) for _ in range(f)]
        x = PadicNumber.from_coeffs(p, cs, N, f)
        return x if x.is_unit() else x + PadicNumber.from_int(p, 1, N, f)

    x, y = unit(), unit()
    if not (x.is_unit() and y.is_unit()):
        return
    q = p ** f
    wx = teichmuller(x)
    assert wx ** (q - 1) == PadicNumber.from_int(p, 1, N, f)
    assert wx.reduce_mod_p() == x.reduce_mod_p()
    assert teichmuller(x * y) == wx * teichmuller(y)


@settings(max_examples=50)
@given(primes, st.integers(3, 12), st.integers(0, 10**6))
def test_log_exp_inverse(p, N, k):
    m = 2 if p == 2 else 1
    u = Z(p, 1 + p ** m * k, N)
    assert pexp(plog(u)).with_precision(N - 1) == u.with_precision(N - 1)


@given(primes, st.integers(2, 10), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_precision_never_grows(p, N, m, n):
    a, b = Z(p, m, N), Z(p, n, N - 1)
    assert (a + b).abs_precision <= min(a.abs_precision, b.abs_precision)
    assert (a - b).abs_precision <= min(a.abs_precision, b.abs_precision)
    # worst case for a product: each factor's error times the other factor
    bound = min(a.valuation + b.abs_precision, b.valuation + a.abs_precision)
    assert (a * b).abs_precision <= bound
