import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shorsim.errors import InvalidOrderError, NotCoprimeError, UndefinedInputError
from shorsim.numtheory import (
    FactorPair,
    continued_fraction_convergents,
    euler_phi,
    factor_from_order,
    gcd,
    integer_kth_root,
    is_prime,
    mod_pow,
    multiplicative_order,
    prime_power_base,
    recover_order_from_sample,
)


def brute_order(x, n):
    y = x % n
    r = 1
    while y != 1:
        y = (y * x) % n
        r += 1
    return r


class TestGcd:
    def test_examples(self):
        assert gcd(48, 15) == 3
        assert gcd(7, 1) == 1
        assert gcd(0, 9) == 9

    def test_both_zero_is_undefined(self):
        with pytest.raises(UndefinedInputError):
            gcd(0, 0)


class TestModPow:
    def test_examples(self):
        assert mod_pow(7, 4, 15) == 1  # 7^4 = 2401 = 160*15 + 1
        assert mod_pow(2, 6, 21) == 1
        for x, n in [(3, 7), (10, 21), (999, 1000)]:
            assert mod_pow(x, 0, n) == 1

    def test_matches_brute_multiplication(self):
        for x in range(2, 12):
            acc = 1
            for e in range(0, 40):
                assert mod_pow(x, e, 1009) == acc
                acc = (acc * x) % 1009

    def test_bad_modulus(self):
        with pytest.raises(ValueError):
            mod_pow(2, 3, 1)


class TestMultiplicativeOrder:
    def test_examples(self):
        assert multiplicative_order(7, 15) == 4
        assert multiplicative_order(2, 21) == 6
        for n in (5, 9, 14, 33):
            assert multiplicative_order(1, n) == 1

    def test_not_coprime_carries_factor(self):
        with pytest.raises(NotCoprimeError) as err:
            multiplicative_order(6, 15)
        assert err.value.common_factor == 3

    def test_order_is_minimal(self):
        for n in range(3, 60):
            for x in range(2, n):
                if math.gcd(x, n) != 1:
                    continue
                r = multiplicative_order(x, n)
                assert mod_pow(x, r, n) == 1
                assert all(mod_pow(x, t, n) != 1 for t in range(1, r))


class TestEulerPhi:
    def test_examples(self):
        assert euler_phi(1) == 1
        assert euler_phi(4) == 2  # {1, 3}
        assert euler_phi(12) == 4  # {1, 5, 7, 11}

    def test_matches_brute_count_up_to_1000(self):
        for r in range(1, 1001):
            brute = sum(1 for k in range(1, r + 1) if math.gcd(k, r) == 1)
            assert euler_phi(r) == brute, r


class TestConvergents:
    def test_examples(self):
        assert continued_fraction_convergents(192, 256) == [
            Fraction(0, 1),
            Fraction(1, 1),
            Fraction(3, 4),
        ]
        assert continued_fraction_convergents(0, 256) == [Fraction(0, 1)]
        assert continued_fraction_convergents(64, 256) == [Fraction(0, 1), Fraction(1, 4)]

    @given(st.integers(min_value=0, max_value=4095), st.integers(min_value=4, max_value=12))
    def test_invariants(self, c, s):
        q = 1 << s
        c = c % q
        convergents = continued_fraction_convergents(c, q)
        assert convergents[-1] == Fraction(c, q)
        # Denominators increase; the only permitted tie is 0/1 followed by a
        # second convergent with denominator 1 (second quotient equal to 1).
        denominators = [conv.denominator for conv in convergents]
        assert denominators[0] <= denominators[-1]
        assert all(a <= b for a, b in zip(denominators, denominators[1:]))
        assert all(a < b for a, b in zip(denominators[1:], denominators[2:]))
        target = Fraction(c, q)
        for conv in convergents:
            assert abs(target - conv) < Fraction(1, conv.denominator**2)

    def test_denominators_increase(self):
        for c in range(1, 512):
            dens = [f.denominator for f in continued_fraction_convergents(c, 512)]
            assert all(a <= b for a, b in zip(dens, dens[1:]))
            assert all(a < b for a, b in zip(dens[1:], dens[2:]))


class TestRecoverOrder:
    def test_examples(self):
        assert recover_order_from_sample(192, 256, 7, 15, 1) == 4
        assert recover_order_from_sample(0, 256, 7, 15, 1) is None
        # convergent 1/2 fails (7^2 = 4), the multiple 2*2 = 4 verifies
        assert recover_order_from_sample(128, 256, 7, 15, 2) == 4

    def test_not_coprime_rejected(self):
        with pytest.raises(NotCoprimeError):
            recover_order_from_sample(64, 256, 6, 15, 1)

    def test_recovered_candidate_is_verified(self):
        for c in range(0, 512, 7):
            candidate = recover_order_from_sample(c, 512, 2, 21, 4)
            if candidate is not None:
                assert mod_pow(2, candidate, 21) == 1


class TestFactorFromOrder:
    def test_examples(self):
        assert factor_from_order(15, 7, 4) == FactorPair(3, 5)
        assert factor_from_order(15, 14, 2) is None  # 14 = -1 (mod 15)
        assert factor_from_order(21, 2, 6) == FactorPair(3, 7)

    def test_invalid_order_rejected(self):
        with pytest.raises(InvalidOrderError):
            factor_from_order(15, 7, 3)

    def test_odd_order_returns_none(self):
        # ord_31(5) = 3
        assert multiplicative_order(5, 31) == 3
        assert factor_from_order(31, 5, 3) is None

    def test_product_invariant(self):
        for n in (15, 21, 33, 35, 39, 51, 55, 57, 65):
            for x in range(2, n):
                if math.gcd(x, n) != 1:
                    continue
                pair = factor_from_order(n, x, brute_order(x, n))
                if pair is not None:
                    assert pair.f1 * pair.f2 == n
                    assert 1 < pair.f1 <= pair.f2 < n


class TestFactorPair:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            FactorPair(5, 3)
        with pytest.raises(ValueError):
            FactorPair(1, 15)

    def test_of_checks_product(self):
        assert FactorPair.of(15, 5, 3) == FactorPair(3, 5)
        with pytest.raises(ValueError):
            FactorPair.of(16, 3, 5)


class TestScreeningHelpers:
    def test_integer_kth_root(self):
        for n in (1, 2, 8, 9, 26, 27, 28, 1000, 59049):
            for k in (1, 2, 3, 5):
                a = integer_kth_root(n, k)
                assert a**k <= n < (a + 1) ** k

    def test_is_prime(self):
        primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}
        for n in range(2, 40):
            assert is_prime(n) == (n in primes)

    def test_prime_power_base(self):
        assert prime_power_base(9) == 3
        assert prime_power_base(27) == 3
        assert prime_power_base(81) == 3
        assert prime_power_base(121) == 11
        assert prime_power_base(15) is None
        assert prime_power_base(36) is None  # perfect square but not a prime power
