import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_product, random_series, series_of
from qcert.errors import CacheCorruption, ModulusMismatch, NotAUnit
from qcert.series import (
    InfiniteWithinTruncation,
    ModSeries,
    ProgressionSelector,
    add,
    dumps,
    from_coefficients,
    invert,
    loads,
    make_series,
    mul,
    one,
    ord_mod,
    power,
    shift,
    sieve,
    u_operator,
    zeros,
)


class TestMakeSeries:
    def test_constant_one(self):
        assert make_series(5, 4, [(0, 1)]).tolist() == [1, 0, 0, 0]

    def test_reduction(self):
        assert make_series(5, 3, [(1, 7)])[1] == 2

    def test_duplicates_accumulate(self):
        assert make_series(7, 2, [(0, 3), (0, 4)])[0] == 0

    def test_negative_entries_reduce(self):
        assert make_series(5, 2, [(1, -1)])[1] == 4

    def test_exponent_out_of_range(self):
        with pytest.raises(IndexError):
            make_series(5, 3, [(3, 1)])

    def test_bad_modulus(self):
        with pytest.raises(ValueError):
            make_series(1, 3, [])

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            make_series(5, 0, [])
        with pytest.raises(ValueError):
            ModSeries(5, np.zeros(0, dtype=np.uint64))

    def test_largest_modulus(self):
        m = 2**63 - 1
        s = make_series(m, 2, [(0, -1)])
        assert s[0] == m - 1

    def test_coefficients_are_read_only(self):
        s = one(5, 3)
        with pytest.raises(ValueError):
            s.coeffs[0] = 3


class TestAdd:
    def test_wraps_to_zero(self):
        a = from_coefficients(5, [1, 1])
        b = from_coefficients(5, [1, 4])
        assert add(a, b).tolist() == [2, 0]

    def test_identity(self):
        s = from_coefficients(11, [3, 7, 10, 2])
        assert add(s, zeros(11, 4)) == s

    def test_truncates_to_shorter(self):
        assert add(zeros(5, 5), zeros(5, 3)).length == 3

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            add(zeros(5, 2), zeros(7, 2))

    def test_huge_modulus_no_overflow(self):
        m = 2**63 - 1
        a = from_coefficients(m, [m - 1, m - 2])
        assert add(a, a).tolist() == [m - 2, m - 4]


class TestMul:
    def test_telescoping(self):
        one_minus_q = from_coefficients(97, [1, -1, 0, 0, 0, 0])
        ones = from_coefficients(97, [1] * 6)
        assert mul(one_minus_q, ones).tolist() == [1, 0, 0, 0, 0, 0]

    def test_identity(self):
        s = from_coefficients(13, [4, 0, 9, 12, 1])
        assert mul(s, one(13, 5)) == s

    def test_hand_convolution(self):
        a = from_coefficients(5, [1, 2, 1, 0])
        b = from_coefficients(5, [1, 1, 0, 0])
        expected = naive_product(a.tolist(), b.tolist(), 4, 5)
        assert expected == [1, 3, 3, 1]
        for method in ("schoolbook", "ntt", "auto"):
            assert mul(a, b, method).tolist() == expected

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            mul(one(5, 2), one(5, 2), "karatsuba")

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            mul(one(5, 2), one(7, 2))

    @pytest.mark.parametrize("modulus", [2, 5, 97, 10**9 + 7, 2**40 + 15, 2**63 - 1])
    def test_ntt_matches_naive(self, modulus):
        rng = np.random.default_rng(modulus % 1000)
        for L in (1, 2, 7, 65, 130):
            a = random_series(rng, modulus, L)
            b = random_series(rng, modulus, L)
            expected = naive_product(a.tolist(), b.tolist(), L, modulus)
            assert mul(a, b, "ntt").tolist() == expected
            assert mul(a, b, "schoolbook").tolist() == expected

    def test_ntt_matches_schoolbook_all_lengths_to_512(self):
        rng = np.random.default_rng(512)
        for L in range(1, 513):
            m = int(rng.choice([2, 5, 7, 97, 30030, 10**9 + 7]))
            a = random_series(rng, m, L)
            b = random_series(rng, m, L)
            assert mul(a, b, "ntt") == mul(a, b, "schoolbook"), (m, L)

    def test_squaring_path(self):
        rng = np.random.default_rng(3)
        a = random_series(rng, 5, 300)
        assert mul(a, a) == mul(a, ModSeries(5, a.coeffs.copy()))


class TestInvert:
    def test_one(self):
        assert invert(one(5, 6)) == one(5, 6)

    def test_geometric(self):
        assert invert(from_coefficients(5, [1, -1, 0, 0, 0])).tolist() == [1] * 5

    def test_partition_numbers(self):
        from qcert.eta import pentagonal_series
        from qcert.frobenius import partition_oracle

        p = invert(pentagonal_series(1, 10**9, 10))
        assert p.tolist() == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30] == partition_oracle(9)

    def test_non_unit(self):
        with pytest.raises(NotAUnit):
            invert(from_coefficients(10, [5, 1]))
        with pytest.raises(NotAUnit):
            invert(from_coefficients(5, [0, 1]))

    def test_composite_modulus(self):
        a = from_coefficients(12, [7, 3, 11, 5, 0, 1])
        assert mul(a, invert(a)) == one(12, 6)

    def test_random_units_length_256(self):
        rng = np.random.default_rng(256)
        for i in range(10_000):
            m = int(rng.choice([5, 7, 30030, 10**9 + 7, 2**61 - 1]))
            a = random_series(rng, m, 256)
            c0 = int(rng.integers(1, min(m, 2**62)))
            while np.gcd(c0, m) != 1:
                c0 += 1
            coeffs = a.coeffs.copy()
            coeffs[0] = c0 % m
            a = ModSeries(m, coeffs)
            assert mul(a, invert(a)) == one(m, 256), i


class TestPower:
    def test_zero_exponent(self):
        assert power(from_coefficients(5, [2, 3, 4]), 0) == one(5, 3)

    def test_binomial(self):
        assert power(from_coefficients(5, [1, 1, 0]), 2).tolist() == [1, 2, 1]

    def test_negative(self):
        a = from_coefficients(7, [3, 1, 4, 1, 5])
        assert power(a, -3) == invert(power(a, 3))

    def test_negative_non_unit(self):
        with pytest.raises(NotAUnit):
            power(from_coefficients(5, [0, 1]), -1)

    @given(series_of(11, 1, 20), st.integers(0, 9))
    def test_matches_repeated_product(self, s, e):
        acc = one(11, s.length)
        for _ in range(e):
            acc = mul(acc, s)
        assert power(s, e) == acc


class TestShiftSieveU:
    def test_shift_prefactor(self):
        s = shift(one(5, 30), 21)
        assert s[21] == 1 and sum(s.tolist()) == 1

    def test_shift_zero(self):
        s = from_coefficients(5, [1, 2, 3])
        assert shift(s, 0) == s

    def test_shift_drops_overflow(self):
        assert shift(from_coefficients(5, [1, 1, 0]), 2).tolist() == [0, 0, 1]

    def test_shift_negative(self):
        with pytest.raises(ValueError):
            shift(one(5, 2), -1)

    def test_sieve_odd(self):
        assert sieve(from_coefficients(5, [1] * 7), (2, 1)).tolist() == [0, 1, 0, 1, 0, 1, 0]

    def test_sieve_identity_selector(self):
        s = from_coefficients(5, [4, 3, 2])
        assert sieve(s, ProgressionSelector(1, 0)) == s

    def test_bad_selector(self):
        with pytest.raises(ValueError):
            sieve(one(5, 3), (3, 3))

    def test_u_operator(self):
        assert u_operator(from_coefficients(5, [1] * 10), 3).tolist() == [1] * 4
        s = from_coefficients(7, [0, 0, 1, 0, 2, 0, 3])
        assert u_operator(s, 2).tolist() == [0, 1, 2, 3]
        assert u_operator(s, 1) == s

    def test_u_operator_length(self):
        for L in range(1, 20):
            for t in range(1, 6):
                assert u_operator(zeros(5, L), t).length == -(-L // t)


class TestOrdMod:
    def test_first_unit_coefficient(self):
        s = make_series(35, 10, [(3, 5), (7, 1)])
        assert ord_mod(s, 5) == 7

    def test_zero_series(self):
        assert ord_mod(zeros(5, 9), 5) == InfiniteWithinTruncation(9)

    def test_incompatible(self):
        with pytest.raises(ModulusMismatch):
            ord_mod(zeros(7, 3), 5)


class TestDump:
    @pytest.mark.parametrize("modulus", [2, 5, 256, 257, 10**9, 2**63 - 1])
    def test_round_trip(self, modulus):
        rng = np.random.default_rng(modulus % 977)
        s = random_series(rng, modulus, 123)
        data = dumps(s)
        assert data[:5] == b"QSER1"
        assert loads(data) == s

    def test_minimal_width(self):
        s = from_coefficients(5, [1, 2, 3])
        data = dumps(s)
        # magic + two u64 + width byte + one byte per coefficient
        assert len(data) == 5 + 16 + 1 + 3
        assert data[21] == 1
        assert data[5:13] == (5).to_bytes(8, "little")
        assert data[13:21] == (3).to_bytes(8, "little")
        assert data[22:] == bytes([1, 2, 3])

    def test_bad_magic(self):
        data = bytearray(dumps(one(5, 3)))
        data[0:5] = b"XSER1"
        with pytest.raises(CacheCorruption):
            loads(bytes(data))

    def test_truncated_payload(self):
        with pytest.raises(CacheCorruption):
            loads(dumps(one(5, 3))[:-1])


# Properties --------------------------------------------------------------------

M = 97


@settings(max_examples=60, deadline=None)
@given(series_of(M), series_of(M), series_of(M))
def test_ring_axioms(a, b, c):
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@settings(max_examples=60, deadline=None)
@given(series_of(M, 1, 90), series_of(M, 1, 90))
def test_ntt_agrees_with_schoolbook(a, b):
    assert mul(a, b, "ntt") == mul(a, b, "schoolbook")


@settings(max_examples=40, deadline=None)
@given(series_of(M, 1, 80), st.integers(1, 20))
def test_sieve_partition(s, t):
    total = zeros(M, s.length)
    for r in range(t):
        total = add(total, sieve(s, (t, r)))
    assert total == s


@settings(max_examples=40, deadline=None)
@given(series_of(M, 1, 80), st.integers(1, 12))
def test_u_operator_identities(s, t):
    assert u_operator(shift(s, t), t) == shift(u_operator(s, t), 1)
    assert u_operator(sieve(s, (t, 0)), t) == u_operator(s, t)


@settings(max_examples=60, deadline=None)
@given(series_of(35, 1, 40), series_of(35, 1, 40), st.sampled_from([5, 7, 35]))
def test_ord_mod_monotone(a, b, l):
    n = min(a.length, b.length)
    base = ord_mod(a.truncate(n), l)
    prod = ord_mod(mul(a, b), l)
    if isinstance(prod, int):
        assert isinstance(base, int) and prod >= base
    if l != 35 and isinstance(base, int) and b[0] % l:
        assert prod == base
