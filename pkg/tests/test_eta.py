import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_euler_product
from qcert.errors import PrefactorError, QuotientParseError
from qcert.eta import (
    F_QUOTIENT,
    CuspLabel,
    EtaQuotient,
    check_gordon_ligozat,
    cusp_order,
    cusp_order_table,
    divisors,
    expand,
    jacobi_cube_series,
    pentagonal_series,
    parse_quotient,
    weight,
)
from qcert.frobenius import a_oracle
from qcert.series import mul, power, shift


class TestSparseExpansions:
    def test_pentagonal_small(self):
        assert pentagonal_series(1, 97, 8).tolist() == dense_euler_product(1, 97, 8)
        assert pentagonal_series(1, 97, 8).tolist() == [1, 96, 96, 0, 0, 1, 0, 1]

    def test_pentagonal_scaled(self):
        assert pentagonal_series(3, 5, 4).tolist() == [1, 0, 0, 4]

    def test_jacobi_small(self):
        assert jacobi_cube_series(1, 97, 7).tolist() == dense_euler_product(1, 97, 7, power=3)
        assert jacobi_cube_series(1, 97, 7).tolist() == [1, 97 - 3, 0, 5, 0, 0, 97 - 7]

    def test_jacobi_shift_exponents(self):
        s = shift(jacobi_cube_series(9, 1000, 40), 1)
        assert [e for e, c in enumerate(s.tolist()) if c] == [1, 10, 28]

    @pytest.mark.parametrize("scale", range(1, 10))
    def test_dense_agreement(self, scale):
        L = 2000
        assert pentagonal_series(scale, 10**9 + 7, L).tolist() == dense_euler_product(scale, 10**9 + 7, L)
        if scale <= 3:
            assert jacobi_cube_series(scale, 10**9 + 7, L).tolist() == dense_euler_product(scale, 10**9 + 7, L, 3)

    def test_cube_identity(self):
        for scale in (1, 3, 9):
            L = 10**4
            assert power(pentagonal_series(scale, 5, L), 3) == jacobi_cube_series(scale, 5, L)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            pentagonal_series(0, 5, 4)


class TestQuotient:
    def test_parse(self):
        assert parse_quotient("45 : 1^-3 * 3^-1 * 15^7 * 45^9") == F_QUOTIENT
        assert parse_quotient("45:1^-3*3^-1*15^7*45^9") == F_QUOTIENT
        assert parse_quotient(" 12 : 2^ 1 * 2^1 ") == EtaQuotient(12, {2: 2})

    @pytest.mark.parametrize("text", ["45 1^2", "45 : 7^1", "x : 1^1", "4 : 2^a", "4 : 1^0"])
    def test_parse_errors(self, text):
        with pytest.raises(QuotientParseError):
            parse_quotient(text)

    def test_str_round_trip(self):
        assert parse_quotient(str(F_QUOTIENT)) == F_QUOTIENT

    def test_invariants(self):
        with pytest.raises(ValueError):
            EtaQuotient(10, {3: 1})
        with pytest.raises(ValueError):
            EtaQuotient(10, {2: 0})


class TestExpand:
    def test_prefactor(self):
        f = expand(F_QUOTIENT, 5, 100)
        assert f.tolist()[:21] == [0] * 21
        assert f[21] == 1

    def test_delta(self):
        # eta(z)^24 = q - 24 q^2 + 252 q^3 - 1472 q^4 + ...
        d = expand(EtaQuotient(1, {1: 24}), 10**6, 5)
        assert d.tolist() == [0, 1, 10**6 - 24, 252, 10**6 - 1472]

    def test_non_integral_prefactor(self):
        with pytest.raises(PrefactorError):
            expand(EtaQuotient(1, {1: 1}), 5, 8)

    def test_empty_window(self):
        with pytest.raises(PrefactorError):
            expand(F_QUOTIENT, 5, 21)

    def test_convolution_oracle(self):
        L = 200
        f = expand(F_QUOTIENT, 10**9, L + 21)
        a = a_oracle(L - 1)
        u15 = dense_euler_product(15, 10**9, L, 7)
        u45 = dense_euler_product(45, 10**9, L, 9)
        unit = [sum(u15[i] * u45[n - i] for i in range(n + 1)) for n in range(L)]
        expected = [sum(a[i] * unit[n - i] for i in range(n + 1)) % 10**9 for n in range(L)]
        assert f.tolist()[21:] == expected
        assert f[21] == a[0] == 1

    def test_multiplicative(self):
        e1 = EtaQuotient(2, {1: 8, 2: 8})
        e2 = EtaQuotient(3, {1: 6, 3: 6})
        L = 300
        assert expand(e1 * e2, 7, L) == mul(expand(e1, 7, L), expand(e2, 7, L))


class TestBookkeeping:
    def test_weight(self):
        assert weight(F_QUOTIENT) == 6
        assert weight(EtaQuotient(1, {1: 1})) == Fraction(1, 2)

    def test_gordon_ligozat_values(self):
        rep = check_gordon_ligozat(F_QUOTIENT)
        assert rep.sum_delta_r == 504 and rep.cond_24_delta
        assert rep.sum_n_over_delta_r == -120 and rep.cond_24_n_over_delta
        assert rep.product_factorization == {3: 24, 5: 16}
        assert rep.product_is_rational_square
        assert rep.weight == 6 and rep.weight_in_2z
        assert rep.prefactor_exponent == 21
        assert rep.conditions_hold

    def test_delta_conditions(self):
        rep = check_gordon_ligozat(EtaQuotient(1, {1: 24}))
        assert rep.sum_delta_r == rep.sum_n_over_delta_r == 24
        assert rep.product_is_rational_square and rep.weight == 12 and rep.conditions_hold
        assert rep.holomorphic

    def test_failing_conditions(self):
        rep = check_gordon_ligozat(EtaQuotient(1, {1: 1}))
        assert rep.sum_delta_r == rep.sum_n_over_delta_r == 1
        assert not rep.cond_24_delta and not rep.cond_24_n_over_delta
        assert rep.prefactor_exponent is None

    def test_odd_weight_advisory(self):
        rep = check_gordon_ligozat(EtaQuotient(4, {1: 4, 2: -2, 4: 4}))
        assert rep.weight == 3 and not rep.weight_in_2z
        assert any("odd integer" in a for a in rep.advisories)

    def test_non_square_product(self):
        rep = check_gordon_ligozat(EtaQuotient(2, {1: 8, 2: 8}))
        assert rep.product_factorization == {2: 8}
        rep = check_gordon_ligozat(EtaQuotient(2, {1: 1, 2: 1}))
        assert rep.product_factorization == {2: 1}
        assert not rep.product_is_rational_square

    def test_cusp_orders(self):
        assert cusp_order(F_QUOTIENT, CuspLabel(1, 45)) == 21
        assert cusp_order(F_QUOTIENT, CuspLabel(1, 1)) == -5
        assert cusp_order(EtaQuotient(1, {1: 24}), CuspLabel(1, 1)) == 1

    def test_numerator_independence(self):
        for d in divisors(45):
            reps = [c for c in range(1, 3 * d + 2) if math.gcd(c, d) == 1][:2]
            values = {cusp_order(F_QUOTIENT, CuspLabel(c, d)) for c in reps}
            assert len(values) == 1

    def test_bad_cusp(self):
        with pytest.raises(ValueError):
            cusp_order(F_QUOTIENT, CuspLabel(1, 7))
        with pytest.raises(ValueError):
            CuspLabel(3, 9)

    def test_table(self):
        table = cusp_order_table(F_QUOTIENT)
        assert [c.d for c, _ in table.entries] == [1, 3, 5, 9, 15, 45]
        assert dict((c.d, o) for c, o in table.entries) == {1: -5, 3: 0, 5: 5, 9: 3, 15: 6, 45: 21}
        assert table.min_order == -5
        assert table.hypotheses_hold
        assert len(cusp_order_table(EtaQuotient(1, {1: 24})).entries) == 1

    def test_report_flags_negative_order(self):
        rep = check_gordon_ligozat(F_QUOTIENT)
        assert not rep.holomorphic
        assert any("not holomorphic" in a for a in rep.advisories)


_quotients = st.builds(
    lambda rs: EtaQuotient(12, {d: r for d, r in zip(divisors(12), rs)}),
    st.lists(st.integers(-6, 6), min_size=6, max_size=6).filter(any),
)


@settings(max_examples=50, deadline=None)
@given(_quotients, _quotients)
def test_additivity(e1, e2):
    try:
        both = e1 * e2
    except ValueError:
        return  # exponents cancelled completely
    assert weight(both) == weight(e1) + weight(e2)
    for d in divisors(12):
        cusp = CuspLabel(1, d)
        assert cusp_order(both, cusp) == cusp_order(e1, cusp) + cusp_order(e2, cusp)
