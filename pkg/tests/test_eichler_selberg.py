from fractions import Fraction

import pytest

from weilstats import eichler_selberg as es
from weilstats.errors import ValidationError


class TestHurwitz:
    def test_special_values(self):
        assert es.hurwitz(0) == Fraction(-1, 12)
        assert es.hurwitz(-5) == 0

    def test_hand_enumerable_values(self):
        # reduced-form enumeration by hand for these discriminants
        expected = {
            3: Fraction(1, 3), 4: Fraction(1, 2), 7: 1, 8: 1, 11: 1,
            12: Fraction(4, 3), 15: 2, 16: Fraction(3, 2), 19: 1,
            20: 2, 23: 3,
        }
        for n, v in expected.items():
            assert es.hurwitz(n) == v

    def test_vanishing_residues(self):
        for n in range(1, 200):
            if n % 4 in (1, 2):
                assert es.hurwitz(n) == 0

    def test_twelve_times_integral(self):
        for n in range(0, 10001):
            assert (12 * es.hurwitz(n)).denominator == 1


class TestGegenbauer:
    def test_low_weights(self):
        assert es.gegenbauer(2, 7, 3) == 1
        assert es.gegenbauer(4, 5, 6) == 5 * 5 - 6

    def test_against_partial_fractions(self):
        # (1 - 5x + 6x^2)^(-1) = 1/((1-2x)(1-3x)) = sum (3^(m+1)-2^(m+1)) x^m
        for k in range(2, 16):
            m = k - 2
            assert es.gegenbauer(k, 5, 6) == 3 ** (m + 1) - 2 ** (m + 1)

    def test_weight_too_small(self):
        with pytest.raises(ValidationError):
            es.gegenbauer(1, 1, 1)


class TestTraceFormula:
    def test_discriminant_form_coefficients(self):
        expected = {2: -24, 3: 252, 4: -1472, 5: 4830, 6: -6048, 7: -16744}
        for n, v in expected.items():
            assert es.trace_Tn(12, n) == v

    def test_zero_dimensional_weights_cancel(self):
        for k in [2, 4, 6, 8, 10]:
            for n in range(1, 51):
                assert es.trace_Tn(k, n) == 0

    def test_trace_at_one_is_dimension(self):
        for k in range(0, 101, 2):
            assert es.trace_Tn(k, 1) == es.dim_Sk(k)

    def test_odd_weight_zero(self):
        assert es.trace_Tn(13, 5) == 0

    def test_tau_multiplicativity(self):
        # tau(6) = tau(2) tau(3); tau(4) = tau(2)^2 - 2^11
        t = {n: es.trace_Tn(12, n) for n in (2, 3, 4, 6)}
        assert t[6] == t[2] * t[3]
        assert t[4] == t[2] ** 2 - 2**11


class TestDimensions:
    def test_examples(self):
        assert es.dim_Sk(12) == 1
        assert es.dim_Sk(2) == 0
        assert es.dim_Sk(68) == 5
        assert es.dim_Sk(0) == 0
        assert es.dim_Sk(-4) == 0
        assert es.dim_Sk(11) == 0
        assert es.dim_Sk(26) == 1
        assert es.dim_Sk(24) == 2


class TestCharpoly:
    def test_dim_one(self):
        assert es.hecke_charpoly(12, 2) == [1, 24]  # root tau(2) = -24
        assert es.hecke_charpoly(16, 2) == [1, -216]

    def test_weight_28_discriminant_field(self):
        cp = es.hecke_charpoly(28, 37)
        assert len(cp) == 3
        disc = cp[1] * cp[1] - 4 * cp[2]
        d = disc
        f = 2
        while f * f <= d:
            while d % (f * f) == 0:
                d //= f * f
            f += 1
        assert d == 18209
        x, y = 933848602341412283390, 4195594851869555712
        assert cp[1] == -2 * x and cp[2] == x * x - 18209 * y * y

    def test_dim_zero(self):
        assert es.hecke_charpoly(10, 5) == [1]

    def test_hecke_recursion_consistency(self):
        for k in [12, 16, 18, 20, 22, 26]:
            for p in [2, 3, 5]:
                a = -es.hecke_charpoly(k, p)[1]
                assert es.trace_Tn(k, p * p) == a * a - p ** (k - 1)
        for k in [24, 28, 32]:
            for p in [2, 3]:
                cp = es.hecke_charpoly(k, p)
                s1, s2 = -cp[1], cp[2]
                assert es.trace_Tn(k, p * p) == s1 * s1 - 2 * s2 - 2 * p ** (k - 1)


class TestFrobeniusTraces:
    def test_examples(self):
        assert es.sk_frobenius_trace(12, 2, 1) == -24
        assert es.sk_frobenius_trace(12, 2, 2) == -3520  # tau(2)^2 - 2*2^11
        assert es.sk_frobenius_trace(10, 3, 4) == 0
        assert es.sk_frobenius_trace(13, 3, 1) == 0

    def test_weight_two_rejected(self):
        with pytest.raises(ValidationError):
            es.sk_frobenius_trace(2, 3, 1)

    def test_power_sum_identity(self):
        # r-th power sums satisfy u_r = a_f u_{r-1} - p^{k-1} u_{r-2}
        for k, p in [(12, 2), (12, 3), (16, 2), (18, 5)]:
            a = -es.hecke_charpoly(k, p)[1]
            u = {0: 2, 1: a}
            for r in range(2, 6):
                u[r] = a * u[r - 1] - p ** (k - 1) * u[r - 2]
                assert es.sk_frobenius_trace(k, p, r) == u[r]
