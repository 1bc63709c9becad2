import math

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr

from oddzeta.exact import euler_zeta_coefficient, lerch_rational_coefficient
from oddzeta.realseries import (
    GUARD_BITS,
    Real,
    coth_sum,
    double_sum_truncated,
    lambert_sum,
    lambert_tail_log2,
    mittag_leffler_coth,
    pi,
    to_mpfr,
    working,
    zeta_integer,
    zeta_integer_em,
)

import oracles


def ulp(x: mpfr, prec: int) -> mpfr:
    return mpfr(2) ** (gmpy2.get_exp(mpfr(x, prec)) - prec)


def log2_abs_diff(a, b, bits=4096) -> float:
    with working(bits):
        d = abs(to_mpfr(a, bits) - to_mpfr(b, bits))
    return float(gmpy2.log2(d)) if d else -math.inf


PI_70 = "3.141592653589793238462643383279502884197169399375105820974944592307816"


class TestPi:
    def test_64_bits(self):
        assert pi(64).to_decimal().startswith("3.14159265358979323")

    def test_256_bits_first_70_digits(self):
        assert pi(256).value.digits(10, 80)[0][:70] == PI_70.replace(".", "")[:70]

    def test_monotone_refinement(self):
        assert abs(mpfr(pi(512).value, 256) - pi(256).value) <= ulp(pi(256).value, 256)

    def test_rejects_low_precision(self):
        with pytest.raises(ValueError):
            pi(32)


class TestReal:
    def test_precision_floor(self):
        with pytest.raises(ValueError):
            Real(mpfr(1), 53)

    def test_decimal_digits(self):
        r = pi(256)
        assert r.digits == math.ceil(256 * 0.30103)
        text = r.to_decimal()
        assert text.endswith("e+0")
        assert len(text.split("e")[0].replace(".", "")) <= r.digits

    def test_negative_and_zero(self):
        assert Real(mpfr(0), 64).to_decimal() == "0"
        assert Real.rounded(-0.25, 64).to_decimal() == "-2.5e-1"


class TestZetaInteger:
    def test_zeta2(self):
        z = zeta_integer(2, 128)
        with working(160):
            ref = gmpy2.const_pi() ** 2 / 6
        assert log2_abs_diff(z.value, ref) <= -120

    def test_zeta4(self):
        z = zeta_integer(4, 128)
        with working(160):
            ref = gmpy2.const_pi() ** 4 / 90
        assert log2_abs_diff(z.value, ref) <= -120

    def test_zeta3_against_mpmath(self):
        z = zeta_integer(3, 256)
        ref = oracles.mp_zeta(3, 400)
        assert z.to_decimal().startswith("1.20205690315959428539973816")
        with mpmath.workprec(400):
            err = abs(oracles.mpf_of(z.value, 400) - ref)
        assert err <= mpmath.mpf(2) ** (GUARD_BITS - 256)

    @pytest.mark.parametrize("s", [3, 5, 7, 11, 17, 35])
    def test_odd_values_against_mpmath(self, s):
        z = zeta_integer(s, 512)
        with mpmath.workprec(700):
            err = abs(oracles.mpf_of(z.value, 700) - oracles.mp_zeta(s, 700))
            assert err <= mpmath.mpf(2) ** (GUARD_BITS - 512)

    @pytest.mark.parametrize("m", range(1, 11))
    def test_even_values_match_euler_formula(self, m):
        prec = 256
        z = zeta_integer(2 * m, prec)
        with working(prec + 64):
            ref = to_mpfr(euler_zeta_coefficient(m), prec + 64) * gmpy2.const_pi() ** (2 * m)
        assert log2_abs_diff(z.value, ref) <= GUARD_BITS - prec

    @pytest.mark.parametrize("prec", [128, 512, 1024])
    def test_remainder_bound_certified(self, prec):
        _, trunc = zeta_integer_em(3, prec)
        assert trunc.tail_bound_log2 <= -(prec + GUARD_BITS)

    def test_rejects_s_below_2(self):
        for s in (1, 0, -3):
            with pytest.raises(ValueError):
                zeta_integer(s, 128)


def _alpha(t, bits):
    with working(bits):
        return gmpy2.const_pi() * t


class TestLambertSum:
    def test_rearranged_lerch_gives_zeta3(self):
        prec = 128
        v, _ = lambert_sum(3, _alpha(1, 200), prec)
        with working(200):
            zeta3 = mpfr(7) / 180 * gmpy2.const_pi() ** 3 - 2 * v.value
        with mpmath.workprec(300):
            err = abs(oracles.mpf_of(zeta3, 300) - oracles.mp_zeta(3, 300))
        assert err <= mpmath.mpf(2) ** -120

    def test_against_direct_mpmath_sum(self):
        a = _alpha(mpfr("1.5"), 300)
        v, trunc = lambert_sum(5, a, 256)
        with mpmath.workprec(400):
            am = oracles.mpf_of(a, 400)
            ref = mpmath.nsum(lambda n: n ** -5 / mpmath.expm1(2 * am * n), [1, mpmath.inf])
            assert abs(oracles.mpf_of(v.value, 400) - ref) <= mpmath.mpf(2) ** (GUARD_BITS - 256) * ref

    def test_monotone_in_s(self):
        a = _alpha(1, 200)
        vals = [float(lambert_sum(s, a, 128)[0]) for s in (3, 5, 7, 9, 21, 41)]
        assert vals == sorted(vals, reverse=True)
        first = 1 / math.expm1(2 * math.pi)
        assert vals[-1] < first + 2.0 ** -40
        assert vals[-1] > first

    def test_large_a_below_geometric_bound(self):
        v, _ = lambert_sum(3, mpfr(20), 128)
        assert float(v) < math.exp(-40) / (1 - math.exp(-40)) * 1.01

    @pytest.mark.parametrize("t, prec", [(1, 128), (5, 256), (mpfr("0.2"), 256), (mpfr("0.01"), 128)])
    def test_truncation_certificate(self, t, prec):
        a = _alpha(t, prec + 64)
        _, trunc = lambert_sum(3, a, prec)
        n = trunc.terms_used
        af = float(a)
        recomputed = (-2 * af * (n + 1)) / math.log(2) - 2 * math.log2(1 - math.exp(-2 * af))
        assert recomputed == pytest.approx(trunc.tail_bound_log2)
        assert trunc.tail_bound_log2 <= -(prec + GUARD_BITS)

    def test_formula_term_count_at_pi(self):
        _, trunc = lambert_sum(3, _alpha(1, 1100), 1024)
        assert trunc.terms_used == math.ceil((1024 + GUARD_BITS) * math.log(2) / (2 * math.pi)) + 2

    def test_tail_bound_dominates_actual_tail(self):
        a = 0.7
        n = 30
        with mpmath.workprec(200):
            tail = mpmath.nsum(lambda k: 1 / mpmath.expm1(2 * a * k), [n + 1, mpmath.inf])
        assert math.log2(float(tail)) < lambert_tail_log2(a, n)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            lambert_sum(3, mpfr(0), 128)
        with pytest.raises(ValueError):
            lambert_sum(3, mpfr(-1), 128)
        with pytest.raises(ValueError):
            lambert_sum(4, mpfr(1), 128)


class TestCothSum:
    def test_s3_is_7pi3_over_180(self):
        v, _ = coth_sum(3, 256)
        with working(320):
            ref = mpfr(7) / 180 * gmpy2.const_pi() ** 3
        assert log2_abs_diff(v.value, ref) <= -240

    def test_s7_matches_lerch_coefficient(self):
        v, _ = coth_sum(7, 256)
        with working(320):
            ref = to_mpfr(lerch_rational_coefficient(1), 320) * gmpy2.const_pi() ** 7
        assert log2_abs_diff(v.value, ref) <= GUARD_BITS - 256

    def test_exceeds_zeta(self):
        assert coth_sum(3, 128)[0].value > zeta_integer(3, 128).value

    def test_decomposition(self):
        prec = 256
        v, _ = coth_sum(11, prec)
        with working(prec + 64):
            parts = zeta_integer(11, prec + 64).value + 2 * lambert_sum(11, gmpy2.const_pi(), prec + 64)[0].value
        assert log2_abs_diff(v.value, parts) <= GUARD_BITS - prec

    @pytest.mark.parametrize("s", [2, 5, 9, 1])
    def test_rejects_invalid_s(self, s):
        with pytest.raises(ValueError):
            coth_sum(s, 128)


class TestMittagLeffler:
    def test_matches_coth_within_bracket(self):
        v, trunc = mittag_leffler_coth(1, 10**6, 128)
        with working(160):
            e = gmpy2.exp(2 * gmpy2.const_pi())
            coth_pi = (e + 1) / (e - 1)
            gap = coth_pi - v.value
        assert 2.0 ** trunc.tail_lower_log2 <= float(gap) <= 2.0 ** trunc.tail_bound_log2
        assert 2.0 ** trunc.tail_bound_log2 <= 2 / math.pi / 10**6

    @pytest.mark.parametrize("x", [mpfr("0.5"), mpfr(2), mpfr("3.75")])
    def test_converges_from_below(self, x):
        prev = None
        with working(128):
            target = 1 / gmpy2.tanh(gmpy2.const_pi() * x)
        for k in (10, 100, 1000):
            v, _ = mittag_leffler_coth(x, k, 96)
            assert v.value < target
            if prev is not None:
                assert v.value > prev
                assert float(v.value - prev) <= float(2 * x / math.pi) / (k // 10)
            prev = v.value

    def test_small_x_limit(self):
        h2 = sum(1 / k**2 for k in range(1, 51))
        prev = None
        for x in (mpfr("1e-3"), mpfr("1e-6"), mpfr("1e-9")):
            v, _ = mittag_leffler_coth(x, 50, 128)
            with working(160):
                remainder = v.value - 1 / (gmpy2.const_pi() * x)
            assert float(remainder) == pytest.approx(2 * float(x) / math.pi * h2, rel=1e-5)
            if prev is not None:
                assert remainder < prev
            prev = remainder

    def test_exponential_form_substitution(self):
        # coth(a k) = 1 + 2 / (e^(2ak) - 1) with x = a k / pi
        a, k = 1.3, 2
        x = mpfr(a * k) / mpfr(math.pi)
        v, trunc = mittag_leffler_coth(x, 20000, 96)
        lam = 1 + 2 / math.expm1(2 * a * k)
        assert 0 < lam - float(v) <= 2.0 ** trunc.tail_bound_log2 + 1e-15

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            mittag_leffler_coth(0, 10, 128)
        with pytest.raises(ValueError):
            mittag_leffler_coth(1, 0, 128)


class TestDoubleSum:
    def test_tail_order(self):
        base = double_sum_truncated(1, 6, 0, 200).value
        d1 = double_sum_truncated(1, 6, 0, 400).value - base
        d2 = double_sum_truncated(1, 6, 0, 800).value - double_sum_truncated(1, 6, 0, 400).value
        assert 0 < d2 <= d1 / 2 * 1.01

    def test_index_swap_symmetry(self):
        a = double_sum_truncated(1, 6, 0, 500).value
        b = double_sum_truncated(1, 0, 6, 500).value
        assert abs(a - b) <= 2.0 ** -55 * a

    def test_small_case_exact(self):
        from fractions import Fraction

        n_max = 7
        ref = sum(
            Fraction(1, n ** 4 * k ** 2 * (k * k + 3 * n * n))
            for n in range(1, n_max + 1)
            for k in range(1, n_max + 1)
        )
        got = double_sum_truncated(3, 4, 2, n_max)
        assert got.prec == 64
        assert abs(float(got.value) - float(ref)) <= 2.0 ** -60 * float(ref)

    def test_accepts_irrational_a2(self):
        with working(128):
            a2 = gmpy2.const_pi() ** 2 / 7
        assert float(double_sum_truncated(a2, 2, 0, 50).value) > 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            double_sum_truncated(1, 2, 0, 0)
        with pytest.raises(ValueError):
            double_sum_truncated(1, 3, 0, 10)
        with pytest.raises(ValueError):
            double_sum_truncated(-1, 2, 0, 10)


@pytest.mark.parametrize("fn", ["zeta", "lambert", "coth", "pi"])
@pytest.mark.parametrize("prec", [128, 320])
def test_precision_ladder(fn, prec):
    """Recomputing at prec + 64 and rounding back agrees to 2 ulp."""

    def compute(p):
        if fn == "zeta":
            return zeta_integer(5, p).value
        if fn == "lambert":
            return lambert_sum(7, _alpha(mpfr("1.5"), p + 64), p)[0].value
        if fn == "coth":
            return coth_sum(7, p)[0].value
        return pi(p).value

    lo = compute(prec)
    hi = mpfr(compute(prec + 64), prec)
    assert abs(lo - hi) <= 2 * ulp(lo, prec)
