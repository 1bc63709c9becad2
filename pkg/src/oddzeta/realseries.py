"""Arbitrary-precision evaluation of the analytic pieces.

Values are :class:`gmpy2.mpfr` wrapped in :class:`Real`, which remembers the
precision the value is claimed at.  Every certified routine works at
``prec + GUARD_BITS`` internally and rounds to ``prec`` on the way out;
its relative error is then at most ``2**(GUARD_BITS - prec)``.

Precision is set through gmpy2 contexts, which are thread local, so these
functions can be called from several threads at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .exact import bernoulli, factorial

__all__ = [
    "GUARD_BITS",
    "MIN_PREC",
    "Real",
    "SeriesTruncation",
    "working",
    "to_mpfr",
    "pi",
    "zeta_integer",
    "zeta_integer_em",
    "lambert_sum",
    "lambert_terms",
    "lambert_tail_log2",
    "coth_sum",
    "mittag_leffler_coth",
    "double_sum_truncated",
]

GUARD_BITS = 32
MIN_PREC = 64
_LN2 = math.log(2.0)


def working(bits: int):
    """Context manager that sets the thread's mpfr precision to ``bits``."""
    return gmpy2.context(gmpy2.get_context(), precision=bits)


@dataclass(frozen=True)
class Real:
    value: mpfr
    prec: int

    def __post_init__(self):
        if self.prec < MIN_PREC:
            raise ValueError(f"precision must be >= {MIN_PREC} bits, got {self.prec}")

    @classmethod
    def rounded(cls, x, prec: int) -> "Real":
        return cls(mpfr(x, prec), prec)

    def __float__(self) -> float:
        return float(self.value)

    @property
    def digits(self) -> int:
        return math.ceil(self.prec * 0.30103)

    def to_decimal(self) -> str:
        """Scientific notation with ceil(prec * log10(2)) significant digits."""
        x = self.value
        if gmpy2.is_zero(x):
            return "0"
        if not gmpy2.is_finite(x):
            return str(x)
        mant, exp, _ = x.digits(10, self.digits)
        sign = ""
        if mant.startswith("-"):
            sign, mant = "-", mant[1:]
        frac = mant[1:].rstrip("0")
        body = mant[0] + ("." + frac if frac else "")
        return f"{sign}{body}e{exp - 1:+d}"

    def __str__(self) -> str:
        return self.to_decimal()


@dataclass(frozen=True)
class SeriesTruncation:
    """How an infinite sum was cut off and what the omitted tail can be."""

    terms_used: int
    tail_bound_log2: float
    tail_lower_log2: Optional[float] = None

    def to_dict(self) -> dict:
        return {"terms": self.terms_used, "tail_log2": self.tail_bound_log2}


def _check_prec(prec: int) -> None:
    if prec < MIN_PREC:
        raise ValueError(f"precision must be >= {MIN_PREC} bits, got {prec}")


def to_mpfr(x, bits: int) -> mpfr:
    """Round a Real, Fraction, int or mpfr to ``bits`` of precision."""
    if isinstance(x, Real):
        return mpfr(x.value, bits)
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator), bits)
    return mpfr(x, bits)


def _pi_raw(bits: int) -> mpfr:
    with working(bits):
        return gmpy2.const_pi()


def pi(prec: int) -> Real:
    """pi correctly rounded to ``prec`` bits."""
    _check_prec(prec)
    return Real(_pi_raw(prec), prec)


# -- integer zeta values -----------------------------------------------------

def zeta_integer_em(s: int, prec: int) -> Tuple[Real, SeriesTruncation]:
    """zeta(s) by Euler-Maclaurin summation, with the cutoff record.

    ``terms_used`` is the length of the direct sum; ``tail_bound_log2`` bounds
    the Euler-Maclaurin remainder by the first omitted correction term, which
    is valid because every derivative of x^(-s) keeps one sign on [N, inf).
    """
    if s < 2:
        raise ValueError(f"zeta_integer needs s >= 2, got {s}")
    _check_prec(prec)
    target = prec + GUARD_BITS
    w = target + 16
    n_cut = max(prec // 4, 16)
    eps = mpfr(2, 64) ** (-target)
    with working(w):
        acc = mpfr(0)
        for n in range(n_cut - 1, 0, -1):
            acc += mpfr(n) ** (-s)
        big_n = mpfr(n_cut)
        n_pow = big_n ** (1 - s)
        acc += n_pow / (s - 1) + n_pow / (2 * big_n)
        n_pow /= big_n * big_n  # N^(-s-1)
        inv_n2 = 1 / (big_n * big_n)
        rising = s  # s (s+1) ... (s+2j-2)
        prev = None
        j = 1
        while True:
            coeff = bernoulli(2 * j) * rising / factorial(2 * j)
            term = to_mpfr(coeff, w) * n_pow
            mag = abs(term)
            if mag < eps:
                tail = mag
                break
            if prev is not None and mag >= prev:
                raise ArithmeticError(f"Euler-Maclaurin terms stopped decreasing for s={s}")
            acc += term
            prev = mag
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            n_pow *= inv_n2
            j += 1
    tail_log2 = float(gmpy2.log2(tail)) if tail > 0 else -math.inf
    return Real.rounded(acc, prec), SeriesTruncation(n_cut - 1, tail_log2)


def zeta_integer(s: int, prec: int) -> Real:
    """zeta(s) for integer s >= 2, relative error <= 2^(GUARD_BITS - prec)."""
    return zeta_integer_em(s, prec)[0]


# -- exponential sums --------------------------------------------------------

def lambert_tail_log2(a: float, n_terms: int) -> float:
    """log2 of a bound on sum_{n > N} n^(-s) / (e^(2an) - 1).

    Each omitted term is below e^(-2an) / (1 - e^(-2a)); summing the
    geometric series gives e^(-2a(N+1)) / (1 - e^(-2a))^2.
    """
    return (-2.0 * a * (n_terms + 1)) / _LN2 - 2.0 * math.log2(-math.expm1(-2.0 * a))


def lambert_terms(a: float, prec: int) -> int:
    """Number of terms so that the certified tail is below 2^-(prec + guard)."""
    need = prec + GUARD_BITS
    n = math.ceil(need * _LN2 / (2.0 * a)) + 2
    while lambert_tail_log2(a, n) > -need:
        n += 1
    return n


def lambert_sum(s: int, a, prec: int) -> Tuple[Real, SeriesTruncation]:
    """sum_{n >= 1} n^(-s) / (e^(2an) - 1) for a > 0 and odd s >= 3."""
    _check_prec(prec)
    if s < 3 or s % 2 == 0:
        raise ValueError(f"lambert_sum needs odd s >= 3, got {s}")
    w = prec + GUARD_BITS
    a_val = to_mpfr(a, w)
    if not a_val > 0:
        raise ValueError("lambert_sum needs a > 0")
    a_float = float(a_val)
    n_terms = lambert_terms(a_float, prec)
    with working(w):
        two_a = 2 * a_val
        acc = mpfr(0)
        for n in range(n_terms, 0, -1):
            acc += 1 / (gmpy2.expm1(two_a * n) * mpfr(n) ** s)
    trunc = SeriesTruncation(n_terms, lambert_tail_log2(a_float, n_terms))
    return Real.rounded(acc, prec), trunc


def coth_sum(s: int, prec: int) -> Tuple[Real, SeriesTruncation]:
    """sum_{n >= 1} coth(pi n) / n^s for s = 4m + 3.

    Uses coth(pi n) = 1 + 2 / (e^(2 pi n) - 1), so the result is
    zeta(s) + 2 * lambert_sum(s, pi).
    """
    if s < 3 or s % 4 != 3:
        raise ValueError(f"coth_sum needs s = 4m + 3, got {s}")
    _check_prec(prec)
    w = prec + GUARD_BITS
    z = zeta_integer(s, w)
    lam, trunc = lambert_sum(s, _pi_raw(w + GUARD_BITS), w)
    with working(w):
        total = z.value + 2 * lam.value
    return Real.rounded(total, prec), trunc


# -- oracle-grade evaluators -------------------------------------------------

def mittag_leffler_coth(x, n_terms: int, prec: int) -> Tuple[Real, SeriesTruncation]:
    """Partial sum 1/(pi x) + (2x/pi) sum_{k=1}^{K} 1/(x^2 + k^2).

    Converges like 1/K, so this is for checking the expansion, not for
    computing coth.  The omitted part (2x/pi) sum_{k>K} 1/(x^2+k^2) lies in
    [(2/pi) atan(x/(K+1)), (2/pi) atan(x/K)] by integral comparison; both
    ends are recorded in the truncation.
    """
    _check_prec(prec)
    if n_terms < 1:
        raise ValueError("need at least one term")
    w = prec + GUARD_BITS
    xv = to_mpfr(x, w)
    if not xv > 0:
        raise ValueError("mittag_leffler_coth needs x > 0")
    with working(w):
        p = gmpy2.const_pi()
        x2 = xv * xv
        acc = mpfr(0)
        for k in range(n_terms, 0, -1):
            acc += 1 / (x2 + k * k)
        val = 1 / (p * xv) + 2 * xv / p * acc
        upper = 2 / p * gmpy2.atan(xv / n_terms)
        lower = 2 / p * gmpy2.atan(xv / (n_terms + 1))
    trunc = SeriesTruncation(n_terms, float(gmpy2.log2(upper)), float(gmpy2.log2(lower)))
    return Real.rounded(val, prec), trunc


_LD_PREC = np.finfo(np.longdouble).nmant + 1
_ROW_CHUNK = 256


def _to_longdouble(x) -> np.longdouble:
    if isinstance(x, Real):
        x = x.value
    if isinstance(x, Fraction):
        return np.longdouble(x.numerator) / np.longdouble(x.denominator)
    if isinstance(x, mpfr):
        mant, exp, _ = x.digits(10, 24)
        sign = "-" if mant.startswith("-") else ""
        return np.longdouble(f"{sign}0.{mant.lstrip('-')}e{exp}")
    return np.longdouble(x)


def double_sum_truncated(a2, exponent_n: int, exponent_k: int, n_max: int) -> Real:
    """Brute-force sum over 1 <= n, k <= N of 1 / (n^en k^ek (k^2 + a2 n^2)).

    Evaluated in extended (x87 long double) precision with pairwise
    summation; the result is labelled with that precision.  No tail
    certificate: truncating the square loses O(1/N).
    """
    if n_max < 1:
        raise ValueError("N must be >= 1")
    if exponent_n < 0 or exponent_k < 0 or exponent_n % 2 or exponent_k % 2:
        raise ValueError("exponents must be even and non-negative")
    a2_ld = _to_longdouble(a2)
    if not a2_ld > 0:
        raise ValueError("a2 must be positive")
    idx = np.arange(1, n_max + 1, dtype=np.longdouble)
    sq = idx * idx
    w_n = idx ** -exponent_n
    w_k = idx ** -exponent_k
    a_sq = a2_ld * sq
    row_sums = np.empty(n_max, dtype=np.longdouble)
    for start in range(0, n_max, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, n_max)
        block = w_k[None, :] / (sq[None, :] + a_sq[start:stop, None])
        row_sums[start:stop] = block.sum(axis=1) * w_n[start:stop]
    total = row_sums.sum()
    text = np.format_float_scientific(total, unique=True)
    return Real(mpfr(text, _LD_PREC), max(_LD_PREC, MIN_PREC))
