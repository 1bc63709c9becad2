"""Exact rational layer: Bernoulli numbers and the rational shadows of the
odd-zeta identities.

Everything here is computed with :class:`fractions.Fraction`, so every
check returns an exact boolean rather than a tolerance verdict.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb
from typing import List

__all__ = [
    "Rational",
    "BernoulliCache",
    "DEFAULT_CACHE",
    "bernoulli",
    "factorial",
    "euler_zeta_coefficient",
    "ramanujan_bernoulli_coeffs",
    "coth_bernoulli_coeffs",
    "lerch_rational_coefficient",
    "fold_symmetry_check",
    "folded_bernoulli_sum",
    "zeta_convolution_rational_check",
    "format_rational",
    "parse_rational",
]

Rational = Fraction


class BernoulliCache:
    """Append-only table of B_0..B_N (convention B_1 = -1/2).

    Readers never take the lock; extension is serialized so two threads
    asking for the same index compute it once and see identical values.
    """

    def __init__(self) -> None:
        self.table: List[Fraction] = [Fraction(1), Fraction(-1, 2)]
        self._lock = threading.Lock()

    @property
    def high_water(self) -> int:
        return len(self.table) - 1

    def get(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"Bernoulli index must be >= 0, got {n}")
        if n > self.high_water:
            with self._lock:
                self._extend(n)
        return self.table[n]

    def _extend(self, n: int) -> None:
        table = self.table
        for idx in range(len(table), n + 1):
            if idx % 2 == 1:
                table.append(Fraction(0))
                continue
            # sum_{j=0}^{idx} C(idx+1, j) B_j = 0, odd j >= 3 vanish
            acc = Fraction(1) + (idx + 1) * table[1]
            for j in range(2, idx, 2):
                acc += comb(idx + 1, j) * table[j]
            table.append(-acc / (idx + 1))


DEFAULT_CACHE = BernoulliCache()

_factorials: List[int] = [1]
_fact_lock = threading.Lock()


def factorial(n: int) -> int:
    """n! from a shared memo table."""
    if n < 0:
        raise ValueError("factorial of a negative number")
    if n >= len(_factorials):
        with _fact_lock:
            for k in range(len(_factorials), n + 1):
                _factorials.append(_factorials[-1] * k)
    return _factorials[n]


def bernoulli(n: int, cache: BernoulliCache | None = None) -> Fraction:
    """Return B_n with the z/(e^z - 1) convention (so B_1 = -1/2)."""
    return (cache or DEFAULT_CACHE).get(n)


def _scaled_bernoulli(j: int) -> Fraction:
    # B_j / j!
    return bernoulli(j) / factorial(j)


def euler_zeta_coefficient(m: int) -> Fraction:
    """Rational c with zeta(2m) = c * pi^(2m)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    sign = 1 if m % 2 == 1 else -1
    return sign * 2 ** (2 * m) * bernoulli(2 * m) / (2 * factorial(2 * m))


def ramanujan_bernoulli_coeffs(m: int) -> List[Fraction]:
    """Coefficients c_k, k = 0..m+1, of the bilinear Bernoulli side.

    The right-hand side of Ramanujan's identity is
    ``sum(c[k] * alpha**(m-k+1) * beta**k)``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    scale = 2 ** (2 * m)
    out = []
    for k in range(m + 2):
        sign = -1 if k % 2 == 0 else 1  # (-1)^(k-1)
        out.append(sign * scale * _scaled_bernoulli(2 * k) * _scaled_bernoulli(2 * m - 2 * k + 2))
    return out


def coth_bernoulli_coeffs(m: int) -> List[Fraction]:
    """Coefficients for the hyperbolic-cotangent form, same monomials.

    Built from the ``-2^(2m+1) (-1)^k`` normalization directly so that its
    agreement with ``2 * ramanujan_bernoulli_coeffs(m)`` is a real check.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    scale = -(2 ** (2 * m + 1))
    out = []
    for k in range(m + 2):
        sign = 1 if k % 2 == 0 else -1
        out.append(scale * sign * _scaled_bernoulli(2 * k) * _scaled_bernoulli(2 * m + 2 - 2 * k))
    return out


def lerch_rational_coefficient(m: int) -> Fraction:
    """Rational r with sum_{n>=1} coth(pi n) / n^(4m+3) = r * pi^(4m+3)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    top = 4 * m + 4
    acc = Fraction(0)
    for k in range(2 * m + 3):
        term = _scaled_bernoulli(2 * k) * _scaled_bernoulli(top - 2 * k)
        acc += term if k % 2 == 1 else -term  # (-1)^(k+1)
    return 2 ** (4 * m + 2) * acc


def _fold_summand(m: int, k: int) -> Fraction:
    term = _scaled_bernoulli(2 * k) * _scaled_bernoulli(4 * m - 2 * k)
    return term if k % 2 == 1 else -term  # (-1)^(k-1)


def fold_symmetry_check(m: int) -> bool:
    """The alternating sum over k = 0..2m equals its folded half-range form.

    The summand is invariant under k -> 2m - k, so the endpoints k = 0 and
    k = 2m contribute two equal terms -B_4m/(4m)!, the interior pairs double
    up, and k = m stands alone.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    full = sum((_fold_summand(m, k) for k in range(2 * m + 1)), Fraction(0))
    return full == folded_bernoulli_sum(m)


def folded_bernoulli_sum(m: int) -> Fraction:
    """-2 B_4m/(4m)! + (-1)^(m-1) (B_2m/(2m)!)^2 + 2 sum_{k=1}^{m-1} (summand k)."""
    mid_sign = 1 if m % 2 == 1 else -1
    return (
        -2 * _scaled_bernoulli(4 * m)
        + mid_sign * _scaled_bernoulli(2 * m) ** 2
        + 2 * sum((_fold_summand(m, k) for k in range(1, m)), Fraction(0))
    )


def zeta_convolution_rational_check(m: int) -> bool:
    """Compare the pi^(4m) coefficients of the even-zeta convolution

        zeta(4m) + (-1)^(m-1) zeta(2m)^2 + 2 sum_{k=1}^{m-1} (-1)^(k-1) zeta(4m-2k) zeta(2k)

    and of ``2^(4m-2) pi^(4m)`` times the alternating Bernoulli sum.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    c = euler_zeta_coefficient
    mid_sign = 1 if m % 2 == 1 else -1
    lhs = c(2 * m) + mid_sign * c(m) ** 2
    for k in range(1, m):
        sign = 1 if k % 2 == 1 else -1
        lhs += 2 * sign * c(2 * m - k) * c(k)
    rhs = 2 ** (4 * m - 2) * sum((_fold_summand(m, k) for k in range(2 * m + 1)), Fraction(0))
    return lhs == rhs


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p". Decimal and exponent forms are rejected."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational of the form p/q: {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)
