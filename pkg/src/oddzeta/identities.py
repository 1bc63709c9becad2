"""Both sides of Ramanujan's odd-zeta identity, its coth form, the Lerch
special case, and the double-sum telescoping behind the proof.

Parameters are given as ``alpha = pi * t`` and ``beta = pi / t`` with ``t`` a
positive rational, so ``alpha * beta = pi**2`` holds by construction.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from . import exact
from .exact import format_rational
from .realseries import (
    GUARD_BITS,
    MIN_PREC,
    Real,
    SeriesTruncation,
    coth_sum,
    double_sum_truncated,
    lambert_sum,
    to_mpfr,
    working,
    zeta_integer,
)

__all__ = [
    "IDENTITY_NAMES",
    "IdentityParams",
    "IdentityReport",
    "QuasiZetaSequences",
    "ramanujan_lhs",
    "ramanujan_rhs",
    "assembled_rhs",
    "verify_ramanujan",
    "verify_coth_variant",
    "verify_lerch",
    "fast_odd_zeta",
    "fast_odd_zeta_series",
    "verify_convolution_recursion",
    "telescope_check",
    "one_step_identity_holds",
]

# double sums are brute-forced in x87 extended precision
ORACLE_PREC = MIN_PREC

IDENTITY_NAMES = ("ramanujan", "coth_variant", "lerch", "convolution", "telescoping")


@dataclass(frozen=True)
class IdentityParams:
    """``beta_shift_log2`` is a negative-control hook: when set, beta is
    multiplied by ``1 + 2**beta_shift_log2`` and alpha * beta = pi^2 breaks."""

    m: int
    t: Fraction = Fraction(1)
    prec: int = 256
    beta_shift_log2: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.prec < MIN_PREC:
            raise ValueError(f"precision must be >= {MIN_PREC} bits, got {self.prec}")

    @property
    def working_prec(self) -> int:
        return self.prec + GUARD_BITS

    def alpha_beta(self, bits: Optional[int] = None) -> Tuple[mpfr, mpfr]:
        bits = bits or self.working_prec
        with working(bits + 8):
            p = gmpy2.const_pi()
            alpha = p * to_mpfr(self.t, bits + 8)
            beta = p / to_mpfr(self.t, bits + 8)
            if self.beta_shift_log2 is not None:
                beta *= 1 + mpfr(2) ** self.beta_shift_log2
        return mpfr(alpha, bits), mpfr(beta, bits)


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    m: int
    t: Fraction
    prec: int
    lhs: Real
    rhs: Real
    abs_diff_log2: float
    tolerance_log2: float
    passed: bool
    truncations: List[SeriesTruncation] = field(default_factory=list)
    # internal consistency checks; not part of the JSON schema
    cross_checks: Dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "m": self.m,
            "t": format_rational(self.t),
            "prec_bits": self.prec,
            "lhs": self.lhs.to_decimal(),
            "rhs": self.rhs.to_decimal(),
            "abs_diff_log2": self.abs_diff_log2,
            "tolerance_log2": self.tolerance_log2,
            "pass": self.passed,
            "truncations": [tr.to_dict() for tr in self.truncations],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_text(self) -> str:
        lines = [
            f"identity: {self.identity}  m={self.m}  t={format_rational(self.t)}  prec={self.prec}",
            f"  lhs = {self.lhs.to_decimal()}",
            f"  rhs = {self.rhs.to_decimal()}",
            f"  log2|lhs - rhs| = {self.abs_diff_log2:.2f}  (tolerance {self.tolerance_log2:.2f})",
        ]
        for tr in self.truncations:
            lines.append(f"  truncation: {tr.terms_used} terms, tail <= 2^{tr.tail_bound_log2:.2f}")
        for name, ok in self.cross_checks.items():
            lines.append(f"  check {name}: {'ok' if ok else 'FAILED'}")
        lines.append("  PASS" if self.passed else "  FAIL")
        return "\n".join(lines)


def _diff_log2(lhs: mpfr, rhs: mpfr, bits: int) -> float:
    """log2|lhs - rhs|; an exact zero reports the resolution floor instead."""
    with working(bits):
        d = abs(lhs - rhs)
        if d:
            return float(gmpy2.log2(d))
        scale = max(abs(lhs), abs(rhs))
        floor = -float(bits)
        return floor + (float(gmpy2.log2(scale)) if scale else 0.0)


def _make_report(name, m, t, prec, lhs, rhs, tol_log2, truncs, bits, checks=None,
                 value_prec=None) -> IdentityReport:
    diff = _diff_log2(lhs, rhs, bits)
    value_prec = value_prec or prec
    return IdentityReport(
        identity=name,
        m=m,
        t=Fraction(t),
        prec=prec,
        lhs=Real.rounded(lhs, value_prec),
        rhs=Real.rounded(rhs, value_prec),
        abs_diff_log2=diff,
        tolerance_log2=tol_log2,
        passed=diff <= tol_log2,
        truncations=list(truncs),
        cross_checks=dict(checks or {}),
    )


def _default_tolerance(prec: int) -> float:
    return float(2 * GUARD_BITS - prec)


# -- Ramanujan's identity and its coth form ----------------------------------

@dataclass(frozen=True)
class _Pieces:
    zeta_odd: mpfr
    lam_alpha: mpfr
    lam_beta: mpfr
    alpha: mpfr
    beta: mpfr
    truncations: Tuple[SeriesTruncation, SeriesTruncation]


def _pieces(p: IdentityParams) -> _Pieces:
    s = 2 * p.m + 1
    alpha, beta = p.alpha_beta()
    z = zeta_integer(s, p.prec)
    fa, tra = lambert_sum(s, alpha, p.prec)
    if alpha == beta:
        fb, trb = fa, tra
    else:
        fb, trb = lambert_sum(s, beta, p.prec)
    return _Pieces(z.value, fa.value, fb.value, alpha, beta, (tra, trb))


def _signed_combination(p: IdentityParams, pc: _Pieces, zeta_weight, lam_weight) -> mpfr:
    # alpha^-m (z*zw + F(alpha)*lw) - (-beta)^-m (z*zw + F(beta)*lw)
    with working(p.working_prec):
        left = (pc.zeta_odd * zeta_weight + pc.lam_alpha * lam_weight) / pc.alpha ** p.m
        right = (pc.zeta_odd * zeta_weight + pc.lam_beta * lam_weight) / pc.beta ** p.m
        return left - right if p.m % 2 == 0 else left + right


def _bilinear(p: IdentityParams, coeffs: Sequence[Fraction], alpha: mpfr, beta: mpfr) -> Tuple[mpfr, mpfr]:
    """sum_k coeffs[k] alpha^(m-k+1) beta^k, and the largest term magnitude."""
    w = p.working_prec
    with working(w):
        acc = mpfr(0)
        biggest = mpfr(0)
        for k, c in enumerate(coeffs):
            term = to_mpfr(c, w) * alpha ** (p.m - k + 1) * beta ** k
            acc += term
            biggest = max(biggest, abs(term))
    return acc, biggest


def _coeffs_with_flip(coeffs: List[Fraction], flip_coeff: Optional[int]) -> List[Fraction]:
    if flip_coeff is None:
        return coeffs
    if not 0 <= flip_coeff < len(coeffs):
        raise ValueError(f"flip_coeff must index 0..{len(coeffs) - 1}")
    out = list(coeffs)
    out[flip_coeff] = -out[flip_coeff]
    return out


def ramanujan_lhs(p: IdentityParams) -> Tuple[Real, List[SeriesTruncation]]:
    """alpha^-m (zeta(2m+1)/2 + F(alpha)) - (-beta)^-m (zeta(2m+1)/2 + F(beta)),
    with F(a) = sum n^-(2m+1) / (e^(2an) - 1)."""
    pc = _pieces(p)
    val = _signed_combination(p, pc, mpfr("0.5"), 1)
    return Real.rounded(val, p.prec), list(pc.truncations)


def ramanujan_rhs(p: IdentityParams, flip_coeff: Optional[int] = None) -> Real:
    alpha, beta = p.alpha_beta()
    coeffs = _coeffs_with_flip(exact.ramanujan_bernoulli_coeffs(p.m), flip_coeff)
    return Real.rounded(_bilinear(p, coeffs, alpha, beta)[0], p.prec)


def assembled_rhs(p: IdentityParams) -> Tuple[mpfr, mpfr]:
    """The Bernoulli side rebuilt the way the proof assembles it.

    With n = m the sum runs over p = 0..n+1 in powers alpha^p beta^(n-p+1):
    the p = 0 term comes from zeta(2n+2) / (2 alpha^(n+1)), the p = n+1 term
    from the leftover -2^(2n) B_(2n+2) alpha^(n+1) / (2n+2)!, and the
    interior p = 1..n from alpha^(n+1) (beta/alpha)^(n-p+1).  Returns the
    value at working precision and the largest piece, for ulp comparisons.
    """
    n = p.m
    w = p.working_prec
    alpha, beta = p.alpha_beta()
    sb = lambda j: exact.bernoulli(j) / exact.factorial(j)  # noqa: E731
    sign_n = 1 if n % 2 == 0 else -1
    with working(w):
        pi_w = gmpy2.const_pi()
        zeta_top = to_mpfr(exact.euler_zeta_coefficient(n + 1), w) * pi_w ** (2 * n + 2)
        first = zeta_top / (2 * alpha ** (n + 1))
        last = -to_mpfr(2 ** (2 * n) * sb(2 * n + 2), w) * alpha ** (n + 1)
        ratio = beta / alpha
        interior = mpfr(0)
        for q in range(1, n + 1):
            c = sign_n * (-1) ** q * 2 ** (2 * n) * sb(2 * n - 2 * q + 2) * sb(2 * q)
            interior += to_mpfr(c, w) * ratio ** (n - q + 1)
        interior *= alpha ** (n + 1)
        biggest = max(abs(first), abs(last), abs(interior))
        return first + interior + last, biggest


def verify_ramanujan(p: IdentityParams, flip_coeff: Optional[int] = None,
                     tolerance_log2: Optional[float] = None) -> IdentityReport:
    """Check Ramanujan's identity for zeta(2m+1) at (m, t, prec).

    ``flip_coeff`` negates one Bernoulli coefficient (negative control).
    """
    pc = _pieces(p)
    lhs = _signed_combination(p, pc, mpfr("0.5"), 1)
    coeffs = exact.ramanujan_bernoulli_coeffs(p.m)
    rhs, _ = _bilinear(p, _coeffs_with_flip(coeffs, flip_coeff), pc.alpha, pc.beta)
    clean_rhs, biggest = _bilinear(p, coeffs, pc.alpha, pc.beta)
    assembled, biggest2 = assembled_rhs(p)
    with working(p.working_prec):
        two_ulp = mpfr(2) ** (1 - p.prec) * max(biggest, biggest2)
        checks = {"assembled_rhs": abs(assembled - clean_rhs) <= two_ulp}
    tol = _default_tolerance(p.prec) if tolerance_log2 is None else tolerance_log2
    return _make_report("ramanujan", p.m, p.t, p.prec, lhs, rhs, tol, pc.truncations,
                        p.working_prec, checks)


def verify_coth_variant(p: IdentityParams, flip_coeff: Optional[int] = None,
                        tolerance_log2: Optional[float] = None) -> IdentityReport:
    """Check the coth form, using coth(an) = 1 + 2/(e^(2an) - 1) on the left."""
    pc = _pieces(p)
    lhs = _signed_combination(p, pc, 1, 2)
    coeffs = _coeffs_with_flip(exact.coth_bernoulli_coeffs(p.m), flip_coeff)
    rhs, _ = _bilinear(p, coeffs, pc.alpha, pc.beta)
    tol = _default_tolerance(p.prec) if tolerance_log2 is None else tolerance_log2
    return _make_report("coth_variant", p.m, p.t, p.prec, lhs, rhs, tol, pc.truncations,
                        p.working_prec)


# -- Lerch case and the fast zeta(4m+3) --------------------------------------

def _check_lerch_args(m: int, prec: int) -> None:
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if prec < MIN_PREC:
        raise ValueError(f"precision must be >= {MIN_PREC} bits, got {prec}")


def _lerch_closed_form(m: int, bits: int) -> mpfr:
    with working(bits):
        return to_mpfr(exact.lerch_rational_coefficient(m), bits) * gmpy2.const_pi() ** (4 * m + 3)


def verify_lerch(m: int, prec: int, tolerance_log2: Optional[float] = None) -> IdentityReport:
    """sum coth(pi n)/n^(4m+3) against its rational multiple of pi^(4m+3)."""
    _check_lerch_args(m, prec)
    w = prec + GUARD_BITS
    lhs, trunc = coth_sum(4 * m + 3, prec)
    rhs = _lerch_closed_form(m, w)
    tol = _default_tolerance(prec) if tolerance_log2 is None else tolerance_log2
    return _make_report("lerch", m, 1, prec, lhs.value, rhs, tol, [trunc], w)


def fast_odd_zeta_series(m: int, prec: int) -> Tuple[Real, SeriesTruncation]:
    """zeta(4m+3) = r pi^(4m+3) - 2 sum n^-(4m+3) / (e^(2 pi n) - 1).

    Never touches the Euler-Maclaurin evaluator; the exponential sum needs
    about (prec + guard) ln 2 / (2 pi) terms.
    """
    _check_lerch_args(m, prec)
    w = prec + GUARD_BITS
    with working(w + GUARD_BITS):
        pi_w = gmpy2.const_pi()
    lam, trunc = lambert_sum(4 * m + 3, pi_w, prec)
    closed = _lerch_closed_form(m, w)
    with working(w):
        val = closed - 2 * lam.value
    return Real.rounded(val, prec), trunc


def fast_odd_zeta(m: int, prec: int) -> Real:
    return fast_odd_zeta_series(m, prec)[0]


# -- telescoping double sums -------------------------------------------------

def _log2_or_floor(x: float, floor: float = -1074.0) -> float:
    return math.log2(x) if x > 0 else floor


def _self_calibrated(res_n: float, res_2n: float, lhs_n: float, lhs_2n: float) -> float:
    """4 x the larger measured N -> 2N change, in log2."""
    step = max(abs(res_n - res_2n), abs(lhs_n - lhs_2n))
    return _log2_or_floor(4.0 * step)


def verify_convolution_recursion(m: int, n_trunc: int = 4000, prec: int = 128) -> IdentityReport:
    """Brute-force check of the even-zeta convolution recursion

        sum_{n,k} 1/(n^(4m+2)(k^2+n^2))
            = sum_{j=0}^{2m} (-1)^j zeta(2j+2) zeta(4m+2-2j) - sum_{n,k} 1/(k^(4m+2)(k^2+n^2))

    with both double sums cut to the N x N square.  The tolerance is
    calibrated from rerunning at 2N.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n_trunc < 100:
        raise ValueError("convolution check needs N >= 100")
    top = 4 * m + 2
    w = prec + GUARD_BITS
    zetas = {j: zeta_integer(j, prec).value for j in range(2, top + 1, 2)}
    with working(w):
        conv = mpfr(0)
        for j in range(2 * m + 1):
            conv += (-1) ** j * zetas[2 * j + 2] * zetas[top - 2 * j]
        half = (-1) ** m * zetas[2 * m + 2] ** 2
        for k in range(m):
            half += 2 * (-1) ** k * zetas[top - 2 * k] * zetas[2 * k + 2]

    def sides(n_max):
        lead = double_sum_truncated(1, top, 0, n_max).value
        trail = double_sum_truncated(1, 0, top, n_max).value
        with working(w):
            return lead, trail, conv - trail

    lead, trail, rhs = sides(n_trunc)
    lead2, _, rhs2 = sides(2 * n_trunc)
    tol = _self_calibrated(float(lead - rhs), float(lead2 - rhs2), float(lead), float(lead2))
    with working(w):
        doubled_gap = abs(2 * lead - half)
        swap_gap = abs(lead - trail)
    checks = {
        "index_swap_symmetry": float(swap_gap) <= 2.0 ** -50 * float(lead),
        "doubled_convolution": _log2_or_floor(float(doubled_gap)) <= tol,
    }
    estimate = SeriesTruncation(n_trunc, _log2_or_floor(2.0 * abs(float(lead2 - lead))))
    return _make_report("convolution", m, 1, prec, lead, rhs, tol, [estimate], w, checks,
                        value_prec=ORACLE_PREC)


@dataclass(frozen=True)
class QuasiZetaSequences:
    """Two sequences x_k = x_coeff * k^2 and z_m = z_coeff * m^2 and a depth n.

    ``kind`` names the sequence shape; only "quadratic" is supported.
    """

    x_coeff: object
    z_coeff: object
    n: int
    kind: str = "quadratic"
    t: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind != "quadratic":
            raise ValueError(f"unsupported sequence kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("depth n must be >= 1")

    @classmethod
    def for_ramanujan(cls, t, n: int, prec: int = 128) -> "QuasiZetaSequences":
        """x_k = (alpha k)^2, z_m = (pi m)^2 with alpha = pi t."""
        t = Fraction(t)
        with working(prec + GUARD_BITS):
            p = gmpy2.const_pi()
            x = (p * to_mpfr(t, prec + GUARD_BITS)) ** 2
            z = p * p
        return cls(x, z, n, t=t)


def one_step_identity_holds(x: Fraction, z: Fraction, n: int) -> bool:
    """1/(x^n (x+z)) == 1/(x^n z) - 1/(x^(n-1) z (x+z)), exactly."""
    x, z = Fraction(x), Fraction(z)
    left = 1 / (x ** n * (x + z))
    right = 1 / (x ** n * z) - 1 / (x ** (n - 1) * z * (x + z))
    return left == right


def _random_positive_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))


def telescope_check(q: QuasiZetaSequences, n_trunc: int = 3000, prec: int = 128,
                    exact_samples: int = 100, seed: int = 0) -> IdentityReport:
    """Check the closed-form telescoping of sum_{k,m} 1/(x_k^n (x_k + z_m)).

    The right side is sum_{p<n} (-1)^p zx(n-p) zz(p+1) + (-1)^n sum 1/(z_m^n (x_k+z_m))
    where zx, zz are K-term partial sums of x_k^-j and z_m^-j.  Also checks
    the single telescoping step on random exact rationals.
    """
    if n_trunc < 1:
        raise ValueError("need n_trunc >= 1")
    n = q.n
    w = prec + GUARD_BITS
    cx = to_mpfr(q.x_coeff, w)
    cz = to_mpfr(q.z_coeff, w)
    if not (cx > 0 and cz > 0):
        raise ValueError("sequence coefficients must be positive")
    with working(w):
        a2 = cx / cz

    def sides(k_max):
        with working(w):
            power_sums = {}
            for j in range(1, n + 1):
                acc = mpfr(0)
                for k in range(k_max, 0, -1):
                    acc += mpfr(k) ** (-2 * j)
                power_sums[j] = acc
            lead = double_sum_truncated(a2, 2 * n, 0, k_max).value / (cx ** n * cz)
            trail = double_sum_truncated(a2, 0, 2 * n, k_max).value / cz ** (n + 1)
            rhs = (-1) ** n * trail
            for p in range(n):
                rhs += (-1) ** p * power_sums[n - p] / cx ** (n - p) * power_sums[p + 1] / cz ** (p + 1)
            return lead, rhs

    lead, rhs = sides(n_trunc)
    lead2, rhs2 = sides(2 * n_trunc)
    tol = _self_calibrated(float(lead - rhs), float(lead2 - rhs2), float(lead), float(lead2))
    rng = random.Random(seed)
    exact_ok = all(
        one_step_identity_holds(_random_positive_rational(rng), _random_positive_rational(rng),
                                rng.randint(1, 12))
        for _ in range(exact_samples)
    )
    estimate = SeriesTruncation(n_trunc, _log2_or_floor(2.0 * abs(float(lead2 - lead))))
    return _make_report("telescoping", n, q.t, prec, lead, rhs, tol, [estimate], w,
                        {"one_step_exact": exact_ok}, value_prec=ORACLE_PREC)
