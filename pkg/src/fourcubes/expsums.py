"""Cubic exponential sums and their exact rational averages.

For a modulus q, the complete sum S(q,a) and the unit-restricted sum
C(q,a) of e(a m^3 / q) are Fourier transforms of the cube-residue
histograms counted here.  The local average

    T_d(q) = sum_{(a,q)=1} S(q, a d^3) C(q,a)^3 conj(C(q,a))^4 / (q phi(q)^7)

is computed exactly, without any floating point: the a-sum collapses to
a Ramanujan sum, and the product of seven C-factors becomes a sevenfold
cyclic convolution of integer histograms.  A direct complex-summation
oracle of the same quantity is provided for cross-checking at test
scale, along with a Weil-bound audit of |S(p,a)| over all residues of
all primes up to a limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, sqrt

import numpy as np
from sympy import factorint

# Limb width for Kronecker-substitution convolution.  Histogram entries
# stay below q * phi(q)^7 <= q^8, so 96 bits are safe for q <= 3000.
_LIMB_BITS = 96
_LIMB_BYTES = _LIMB_BITS // 8
_MAX_MODULUS = 3000


@lru_cache(maxsize=None)
def totient(q: int) -> int:
    out = 1
    for p, e in factorint(q).items():
        out *= (p - 1) * p ** (e - 1)
    return out


@lru_cache(maxsize=None)
def mobius(q: int) -> int:
    out = 1
    for _, e in factorint(q).items():
        if e > 1:
            return 0
        out = -out
    return out


@dataclass(frozen=True)
class CubeHistogram:
    """Counts of cube residues mod q, over all residues and over units."""

    modulus: int
    counts_full: np.ndarray  # counts_full[r] = #{1<=m<=q : m^3 == r (mod q)}
    counts_unit: np.ndarray  # same with gcd(m,q)=1

    def check(self) -> None:
        q = self.modulus
        assert int(self.counts_full.sum()) == q
        assert int(self.counts_unit.sum()) == totient(q)
        assert (self.counts_unit <= self.counts_full).all()


def cube_histograms(q: int) -> CubeHistogram:
    if q < 1:
        raise ValueError("modulus must be positive")
    m = np.arange(1, q + 1, dtype=np.int64)
    cubes = (m * m % q) * m % q
    full = np.bincount(cubes, minlength=q)
    unit_mask = np.gcd(m, q) == 1
    unit = np.bincount(cubes[unit_mask], minlength=q)
    return CubeHistogram(q, full, unit)


def ramanujan_sum(q: int, s: int) -> int:
    """c_q(s) = sum over d | gcd(q,s) of d * mu(q/d), with gcd(q,0)=q."""
    if q < 1:
        raise ValueError("modulus must be positive")
    g = gcd(q, s % q) if s % q else q
    total = 0
    d = 1
    while d * d <= g:
        if g % d == 0:
            total += d * mobius(q // d)
            e = g // d
            if e != d:
                total += e * mobius(q // e)
        d += 1
    return total


def cyclic_convolve(a: list, b: list, q: int) -> list:
    """Exact cyclic convolution of nonnegative integer sequences mod x^q - 1.

    Uses Kronecker substitution: pack into one big integer with 96-bit
    limbs, multiply once, unpack and fold.  Entries must stay below
    2**96, which holds throughout the sevenfold histogram convolutions
    for q <= 3000.
    """
    na = sum(int(v) << (_LIMB_BITS * i) for i, v in enumerate(a))
    nb = sum(int(v) << (_LIMB_BITS * i) for i, v in enumerate(b))
    prod = na * nb
    nbytes = prod.to_bytes(2 * q * _LIMB_BYTES, "little")
    out = [0] * q
    for i in range(2 * q):
        limb = int.from_bytes(nbytes[i * _LIMB_BYTES : (i + 1) * _LIMB_BYTES], "little")
        if limb:
            out[i % q] += limb
    return out


def cyclic_convolve_naive(a: list, b: list, q: int) -> list:
    """Reference O(q^2) cyclic convolution, kept as a cross-check route."""
    out = [0] * q
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[(i + j) % q] += ai * bj
    return out


@dataclass(frozen=True)
class TValue:
    """Exact value of the local average T_d(q)."""

    d: int
    q: int
    value: Fraction


def t_value_exact(d: int, q: int, *, convolve=cyclic_convolve) -> TValue:
    """Exact T_d(q) via histograms, convolution and Ramanujan sums.

    The twisted histogram A(x) = #{m mod q : d^3 m^3 == x} is built by
    direct enumeration (index remapping would be wrong when gcd(d,q)>1),
    then convolved with the unit histogram three times and its
    reflection four times; pairing against c_q(x) collapses the a-sum.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    if q > _MAX_MODULUS:
        raise ValueError(f"modulus {q} beyond supported convolution range")
    m = np.arange(1, q + 1, dtype=np.int64)
    cubes = (m * m % q) * m % q
    d3 = pow(d, 3, q)
    twisted = np.bincount(d3 * cubes % q, minlength=q)
    hist = cube_histograms(q)
    b = [int(v) for v in hist.counts_unit]
    b_rev = [b[(-r) % q] for r in range(q)]
    h = [int(v) for v in twisted]
    for _ in range(3):
        h = convolve(h, b, q)
    for _ in range(4):
        h = convolve(h, b_rev, q)
    num = sum(hx * ramanujan_sum(q, x) for x, hx in enumerate(h) if hx)
    value = Fraction(num, q * totient(q) ** 7)
    return TValue(d, q, value)


def t_value_oracle(d: int, q: int, imag_tol: float = 1e-9) -> float:
    """T_d(q) by direct double summation with complex exponentials.

    Independent of the convolution route: sums e(a d^3 m^3/q) term by
    term at machine precision.  The imaginary part must vanish (a and
    q-a pair up); exceeding ``imag_tol`` is an error.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    m = np.arange(1, q + 1, dtype=np.int64)
    cubes = (m * m % q) * m % q
    units = np.gcd(m, q) == 1
    a = m[units]
    phi = int(units.sum())
    d3 = pow(d, 3, q)
    angles_c = np.outer(a, cubes) % q
    ec = np.exp(2j * np.pi * angles_c / q)
    c_vals = ec[:, units].sum(axis=1)
    angles_s = np.outer(a * d3 % q, cubes) % q
    s_vals = np.exp(2j * np.pi * angles_s / q).sum(axis=1)
    total = (s_vals * c_vals**3 * np.conj(c_vals) ** 4).sum() / (q * phi**7)
    if abs(total.imag) > imag_tol:
        raise ArithmeticError(f"oracle imaginary part {total.imag} exceeds {imag_tol}")
    return float(total.real)


def exp_sums(q: int, a: int) -> tuple[complex, complex]:
    """(S(q,a), C(q,a)) at machine precision via the histograms, cost O(q)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    hist = cube_histograms(q)
    r = np.arange(q, dtype=np.int64)
    phase = np.exp(2j * np.pi * (a % q) * r / q)
    s = complex(np.dot(hist.counts_full, phase))
    c = complex(np.dot(hist.counts_unit, phase))
    return s, c


class WeilViolation(AssertionError):
    def __init__(self, p: int, a: int, value: float, bound: float):
        super().__init__(f"|S({p},{a})| = {value} exceeds Weil bound {bound}")
        self.p = p
        self.a = a


@dataclass(frozen=True)
class WeilAudit:
    p_max: int
    primes_checked: int
    pairs_checked: int
    max_ratio: float  # max over (p,a) of |S(p,a)| / (2 sqrt p)
    max_ratio_at: tuple[int, int]


def weil_audit(p_max: int, eps: float = 1e-6) -> WeilAudit:
    """Check |S(p,a)| <= 2 sqrt(p) and |C(p,a)| <= 2 sqrt(p) + 1 for all
    primes p <= p_max and all a in [1, p-1]; also S(p,a) = p when p | a.

    All S(p,a) for fixed p are obtained at once as the DFT of the cube
    histogram.  Any violation beyond ``eps`` raises WeilViolation.
    """
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    from .enumeration import sieve_primes

    primes = sieve_primes(p_max).list
    best = 0.0
    best_at = (2, 1)
    pairs = 0
    for p in primes:
        p = int(p)
        hist = cube_histograms(p)
        assert int(hist.counts_full.sum()) == p  # S(p,0) = p exactly
        f = np.fft.fft(hist.counts_full)  # f[k] = sum_r h[r] e(-kr/p) = S(p,-k)
        s_abs = np.abs(f[1:])
        bound = 2 * sqrt(p)
        k = int(np.argmax(s_abs))
        val = float(s_abs[k])
        if val > bound + eps:
            raise WeilViolation(p, (p - (k + 1)) % p, val, bound)
        # C(p,a) = S(p,a) - 1 for p prime, p not dividing a
        c_abs = np.abs(f[1:] - 1.0)
        kc = int(np.argmax(c_abs))
        if float(c_abs[kc]) > bound + 1 + eps:
            raise WeilViolation(p, (p - (kc + 1)) % p, float(c_abs[kc]), bound + 1)
        pairs += p - 1
        ratio = val / bound
        if ratio > best:
            best = ratio
            best_at = (p, (p - (k + 1)) % p)
    return WeilAudit(p_max, len(primes), pairs, best, best_at)
