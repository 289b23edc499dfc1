"""Certified prime products for the sieve constant and the singular series.

Four infinite products are bounded from above, each split the same way:
an exact segment over small primes (rational arithmetic on the local
averages T_d(q), converted to an interval only at the very end), a
middle segment of Weil-type majorant factors evaluated as intervals,
and an analytic tail handled through the identity
prod_p (1 + p^-s) = zeta(s)/zeta(2s).

Every headline comparison is made between a certified upper endpoint
and an exact decimal constant; no midpoints are ever compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .enumeration import sieve_primes
from .expsums import t_value_exact
from .intervals import Interval, euler_gamma_enclosure, zeta_enclosure

TailKind = Literal["omega", "sigma"]

# segment limits for the two products
OMEGA_EXACT_RANGE = (11, 200)
OMEGA_WEIL_RANGE = (200, 4000)  # half-open (200, 4000]
S1_EXACT_RANGE = (5, 500)
S1_WEIL_RANGE = (500, 4000)
TAIL_START = 4000

OMEGA_CEILING = Fraction("1.02944")
S1_CEILING = Fraction("3.0964")
W_CEILING = Fraction("41.381")
MERTENS_QUOTED = Fraction("40.197")
W_QUOTED_COARSE = Fraction("41.38")
W_QUOTED_CHAIN = Fraction("41.3794")


def _primes_between(lo: int, hi: int, inclusive_lo: bool = True):
    table = sieve_primes(hi)
    for p in table.list:
        p = int(p)
        if (p >= lo if inclusive_lo else p > lo) and p <= hi:
            yield p


@dataclass(frozen=True)
class ProductBound:
    """A certified upper bound for one of the infinite prime products."""

    name: str
    explicit_range: tuple[int, int]
    weil_range: tuple[int, int]
    tail_start: int
    value: Interval
    paper_value: Fraction
    segments: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        """Does the certified upper endpoint stay below the quoted value?"""
        return self.value.hi <= self.paper_value


def mertens_small_prime_constant() -> Interval:
    """Enclosure of e^-gamma * (180/11) * 2 * (3/2) * (5/4) * (7/6).

    The 180/11 comes from evaluating the Mertens product at z = N^(11/180)
    (the epsilon in the exponent is dropped, which only raises the
    constant, the safe direction for an upper bound); the rational
    factor reinstates the primes 2, 3, 5, 7 and equals 35/8 exactly.
    """
    e_neg_gamma = (-euler_gamma_enclosure()).exp()
    return e_neg_gamma * Fraction(180, 11) * Fraction(35, 8)


def tail_constant(P: int, kind: TailKind) -> Interval:
    """M(P) = 2 (1 - 1/P)^-7 (1 + 2/sqrt P) (2 + 1/sqrt P)^7;
    the sigma variant drops the (1 + 2/sqrt P) factor."""
    if P < 2:
        raise ValueError("P must be >= 2")
    sqrt_p = Interval.exact(P).sqrt()
    m = Interval.exact(2) * Interval.exact(1 - Fraction(1, P)) ** (-7)
    m = m * (Interval.exact(2) + 1 / sqrt_p) ** 7
    if kind == "omega":
        m = m * (Interval.exact(1) + 2 / sqrt_p)
    elif kind != "sigma":
        raise ValueError(f"unknown tail kind: {kind}")
    return m


def _zeta_exponent(kind: TailKind) -> Fraction:
    return Fraction(7, 2) if kind == "omega" else Fraction(4)


def tail_product_bound(P: int, kind: TailKind, zeta_terms: int = 8000) -> Interval:
    """Upper bound for prod_{p >= P} (1 + M/p^s), s = 7/2 or 4.

    base = zeta(s)/zeta(2s) * prod_{p<P} (1 + p^-s)^-1 encloses the tail
    portion prod_{p>=P}(1+p^-s); since (1+x)^M >= 1+Mx, raising base to
    the interval power M bounds the target product.
    """
    s = _zeta_exponent(kind)
    m = tail_constant(P, kind)
    base = zeta_enclosure(s, zeta_terms) / zeta_enclosure(2 * s, min(zeta_terms, 4000))
    for p in _primes_between(2, P - 1):
        base = base / (1 + Interval.exact(p).pow_rat(-s))
    return base.pow_interval(m)


def omega_majorant_factor(p: int) -> Interval:
    """1 + 2 (sqrt p + 2)(2 sqrt p + 1)^7 / (sqrt p (p-1)^7), the factor
    dominating |1 - (T_p(p)-T_1(p))/(p-1)| on the middle range."""
    r = Interval.exact(p).sqrt()
    num = 2 * (r + 2) * (2 * r + 1) ** 7
    return 1 + num / (r * Fraction((p - 1) ** 7))


def s1_majorant_factor(p: int) -> Interval:
    """1 + 2 (2 sqrt p + 1)^7 / (sqrt p (p-1)^7), the quoted majorant for
    1 + |T_1(p)| on the middle range of the singular series."""
    r = Interval.exact(p).sqrt()
    num = 2 * (2 * r + 1) ** 7
    return 1 + num / (r * Fraction((p - 1) ** 7))


def omega_exact_segment() -> Fraction:
    """prod over primes 11 <= p <= 200 of (1 - (T_p(p)-T_1(p))/(p-1)),
    with the local averages computed exactly."""
    out = Fraction(1)
    for p in _primes_between(*OMEGA_EXACT_RANGE):
        tp = t_value_exact(p, p).value
        t1 = t_value_exact(1, p).value
        out *= 1 - Fraction(tp - t1, p - 1)
    return out


def omega_product_bound() -> ProductBound:
    """Certified upper bound for prod_{p>=11}(1 - (T_p(p)-T_1(p))/(p-1)).

    Exact rationals over [11,200], majorant factors over (200,4000],
    analytic tail beyond.  The half-open middle range avoids double
    counting; as all factors exceed 1 this only tightens the bound.
    """
    exact = Interval.exact(omega_exact_segment())
    middle = Interval.exact(1)
    for p in _primes_between(*OMEGA_WEIL_RANGE, inclusive_lo=False):
        middle = middle * omega_majorant_factor(p)
    tail = tail_product_bound(TAIL_START, "omega")
    value = exact * middle * tail
    return ProductBound(
        name="omega_product",
        explicit_range=OMEGA_EXACT_RANGE,
        weil_range=OMEGA_WEIL_RANGE,
        tail_start=TAIL_START,
        value=value,
        paper_value=OMEGA_CEILING,
        segments={"explicit": exact, "weil_majorant": middle, "tail": tail},
    )


@dataclass(frozen=True)
class SieveConstant:
    """The constant multiplying 1/log N in the sieve product bound."""

    value: Interval
    mertens: Interval
    omega: ProductBound

    @property
    def satisfied(self) -> bool:
        return self.value.hi <= W_CEILING

    def discrepancy_notes(self) -> list[str]:
        notes = []
        for quoted in (W_QUOTED_COARSE, W_QUOTED_CHAIN):
            if self.value.hi > quoted:
                notes.append(
                    f"certified sieve constant {float(self.value.hi):.6f} exceeds "
                    f"the quoted {float(quoted)}; the quoted value matches the "
                    f"un-doubled middle majorant"
                )
        return notes


def sieve_constant_W() -> SieveConstant:
    """mertens_small_prime_constant() times the omega product bound."""
    mert = mertens_small_prime_constant()
    omega = omega_product_bound()
    return SieveConstant(value=mert * omega.value, mertens=mert, omega=omega)


def s1_explicit_segment() -> Fraction:
    """(1 + T_1(3) + T_1(9)) * prod_{5<=p<=500} (1 + T_1(p)), exact."""
    out = 1 + t_value_exact(1, 3).value + t_value_exact(1, 9).value
    for p in _primes_between(*S1_EXACT_RANGE):
        out *= 1 + t_value_exact(1, p).value
    return out


def singular_series_S1() -> ProductBound:
    """Certified upper bound for the singular series
    (1 + T_1(3) + T_1(9)) prod_{p != 3} (1 + T_1(p)).

    The exact segment may contain factors below 1 (T_1(p) takes both
    signs); keeping it as one exact rational makes the segment value
    exact regardless, and the majorant segments are upper bounds by
    construction.
    """
    exact = Interval.exact(s1_explicit_segment())
    middle = Interval.exact(1)
    for p in _primes_between(*S1_WEIL_RANGE, inclusive_lo=False):
        middle = middle * s1_majorant_factor(p)
    tail = tail_product_bound(TAIL_START, "sigma")
    value = exact * middle * tail
    return ProductBound(
        name="singular_series",
        explicit_range=S1_EXACT_RANGE,
        weil_range=S1_WEIL_RANGE,
        tail_start=TAIL_START,
        value=value,
        paper_value=S1_CEILING,
        segments={"explicit": exact, "weil_majorant": middle, "tail": tail},
    )
