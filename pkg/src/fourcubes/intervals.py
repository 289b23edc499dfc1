"""Directed-rounding interval arithmetic and exact rationals.

Endpoints are arbitrary-precision binary floats (mpmath's raw mpf
representation), so every endpoint is an exact dyadic rational.  All
operations round outward: the result interval contains the exact image
of the inputs.  Comparisons against decimal constants are done through
exact ``fractions.Fraction`` arithmetic, never through floats.

The working precision defaults to 128 bits of mantissa and can be
raised or lowered globally with :func:`set_precision`.

Elementary functions (exp, log) are delegated to mpmath's interval
primitives and then widened by a few ulps as a safety margin; n-th
roots are re-verified from scratch by exact integer-power comparison of
the dyadic endpoints, so no correctly-rounded power function has to be
trusted anywhere in the chain.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from mpmath.libmp import (
    from_int,
    from_man_exp,
    from_rational,
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_euler,
    mpf_le,
    mpf_lt,
    mpf_neg,
    mpf_nthroot,
    mpf_shift,
    round_ceiling,
    round_floor,
    to_str,
)
from mpmath.libmp import libmpi as _mpi

_DEFAULT_PREC = 128
_prec = _DEFAULT_PREC

# extra guard applied to mpmath's transcendental endpoints, in ulps
_TRANS_GUARD = 4


def set_precision(bits: int) -> None:
    """Set the global endpoint precision (mantissa bits, >= 53)."""
    global _prec
    if bits < 53:
        raise ValueError(f"precision must be >= 53 bits, got {bits}")
    _prec = int(bits)


def get_precision() -> int:
    return _prec


class IntervalDomainError(ArithmeticError):
    """Operation applied outside its mathematical domain.

    Raised instead of silently widening to [-inf, +inf]: division by an
    interval containing zero, log of a non-positive interval, fractional
    powers of non-positive intervals.
    """


def _raw_to_fraction(x) -> Fraction:
    sign, man, exp, bc = x
    if man == 0 and exp != 0:
        raise OverflowError("non-finite interval endpoint")
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def _fraction_to_raw(x: Fraction, rnd):
    return from_rational(x.numerator, x.denominator, _prec, rnd)


def _ulp_widen(x, n, direction):
    """Move a raw mpf n ulps in the given rounding direction."""
    if x == fzero:
        ulp = from_man_exp(1, -_prec * 2)
    else:
        sign, man, exp, bc = x
        ulp = from_man_exp(1, exp + bc - _prec)
    ulp = mpf_shift(ulp, n.bit_length())
    if direction == round_floor:
        return mpf_add(x, mpf_neg(ulp), _prec, round_floor)
    return mpf_add(x, ulp, _prec, round_ceiling)


class Interval:
    """Closed interval [lo, hi] guaranteed to contain an exact real value."""

    __slots__ = ("_v",)

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        a = self._coerce_endpoint(lo, round_floor)
        b = self._coerce_endpoint(hi, round_ceiling)
        if mpf_lt(b, a):
            raise ValueError(f"invalid interval endpoints: lo > hi ({lo!r}, {hi!r})")
        self._v = (a, b)

    @staticmethod
    def _coerce_endpoint(x, rnd):
        if isinstance(x, tuple):
            return x
        if isinstance(x, int):
            return from_int(x, _prec, rnd)
        if isinstance(x, Rational):
            return from_rational(x.numerator, x.denominator, _prec, rnd)
        if isinstance(x, float):
            if x != x or x in (float("inf"), float("-inf")):
                raise ValueError("endpoints must be finite")
            f = Fraction(x)
            return from_rational(f.numerator, f.denominator, _prec, rnd)
        raise TypeError(f"cannot build interval endpoint from {type(x).__name__}")

    @classmethod
    def _raw(cls, a, b):
        iv = object.__new__(cls)
        iv._v = (a, b)
        return iv

    @classmethod
    def exact(cls, x) -> "Interval":
        """Tightest interval around an int, Fraction or float."""
        return cls(x, x)

    # -- accessors ----------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        """Lower endpoint as an exact rational."""
        return _raw_to_fraction(self._v[0])

    @property
    def hi(self) -> Fraction:
        """Upper endpoint as an exact rational."""
        return _raw_to_fraction(self._v[1])

    @property
    def lo_float(self) -> float:
        """Lower endpoint rounded down to machine precision."""
        f = self.lo
        x = f.numerator / f.denominator
        return x if Fraction(x) <= f else _next_float(x, down=True)

    @property
    def hi_float(self) -> float:
        f = self.hi
        x = f.numerator / f.denominator
        return x if Fraction(x) >= f else _next_float(x, down=False)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        f = x if isinstance(x, Rational) else Fraction(x)
        return self.lo <= f <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def is_subset(self, other: "Interval") -> bool:
        return other.contains(self)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        a = max(self.lo, other.lo)
        b = min(self.hi, other.hi)
        if a > b:
            raise ValueError("empty intersection")
        return Interval(a, b)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def __repr__(self):
        dps = 25
        return f"[{to_str(self._v[0], dps)}, {to_str(self._v[1], dps)}]"

    def __eq__(self, other):
        return isinstance(other, Interval) and self._v == other._v

    def __hash__(self):
        return hash(self._v)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        return Interval(x, x)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval._raw(*_mpi.mpi_add(self._v, o._v, _prec))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Interval._raw(*_mpi.mpi_sub(self._v, o._v, _prec))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Interval._raw(*_mpi.mpi_mul(self._v, o._v, _prec))

    __rmul__ = __mul__

    def __neg__(self):
        return Interval._raw(*_mpi.mpi_neg(self._v, _prec))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise IntervalDomainError(f"division by interval containing zero: {o!r}")
        return Interval._raw(*_mpi.mpi_div(self._v, o._v, _prec))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0 and self.lo <= 0 <= self.hi:
                raise IntervalDomainError("negative power of interval containing zero")
            return Interval._raw(*_mpi.mpi_pow_int(self._v, e, _prec))
        if isinstance(e, Rational):
            return self.pow_rat(Fraction(e))
        return NotImplemented

    def pow_rat(self, e: Fraction) -> "Interval":
        """x**e for a rational exponent, via verified roots and integer powers."""
        e = Fraction(e)
        if e.denominator == 1:
            return self ** int(e)
        if self.lo <= 0:
            raise IntervalDomainError(
                f"fractional power requires strictly positive interval: {self!r}"
            )
        root = self.nth_root(e.denominator)
        return root ** e.numerator

    def nth_root(self, n: int) -> "Interval":
        """Verified n-th root of a positive interval.

        The candidate endpoints come from mpf_nthroot and are then nudged
        outward until exact dyadic power comparison proves containment.
        """
        if n < 1:
            raise ValueError("root order must be >= 1")
        if n == 1:
            return self
        if self.lo <= 0:
            raise IntervalDomainError(f"n-th root requires positive interval: {self!r}")
        a = mpf_nthroot(self._v[0], n, _prec, round_floor)
        b = mpf_nthroot(self._v[1], n, _prec, round_ceiling)
        lo_target, hi_target = self.lo, self.hi
        for _ in range(64):
            if _raw_to_fraction(a) >= 0 and _raw_to_fraction(a) ** n <= lo_target:
                break
            a = _ulp_widen(a, 1, round_floor)
        else:
            raise ArithmeticError("root verification failed (lower endpoint)")
        for _ in range(64):
            if _raw_to_fraction(b) ** n >= hi_target:
                break
            b = _ulp_widen(b, 1, round_ceiling)
        else:
            raise ArithmeticError("root verification failed (upper endpoint)")
        return Interval._raw(a, b)

    def sqrt(self) -> "Interval":
        return self.nth_root(2)

    def exp(self) -> "Interval":
        a, b = _mpi.mpi_exp(self._v, _prec)
        return Interval._raw(
            _ulp_widen(a, _TRANS_GUARD, round_floor),
            _ulp_widen(b, _TRANS_GUARD, round_ceiling),
        )

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise IntervalDomainError(f"log requires strictly positive interval: {self!r}")
        a, b = _mpi.mpi_log(self._v, _prec)
        return Interval._raw(
            _ulp_widen(a, _TRANS_GUARD, round_floor),
            _ulp_widen(b, _TRANS_GUARD, round_ceiling),
        )

    def pow_interval(self, e: "Interval") -> "Interval":
        """x**e for an interval exponent, as exp(e*log x); requires x > 0."""
        return (self.log() * e).exp()


def _next_float(x: float, down: bool) -> float:
    import math

    return math.nextafter(x, -math.inf if down else math.inf)


def iv_arith(op: str, *args, exponent=None) -> Interval:
    """Name-dispatched interval arithmetic: add/sub/mul/div/pow_rat/exp/log."""
    args = [Interval._coerce(a) for a in args]
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "div":
        return args[0] / args[1]
    if op == "pow_rat":
        if exponent is None:
            raise ValueError("pow_rat requires an exponent")
        return args[0].pow_rat(Fraction(exponent))
    if op == "exp":
        return args[0].exp()
    if op == "log":
        return args[0].log()
    raise ValueError(f"unknown interval operation: {op}")


def euler_gamma_enclosure() -> Interval:
    """Enclosure of Euler's constant, width <= 1e-30 regardless of precision."""
    prec = max(_prec, 128)
    return Interval._raw(mpf_euler(prec, round_floor), mpf_euler(prec, round_ceiling))


def zeta_enclosure(s, terms: int = 10000) -> Interval:
    """Enclosure of the Riemann zeta function at a rational s > 1.

    Partial sum of ``terms`` terms plus a tail sandwiched between
    integral bounds: the tail after N terms lies in
    [(N+1)^(1-s)/(s-1), N^(1-s)/(s-1)].
    """
    s = Fraction(s)
    if s <= 1:
        raise ValueError(f"zeta enclosure requires s > 1, got {s}")
    if terms < 1:
        raise ValueError("need at least one term")
    total = Interval.exact(1)
    for n in range(2, terms + 1):
        total = total + Interval.exact(n).pow_rat(-s)
    n_tail = Interval.exact(terms).pow_rat(1 - s) / (s - 1)
    n1_tail = Interval.exact(terms + 1).pow_rat(1 - s) / (s - 1)
    tail = Interval(n1_tail.lo, n_tail.hi)
    return total + tail


# Exact arbitrary-precision rationals: stdlib Fraction already guarantees
# lowest terms and a positive denominator.
BigRational = Fraction
