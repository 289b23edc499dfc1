"""Desk-scale brute force over sums of four prime cubes.

Everything here is exact integer work: prime sieves, the set of n <= X
expressible as p1^3+p2^3+p3^3+p4^3, congruence-class audits of those
representations, and the restricted representation counts r(n) / R(m)
whose first and second moments feed the Cauchy-Schwarz density bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from pathlib import Path

import numpy as np

_MAGIC = b"4PC1"
_HEADER_LEN = 64

# residues mod 9 reachable by four cubes of primes other than 3 (each
# cube is +-1 mod 9), and the mod-7 classes unreachable without a 7
_ALLOWED_MOD9 = frozenset({0, 2, 4, 5, 7})
_EXCLUDED_MOD7 = frozenset({1, 6})


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    membership: np.ndarray  # bool array over [0, limit]
    list: np.ndarray  # ascending primes as int64


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes over [0, limit]."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return PrimeTable(limit, mask, np.nonzero(mask)[0].astype(np.int64))


def segmented_prime_count(limit: int, segment: int = 1 << 16) -> int:
    """pi(limit) by an independent segmented sieve (cross-check route)."""
    if limit < 2:
        return 0
    root = isqrt(limit)
    base = [p for p in range(2, root + 1) if all(p % d for d in range(2, isqrt(p) + 1))]
    count = len([p for p in base if p <= limit])
    lo = root + 1
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        flags = bytearray([1]) * (hi - lo + 1)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            for m in range(start, hi + 1, p):
                flags[m - lo] = 0
        count += sum(flags)
        lo = hi + 1
    return count


@dataclass
class RepSet:
    """Exact set of n <= X that are sums of four prime cubes."""

    X: int
    representable: np.ndarray  # bool array over [0, X]
    witness: dict | None = None  # n -> one (p1, p2, p3, p4)

    def count(self) -> int:
        return int(self.representable.sum())


def _cube_primes(bound: int) -> np.ndarray:
    """Primes p with p^3 <= bound."""
    top = max(2, round(bound ** (1 / 3)) + 2)
    table = sieve_primes(top)
    return table.list[table.list.astype(object) ** 3 <= bound]


def four_cube_set(X: int, witnesses: bool = False) -> RepSet:
    """All n <= X representable as a sum of four prime cubes.

    Built from pairs of two-cube sums: with primes up to X^(1/3) there
    are only ~1e3 distinct two-cube sums even at X = 1e7.
    """
    if X < 32:
        raise ValueError("X must be >= 32 = 2^3 * 4")
    primes = _cube_primes(X - 8)
    cubes = primes.astype(np.int64) ** 3
    s2 = (cubes[:, None] + cubes[None, :])[np.triu_indices(len(cubes))]
    s2 = np.unique(s2[s2 <= X - 8])
    rep = np.zeros(X + 1, dtype=bool)
    for s in s2:
        partners = s2[s2 <= X - s]
        rep[partners + s] = True
    wit = None
    if witnesses:
        pair_of = {}
        for i, p in enumerate(primes):
            for q in primes[i:]:
                s = int(p) ** 3 + int(q) ** 3
                if s <= X - 8 and s not in pair_of:
                    pair_of[s] = (int(p), int(q))
        wit = {}
        sums = sorted(pair_of)
        for s in sums:
            for t in sums:
                n = s + t
                if n > X:
                    break
                if n not in wit:
                    wit[n] = pair_of[s] + pair_of[t]
    return RepSet(X, rep, wit)


def four_cube_set_naive(X: int) -> set:
    """Four nested loops over prime cubes; independent second route."""
    primes = [int(p) for p in _cube_primes(X - 24)]
    cubes = [p**3 for p in primes]
    out = set()
    for a in cubes:
        if a + 24 > X:
            break
        for b in cubes:
            if a + b + 16 > X:
                break
            for c in cubes:
                if a + b + c + 8 > X:
                    break
                for d in cubes:
                    n = a + b + c + d
                    if n > X:
                        break
                    out.add(n)
    return out


@dataclass
class CongruenceAudit:
    X: int
    quadruples_checked: int
    class_counts: np.ndarray  # representable n <= X per residue class mod 126
    admissible_density: Fraction
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def admissible_classes_mod126() -> list[int]:
    """Residues mod 126 not excluded by cube arithmetic mod 2, 9 and 7."""
    out = []
    for r in range(126):
        if r % 2 == 0 and r % 9 in _ALLOWED_MOD9 and r % 7 not in _EXCLUDED_MOD7:
            out.append(r)
    return out


def congruence_audit(X: int) -> CongruenceAudit:
    """Verify the refined congruence statements on every representation:

    (a) all four primes odd  => n even;
    (b) no prime equal to 3  => n mod 9 in {0, +-2, +-4};
    (c) no prime equal to 7  => n mod 7 not in {+-1}.

    Any violating quadruple raises immediately.  Also reports counts of
    representable n per class mod 126 and the exact CRT density 25/126
    of the admissible classes.
    """
    primes = [int(p) for p in _cube_primes(X - 24)]
    cubes = {p: p**3 for p in primes}
    checked = 0
    for quad in itertools.combinations_with_replacement(primes, 4):
        n = sum(cubes[p] for p in quad)
        if n > X:
            continue
        checked += 1
        if 2 not in quad and n % 2 != 0:
            raise AssertionError(f"parity violation: {quad} sums to odd {n}")
        if 3 not in quad and n % 9 not in _ALLOWED_MOD9:
            raise AssertionError(f"mod-9 violation: {quad} sums to {n} = {n % 9} (mod 9)")
        if 7 not in quad and n % 7 in _EXCLUDED_MOD7:
            raise AssertionError(f"mod-7 violation: {quad} sums to {n} = {n % 7} (mod 7)")
    rep = four_cube_set(X).representable
    counts = np.array([int(rep[r::126].sum()) for r in range(126)])
    density = Fraction(len(admissible_classes_mod126()), 126)
    return CongruenceAudit(X, checked, counts, density)


def _range_primes(lo: float, hi: float, table: PrimeTable) -> np.ndarray:
    lst = table.list
    return lst[(lst >= lo) & (lst <= hi)]


@dataclass
class RestrictedMoments:
    """First and second moments of the restricted representation count r(n).

    r(n) counts ordered quadruples p1^3+p2^3+p3^3+p4^3 = n with
    U <= p1,p2 <= 2U and V <= p3,p4 <= 2V, where U = (N/(16+delta))^(1/3)
    and V = U^(5/6).
    """

    N: int
    delta: float
    U: float
    V: float
    primes_U: int  # pi(2U) - pi(U)
    primes_V: int
    sum_r: int
    sum_r2: int
    distinct: int


def _moment_ranges(N: int, delta: float) -> tuple[float, float, np.ndarray, np.ndarray]:
    U = (N / (16 + delta)) ** (1 / 3)
    V = U ** (5 / 6)
    table = sieve_primes(int(2 * U) + 2)
    pu = _range_primes(U, 2 * U, table)
    pv = _range_primes(V, 2 * V, table)
    if len(pu) == 0:
        raise ValueError(f"no primes in [U, 2U] = [{U}, {2*U}]")
    if len(pv) == 0:
        raise ValueError(f"no primes in [V, 2V] = [{V}, {2*V}]")
    return U, V, pu, pv


def restricted_moments(N: int, delta: float) -> RestrictedMoments:
    U, V, pu, pv = _moment_ranges(N, delta)
    cu = pu.astype(np.int64) ** 3
    cv = pv.astype(np.int64) ** 3
    s12 = (cu[:, None] + cu[None, :]).ravel()
    s34 = (cv[:, None] + cv[None, :]).ravel()
    n_vals = (s12[:, None] + s34[None, :]).ravel()
    _, r = np.unique(n_vals, return_counts=True)
    sum_r = int(r.sum())
    assert sum_r == len(pu) ** 2 * len(pv) ** 2  # counting identity
    return RestrictedMoments(
        N=N,
        delta=delta,
        U=U,
        V=V,
        primes_U=len(pu),
        primes_V=len(pv),
        sum_r=sum_r,
        sum_r2=int((r.astype(object) ** 2).sum()),
        distinct=len(r),
    )


def capital_R(m: int, N: int, delta: float) -> int:
    """Number of solutions of m^3 + p2^3 + p3^3 + p4^3 = p5^3 + p6^3 + p7^3 + p8^3
    with p2, p5, p6 in [U, 2U] and p3, p4, p7, p8 in [V, 2V]."""
    if m < 1:
        raise ValueError("m must be positive")
    _, _, pu, pv = _moment_ranges(N, delta)
    cu = pu.astype(np.int64) ** 3
    cv = pv.astype(np.int64) ** 3
    s34 = (cv[:, None] + cv[None, :]).ravel()
    lhs = (m**3 + cu[:, None] + s34[None, :]).ravel()
    lv, lc = np.unique(lhs, return_counts=True)
    s56 = (cu[:, None] + cu[None, :]).ravel()
    rhs = (s56[:, None] + s34[None, :]).ravel()
    rv, rc = np.unique(rhs, return_counts=True)
    common, li, ri = np.intersect1d(lv, rv, assume_unique=True, return_indices=True)
    return int((lc[li].astype(object) * rc[ri]).sum())


@dataclass
class DensityReport:
    X: int
    representable: int
    density_all: float
    density_admissible: float  # restricted to admissible classes mod 126
    asymptotic_lower_bound: float = 0.009664
    admissible_class_bound: Fraction = Fraction(25, 126)


def empirical_density(X: int) -> DensityReport:
    """Observed density of representable n <= X, overall and within the
    admissible classes mod 126.  Purely informational: the asymptotic
    bound is not a finite-X claim."""
    if X < 10**4:
        raise ValueError("X must be >= 1e4 for a meaningful report")
    rep = four_cube_set(X)
    admissible = admissible_classes_mod126()
    adm_mask = np.zeros(X + 1, dtype=bool)
    for r in admissible:
        adm_mask[r::126] = True
    n_adm = int(adm_mask.sum())
    return DensityReport(
        X=X,
        representable=rep.count(),
        density_all=rep.count() / X,
        density_admissible=int(rep.representable[adm_mask].sum()) / n_adm,
    )


def dump_repset(rep: RepSet, path) -> None:
    """Binary dump: 64-byte header (magic "4PC1", X as 8-byte little-endian),
    then the representability bits over [0, X] packed little-endian."""
    header = _MAGIC + rep.X.to_bytes(8, "little")
    header += b"\x00" * (_HEADER_LEN - len(header))
    bits = np.packbits(rep.representable.view(np.uint8), bitorder="little")
    Path(path).write_bytes(header + bits.tobytes())


def load_repset(path) -> RepSet:
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError("not a four-prime-cube bitmap dump")
    X = int.from_bytes(raw[4:12], "little")
    bits = np.frombuffer(raw[_HEADER_LEN:], dtype=np.uint8)
    rep = np.unpackbits(bits, bitorder="little")[: X + 1].astype(bool)
    return RepSet(X, rep)
