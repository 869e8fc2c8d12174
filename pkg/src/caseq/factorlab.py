"""Number-theoretic engine behind the sequence-family constructions.

Provides prime factorization, the family-size ratio f, proper and
near-proper coarse factorizations at degeneracy level kappa, integer
partition and fixed-weight codeword enumeration, the codeword conversion
that turns weight patterns into prime groupings, additive decompositions
maximizing the minimum prime-omega over parts, and the count of sequences
available under a minimum cyclic-shifting-distance restriction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence


class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class InfeasibleError(ValueError):
    """A mathematically infeasible request (no solution exists)."""


# A weight pattern: non-increasing positive ints, one entry per factor group.
OmegaPattern = tuple[int, ...]


@dataclass(frozen=True)
class PrimeFactorization:
    """Multiset of prime factors of ``n``, stored ascending."""

    n: int
    primes: tuple[int, ...]

    @property
    def omega(self) -> int:
        """Number of prime factors counted with multiplicity."""
        return len(self.primes)


@dataclass(frozen=True)
class FactorSet:
    """A multiplicative splitting of ``n`` into factors, each >= 2.

    ``kappa`` is the degeneracy level: the number of merges applied to the
    prime factorization, i.e. omega(n) minus the number of factors.
    """

    n: int
    factors: tuple[int, ...]
    kappa: int

    def __post_init__(self):
        if math.prod(self.factors) != self.n:
            raise DomainError(f"factors {self.factors} do not multiply to {self.n}")
        if any(a < 2 for a in self.factors):
            raise DomainError("every factor must be >= 2")

    @property
    def family_size(self) -> int:
        """Number of orthogonal sequences the factor set supports."""
        return math.prod(a - 1 for a in self.factors)

    @property
    def family_csd(self) -> int:
        """Cyclic shifting distance n / max(factors)."""
        return self.n // max(self.factors)

    def sorted_ascending(self) -> tuple[int, ...]:
        return tuple(sorted(self.factors))

    def sorted_descending(self) -> tuple[int, ...]:
        return tuple(sorted(self.factors, reverse=True))


@dataclass(frozen=True)
class Decomposition:
    """Additive split n = sum of parts, each part >= 2, non-increasing."""

    n: int
    parts: tuple[int, ...]
    #: largest achievable min-omega over all decompositions of n (set by
    #: mpo_decompose; equals min_omega when the witness attains it).
    mpo: int = field(default=0, compare=False)

    def __post_init__(self):
        if sum(self.parts) != self.n:
            raise DomainError(f"parts {self.parts} do not sum to {self.n}")
        if any(p < 2 for p in self.parts):
            raise DomainError("every part must be >= 2")
        if list(self.parts) != sorted(self.parts, reverse=True):
            raise DomainError("parts must be non-increasing")

    @property
    def min_omega(self) -> int:
        return min(prime_factorize(p).omega for p in self.parts)

    @property
    def satisfies_restriction_a(self) -> bool:
        """At least three parts and no part as large as half the total."""
        return len(self.parts) >= 3 and 2 * max(self.parts) < self.n

    @property
    def at_mpo(self) -> bool:
        return self.mpo == self.min_omega

    @classmethod
    def from_parts(cls, n: int, parts: Sequence[int]) -> "Decomposition":
        d = cls(n, tuple(sorted(parts, reverse=True)))
        return Decomposition(d.n, d.parts, mpo=mpo_value(n))


def prime_factorize(n: int) -> PrimeFactorization:
    """Factor ``n`` by trial division; primes returned ascending."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return _prime_factorize_cached(n)


@lru_cache(maxsize=None)
def _prime_factorize_cached(n: int) -> PrimeFactorization:
    primes = []
    m = n
    for p in (2, 3):
        while m % p == 0:
            primes.append(p)
            m //= p
    p = 5
    while p * p <= m:
        for q in (p, p + 2):
            while m % q == 0:
                primes.append(q)
                m //= q
        p += 6
    if m > 1:
        primes.append(m)
    return PrimeFactorization(n, tuple(primes))


def omega(n: int) -> int:
    """Prime factor count of n with multiplicity."""
    return prime_factorize(n).omega


def size_ratio(factors: Sequence[int]) -> Fraction:
    """Exact family-size ratio (prod(a) - 1) / prod(a - 1) for entries > 1."""
    if not factors:
        raise DomainError("empty factor tuple")
    if any(a <= 1 for a in factors):
        raise DomainError(f"all entries must exceed 1, got {tuple(factors)}")
    return Fraction(math.prod(factors) - 1, math.prod(a - 1 for a in factors))


def proper_factorization_kappa1(pf: PrimeFactorization) -> FactorSet:
    """Level-(omega-1) factorization of largest family size.

    Merges the two smallest primes; optimal by monotonicity of the size
    ratio in each entry.
    """
    if pf.omega <= 2:
        raise DomainError(f"kappa=1 needs omega > 2, got omega={pf.omega}")
    p = pf.primes
    return FactorSet(pf.n, tuple(sorted((p[0] * p[1],) + p[2:])), kappa=1)


def proper_factorization_kappa2(pf: PrimeFactorization) -> FactorSet:
    """Level-(omega-2) factorization of largest family size.

    Either the three smallest primes merge into one factor, or the four
    smallest merge pairwise as {p0*p3, p1*p2}; the first wins exactly when
    p1*p2 < p3.
    """
    if pf.omega <= 3:
        raise DomainError(f"kappa=2 needs omega > 3, got omega={pf.omega}")
    p = pf.primes
    if p[1] * p[2] < p[3]:
        factors = (p[0] * p[1] * p[2],) + p[3:]
    else:
        factors = (p[0] * p[3], p[1] * p[2]) + p[4:]
    return FactorSet(pf.n, tuple(sorted(factors)), kappa=2)


def integer_partitions(total: int, parts: int) -> list[OmegaPattern]:
    """All non-increasing positive patterns of fixed length summing to total.

    Ordered lexicographically descending, e.g. (5, 3) -> [(3,1,1), (2,2,1)].
    Returns [] when parts > total; raises on nonpositive arguments.
    """
    if total < 1 or parts < 1:
        raise DomainError("total and parts must be positive")
    out: list[OmegaPattern] = []

    def rec(remaining: int, slots: int, cap: int, prefix: tuple[int, ...]):
        if slots == 0:
            if remaining == 0:
                out.append(prefix)
            return
        # each of the remaining slots holds at least 1
        hi = min(cap, remaining - (slots - 1))
        lo = -(-remaining // slots)  # ceil: keep non-increasing feasible
        for v in range(hi, lo - 1, -1):
            rec(remaining - v, slots - 1, v, prefix + (v,))

    rec(total, parts, total, ())
    return out


def gosper_enumerate(length: int, weight: int) -> Iterator[int]:
    """Yield all ``length``-bit integers of Hamming weight ``weight`` ascending.

    Classic carry-propagation bit trick; bit i of a yielded value marks
    position i of the codeword.  length is capped at 62 bits.
    """
    if length > 62:
        raise DomainError(f"codeword length {length} exceeds the 62-bit cap")
    if weight <= 0 or weight > length:
        raise DomainError(f"need 0 < weight <= length, got ({length}, {weight})")
    x = (1 << weight) - 1
    limit = 1 << length
    while x < limit:
        yield x
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r


def bits_of(codeword: int, length: int) -> tuple[int, ...]:
    """Expand an integer codeword to its bit tuple (index m = bit m)."""
    return tuple((codeword >> m) & 1 for m in range(length))


def codeword_conversion(codewords: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Expand nested short codewords to full-length ones over all positions.

    Codeword 0 claims positions of the full index set directly; codeword
    n claims among the positions left unclaimed by codewords 0..n-1, in
    order.  Inputs therefore shrink: len(codeword n) equals the number of
    positions still free before it.  Outputs all have the full length,
    keep their input weights, and partition the position set.
    """
    if not codewords:
        raise DomainError("no codewords given")
    full = len(codewords[0])
    free = list(range(full))
    out: list[tuple[int, ...]] = []
    for cw in codewords:
        if len(cw) != len(free):
            raise DomainError(
                f"codeword of length {len(cw)} does not match {len(free)} free positions"
            )
        expanded = [0] * full
        taken = []
        for pos, bit in zip(free, cw):
            if bit:
                expanded[pos] = 1
                taken.append(pos)
        out.append(tuple(expanded))
        free = [p for p in free if p not in taken]
    if free:
        raise DomainError(f"codewords leave positions {free} unclaimed")
    return out


def pattern_codeword_sets(pattern: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All codeword sets realizing a weight pattern over sum(pattern) positions.

    For pattern entry w_m, the m-th codeword has length equal to the tail
    sum of the pattern from m on, and weight w_m; the product of binomial
    coefficients counts the sets yielded.
    """
    tail = [sum(pattern[m:]) for m in range(len(pattern))]

    def rec(m: int, prefix: tuple[tuple[int, ...], ...]):
        if m == len(pattern):
            yield prefix
            return
        if tail[m] == pattern[m]:
            # forced all-ones codeword
            yield from rec(m + 1, prefix + ((1,) * pattern[m],))
            return
        for cw in gosper_enumerate(tail[m], pattern[m]):
            yield from rec(m + 1, prefix + (bits_of(cw, tail[m]),))

    yield from rec(0, ())


def _factor_multisets(pf: PrimeFactorization, level: int) -> set[tuple[int, ...]]:
    """All distinct factor multisets of n with exactly ``level`` factors."""
    found: set[tuple[int, ...]] = set()
    for pattern in integer_partitions(pf.omega, level):
        for cwset in pattern_codeword_sets(pattern):
            full = codeword_conversion(cwset)
            factors = tuple(
                sorted(
                    math.prod(p for p, bit in zip(pf.primes, cw) if bit)
                    for cw in full
                )
            )
            found.add(factors)
    return found


def exclusive_search_proper(pf: PrimeFactorization, kappa: int) -> FactorSet:
    """Exhaustive search for a level-(omega-kappa) factor set of maximum
    family size.

    Enumerates weight patterns, realizes each through fixed-weight codeword
    sets and codeword conversion, deduplicates factor multisets, and keeps
    the one maximizing prod(A_m - 1); ties go to the lexicographically
    smallest sorted multiset.
    """
    if not 1 <= kappa <= pf.omega - 1:
        raise DomainError(f"kappa must be in [1, {pf.omega - 1}], got {kappa}")
    level = pf.omega - kappa
    best: tuple[int, ...] | None = None
    best_size = -1
    for factors in sorted(_factor_multisets(pf, level)):
        size = math.prod(a - 1 for a in factors)
        if size > best_size:
            best, best_size = factors, size
    assert best is not None
    return FactorSet(pf.n, best, kappa=kappa)


def near_proper_factorization(pf: PrimeFactorization, kappa: int) -> FactorSet:
    """Closed-form level-(omega-kappa) factorization for kappa >= 3.

    Recursion seeded with the proper level-(omega-1) or level-(omega-2)
    set: at each step, sort ascending and either merge the three smallest
    factors (when A1*A2 < A3) or merge {A0,A3} and {A1,A2}.
    """
    if pf.omega <= 4:
        raise DomainError(f"near-proper needs omega > 4, got omega={pf.omega}")
    if not 3 <= kappa <= pf.omega - 2:
        raise DomainError(f"kappa must be in [3, {pf.omega - 2}], got {kappa}")
    if kappa % 2 == 1:
        current = list(proper_factorization_kappa1(pf).sorted_ascending())
        k = 1
    else:
        current = list(proper_factorization_kappa2(pf).sorted_ascending())
        k = 2
    while k < kappa:
        a = sorted(current)
        if a[1] * a[2] < a[3]:
            current = [a[0] * a[1] * a[2]] + a[3:]
        else:
            current = [a[0] * a[3], a[1] * a[2]] + a[4:]
        k += 2
    return FactorSet(pf.n, tuple(sorted(current)), kappa=kappa)


def mpo_value(n: int) -> int:
    """Largest t such that n is a sum of integers >= 2, each with omega >= t.

    Single-part sums are allowed, so the result is at least omega(n).
    Bottom-up reachability over the admissible part values at each level.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    t = prime_factorize(n).omega
    while _reachable_sums(n, t + 1) >> n & 1:
        t += 1
    return t


@lru_cache(maxsize=512)
def _reachable_sums(n: int, t: int) -> int:
    """Bitmask of sums <= n reachable with parts of omega >= t (bit 0 set)."""
    values = [v for v in range(2, n + 1) if prime_factorize(v).omega >= t]
    mask = (1 << (n + 1)) - 1
    reach = 1
    for v in values:
        # close reach under repeated addition of v (doubling the step)
        step = v
        while step <= n:
            new = (reach | (reach << step)) & mask
            if new == reach:
                break
            reach = new
            step *= 2
    return reach


def _admissible(n: int, t: int, cap: int) -> list[int]:
    return [v for v in range(2, min(n, cap) + 1) if prime_factorize(v).omega >= t]


def _split_exists(s: int, k: int, bound: int, values: frozenset[int],
                  _memo: dict | None = None) -> bool:
    """Can s be written as k non-increasing parts from values, each <= bound?"""
    if _memo is None:
        _memo = {}
    key = (s, k, bound)
    if key in _memo:
        return _memo[key]
    if k == 0:
        return s == 0
    out = False
    for v in sorted((v for v in values if v <= min(s, bound)), reverse=True):
        if v * k < s:
            break  # even k copies of v cannot reach s
        if _split_exists(s - v, k - 1, v, values, _memo):
            out = True
            break
    _memo[key] = out
    return out


def _witness(n: int, t: int, cap: int, min_parts: int) -> tuple[int, ...] | None:
    """Deterministic witness: fewest parts first, then lexicographically
    largest sorted-descending, all parts <= cap with omega >= t."""
    values = frozenset(_admissible(n, t, cap))
    if not values:
        return None
    memo: dict = {}
    k = min_parts
    while k * 2 <= n and not _split_exists(n, k, cap, values, memo):
        k += 1
    if not _split_exists(n, k, cap, values, memo):
        return None
    parts = []
    s, bound = n, cap
    for j in range(k, 0, -1):
        for v in sorted((v for v in values if v <= min(s, bound)), reverse=True):
            if _split_exists(s - v, j - 1, v, values, memo):
                parts.append(v)
                s, bound = s - v, v
                break
        else:
            return None
    return tuple(parts)


def mpo_decompose(n: int, require_restriction_a: bool = False) -> Decomposition:
    """Witness decomposition at the largest achievable min-omega level.

    Without the restriction the witness may be a single part.  With it,
    the witness must have at least 3 parts, none reaching half of n; when
    no such witness exists at the top level, the best compliant lower
    level is returned (Decomposition.at_mpo is then False).
    """
    best_t = mpo_value(n)
    if not require_restriction_a:
        parts = _witness(n, best_t, cap=n, min_parts=1)
        assert parts is not None
        return Decomposition(n, parts, mpo=best_t)
    cap = (n - 1) // 2
    for t in range(best_t, 0, -1):
        parts = _witness(n, t, cap=cap, min_parts=3)
        if parts is not None:
            return Decomposition(n, parts, mpo=best_t)
    raise InfeasibleError(
        f"no decomposition of {n} with >= 3 parts below {n}/2 at any level"
    )


def available_with_min_csd(fs: FactorSet, min_csd: int) -> int:
    """Sequences usable from a family under a minimum cyclic-shift distance.

    Each of the family_size/(A_max - 1) shift subfamilies keeps
    floor((A_max - 1) / ceil(min_csd / family_csd)) members.
    """
    if min_csd < 1:
        raise DomainError(f"min_csd must be >= 1, got {min_csd}")
    a_max = max(fs.factors)
    per_subfamily = (a_max - 1) // -(-min_csd // fs.family_csd)
    return (fs.family_size // (a_max - 1)) * per_subfamily
