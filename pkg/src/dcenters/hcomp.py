"""H-compositions and the counting formulas built on them.

An H-composition of ``n`` is an ordered composition ``a1 + ... + ar = n``
whose first part is a maximum.  Its multiplicity is the number of later
parts equal to ``a1``.  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, gcd
from typing import Iterator, Optional


class EmptyInputError(ValueError):
    """Raised when asked to enumerate compositions of zero."""


@dataclass(frozen=True)
class HComposition:
    parts: tuple[int, ...]
    n: int = field(init=False)
    r: int = field(init=False)
    omega: int = field(init=False)

    def __post_init__(self) -> None:
        parts = tuple(int(a) for a in self.parts)
        if not parts:
            raise ValueError("an H-composition needs at least one part")
        if any(a < 1 for a in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a > parts[0] for a in parts):
            raise ValueError(f"first part is not maximal: {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "n", sum(parts))
        object.__setattr__(self, "r", len(parts))
        object.__setattr__(self, "omega", sum(1 for a in parts[1:] if a == parts[0]))

    @property
    def first(self) -> int:
        return self.parts[0]

    def __str__(self) -> str:
        return "+".join(map(str, self.parts))


@dataclass(frozen=True)
class RenormalizationData:
    r_prime: int
    n_prime: int
    w_prime: int


def _bounded_tails(total: int, cap: int) -> Iterator[tuple[int, ...]]:
    # compositions of `total` with parts <= cap, descending lexicographic
    if total == 0:
        yield ()
        return
    for a in range(min(cap, total), 0, -1):
        for rest in _bounded_tails(total - a, cap):
            yield (a,) + rest


def iter_hcompositions(n: int) -> Iterator[HComposition]:
    """Stream H(n) in descending lexicographic order of the parts.

    This is the order in which H(5) is usually listed:
    5, 4+1, 3+2, 3+1+1, 2+2+1, 2+1+2, 2+1+1+1, 1+1+1+1+1.
    """
    if n < 1:
        raise EmptyInputError(f"n must be positive, got {n}")
    for first in range(n, 0, -1):
        for tail in _bounded_tails(n - first, first):
            yield HComposition((first,) + tail)


def enumerate_hcompositions(n: int) -> list[HComposition]:
    return list(iter_hcompositions(n))


def multiplicity(P: HComposition) -> int:
    return P.omega


def totient(m: int) -> int:
    """Euler's phi by trial-division factorisation."""
    if m < 1:
        raise ValueError(f"totient is defined for m >= 1, got {m}")
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def term_value(P: HComposition, d: int) -> int:
    # Python's 0**0 == 1, which is the convention we want
    return totient(P.first) * (d - 1) ** (P.r - P.omega) * d ** P.omega


def identity_check(n: int, d: int) -> tuple[int, int, bool]:
    lhs = sum(term_value(P, d) for P in iter_hcompositions(n))
    rhs = d**n - 1
    return lhs, rhs, lhs == rhs


def count_bounded_compositions(n: int, b: int, s: int) -> int:
    """Number of ordered b-tuples of parts in [1, s] summing to n.

    ``s = 0`` is accepted (no parts allowed), so only the empty composition
    of 0 is counted.
    """
    if n < 0 or b < 0 or s < 0:
        return 0
    return _bounded_dp(n, b, s)


@lru_cache(maxsize=None)
def _bounded_dp(n: int, b: int, s: int) -> int:
    if b == 0:
        return 1 if n == 0 else 0
    if n < b or n > b * s:
        return 0
    # ways[t] = compositions of t using the parts placed so far
    ways = [1] + [0] * n
    for _ in range(b):
        nxt = [0] * (n + 1)
        for t, w in enumerate(ways):
            if w:
                for a in range(1, min(s, n - t) + 1):
                    nxt[t + a] += w
        ways = nxt
    return ways[n]


def count_hcomps_by(m: int, w: int, r: int, n: int) -> int:
    """H-compositions of n with first part m, multiplicity w and r parts."""
    if m < 1 or w < 0 or r < w + 1:
        return 0
    rest = n - (w + 1) * m
    if rest < 0:
        return 0
    return comb(r - 1, w) * count_bounded_compositions(rest, r - w - 1, m - 1)


def block_period(seq: tuple) -> int:
    """Smallest p dividing len(seq) such that seq is its first p items repeated."""
    r = len(seq)
    for p in range(1, r + 1):
        if r % p == 0 and seq == seq[:p] * (r // p):
            return p
    return r


def renormalization_split(P: HComposition) -> Optional[RenormalizationData]:
    rp = block_period(P.parts)
    if rp == P.r:
        return None
    block = HComposition(P.parts[:rp])
    return RenormalizationData(r_prime=rp, n_prime=block.n, w_prime=block.omega)


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def rotation_numerators(q: int) -> list[int]:
    return [p for p in range(1, q) if gcd(p, q) == 1]
