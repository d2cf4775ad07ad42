"""Prime generation, incremental factorization windows, twin pairs, APs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .arith import jacobi

Factorization = tuple[tuple[int, int], ...]

DEFAULT_SIEVE_BUDGET = 2**32


def _flag_sieve(bound: int) -> bytearray:
    """Primality flags for [0, bound]."""
    flags = bytearray([1]) * (bound + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            start = p * p
            flags[start :: p] = b"\x00" * ((bound - start) // p + 1)
    return flags


@dataclass(frozen=True, slots=True)
class PrimeTable:
    """All primes <= bound, sorted ascending."""

    bound: int
    primes: tuple[int, ...]


def primes_up_to(bound: int, *, budget: int = DEFAULT_SIEVE_BUDGET) -> PrimeTable:
    """Sieve of Eratosthenes packed into a PrimeTable.

    Bounds past `budget` (default 2**32) are refused before any allocation.
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    if bound > budget:
        raise ValueError(f"sieve bound {bound} exceeds memory budget {budget}")
    flags = _flag_sieve(bound)
    return PrimeTable(bound, tuple(i for i in range(2, bound + 1) if flags[i]))


def iter_primes(lo: int, hi: int) -> Iterator[int]:
    """Primes in [lo, hi] via a segmented sieve using O(sqrt(hi)) memory."""
    if hi < 2 or hi < lo:
        return
    lo = max(lo, 2)
    root = math.isqrt(hi)
    base_flags = _flag_sieve(root)
    base = [p for p in range(2, root + 1) if base_flags[p]]
    if lo <= root:
        for p in base:
            if lo <= p <= hi:
                yield p
        lo = root + 1
    seg = max(1 << 16, root)
    for seg_lo in range(lo, hi + 1, seg):
        seg_hi = min(seg_lo + seg - 1, hi)
        flags = bytearray([1]) * (seg_hi - seg_lo + 1)
        for p in base:
            start = max(p * p, (seg_lo + p - 1) // p * p)
            if start > seg_hi:
                continue
            flags[start - seg_lo :: p] = b"\x00" * ((seg_hi - start) // p + 1)
        for i, f in enumerate(flags):
            if f:
                yield seg_lo + i


class FactorizationWindow:
    """Iterator of (n, factors) for consecutive n with O(sqrt(n)) live state.

    `factors` is a tuple of (prime, exponent) pairs in increasing prime
    order, empty for n = 1.  Windows are cheap to build; the intended use is
    a fresh window per preproduct.
    """

    def __init__(self, start: int = 1):
        if start < 1:
            raise ValueError("window must start at 1 or above")
        self._pos = start
        self._seg: list[Factorization] = []
        self._seg_base = start
        self._primes: list[int] = []
        self._prime_bound = 1

    @property
    def position(self) -> int:
        """The next integer the window will yield."""
        return self._pos

    @property
    def live_entries(self) -> int:
        """Buffered factorizations plus cached sieving primes (space gauge)."""
        return len(self._seg) + len(self._primes)

    def __iter__(self) -> "FactorizationWindow":
        return self

    def __next__(self) -> tuple[int, Factorization]:
        idx = self._pos - self._seg_base
        if idx >= len(self._seg):
            self._refill()
            idx = 0
        out = (self._pos, self._seg[idx])
        self._pos += 1
        return out

    def _refill(self) -> None:
        lo = self._pos
        size = max(256, math.isqrt(lo))
        hi = lo + size  # exclusive
        top = math.isqrt(hi - 1)
        if top > self._prime_bound:
            flags = _flag_sieve(top)
            self._primes = [p for p in range(2, top + 1) if flags[p]]
            self._prime_bound = top
        residual = list(range(lo, hi))
        factors: list[list[tuple[int, int]]] = [[] for _ in range(size)]
        for p in self._primes:
            if p * p > hi - 1:
                break
            first = (lo + p - 1) // p * p
            for m in range(first, hi, p):
                i = m - lo
                v = residual[i]
                e = 0
                while v % p == 0:
                    v //= p
                    e += 1
                residual[i] = v
                factors[i].append((p, e))
        for i, v in enumerate(residual):
            if v > 1:
                factors[i].append((v, 1))
        self._seg = [tuple(f) for f in factors]
        self._seg_base = lo


def next_factored(window: FactorizationWindow) -> tuple[int, Factorization]:
    """Advance the window by one integer and return (n, factors)."""
    return next(window)


def trial_factorize(n: int) -> Factorization:
    """Factor n >= 1 by trial division."""
    if n < 1:
        raise ValueError("trial_factorize needs n >= 1")
    out = []
    v = n
    p = 2
    while p * p <= v:
        if v % p == 0:
            e = 0
            while v % p == 0:
                v //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if v > 1:
        out.append((v, 1))
    return tuple(out)


def twin_pairs(d: int, bound: int) -> Iterator[tuple[int, int]]:
    """Twin-prime pairs (p, p+2) with p*(p+2) <= bound whose Jacobi signs
    are (d|p) = -1 and (d|p+2) = +1, in increasing order."""
    p_max = math.isqrt(bound + 1) - 1
    if p_max < 3:
        return
    prev = 0
    for q in iter_primes(3, p_max + 2):
        if q - prev == 2 and prev <= p_max:
            if jacobi(d, prev) == -1 and jacobi(d, q) == 1:
                yield (prev, q)
        prev = q


def ap_candidates(residue: int, modulus: int, lo: int, hi: int) -> Iterator[int]:
    """All x in [lo, hi] with x = residue (mod modulus), ascending."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    if not 0 <= residue < modulus:
        raise ValueError("need 0 <= residue < modulus")
    first = lo + (residue - lo) % modulus
    yield from range(first, hi + 1, modulus)
