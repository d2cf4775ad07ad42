"""Exact integer arithmetic: Jacobi symbols, Lucas U-sequences, primality.

Everything here operates on plain Python integers, so no product of 64-bit
operands can silently wrap; 128-bit-safe semantics come for free.  All
functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

U64_LIMIT = 2**64

# Strong-pseudoprime witness sets: the first proves primality for every
# n < 2**32, the second for every n < 2**64.
_SPRP_BASES_32 = (2, 3, 5, 7, 11)
_SPRP_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class LcmOverflowError(OverflowError):
    """A folded lcm exceeded the 64-bit contract limit."""


def jacobi(d: int, n: int) -> int:
    """Jacobi symbol (d|n) for odd positive n.

    Returns 0 exactly when gcd(d, n) > 1, otherwise +1 or -1.
    Multiplicative in both arguments; d may be negative.
    """
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd n >= 1, got n={n}")
    a = d % n
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


@lru_cache(maxsize=32)
def jacobi_table(d: int) -> tuple[int, ...]:
    """(d|n) for odd n > 0 depends only on n mod 4|d|; tabulate that character.

    Returns t of length 4*|d| with t[n % len(t)] == jacobi(d, n) for every odd
    positive n.  Even indices are filled with 0 and never consulted.
    """
    if d == 0:
        raise ValueError("discriminant must be nonzero")
    m = 4 * abs(d)
    return tuple(jacobi(d, r) if r % 2 else 0 for r in range(m))


def is_discriminant(d: int) -> bool:
    """True iff d is 0 or 1 mod 4 and not a perfect square."""
    if d % 4 not in (0, 1):
        return False
    if d >= 0 and math.isqrt(d) ** 2 == d:
        return False
    return True


@dataclass(frozen=True, slots=True)
class LucasParams:
    """Parameters of a Lucas U-sequence with discriminant d = a*a - 4*b.

    a > 0 and gcd(a, b) = 1; the sequence itself is never materialized,
    only evaluated modulo some m.
    """

    a: int
    b: int
    d: int

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("a must be positive")
        if math.gcd(self.a, self.b) != 1:
            raise ValueError("a and b must be coprime")
        if self.d != self.a * self.a - 4 * self.b:
            raise ValueError("discriminant mismatch: d != a^2 - 4b")

    @classmethod
    def from_ab(cls, a: int, b: int) -> "LucasParams":
        return cls(a, b, a * a - 4 * b)


def lucas_u_mod(params: LucasParams, n: int, m: int) -> int:
    """U_n(a, b) mod m by binary index doubling.

    Walks the bits of n with the pair (U_k, U_{k+1}) and
        U_{2k}   = U_k * (2*U_{k+1} - a*U_k)
        U_{2k+1} = U_{k+1}^2 - b*U_k^2
    so no modular division is needed and any modulus m >= 2 works.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if n < 0:
        raise ValueError("sequence index must be nonnegative")
    if n == 0:
        return 0
    a = params.a % m
    b = params.b % m
    u, v = 0, 1  # (U_0, U_1)
    for bit in bin(n)[2:]:
        u2 = u * (2 * v - a * u) % m
        v2 = (v * v - b * u * u) % m
        if bit == "1":
            u, v = v2, (a * v2 - b * u2) % m
        else:
            u, v = u2, v2
    return u


def is_prime(n: int) -> bool:
    """Deterministic primality test for positive n < 2**64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n >= U64_LIMIT:
        raise ValueError("is_prime is only deterministic below 2**64")
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    bases = _SPRP_BASES_32 if n < 2**32 else _SPRP_BASES_64
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def lcm_fold(values) -> int:
    """Least common multiple of a nonempty iterable of positive integers.

    Raises LcmOverflowError once the running lcm reaches 2**64; callers treat
    that as "lambda too large to matter" (at most one completion candidate).
    """
    acc = 1
    count = 0
    for v in values:
        count += 1
        if v <= 0:
            raise ValueError("lcm_fold needs positive integers")
        acc = acc // math.gcd(acc, v) * v
        if acc >= U64_LIMIT:
            raise LcmOverflowError("lcm exceeds 2**64")
    if count == 0:
        raise ValueError("lcm_fold needs at least one value")
    return acc


def iroot(n: int, k: int) -> int:
    """Largest r >= 0 with r**k <= n, by integer Newton iteration.

    Exact for arbitrarily large n; the result is verified by re-powering.
    """
    if n < 0:
        raise ValueError("iroot needs n >= 0")
    if k < 1:
        raise ValueError("iroot needs k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    if n >> k == 0:  # n < 2**k means the root is 1
        return 1
    r = 1 << -(-n.bit_length() // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
