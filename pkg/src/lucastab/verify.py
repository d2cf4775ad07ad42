"""Independent correctness oracles: the Korselt-style divisibility check,
brute-force tabulation by trial division, and direct Lucas-sequence spot
checks with random parameters."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .arith import LucasParams, jacobi, jacobi_table, lucas_u_mod
from .sieve import _flag_sieve, primes_up_to

BRUTE_FORCE_LIMIT = 10**7
DEFAULT_SPOTCHECK_SEED = 101


@dataclass(frozen=True, slots=True)
class PseudoprimeRecord:
    """A tabulated composite n with its ordered prime factorization."""

    n: int
    factors: tuple[int, ...]
    k: int
    d: int
    delta_n: int

    @classmethod
    def from_factors(cls, factors, d: int) -> "PseudoprimeRecord":
        fs = tuple(factors)
        if len(fs) < 2:
            raise ValueError("need at least two prime factors")
        n = 1
        delta = 1
        last = 1
        for p in fs:
            if p <= last:
                raise ValueError("factors must be strictly increasing")
            if p % 2 == 0:
                raise ValueError("factors must be odd")
            n *= p
            delta *= jacobi(d, p)
            last = p
        return cls(n, fs, len(fs), d, delta)


def williams_check(factors, d: int) -> bool:
    """True iff the factors are distinct odd primes, none divides d, and
    (p - (d|p)) divides (n - (d|n)) for every factor p of n = prod(factors)."""
    fs = list(factors)
    if len(fs) < 2:
        return False
    n = 1
    seen = set()
    for p in fs:
        if p < 3 or p % 2 == 0 or p in seen:
            return False
        seen.add(p)
        n *= p
    delta_n = 1
    steps = []
    for p in fs:
        dlt = jacobi(d, p)
        if dlt == 0:
            return False
        delta_n *= dlt
        steps.append(p - dlt)
    target = n - delta_n
    return all(target % s == 0 for s in steps)


def brute_force_tabulate(bound: int, d: int) -> list[PseudoprimeRecord]:
    """Every record with n <= bound, by trial division over all odd composites.

    Wholly independent of the search pipeline; capped at bound <= 10**7.
    """
    if bound > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_LIMIT}")
    if bound < 9:
        return []
    table = primes_up_to(max(3, math.isqrt(bound)))
    odd_primes = [p for p in table.primes if p > 2]
    flags = _flag_sieve(bound)
    sign = jacobi_table(d)
    m4 = len(sign)
    ad = abs(d)
    out = []
    for n in range(9, bound + 1, 2):
        if flags[n] or math.gcd(n, ad) != 1:
            continue
        delta_n = sign[n % m4]
        target = n - delta_n
        rest = n
        facs = []
        ok = True
        for p in odd_primes:
            if p * p > rest:
                break
            if rest % p:
                continue
            rest //= p
            if rest % p == 0:
                ok = False  # squared factor
                break
            if target % (p - sign[p % m4]):
                ok = False
                break
            facs.append(p)
        if not ok:
            continue
        if rest > 1:
            if target % (rest - sign[rest % m4]):
                continue
            facs.append(rest)
        if len(facs) >= 2:
            out.append(PseudoprimeRecord(n, tuple(facs), len(facs), d, delta_n))
    return out


def lucas_spotcheck(
    record: PseudoprimeRecord, trials: int, *, seed: int = DEFAULT_SPOTCHECK_SEED
) -> bool:
    """Evaluate U_{n - delta_n}(a, b) mod n for `trials` random parameter pairs.

    Draws a with a*a = d (mod 4) and sets b = (a*a - d)/4.  Draws with
    gcd(n, d*b) > 1 or gcd(a, b) > 1 are skipped, not failed.  Returns True
    iff every completed trial lands on 0.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    n = record.n
    d = record.d
    target = n - record.delta_n
    done = 0
    attempts = 0
    while done < trials:
        attempts += 1
        if attempts > 64 * trials + 256:
            raise RuntimeError("could not draw enough valid Lucas parameters")
        t = rng.randrange(1, 1 << 20)
        a = 2 * t + 1 if d % 2 else 2 * t
        b = (a * a - d) // 4
        if math.gcd(n, d * b) != 1 or math.gcd(a, b) != 1:
            continue
        done += 1
        if lucas_u_mod(LucasParams(a, b, d), target, n) != 0:
            return False
    return True
