"""Chain enumeration above the crossover and final-prime completion.

For k >= 4, walk admissible chains p_1 < ... < p_{k-1} whose first k-2
primes already multiply to at least the crossover, keeping every prime
below its finiteness limit; then complete each chain with the last prime
along two arithmetic progressions mod lambda.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterator

from .arith import is_prime, jacobi_table
from .preproduct import Preproduct, bounds_admissible_limit, try_extend
from .sieve import PrimeTable, ap_candidates
from .small_search import SearchStats
from .verify import PseudoprimeRecord


@dataclass(slots=True)
class ChainFrame:
    """One depth-first level: a partial chain plus its prime-table cursor."""

    preproduct: Preproduct
    cursor: int  # next index to try in the prime table
    limit: int  # one past the last admissible index at this depth


def enumerate_large(
    d: int, k: int, crossover: int, bound: int, primes: PrimeTable
) -> Iterator[Preproduct]:
    """Yield every admissible chain of k-1 primes with P_{k-2} >= crossover.

    Each prime stays below its finiteness limit, so every chain can still be
    completed to some n <= bound.  One recursion serves every k.
    """
    if k < 4:
        raise ValueError("the large case starts at k = 4")
    if crossover**3 < bound:
        raise ValueError("crossover must be at least bound ** (1/3)")
    if primes.bound < math.isqrt(bound // crossover):
        raise ValueError(f"prime table must cover [1, sqrt(bound/crossover))")
    sign = jacobi_table(d)
    m4 = len(sign)
    plist = primes.primes

    def frame_for(pre: Preproduct, depth: int) -> ChainFrame:
        limit = bounds_admissible_limit(pre, bound, k, depth)
        return ChainFrame(
            pre,
            bisect_right(plist, pre.largest_prime),
            bisect_left(plist, limit),
        )

    stack = [frame_for(Preproduct.unit(d), 0)]
    while stack:
        frame = stack[-1]
        if frame.cursor >= frame.limit:
            stack.pop()
            continue
        q = plist[frame.cursor]
        frame.cursor += 1
        dlt = sign[q % m4]
        if dlt == 0:
            continue
        child = try_extend(frame.preproduct, q, dlt)
        if child is None:
            continue
        depth = len(stack)  # number of primes in child
        if depth == k - 2 and child.value < crossover:
            continue
        if depth == k - 1:
            yield child
        else:
            stack.append(frame_for(child, depth))


def complete_with_pk(
    pre: Preproduct, bound: int, stats: SearchStats | None = None
) -> list[PseudoprimeRecord]:
    """All primes p completing pre to n = P*p <= bound.

    Candidates run along p = delta_P * sign * P**(-1) (mod lambda) for both
    signs, over (largest prime of P, min(bound/P, P - delta_P + 1)]; each is
    accepted only if p - sign divides P - delta_P, the Jacobi symbol matches,
    p is prime, and the full divisibility criterion holds for n.
    """
    pv = pre.value
    lam = pre.lam
    lo = pre.largest_prime + 1
    hi = min(bound // pv, pv - pre.delta + 1)
    if hi < lo:
        return []
    inv = pow(pv, -1, lam)
    sign = jacobi_table(pre.d)
    m4 = len(sign)
    a = pv - pre.delta
    out = []
    seen = set()
    for dlt in (1, -1):
        res = pre.delta * dlt * inv % lam
        if res in seen:
            continue
        seen.add(res)
        for x in ap_candidates(res, lam, lo, hi):
            if stats is not None:
                stats.completion_candidates += 1
            if a % (x - dlt):
                continue
            if sign[x % m4] != dlt:
                continue
            if stats is not None:
                stats.primality_tests += 1
            if not is_prime(x):
                continue
            rec = PseudoprimeRecord.from_factors(pre.prime_values + (x,), pre.d)
            target = rec.n - rec.delta_n
            if target % lam or target % (x - dlt):
                continue  # unreachable by construction; kept as a real check
            if stats is not None:
                stats.outputs += 1
            out.append(rec)
    out.sort(key=lambda rec: rec.n)
    return out


def candidate_budget(pre: Preproduct, bound: int) -> int:
    """min(ceil((P - delta)/lambda), ceil(bound/(P*lambda))).

    complete_with_pk examines at most twice this many candidates (one
    progression per sign).
    """
    a = pre.value - pre.delta
    lam = pre.lam
    first = -(-a // lam)
    second = -(-bound // (pre.value * lam))
    return min(first, second)
