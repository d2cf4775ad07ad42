"""Admissible preproducts: construction, extension, bounds, enumeration.

A preproduct is a squarefree product of odd primes, none dividing the
discriminant, in which every prime's p - (d|p) is coprime to all the other
primes.  Those are exactly the products that can be completed to an
absolute Lucas pseudoprime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, NamedTuple, Sequence

from .arith import iroot, jacobi, jacobi_table, lcm_fold
from .sieve import Factorization, FactorizationWindow


class PrimeSign(NamedTuple):
    p: int
    delta: int  # jacobi(d, p), never 0 here
    p_minus_delta: int


class InadmissibleError(ValueError):
    """A prime list fails the admissibility rules.

    `index` is the 0-based position of the offending prime.
    """

    def __init__(self, index: int, reason: str):
        super().__init__(f"prime #{index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Preproduct:
    """Squarefree product of odd primes with per-prime Jacobi data.

    delta is the product of the per-prime signs (equal to (d|value)) and
    lam the lcm of the p_i - delta_i.  completion_factors, when present,
    is the factorization of value - delta used by the divisor method.
    """

    d: int
    value: int
    terms: tuple[PrimeSign, ...]
    delta: int
    lam: int
    completion_factors: Factorization | None = None

    @property
    def largest_prime(self) -> int:
        return self.terms[-1].p if self.terms else 1

    @property
    def prime_values(self) -> tuple[int, ...]:
        return tuple(t.p for t in self.terms)

    @classmethod
    def unit(cls, d: int) -> "Preproduct":
        """The empty product: value 1, sign +1, lambda 1."""
        return cls(d, 1, (), 1, 1)


def make_preproduct(
    primes: Sequence[int], d: int, *, completion_factors: Factorization | None = None
) -> Preproduct:
    """Build a preproduct from a strictly increasing prime list.

    Raises InadmissibleError (carrying the violating index) when a prime is
    even, divides d, or has p - delta sharing a factor with earlier primes.
    """
    if not primes:
        raise InadmissibleError(0, "need at least one prime")
    value = 1
    delta_p = 1
    last = 1
    terms = []
    for i, p in enumerate(primes):
        if p <= last:
            raise InadmissibleError(i, "primes must be strictly increasing")
        if p % 2 == 0:
            raise InadmissibleError(i, "primes must be odd")
        dlt = jacobi(d, p)
        if dlt == 0:
            raise InadmissibleError(i, "prime divides the discriminant")
        step = p - dlt
        if math.gcd(step, value) != 1:
            raise InadmissibleError(i, "p - delta shares a factor with earlier primes")
        terms.append(PrimeSign(p, dlt, step))
        value *= p
        delta_p *= dlt
        last = p
    lam = lcm_fold(t.p_minus_delta for t in terms)
    return Preproduct(d, value, tuple(terms), delta_p, lam, completion_factors)


def extend_admissible(pre: Preproduct, q: int) -> Preproduct:
    """Append the prime q > largest prime of pre, revalidating incrementally."""
    idx = len(pre.terms)
    if q <= pre.largest_prime:
        raise InadmissibleError(idx, "not larger than the existing primes")
    if q % 2 == 0:
        raise InadmissibleError(idx, "primes must be odd")
    dlt = jacobi(pre.d, q)
    if dlt == 0:
        raise InadmissibleError(idx, "prime divides the discriminant")
    step = q - dlt
    if math.gcd(step, pre.value) != 1:
        raise InadmissibleError(idx, "p - delta shares a factor with earlier primes")
    ext = try_extend(pre, q, dlt)
    assert ext is not None
    return ext


def try_extend(pre: Preproduct, q: int, dlt: int | None = None) -> Preproduct | None:
    """extend_admissible without the exception; None when inadmissible."""
    if q <= pre.largest_prime or q % 2 == 0:
        return None
    if dlt is None:
        dlt = jacobi(pre.d, q)
    if dlt == 0:
        return None
    step = q - dlt
    if math.gcd(step, pre.value) != 1:
        return None
    lam = pre.lam // math.gcd(pre.lam, step) * step
    return Preproduct(
        pre.d,
        pre.value * q,
        pre.terms + (PrimeSign(q, dlt, step),),
        pre.delta * dlt,
        lam,
    )


def bounds_admissible_limit(pre: Preproduct, bound: int, k: int, r: int) -> int:
    """Exclusive upper limit for the next prime when k - r primes remain.

    Returns the least t with pre.value * t**(k-r) >= bound: the next prime
    must stay strictly below t for the full product to stay under bound.
    Exact integer arithmetic; no floating-point acceptance.
    """
    if r >= k:
        raise ValueError("r must be below k")
    if bound <= pre.value:
        return 1
    return iroot((bound - 1) // pre.value, k - r) + 1


def enumerate_admissible(crossover: int, d: int) -> Iterator[Preproduct]:
    """Every admissible P (prime or composite) with 1 < P < crossover, ascending.

    Each yielded preproduct carries the factorization of P - delta_P, read
    off the same incremental window that decides admissibility.
    """
    if crossover < 2:
        raise ValueError("crossover must be >= 2")
    sign = jacobi_table(d)
    m4 = len(sign)
    win = FactorizationWindow(1)
    prev = next(win)
    cur = next(win)
    for nxt in win:
        n, fac = cur
        if n >= crossover:
            break
        if n % 2 == 1 and n >= 3:
            pre = _admissible_from_factors(n, fac, d, sign, m4)
            if pre is not None:
                neighbor = prev if pre.delta == 1 else nxt
                yield replace(pre, completion_factors=neighbor[1])
        prev, cur = cur, nxt


def _admissible_from_factors(
    n: int, fac: Factorization, d: int, sign, m4: int
) -> Preproduct | None:
    value = 1
    delta_p = 1
    lam = 1
    terms = []
    for p, e in fac:
        if e != 1:
            return None
        dlt = sign[p % m4]
        if dlt == 0:
            return None
        step = p - dlt
        if math.gcd(step, value) != 1:
            return None
        terms.append(PrimeSign(p, dlt, step))
        value *= p
        delta_p *= dlt
        lam = lam // math.gcd(lam, step) * step
    return Preproduct(d, n, tuple(terms), delta_p, lam)
