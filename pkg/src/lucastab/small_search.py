"""Completion search for preproducts below the crossover.

Given an admissible P, find all prime pairs q < r with n = P*q*r a
pseudoprime and n <= bound.  Two enumeration strategies exist: the interval
method walks every C with C*D near P**2, the divisor method walks divisors
of (P - delta_P)*(P +- D).  The hybrid picks, per D, whichever forms fewer
candidate evaluations.  All three return identical record sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import is_prime, jacobi
from .preproduct import Preproduct
from .sieve import FactorizationWindow, trial_factorize
from .verify import PseudoprimeRecord

# int64 intermediates reach ~3 * P**3 in the vector filters; stay exact.
_VEC_P_LIMIT = 1_000_000
_CHUNK = 1 << 19
_BIG_RANGE = 1 << 14


@dataclass
class SearchStats:
    """Work counters; merged associatively across workers."""

    cd_pairs: int = 0
    ddelta_pairs: int = 0
    primality_tests: int = 0
    outputs: int = 0
    completion_candidates: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.cd_pairs += other.cd_pairs
        self.ddelta_pairs += other.ddelta_pairs
        self.primality_tests += other.primality_tests
        self.outputs += other.outputs
        self.completion_candidates += other.completion_candidates


class PairRejected(Exception):
    """A candidate pair failed a completion check.

    reason is one of: non_integral, bound, sign_mismatch, criterion, composite.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True, slots=True)
class CandidatePair:
    """Witness integers with delta = c*d - P**2 and 1 <= d < P < c.

    Here d is the small witness cofactor, not the Lucas discriminant; the
    signs are the Jacobi symbols the completion primes q and r must carry.
    """

    c: int
    d: int
    delta: int
    sign_q: int
    sign_r: int


def complete_from_pair(
    pre: Preproduct,
    pair: CandidatePair,
    bound: int,
    stats: SearchStats | None = None,
) -> PseudoprimeRecord:
    """Resolve a pair to the record for n = P*q*r, or raise PairRejected.

    Check order: integrality, then size/ordering bounds, Jacobi sign
    consistency, the Korselt-style divisibility, and primality last.
    """
    pv = pre.value
    if not 1 <= pair.d < pv < pair.c:
        raise ValueError("pair must satisfy 1 <= d < P < c")
    delta = pair.delta
    if delta == 0 or delta != pair.c * pair.d - pv * pv:
        raise ValueError("pair.delta inconsistent with c*d - P**2")
    sq, sr = pair.sign_q, pair.sign_r
    a = pv - pre.delta
    qnum = a * (sq * pv + sr * pair.d)
    if qnum % delta:
        raise PairRejected("non_integral")
    qm1 = qnum // delta  # q - sign_q
    if qm1 <= 0:
        raise PairRejected("non_integral")
    rnum = a * (sr * pv + sq * pair.c)
    if rnum % delta:
        raise PairRejected("non_integral")
    rm1 = rnum // delta  # r - sign_r
    if rm1 <= 0:
        raise PairRejected("non_integral")
    q = qm1 + sq
    r = rm1 + sr
    if q <= pre.largest_prime or r <= q:
        raise PairRejected("bound")
    n = pv * q * r
    if n > bound:
        raise PairRejected("bound")
    if q % 2 == 0 or r % 2 == 0:
        raise PairRejected("composite")  # evens are never odd primes; pre-Jacobi
    if jacobi(pre.d, q) != sq or jacobi(pre.d, r) != sr:
        raise PairRejected("sign_mismatch")
    target = n - pre.delta * sq * sr
    if target % pre.lam or target % qm1 or target % rm1:
        raise PairRejected("criterion")
    if stats is not None:
        stats.primality_tests += 1
    if not is_prime(q):
        raise PairRejected("composite")
    if stats is not None:
        stats.primality_tests += 1
    if not is_prime(r):
        raise PairRejected("composite")
    record = PseudoprimeRecord.from_factors(pre.prime_values + (q, r), pre.d)
    if stats is not None:
        stats.outputs += 1
    return record


def cd_search(pre: Preproduct, bound: int, stats: SearchStats) -> list[PseudoprimeRecord]:
    """Interval method: for every D walk all C with C*D inside the window
    around P**2, testing both completion-sign cases per pair."""
    _require_searchable(pre)
    records: list[PseudoprimeRecord] = []
    _scan_cd(pre, bound, stats, None, records)
    records.sort(key=lambda rec: rec.n)
    return records


def ddelta_search(pre: Preproduct, bound: int, stats: SearchStats) -> list[PseudoprimeRecord]:
    """Divisor method: for every D enumerate divisors of (P - delta_P)*(P +- D)
    as candidate deltas, reconstructing C = (P**2 + delta)/D."""
    _require_searchable(pre)
    records: list[PseudoprimeRecord] = []
    _scan_dd(pre, bound, stats, None, records)
    records.sort(key=lambda rec: rec.n)
    return records


def hybrid_search(pre: Preproduct, bound: int, stats: SearchStats) -> list[PseudoprimeRecord]:
    """Per D, run whichever loop needs fewer candidate evaluations.

    A (C, D) pair costs two evaluations (both sign_r cases); a (D, delta)
    pair costs one.  Divisor counts are taken exactly from a first window
    pass, so the per-D choice realizes the true minimum.
    """
    _require_searchable(pre)
    pv = pre.value
    pl = pre.largest_prime
    a_exp = dict(_completion_factors(pre))
    tau_a = 1
    for e in a_exp.values():
        tau_a *= e + 1
    tau = np.zeros(2 * pv, dtype=np.int64)
    win = FactorizationWindow(1)
    for m, fac in win:
        if m >= 2 * pv:
            break
        tau[m] = _tau_product(a_exp, tau_a, fac)
    ds = np.arange(1, pv, dtype=np.int64)
    dd_cost = 2 * (tau[pv - ds] + tau[pv + ds])
    los, his = _c_bounds(pv, pl, ds)
    cd_len = np.clip(his - los + 1, 0, None)
    use_dd = dd_cost <= 2 * cd_len
    want = np.zeros(pv, dtype=bool)
    want[1:] = use_dd
    records: list[PseudoprimeRecord] = []
    _scan_dd(pre, bound, stats, want, records)
    _scan_cd(pre, bound, stats, ds[~use_dd], records)
    records.sort(key=lambda rec: rec.n)
    return records


def cd_pair_count(pre: Preproduct) -> int:
    """Number of (C, D) pairs cd_search would form, summed analytically."""
    _require_searchable(pre)
    ds = np.arange(1, pre.value, dtype=np.int64)
    los, his = _c_bounds(pre.value, pre.largest_prime, ds)
    return int(np.clip(his - los + 1, 0, None).sum())


def _require_searchable(pre: Preproduct) -> None:
    if not pre.terms:
        raise ValueError("completion search needs P > 1")
    if pre.value > _VEC_P_LIMIT:
        raise ValueError(f"preproduct above vector-scan limit {_VEC_P_LIMIT}")


def _completion_factors(pre: Preproduct):
    if pre.completion_factors is not None:
        return pre.completion_factors
    return trial_factorize(pre.value - pre.delta)


def _c_bounds(pv: int, pl: int, ds):
    """Inclusive C range per D: P < C and (pl-1)P^2-2P < C*D*(pl+1) < (pl+3)P^2+2P."""
    num_l = (pl - 1) * pv * pv - 2 * pv
    num_u = (pl + 3) * pv * pv + 2 * pv
    den = (pl + 1) * ds
    los = np.maximum(pv + 1, num_l // den + 1)
    his = (num_u - 1) // den
    return los, his


def _scan_cd(pre, bound, stats, ds_values, records) -> None:
    pv = pre.value
    pl = pre.largest_prime
    if ds_values is None:
        ds_values = np.arange(1, pv, dtype=np.int64)
    if ds_values.size == 0:
        return
    los, his = _c_bounds(pv, pl, ds_values)
    lens = np.clip(his - los + 1, 0, None)
    stats.cd_pairs += int(lens.sum())
    big = lens > _BIG_RANGE
    for i in np.nonzero(big)[0]:
        ds = int(ds_values[i])
        lo, hi = int(los[i]), int(his[i])
        for base in range(lo, hi + 1, _CHUNK):
            c = np.arange(base, min(hi, base + _CHUNK - 1) + 1, dtype=np.int64)
            _cd_filter_flat(pre, bound, stats, c, ds, records)
    small = np.nonzero(~big & (lens > 0))[0]
    if small.size == 0:
        return
    cums = np.cumsum(lens[small])
    start = 0
    base_cum = 0
    while start < small.size:
        end = int(np.searchsorted(cums, base_cum + _CHUNK, side="right"))
        end = max(end, start + 1)
        idx = small[start:end]
        l = lens[idx]
        offs = np.cumsum(l) - l
        flat_c = np.arange(int(l.sum()), dtype=np.int64) - np.repeat(offs, l) + np.repeat(los[idx], l)
        flat_d = np.repeat(ds_values[idx], l)
        _cd_filter_flat(pre, bound, stats, flat_c, flat_d, records)
        base_cum = int(cums[end - 1])
        start = end


def _cd_filter_flat(pre, bound, stats, c, dsm, records) -> None:
    """Test every (C, D) element; dsm may be a scalar or an array."""
    pv = pre.value
    a = pv - pre.delta
    pl = pre.largest_prime
    delta = c * dsm - pv * pv
    s = np.sign(delta)
    t = np.abs(delta)
    ts = np.where(t == 0, 1, t)
    live = s != 0
    bound_hi = float(bound) * (1.0 + 1e-9)
    for sr in (1, -1):
        qmag = a * (pv + (s * sr) * dsm)
        idx = np.nonzero(live & (qmag % ts == 0))[0]
        if idx.size == 0:
            continue
        t1 = ts[idx]
        s1 = s[idx]
        c1 = c[idx]
        q = qmag[idx] // t1 + s1
        keep = q > pl
        rmag = a * (c1 + (s1 * sr) * pv)
        keep &= rmag % t1 == 0
        r = rmag // t1 + sr
        keep &= r > q
        keep &= float(pv) * (q.astype(np.float64) * r.astype(np.float64)) <= bound_hi
        if not keep.any():
            continue
        d1 = dsm[idx] if isinstance(dsm, np.ndarray) else np.full(idx.shape, dsm, dtype=np.int64)
        for j in np.nonzero(keep)[0]:
            pair = CandidatePair(
                int(c1[j]), int(d1[j]), int(s1[j] * t1[j]), int(s1[j]), sr
            )
            try:
                records.append(complete_from_pair(pre, pair, bound, stats))
            except PairRejected:
                pass


def _scan_dd(pre, bound, stats, want, records) -> None:
    """want: None for every D, else a bool array (indexed by D) choosing
    which D run the divisor loop."""
    pv = pre.value
    a_exp = dict(_completion_factors(pre))
    buf_t: list[int] = []
    buf_d: list[int] = []
    buf_len: list[int] = []
    buf_low: list[bool] = []
    win = FactorizationWindow(1)
    for m, fac in win:
        if m >= 2 * pv:
            break
        if m == pv:
            continue
        low = m < pv
        dsm = pv - m if low else m - pv
        if want is not None and not want[dsm]:
            continue
        divs = _merged_divisors(a_exp, fac)
        stats.ddelta_pairs += 2 * len(divs)
        buf_t.extend(divs)
        buf_d.append(dsm)
        buf_len.append(len(divs))
        buf_low.append(low)
        if len(buf_t) >= _CHUNK:
            _dd_filter_flat(pre, bound, stats, buf_t, buf_d, buf_len, buf_low, records)
            buf_t, buf_d, buf_len, buf_low = [], [], [], []
    if buf_t:
        _dd_filter_flat(pre, bound, stats, buf_t, buf_d, buf_len, buf_low, records)


def _dd_filter_flat(pre, bound, stats, buf_t, buf_d, buf_len, buf_low, records) -> None:
    pv = pre.value
    a = pv - pre.delta
    pl = pre.largest_prime
    t = np.array(buf_t, dtype=np.int64)
    lens = np.array(buf_len)
    dsm = np.repeat(np.array(buf_d, dtype=np.int64), lens)
    low = np.repeat(np.array(buf_low, dtype=bool), lens)
    qmag = a * np.where(low, pv - dsm, pv + dsm)  # t divides this exactly
    p2 = pv * pv
    bound_hi = float(bound) * (1.0 + 1e-9)
    for s in (1, -1):
        cnum = p2 + s * t
        idx = np.nonzero(cnum % dsm == 0)[0]
        if idx.size == 0:
            continue
        c = cnum[idx] // dsm[idx]
        keep = c > pv
        t1 = t[idx]
        sr1 = np.where(low[idx], -s, s)
        q = qmag[idx] // t1 + s
        keep &= q > pl
        rmag = a * (c + (s * sr1) * pv)
        keep &= rmag % t1 == 0
        r = rmag // t1 + sr1
        keep &= r > q
        keep &= float(pv) * (q.astype(np.float64) * r.astype(np.float64)) <= bound_hi
        for j in np.nonzero(keep)[0]:
            i = idx[j]
            pair = CandidatePair(
                int(c[j]), int(dsm[i]), int(s * t1[j]), s, int(sr1[j])
            )
            try:
                records.append(complete_from_pair(pre, pair, bound, stats))
            except PairRejected:
                pass


def _merged_divisors(a_exp: dict[int, int], mfac) -> list[int]:
    """All divisors of A*m from A's exponent map and m's factorization."""
    merged = dict(a_exp)
    for p, e in mfac:
        merged[p] = merged.get(p, 0) + e
    divs = [1]
    for p, e in merged.items():
        base = divs
        out = base[:]
        pk = 1
        for _ in range(e):
            pk *= p
            out.extend(v * pk for v in base)
        divs = out
    return divs


def _tau_product(a_exp: dict[int, int], tau_a: int, mfac) -> int:
    """Divisor count of A*m given tau(A) and m's factorization."""
    t = tau_a
    for p, e in mfac:
        ea = a_exp.get(p, 0)
        if ea:
            t = t // (ea + 1) * (e + ea + 1)
        else:
            t *= e + 1
    return t
