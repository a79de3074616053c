"""The set E(N) of integers <= N that are covering numbers of some ring.

Every such integer is the covering number of a sigma-elementary ring, and those
come in four parameter families:

    F1  q + 1                                   (idealizations, A(1, q1, q2))
    F2  tau(q) nu(q) + d C(tau(q), 2)           (field sums)
    F3  sigma(M_n(q)), n >= 2                   (matrix rings)
    F4  q1^(nd) + C(n, d)_q1 + omega(d)         (A-rings with n >= 3)

Membership is kept in a packed little-endian bit array (N/8 bytes).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

import numpy as np

from .arith import (
    PrimePower,
    is_prime_power,
    omega,
    prime_powers_upto,
    primes_upto,
    qbinom,
    smallest_prime_divisor,
)
from .formulas import matrix_product_term, sigma_field_sum, sigma_matrix

FAMILIES = ("F1", "F2", "F3", "F4")
FAMILY_NAMES = {"F1": "idealization", "F2": "field_sum", "F3": "matrix", "F4": "a_ring"}
SEGMENT = 1 << 22
DEFAULT_MAX_N = 4 * 10**9


class MemoryCap(ValueError):
    pass


# ------------------------------------------------------------ cutoffs and parameter streams


def field_sum_qcap(N: int) -> int:
    """Beyond this q every field-sum value exceeds N.

    Uses tau(q) - 1 >= q/(2d) (valid for q >= 256), so the value is at least
    (q / (2 log2 q))^2 / 2, which increases with q.
    """

    def low(q):
        return (q / (2 * math.log2(q))) ** 2 / 2

    hi = 256
    while low(hi) <= N:
        hi *= 2
    lo = max(hi // 2, 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if low(mid) > N:
            hi = mid
        else:
            lo = mid + 1
    return max(256, hi)


def field_sum_params(N: int, min_d: int = 1) -> Iterator[tuple]:
    """(q, value) for field sums with value <= N, q ascending."""
    if N < 3:
        return
    if min_d <= 1:
        for p in primes_upto(math.isqrt(2 * N) + 1):
            v = (int(p) * int(p) + int(p)) // 2
            if v <= N:
                yield PrimePower(int(p), 1), v
    for q in prime_powers_upto(field_sum_qcap(N), min_exponent=max(2, min_d)):
        v = sigma_field_sum(q)
        if v <= N:
            yield q, v


def _matrix_n_ok(n: int, N: int) -> bool:
    a = smallest_prime_divisor(n)
    return n * (n - n // a - 1) <= math.log2(N) + 1


def matrix_params(N: int, min_n: int = 2) -> Iterator[tuple]:
    """(n, q, value) for matrix rings with value <= N."""
    if N < 3:
        return
    n = max(min_n, 2)
    # n - n/a >= n/2, so n(n/2 - 1) bounds every later exponent from below
    while n * (n / 2 - 1) <= math.log2(N) + 1:
        if _matrix_n_ok(n, N):
            for q in _prime_powers_while(lambda q: q ** (n - 1) * (q - 1) / n <= N):
                v = sigma_matrix(n, q)
                if v <= N:
                    yield n, q, v
        n += 1


def _prime_powers_while(ok) -> Iterator[PrimePower]:
    """Prime powers in ascending order while ok(q) holds (ok must be monotone)."""
    limit = 64
    start = 2
    while True:
        for q in prime_powers_upto(limit):
            if q.q < start:
                continue
            if not ok(q.q):
                return
            yield q
        start = limit + 1
        limit *= 4


def a_ring_params(N: int) -> Iterator[tuple]:
    """(n, q1, d, value) for A-rings with n >= 3, d < n - n/a, (n, q1) != (3, 2), value <= N."""
    if N < 8:
        return
    for n in range(3, int(math.log2(N)) + 1):
        a = smallest_prime_divisor(n)
        for d in range(1, n - n // a):
            if 2 ** (n * d) > N:
                break
            root = _int_root_floor(N, n * d)
            for q1 in prime_powers_upto(root):
                if (n, q1.q) == (3, 2):
                    continue
                v = q1.q ** (n * d) + qbinom(n, d, q1.q) + omega(d)
                if v <= N:
                    yield n, q1, d, v


def _int_root_floor(N: int, k: int) -> int:
    r = int(round(N ** (1.0 / k)))
    while r**k > N:
        r -= 1
    while (r + 1) ** k <= N:
        r += 1
    return r


# ------------------------------------------------------------ family value streams


def _segmented_prime_flags(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """is_prime for lo <= m < hi."""
    seg = np.ones(hi - lo, dtype=bool)
    if lo <= 1:
        seg[: 2 - lo] = False
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        seg[start - lo :: p] = False
    return seg


def _f1_into(bits: np.ndarray, N: int) -> int:
    """Set q + 1 for every prime power q <= N - 1; returns how many were set."""
    top = N - 1
    if top < 2:
        return 0
    base = primes_upto(math.isqrt(top) + 1)
    count = 0
    prev_last = False  # is_prime(lo - 1)
    lo = 0
    # segment over target values m = q + 1 in [lo, hi); both ends are multiples of 8
    while lo <= N:
        hi = min(lo + SEGMENT, (N // 8 + 1) * 8)
        # is_prime(m - 1) for m in [lo, hi) means primes in [lo - 1, hi - 1)
        primes = _segmented_prime_flags(max(lo, 0), hi, base)
        flags = np.empty(hi - lo, dtype=bool)
        flags[0] = prev_last
        flags[1:] = primes[:-1]
        prev_last = bool(primes[-1])
        flags[max(0, N + 1 - lo) :] = False
        count += int(flags.sum())
        bits[lo // 8 : hi // 8] |= np.packbits(flags, bitorder="little")
        lo = hi
    for q in prime_powers_upto(top, min_exponent=2):
        _set(bits, q.q + 1)
        count += 1
    return count


def _set(bits, m: int):
    bits[m >> 3] |= np.uint8(1 << (m & 7))


def _set_many(bits, values):
    if len(values) == 0:
        return
    v = np.asarray(values, dtype=np.int64)
    np.bitwise_or.at(bits, v >> 3, (1 << (v & 7)).astype(np.uint8))


def family_values(family: str, N: int) -> np.ndarray:
    """Distinct values of one family that are <= N, ascending."""
    if family == "F1":
        if N < 3:
            return np.zeros(0, dtype=np.int64)
        q = np.array([x.q for x in prime_powers_upto(N - 1)], dtype=np.int64)
        return q + 1
    if family == "F2":
        vals = [v for _, v in field_sum_params(N)]
    elif family == "F3":
        vals = [v for _, _, v in matrix_params(N)]
    elif family == "F4":
        vals = [v for *_, v in a_ring_params(N)]
    else:
        raise ValueError(f"unknown family {family!r}")
    return np.unique(np.asarray(vals, dtype=np.int64))


# ------------------------------------------------------------ the sieved set


@dataclass
class SievedSet:
    N: int
    bits: np.ndarray
    family_counts: Dict[str, int]
    provenance: Optional[Dict[int, List[str]]] = field(default=None, repr=False)

    def __contains__(self, m: int) -> bool:
        return 0 <= m <= self.N and bool((self.bits[m >> 3] >> (m & 7)) & 1)

    @property
    def count(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def as_bool(self) -> np.ndarray:
        return np.unpackbits(self.bits, bitorder="little")[: self.N + 1].astype(bool)

    def values(self) -> np.ndarray:
        return np.flatnonzero(self.as_bool())

    def gaps(self) -> List[int]:
        flags = self.as_bool()
        return [int(m) for m in np.flatnonzero(~flags[3:]) + 3]

    def truncate(self, M: int) -> "SievedSet":
        if M > self.N:
            raise ValueError("cannot truncate to a larger bound")
        nbytes = M // 8 + 1
        bits = self.bits[:nbytes].copy()
        rem = (M & 7) + 1
        if rem < 8:
            bits[-1] &= np.uint8((1 << rem) - 1)
        return SievedSet(M, bits, {}, None)

    def intervals(self) -> List[tuple]:
        """Maximal runs [lo, hi] of consecutive members."""
        vals = self.values()
        if vals.size == 0:
            return []
        breaks = np.flatnonzero(np.diff(vals) != 1)
        starts = np.concatenate([[vals[0]], vals[breaks + 1]])
        ends = np.concatenate([vals[breaks], [vals[-1]]])
        return [(int(a), int(b)) for a, b in zip(starts, ends)]

    def to_json_dict(self, include_gaps: bool = False) -> dict:
        out = {"N": self.N, "count": self.count, "family_counts": dict(self.family_counts)}
        if include_gaps:
            out["gaps"] = self.gaps()
        if self.provenance is not None:
            out["provenance"] = {str(k): v for k, v in sorted(self.provenance.items())}
        return out


def _memory_cap() -> int:
    env = os.environ.get("SIGMA_SIEVE_MAX_N")
    return int(env) if env else DEFAULT_MAX_N


def enumerate_covering_numbers(N: int, provenance: bool = False) -> SievedSet:
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N > _memory_cap():
        raise MemoryCap(f"N = {N} exceeds the sieve bound {_memory_cap()}")
    bits = np.zeros(N // 8 + 1, dtype=np.uint8)
    counts = {f: 0 for f in FAMILIES}
    counts["F1"] = _f1_into(bits, N)
    for fam in ("F2", "F3", "F4"):
        vals = family_values(fam, N)
        counts[fam] = int(vals.size)
        _set_many(bits, vals)
    prov = None
    if provenance:
        prov = {}
        for fam in FAMILIES:
            for v in family_values(fam, N).tolist():
                prov.setdefault(int(v), []).append(fam)
    return SievedSet(N, bits, counts, prov)


def member(m: int):
    """(is m a covering number, canonical witnesses)."""
    from .formulas import witnesses

    w = witnesses(m)
    return bool(w), w


def gaps(N: int) -> List[int]:
    return enumerate_covering_numbers(N).gaps()


@dataclass
class DensityReport:
    N: int
    count: int
    lower: float
    upper: float
    pass_: bool
    ratio: float
    family_counts: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "count": self.count,
            "lower": self.lower,
            "upper": self.upper,
            "pass": self.pass_,
            "ratio": self.ratio,
            "family_counts": self.family_counts,
        }


def density_report(N: int, sieved: Optional[SievedSet] = None) -> DensityReport:
    if N < 5:
        raise ValueError("density bounds are stated for N >= 5")
    s = sieved if sieved is not None else enumerate_covering_numbers(N)
    lg = math.log2(N)
    lower, upper = N / lg, 128 * N / lg
    c = s.count
    return DensityReport(N, c, lower, upper, lower < c < upper, c / N, dict(s.family_counts))


def format_list(s: SievedSet) -> str:
    return "\n".join(str(int(v)) for v in s.values())


def format_intervals(s: SievedSet) -> str:
    return "\n".join(f"{a}" if a == b else f"{a}-{b}" for a, b in s.intervals())


def format_json(s: SievedSet, include_gaps: bool = False) -> str:
    return json.dumps(s.to_json_dict(include_gaps))
