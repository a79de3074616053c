"""Exact integer and q-combinatorial helpers used by the covering-number formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

import numpy as np
from sympy import divisors, factorint, integer_nthroot, isprime, mobius

INF = math.inf
# A covering number: a nonnegative int, or INF when the ring has no cover.
ExtNat = Union[int, float]


class ArithError(ValueError):
    pass


class MixedCharacteristic(ArithError):
    """Two prime powers (or ring summands) that must share a prime do not."""


@dataclass(frozen=True, order=True)
class PrimePower:
    p: int
    d: int

    def __post_init__(self):
        if self.d < 1 or not isprime(self.p):
            raise ArithError(f"not a prime power: p={self.p}, d={self.d}")

    @property
    def q(self) -> int:
        return self.p**self.d

    @classmethod
    def of(cls, m: int) -> "PrimePower":
        pp = is_prime_power(m)
        if pp is None:
            raise ArithError(f"{m} is not a prime power")
        return pp

    def __int__(self):
        return self.q

    def __str__(self):
        return str(self.q)


def as_prime_power(q) -> PrimePower:
    return q if isinstance(q, PrimePower) else PrimePower.of(int(q))


def is_prime_power(m: int) -> Optional[PrimePower]:
    if m < 2:
        return None
    if isprime(m):
        return PrimePower(m, 1)
    for e in range(m.bit_length(), 1, -1):
        r, exact = integer_nthroot(m, e)
        if exact and isprime(int(r)):
            return PrimePower(int(r), e)
    return None


def tensor(q1, q2) -> PrimePower:
    """Order of the compositum of F_q1 and F_q2: p^lcm(d1, d2)."""
    q1, q2 = as_prime_power(q1), as_prime_power(q2)
    if q1.p != q2.p:
        raise MixedCharacteristic(f"{q1.q} and {q2.q} have different characteristic")
    return PrimePower(q1.p, math.lcm(q1.d, q2.d))


def omega(d: int) -> int:
    if d < 1:
        raise ArithError("omega needs d >= 1")
    return len(factorint(d))


def smallest_prime_divisor(n: int) -> int:
    if n < 2:
        raise ArithError("n must be >= 2")
    return min(factorint(n))


@lru_cache(maxsize=None)
def irr_count(p: int, d: int) -> int:
    """Number of monic irreducible polynomials of degree d over F_p."""
    total = sum(mobius(e) * p ** (d // e) for e in divisors(d))
    assert total % d == 0
    return total // d


def tau(q) -> int:
    q = as_prime_power(q)
    if q.d == 1:
        return q.p
    return irr_count(q.p, q.d) + 1


def nu(q) -> int:
    q = as_prime_power(q)
    return 1 if q.d == 1 else omega(q.d)


def qbinom(n: int, k: int, q) -> int:
    """Gaussian binomial: the number of k-dim subspaces of F_q^n."""
    q = int(q)
    if not 0 <= k <= n:
        raise ArithError(f"qbinom needs 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    result, rem = divmod(num, den)
    assert rem == 0
    return result


def gl_order(n: int, q) -> int:
    q = int(q)
    out = 1
    for k in range(n):
        out *= q**n - q**k
    return out


# ---------------------------------------------------------------- sieving


def prime_sieve(limit: int) -> np.ndarray:
    """Boolean array is_prime[0..limit]."""
    limit = max(int(limit), 1)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return flags


def primes_upto(limit: int) -> np.ndarray:
    return np.flatnonzero(prime_sieve(limit))


def prime_power_flags(limit: int) -> np.ndarray:
    flags = prime_sieve(limit)
    out = flags.copy()
    for p in np.flatnonzero(flags[: math.isqrt(limit) + 1]):
        pk = int(p) * int(p)
        while pk <= limit:
            out[pk] = True
            pk *= int(p)
    return out


def prime_count(x: int) -> int:
    if x < 2:
        return 0
    return int(prime_sieve(x).sum())


def prime_power_count(x: int) -> int:
    if x < 2:
        return 0
    return int(prime_power_flags(x).sum())


def prime_powers_upto(limit: int, min_exponent: int = 1) -> Iterator[PrimePower]:
    """Prime powers q <= limit with exponent >= min_exponent, ascending in q."""
    if limit < 2:
        return
    out = []
    if min_exponent <= 1:
        out = [(int(p), int(p), 1) for p in primes_upto(limit)]
        min_exponent = 2
    for p in primes_upto(math.isqrt(limit) + 1):
        p = int(p)
        d = min_exponent
        pk = p**d
        while pk <= limit:
            out.append((pk, p, d))
            pk *= p
            d += 1
    out.sort()
    for _, p, d in out:
        yield PrimePower(p, d)
