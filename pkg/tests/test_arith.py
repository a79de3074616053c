import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringcover.arith import (
    INF,
    ArithError,
    PrimePower,
    gl_order,
    irr_count,
    is_prime_power,
    nu,
    omega,
    prime_count,
    prime_power_count,
    prime_power_flags,
    prime_powers_upto,
    prime_sieve,
    qbinom,
    smallest_prime_divisor,
    tau,
    tensor,
)


def _polymul(a, b, p):
    return tuple(int(c) for c in np.convolve(a, b) % p)


def _monic(p, d):
    # coefficient tuples, constant term first, leading 1 last
    for tail in itertools.product(range(p), repeat=d):
        yield tail + (1,)


def brute_irreducible_count(p, d):
    """Monic degree-d polynomials minus the ones that factor into two monic pieces."""
    reducible = set()
    for a in range(1, d // 2 + 1):
        left = list(_monic(p, a))
        right = list(_monic(p, d - a))
        for f in left:
            for g in right:
                reducible.add(_polymul(f, g, p))
    return p**d - len(reducible)


def brute_subspace_counts(n, q):
    """Number of k-dimensional subspaces of F_q^n for each k (q prime), by growing spans."""
    vectors = list(itertools.product(range(q), repeat=n))

    def span_with(space, v):
        out = set(space)
        for c in range(1, q):
            for w in space:
                out.add(tuple((a + c * b) % q for a, b in zip(w, v)))
        return frozenset(out)

    level = {frozenset([tuple([0] * n)])}
    counts = [1]
    for _ in range(n):
        nxt = set()
        for space in level:
            for v in vectors:
                if v not in space:
                    nxt.add(span_with(space, v))
        level = nxt
        counts.append(len(level))
    return counts


def brute_gl(n, p):
    count = 0
    for entries in itertools.product(range(p), repeat=n * n):
        m = np.array(entries).reshape(n, n)
        if round(np.linalg.det(m)) % p:
            count += 1
    return count


def test_prime_power_recognition():
    assert is_prime_power(1) is None
    assert is_prime_power(12) is None
    assert is_prime_power(0) is None
    assert is_prime_power(8) == PrimePower(2, 3)
    assert is_prime_power(3**7).d == 7
    assert is_prime_power(2**61 - 1) == PrimePower(2**61 - 1, 1)
    assert [x.q for x in prime_powers_upto(10)] == [2, 3, 4, 5, 7, 8, 9]


def test_small_helpers():
    assert tensor(4, 8).q == 64
    assert tensor(4, 4).q == 4
    assert tensor(9, 27).q == 3**6
    with pytest.raises(ArithError):
        tensor(4, 9)
    assert [omega(d) for d in (1, 2, 6, 12, 30)] == [0, 1, 2, 2, 3]
    assert [smallest_prime_divisor(n) for n in (2, 9, 15, 49)] == [2, 3, 3, 7]
    assert tau(8) == 3 and tau(3) == 3 and tau(4) == 2
    assert nu(4) == 1 and nu(64) == 2 and nu(5) == 1
    assert INF > 10**100


def test_irr_count_matches_brute_force():
    for q in prime_powers_upto(4096):
        if q.d == 1:
            assert irr_count(q.p, 1) == q.p
            continue
        assert irr_count(q.p, q.d) == brute_irreducible_count(q.p, q.d), q


def test_degree_partition():
    for q in prime_powers_upto(4096):
        total = sum(e * irr_count(q.p, e) for e in range(1, q.d + 1) if q.d % e == 0)
        assert total == q.q


def test_irr_count_table():
    assert [irr_count(2, d) for d in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]
    assert [irr_count(3, d) for d in range(1, 5)] == [3, 3, 8, 18]


@pytest.mark.parametrize("q", [2, 3])
def test_qbinom_counts_subspaces(q):
    for n in range(1, 5):
        counts = brute_subspace_counts(n, q)
        assert [qbinom(n, k, q) for k in range(n + 1)] == counts


def test_qbinom_known_values():
    assert qbinom(4, 2, 2) == 35
    assert qbinom(4, 2, 3) == 130
    assert qbinom(3, 1, 4) == 21
    assert qbinom(5, 0, 7) == 1


@given(st.integers(1, 12), st.integers(0, 12), st.sampled_from([2, 3, 4, 5, 7, 8, 9, 16, 27]))
def test_qbinom_symmetry_and_pascal(n, k, q):
    k = k % (n + 1)
    assert qbinom(n, k, q) == qbinom(n, n - k, q)
    if 1 <= k <= n - 1:
        assert qbinom(n, k, q) == qbinom(n - 1, k - 1, q) + q**k * qbinom(n - 1, k, q)
        assert qbinom(n, k, q) == q ** (n - k) * qbinom(n - 1, k - 1, q) + qbinom(n - 1, k, q)


def test_gl_order_matches_brute_force():
    assert gl_order(2, 2) == brute_gl(2, 2) == 6
    assert gl_order(3, 2) == brute_gl(3, 2) == 168
    assert gl_order(2, 3) == brute_gl(2, 3) == 48
    assert gl_order(2, 4) == 180


def test_prime_counting():
    assert prime_count(10) == 4
    assert prime_count(100) == 25
    assert prime_power_count(10) == 7
    assert prime_power_count(100) == 35
    flags = prime_sieve(30)
    assert np.flatnonzero(flags).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    pp = prime_power_flags(32)
    assert np.flatnonzero(pp).tolist() == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]


def test_prime_counting_bounds_to_a_million():
    X = 10**6
    x = np.arange(2, X + 1, dtype=np.float64)
    lg = np.log2(x)
    pi = np.cumsum(prime_sieve(X))[2:]
    Pi = np.cumsum(prime_power_flags(X))[2:]
    assert (pi < 2 * x / lg).all()
    assert (x[x > 5] / lg[x > 5] < pi[x > 5]).all()
    assert (Pi < 8 * x / lg).all()


@given(st.integers(2, 10**6))
def test_prime_power_agrees_with_factorization(m):
    pp = is_prime_power(m)
    f = {}
    k, r = 2, m
    while k * k <= r:
        while r % k == 0:
            f[k] = f.get(k, 0) + 1
            r //= k
        k += 1
    if r > 1:
        f[r] = f.get(r, 0) + 1
    if len(f) == 1:
        (p, d), = f.items()
        assert pp == PrimePower(p, d)
    else:
        assert pp is None
