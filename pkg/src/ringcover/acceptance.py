"""End-to-end checks shared by the test suite and `ringcover selftest`.

Each check returns a CheckResult; none of them raise on a failed comparison.
"""

from __future__ import annotations

import math
import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from . import coverbuilder, formulas, oracle, ringmodel, sieve
from .arith import INF, prime_power_flags, prime_powers_upto, prime_sieve, smallest_prime_divisor
from .specparser import format_spec, parse


@dataclass
class CheckResult:
    name: str
    passed: bool
    seconds: float
    details: List[str] = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.2f}s)"


def _run(name: str, body: Callable[[List[str]], bool], budget: float) -> CheckResult:
    t0 = time.perf_counter()
    details: List[str] = []
    try:
        ok = bool(body(details))
    except Exception as exc:  # a crash is a failure, reported not raised
        details.append(f"error: {type(exc).__name__}: {exc}")
        ok = False
    dt = time.perf_counter() - t0
    if dt > budget:
        details.append(f"took {dt:.1f}s, budget {budget:.0f}s")
        ok = False
    return CheckResult(name, ok, dt, details)


# (spec, unital, expected)
ORACLE_CATALOG = [
    ("F(2)^2", False, 3),
    ("F(2)^3", False, 3),
    ("F(2)^3", True, 3),
    ("F(3)^3", False, 6),
    ("F(4)^2", False, 4),
    ("Id(2)", False, 3),
    ("Id(3)", False, 4),
    ("Id(4)", False, 5),
    ("M(2,2)", False, 4),
    ("M(2,3)", False, 7),
    ("A(1,2,2)", False, 3),
    ("A(1,2,2)", True, 3),
    ("A(1,2,4)", False, 5),
    ("A(1,4,4)", False, 4),
    ("F(2)^2", True, INF),
    ("F(8)", False, INF),
]

UNITALIZATION_CASES = [("Z(2,2)", 3), ("Z(3,2)", 4), ("Z(2,3)", 3)]

COVER_CASES = [((1, 3, 3), 4), ((1, 2, 4), 5), ((3, 3, 3), 40), ((4, 2, 2), 31)]


def check_oracle_catalog(details) -> bool:
    ok = True
    for text, unital, expected in ORACLE_CATALOG:
        spec = parse(text)
        got = oracle.sigma_brute(ringmodel.build(spec), unital=unital)
        rep = formulas.classify(spec)
        formula = rep.unital_value if unital else rep.value
        good = got == expected == formula
        ok &= good
        details.append(f"{text}{' unital' if unital else ''}: oracle {got}, formula {formula}, expected {expected}")
    return ok


def check_unitalization(details) -> bool:
    ok = True
    for text, expected in UNITALIZATION_CASES:
        ring = ringmodel.build(parse(text))
        plain = oracle.sigma_brute(ring)
        unital = oracle.sigma_brute(ringmodel.unitalize(ring), unital=True)
        good = plain == unital == expected
        ok &= good
        details.append(f"{text}: sigma {plain}, sigma_u of unitalization {unital}, expected {expected}")
    return ok


def check_covers(details) -> bool:
    ok = True
    for params, expected in COVER_CASES:
        cover = coverbuilder.build_A_cover(*params)
        formula = formulas.sigma_A(*params).value
        good = cover.size == formula == expected
        if cover.ring_order() <= coverbuilder.RAW_CAP:
            raw = coverbuilder.verify_cover_raw(cover)
            good &= raw.covered
        else:
            raw = None
        red = None
        if params[0] >= 3:
            red = coverbuilder.verify_cover_reduced(cover)
            good &= red
        irr = coverbuilder.irredundancy(cover)
        good &= irr.irredundant
        ok &= good
        details.append(f"A{params}: size {cover.size}, formula {formula}, raw {None if raw is None else raw.covered}, "
                       f"reduced {red}, irredundant {irr.irredundant}")
    return ok


def naive_covering_numbers(N: int) -> set:
    """Reference E(N) by plain loops over every family, with no sieve cutoffs.

    Ranges: q up to N (N^2 for field sums), n up to 12. Every family value is at
    least 2^(n-1)/n, which exceeds N = 100 once n >= 12.
    """
    out = set()
    pps = list(prime_powers_upto(N))
    for q in pps:
        out.add(formulas.sigma_idealization(q))
        for n in range(2, 13):
            out.add(formulas.sigma_matrix(n, q))
            if n >= 3:
                for d in range(1, n):
                    rep = formulas.sigma_A(n, q, q.q**d)
                    if rep.elementary:
                        out.add(rep.value)
    for q in prime_powers_upto(N * N):
        out.add(formulas.sigma_field_sum(q))
    return {m for m in out if m <= N}


def check_sieve_ground_truth(details) -> bool:
    s20 = sieve.enumerate_covering_numbers(20)
    want20 = set(range(3, 13)) | {14, 15, 16, 17, 18, 20}
    ok = set(s20.values().tolist()) == want20 and s20.gaps() == [13, 19]
    details.append(f"E(20) = {s20.values().tolist()}, gaps {s20.gaps()}")
    s13 = sieve.enumerate_covering_numbers(13)
    ok13 = all(m in s13 for m in range(3, 13)) and 13 not in s13
    details.append(f"E(13) has 3..12 and not 13: {ok13}")
    fast = set(sieve.enumerate_covering_numbers(100).values().tolist())
    slow = naive_covering_numbers(100)
    details.append(f"E(100): sieve {len(fast)} values, naive {len(slow)} values, equal {fast == slow}")
    return ok and ok13 and fast == slow


def check_density(details, big: bool = True) -> bool:
    ok = True
    for N in (10**3, 10**4, 10**5, 10**6):
        t0 = time.perf_counter()
        rep = sieve.density_report(N)
        dt = time.perf_counter() - t0
        ok &= rep.pass_
        if N == 10**6 and dt >= 10:
            ok = False
        details.append(f"N={N}: {rep.lower:.1f} < {rep.count} < {rep.upper:.1f} is {rep.pass_} ({dt:.2f}s)")
    if big:
        tracemalloc.start()
        t0 = time.perf_counter()
        rep = sieve.density_report(10**8)
        dt = time.perf_counter() - t0
        peak = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
        good = rep.pass_ and dt < 300 and peak < 100 * 2**20
        ok &= good
        details.append(f"N=10^8: count {rep.count}, bounds {rep.pass_}, {dt:.1f}s, peak {peak / 2**20:.1f} MiB")
    return ok


def check_counting(details) -> bool:
    X = 10**6
    x = np.arange(2, X + 1, dtype=np.float64)
    lg = np.log2(x)
    pi = np.cumsum(prime_sieve(X))[2:]
    Pi = np.cumsum(prime_power_flags(X))[2:]
    up = bool((pi < 2 * x / lg).all())
    low = bool((x[x > 5] / lg[x > 5] < pi[x > 5]).all())
    pp = bool((Pi < 8 * x / lg).all())
    details.append(f"pi(x) < 2x/log x: {up}; x/log x < pi(x) for x > 5: {low}; Pi(x) < 8x/log x: {pp}")
    N = 10**5
    bound = N / math.log2(N)
    limits = {"F1": 8, "F2": 8, "F3": 40, "F4": 72}
    fam_ok = True
    for fam, c in limits.items():
        cnt = sieve.family_values(fam, N).size
        fam_ok &= cnt < c * bound
        details.append(f"{fam} at N=10^5: {cnt} < {c * bound:.0f}")
    return up and low and pp and fam_ok


def field_sum_bound_violations(limit: int = 2**16) -> list:
    """q <= limit where 2 d sigma exceeds q^2 (d >= 2) or the d = 1 value is not (p^2 + p)/2."""
    bad = []
    for q in prime_powers_upto(limit):
        s = formulas.sigma_field_sum(q)
        if q.d >= 2 and 2 * q.d * s > q.q**2:
            bad.append(q.q)
        if q.d == 1 and 2 * s != q.p * q.p + q.p:
            bad.append(q.q)
    return bad


def check_field_sum_bound(details) -> bool:
    bad = field_sum_bound_violations()
    details.append(f"field-sum bound up to 2^16: violated at q in {bad}" if bad else "field-sum bound up to 2^16 holds")
    return not bad


def check_matrix_grid(details) -> bool:
    ok = True
    eq37, eq316 = [], []
    for n in range(2, 9):
        a = smallest_prime_divisor(n)
        dd = n - n // a
        for q in prime_powers_upto(64):
            s = formulas.sigma_matrix(n, q)
            top = q.q ** (n * dd)
            ok &= s <= top
            if s == top:
                eq37.append((n, q.q))
            prod = formulas.matrix_product_term(n, q)
            bot = q.q ** (n * (n - n // a - 1))
            ok &= prod >= bot
            if prod == bot:
                eq316.append((n, q.q))
    ok &= eq37 == [(2, 2)] and sorted(eq316) == [(2, 2), (3, 2)]
    details.append(f"matrix upper bound equality at {eq37}; product lower bound equality at {sorted(eq316)}")
    return ok


def check_a_ring_bounds(details) -> bool:
    a_ok, count = True, 0
    for q in prime_powers_upto(10**6 - 1):
        rep = formulas.sigma_A(1, q, q)
        if rep.elementary:
            a_ok &= q.q + 1 <= rep.value <= (q.q**2 - 1) // (q.q - 1)
            count += 1
    for n, q1, d, v in sieve.a_ring_params(10**6):
        # every q2 with q1 (x) q2 = q1^d
        for e in range(1, d * q1.d + 1):
            if math.lcm(q1.d, e) != d * q1.d:
                continue
            rep = formulas.sigma_A(n, q1, q1.p**e)
            if not rep.elementary:
                continue
            qq = q1.q**d
            a_ok &= rep.value == v and qq**n + 1 <= rep.value <= (qq ** (n + 1) - 1) // (qq - 1)
            count += 1
    details.append(f"A-ring bounds over {count} elementary tuples: {a_ok}")
    return a_ok


def check_inequalities(details) -> bool:
    # evaluate all three so the details always list every sub-check
    parts = [check_matrix_grid(details), check_field_sum_bound(details), check_a_ring_bounds(details)]
    return all(parts)


CHECKS = [
    ("1 oracle agrees with formulas on the catalog", check_oracle_catalog, 300),
    ("2 unitalization preserves the covering number", check_unitalization, 60),
    ("3 A-ring covers: sizes, coverage, irredundancy", check_covers, 120),
    ("4 sieve ground truth", check_sieve_ground_truth, 120),
    ("5 density bounds", check_density, 300),
    ("6 prime counting bounds and family counts", check_counting, 120),
    ("7 inequality grids", check_inequalities, 300),
]


def run_all(names=None) -> List[CheckResult]:
    out = []
    for name, fn, budget in CHECKS:
        if names and not any(name.startswith(n) for n in names):
            continue
        out.append(_run(name, fn, budget))
    return out


def catalog_specs() -> List[str]:
    return sorted({format_spec(parse(t)) for t, _, _ in ORACLE_CATALOG})
