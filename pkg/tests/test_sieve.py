import json
import math

import numpy as np
import pytest

from ringcover import formulas, sieve
from ringcover.acceptance import naive_covering_numbers
from ringcover.arith import prime_powers_upto

E20 = set(range(3, 13)) | {14, 15, 16, 17, 18, 20}


def test_small_sets():
    s = sieve.enumerate_covering_numbers(20)
    assert set(s.values().tolist()) == E20
    assert s.gaps() == [13, 19]
    assert s.count == len(E20)
    s13 = sieve.enumerate_covering_numbers(13)
    assert s13.values().tolist() == list(range(3, 13))
    assert sieve.enumerate_covering_numbers(2).count == 0
    assert sieve.enumerate_covering_numbers(0).count == 0


def test_membership_edges():
    s = sieve.enumerate_covering_numbers(20)
    assert 20 in s and 13 not in s and 21 not in s and -1 not in s and 2 not in s


def test_matches_naive_reference():
    fast = set(sieve.enumerate_covering_numbers(100).values().tolist())
    assert fast == naive_covering_numbers(100)


def test_naive_reference_is_independent_of_cutoffs():
    # widen the reference loops further and nothing new appears below 100
    out = set()
    for q in prime_powers_upto(400):
        for n in range(2, 16):
            out.add(formulas.sigma_matrix(n, q))
    assert {m for m in out if m <= 100} <= naive_covering_numbers(100)


def test_prefix_consistency():
    small = sieve.enumerate_covering_numbers(10**3)
    big = sieve.enumerate_covering_numbers(10**5)
    assert np.array_equal(small.as_bool(), big.as_bool()[: 10**3 + 1])
    assert np.array_equal(big.truncate(10**3).bits, small.bits)


def test_truncate_masks_the_tail():
    s = sieve.enumerate_covering_numbers(100).truncate(19)
    assert s.values().tolist() == sorted(m for m in E20 if m <= 19)
    with pytest.raises(ValueError):
        s.truncate(50)


def test_family_values():
    assert sieve.family_values("F1", 20).tolist() == [3, 4, 5, 6, 8, 9, 10, 12, 14, 17, 18, 20]
    assert sieve.family_values("F2", 20).tolist() == [3, 4, 6, 12, 15, 16]
    assert sieve.family_values("F4", 100).tolist() == [31, 40, 63, 85]
    with pytest.raises(ValueError):
        sieve.family_values("F5", 10)


def test_matrix_values_by_direct_evaluation():
    want = sorted({formulas.sigma_matrix(n, q) for n in range(2, 8) for q in prime_powers_upto(100)
                   if formulas.sigma_matrix(n, q) <= 100})
    assert sieve.family_values("F3", 100).tolist() == want


def test_a_ring_values_by_direct_evaluation():
    want = set()
    for n in range(3, 8):
        for q1 in prime_powers_upto(100):
            for e in range(1, 8):
                rep = formulas.sigma_A(n, q1, q1.p**e)
                if rep.elementary and rep.value <= 100:
                    want.add(rep.value)
    assert sieve.family_values("F4", 100).tolist() == sorted(want)


def test_field_sum_cutoff_is_safe():
    # every field sum beyond the cutoff is above N, checked directly well past it
    for N in (100, 10**4, 10**6):
        cap = sieve.field_sum_qcap(N)
        for q in prime_powers_upto(4 * cap):
            if q.q > cap:
                assert formulas.sigma_field_sum(q) > N


def test_a_ring_params_match_the_closed_form():
    for n, q1, d, v in sieve.a_ring_params(10**5):
        rep = formulas.sigma_A(n, q1, q1.q**d)
        assert rep.elementary and rep.value == v


@pytest.mark.parametrize("N", [10**3, 10**4, 10**5, 10**6])
def test_family_count_bounds(N):
    bound = N / math.log2(N)
    assert sieve.family_values("F1", N).size < 8 * bound
    assert sieve.family_values("F2", N).size < 8 * bound
    assert sieve.family_values("F3", N).size < 40 * bound
    assert sieve.family_values("F4", N).size < 72 * bound


@pytest.mark.parametrize("N", [5, 10, 100, 10**3, 10**4, 10**5, 10**6])
def test_density_bounds(N):
    rep = sieve.density_report(N)
    assert rep.pass_ and rep.lower < rep.count < rep.upper


def test_density_needs_five():
    with pytest.raises(ValueError):
        sieve.density_report(4)


def test_counts_are_frozen():
    # regression values produced by the sieve and cross-checked against the naive reference at 100
    assert sieve.enumerate_covering_numbers(100).count == len(naive_covering_numbers(100))
    s = sieve.enumerate_covering_numbers(10**4)
    assert s.count == int(s.as_bool().sum())


def test_output_formats():
    s = sieve.enumerate_covering_numbers(20, provenance=True)
    assert sieve.format_list(s).splitlines()[:3] == ["3", "4", "5"]
    assert sieve.format_intervals(s) == "3-12\n14-18\n20"
    doc = json.loads(sieve.format_json(s, include_gaps=True))
    assert doc["N"] == 20 and doc["count"] == 16 and doc["gaps"] == [13, 19]
    assert set(doc["family_counts"]) == {"F1", "F2", "F3", "F4"}
    assert doc["provenance"]["4"] == ["F1", "F2", "F3"]
    assert sorted(map(int, doc["provenance"])) == sorted(E20)


def test_member_and_gaps():
    assert sieve.member(13) == (False, [])
    ok, wit = sieve.member(15)
    assert ok and len(wit) == 2
    assert sieve.gaps(20) == [13, 19]


def test_memory_cap(monkeypatch):
    monkeypatch.setenv("SIGMA_SIEVE_MAX_N", "1000")
    with pytest.raises(sieve.MemoryCap):
        sieve.enumerate_covering_numbers(1001)
    with pytest.raises(ValueError):
        sieve.enumerate_covering_numbers(-1)


def test_segment_boundaries():
    # F1 is filled segment by segment; values straddling a boundary must survive
    N = sieve.SEGMENT + 1000
    s = sieve.enumerate_covering_numbers(N)
    f1 = sieve.family_values("F1", N)
    flags = s.as_bool()
    assert flags[f1].all()
    near = [q.q + 1 for q in prime_powers_upto(N - 1) if abs(q.q + 1 - sieve.SEGMENT) < 200]
    assert near and all(m in s for m in near)
