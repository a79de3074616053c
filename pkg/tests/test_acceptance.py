"""Acceptance criteria, one test each; every test prints its [PASS]/[FAIL] line.

Run directly (python tests/test_acceptance.py) for the bare pass/fail matrix.
"""

import pytest

from ringcover import acceptance


def _report(capsys, name, body, budget):
    res = acceptance._run(name, body, budget)
    with capsys.disabled():
        print()
        print(res.line())
        for d in res.details:
            print(f"    {d}")
    return res


def test_1_oracle_agrees_with_formulas(capsys):
    res = _report(capsys, "1 oracle agrees with formulas on the catalog", acceptance.check_oracle_catalog, 300)
    assert res.passed, res.details


def test_2_unitalization_law(capsys):
    res = _report(capsys, "2 unitalization preserves the covering number", acceptance.check_unitalization, 60)
    assert res.passed, res.details


def test_3_cover_construction(capsys):
    res = _report(capsys, "3 A-ring covers: sizes, coverage, irredundancy", acceptance.check_covers, 120)
    assert res.passed, res.details


def test_4_sieve_ground_truth(capsys):
    res = _report(capsys, "4 sieve ground truth", acceptance.check_sieve_ground_truth, 120)
    assert res.passed, res.details


def test_5_density_bounds(capsys):
    res = _report(capsys, "5 density bounds", acceptance.check_density, 300)
    assert res.passed, res.details


def test_6_prime_counting_bounds(capsys):
    res = _report(capsys, "6 prime counting bounds and family counts", acceptance.check_counting, 120)
    assert res.passed, res.details


def test_7_inequality_grids(capsys):
    # the combined line, as selftest prints it; the field-sum part fails (see the next test)
    _report(capsys, "7 inequality grids", acceptance.check_inequalities, 300)
    details = []
    assert acceptance.check_matrix_grid(details), details
    assert acceptance.check_a_ring_bounds(details), details


@pytest.mark.xfail(
    strict=True,
    reason="2d*sigma <= q^2 fails for q = p^d with d prime and d > p (first at q = 8, where tau = 3 > 8/3); "
    "sigma(F(8)^3) = 12 is confirmed by the oracle",
)
def test_7_field_sum_bound():
    assert acceptance.field_sum_bound_violations() == []


def test_7_field_sum_bound_counterexamples_are_the_known_ones():
    # up to 2^16 the bound fails exactly at q = p^d with d prime and d > p
    assert acceptance.field_sum_bound_violations() == [8, 32, 128, 243, 2048, 2187, 8192]


if __name__ == "__main__":
    for r in acceptance.run_all():
        print(r.line())
