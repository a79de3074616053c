import json

import numpy as np
import pytest

from ringcover import coverbuilder as cb
from ringcover import formulas, oracle
from ringcover.arith import as_prime_power, qbinom
from ringcover.ringmodel import build_aring

SMALL = [(1, 3, 3), (1, 2, 4), (1, 4, 2), (1, 2, 8), (1, 8, 2), (1, 9, 3), (1, 3, 9), (1, 5, 5), (1, 4, 8), (3, 2, 2)]
LARGE_RAW = [(3, 3, 3), (4, 2, 2)]


@pytest.mark.parametrize("params", SMALL + LARGE_RAW + [(3, 4, 4)])
def test_size_matches_formula_and_bounds(params):
    cover = cb.build_A_cover(*params)
    assert cover.size == formulas.sigma_A(*params).value
    q, n = cover.q, cover.n
    assert q**n + 1 <= cover.size <= (q ** (n + 1) - 1) // (q - 1)


@pytest.mark.parametrize("params", SMALL + LARGE_RAW)
def test_raw_reduced_and_irredundant(params):
    cover = cb.build_A_cover(*params)
    raw = cb.verify_cover_raw(cover)
    assert raw.covered and raw.uncovered == 0 and raw.elements == cover.ring_order()
    assert cb.verify_cover_reduced(cover) == raw.covered
    irr = cb.irredundancy(cover)
    assert irr.irredundant and not irr.missing and len(irr.witnesses) == cover.size


def test_reduced_only_instance():
    cover = cb.build_A_cover(3, 4, 4)
    assert cover.ring_order() > cb.RAW_CAP
    assert cb.verify_cover_reduced(cover)
    with pytest.raises(oracle.ComplexityCap):
        cb.verify_cover_raw(cover)


BROKEN = [((1, 3, 3), "conjugate"), ((1, 3, 3), "extra"), ((1, 2, 4), "conjugate"), ((1, 2, 4), "extra"),
          ((3, 2, 2), "conjugate"), ((3, 2, 2), "stabilizer"), ((3, 3, 3), "conjugate"), ((3, 3, 3), "stabilizer")]


@pytest.mark.parametrize("params,drop", BROKEN)
def test_broken_covers_fail_both_checks(params, drop):
    cover = cb.build_A_cover(*params)
    if drop == "conjugate":
        cover.conjugates = cover.conjugates[1:]
    elif drop == "stabilizer":
        cover.stabilizers = cover.stabilizers[:-1]
    else:
        cover.extra = None
    raw = cb.verify_cover_raw(cover)
    assert not raw.covered and raw.uncovered > 0 and raw.first_uncovered is not None
    assert cb.verify_cover_reduced(cover) is False


def test_subfield_members_appear_when_d_exceeds_one():
    # too large to verify; check the symbolic shape against the formula
    cover = cb.build_A_cover(5, 2, 4)
    assert cover.d == 2 and cover.subfields == [1]
    assert len(cover.stabilizers) == qbinom(5, 2, 2)
    assert cover.size == formulas.sigma_A(5, 2, 4).value == 4**5 + 155 + 1


def test_duplicate_member_is_redundant():
    cover = cb.build_A_cover(1, 3, 3)
    cover.conjugates = cover.conjugates + cover.conjugates[:1]
    assert cb.verify_cover_raw(cover).covered
    rep = cb.irredundancy(cover)
    assert not rep.irredundant and rep.missing


@pytest.mark.parametrize("params", [(1, 2, 2), (1, 4, 4), (2, 2, 2), (4, 2, 4), (3, 2, 4), (0, 2, 2)])
def test_unsupported_parameters(params):
    with pytest.raises(cb.UnsupportedParameters):
        cb.build_A_cover(*params)


def test_echelon_subspaces():
    for n, d, q in [(3, 1, 2), (4, 2, 2), (3, 2, 3), (4, 1, 4)]:
        subs = list(cb.echelon_subspaces(n, d, q))
        assert len(subs) == len(set(subs)) == qbinom(n, d, q)


def test_batch_invertible():
    mats = np.array([[[1, 0], [0, 1]], [[1, 1], [1, 1]], [[0, 1], [1, 0]], [[1, 1], [0, 1]]])
    assert cb.batch_invertible(mats, 2).tolist() == [True, False, True, True]
    assert cb.batch_invertible(np.array([[[2, 1], [1, 2]]]), 3).tolist() == [False]


@pytest.mark.parametrize("params", [(1, 3, 3), (1, 2, 4), (1, 4, 2), (1, 2, 8), (3, 2, 2)])
def test_materialized_members_pass_the_oracle_check(params):
    cover = cb.build_A_cover(*params)
    ring = build_aring(params[0], as_prime_power(params[1]), as_prime_power(params[2]))
    members = cb.materialize(cover)
    assert len(members) == cover.size
    cert = oracle.verify_certificate(ring, members)
    assert cert.proper and cert.covering and cert.irredundant


def test_certificate_json_round_trip():
    cover = cb.build_A_cover(1, 2, 4)
    ring, cert = oracle.certificate_from_json(cb.certificate_json(cover))
    assert cert.size == 5 and cert.proper and cert.covering and cert.irredundant
    assert ring.order == cover.ring_order()


def test_export_round_trip():
    cover = cb.build_A_cover(3, 3, 3)
    doc = json.loads(cb.export_json(cover))
    assert doc["size"] == 40 and doc["params"] == {"n": 3, "q1": 3, "q2": 3, "q": 3, "d": 1}
    back = cb.ACover.from_dict(doc)
    assert back == cover
    n1 = cb.ACover.from_dict(json.loads(cb.export_json(cb.build_A_cover(1, 2, 4))))
    assert n1.extra == {"kind": "pair", "e1": 1, "e2": 1}


def test_members_listing():
    cover = cb.build_A_cover(4, 2, 2)
    kinds = [k for k, _ in cover.members()]
    assert kinds.count("conjugate") == 16 and kinds.count("stabilizer") == 15 and "extra" not in kinds
