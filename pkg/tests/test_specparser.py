import random

import pytest
from hypothesis import given, settings, strategies as st

from ringspecs import specs

from ringcover.arith import MixedCharacteristic, PrimePower
from ringcover.families import ARing, DirectSum, FieldSum, Idealization, MatrixRing, ZeroMult
from ringcover.specparser import (
    MAX_REPEAT,
    NotAPrimePower,
    SpecError,
    SpecMixedCharacteristic,
    SpecSyntaxError,
    format,
    format_spec,
    parse,
)

P2, P4, P3 = PrimePower(2, 1), PrimePower(2, 2), PrimePower(3, 1)


def test_atoms():
    assert parse("F(4)") == FieldSum(P4, 1)
    assert parse("F(2)^3") == FieldSum(P2, 3)
    assert parse("M(2,3)") == MatrixRing(2, P3)
    assert parse("Id(3)") == Idealization(P3, 2)
    assert parse("Id(2,1)") == Idealization(P2, 1)
    assert parse("A(1,2,4)") == ARing(1, P2, P4)
    assert parse("Z(3,2)") == ZeroMult(3, 2)


def test_sums_and_repeats():
    assert parse("M(2,2) + F(3)^3") == DirectSum((MatrixRing(2, P2), FieldSum(P3, 3)))
    assert parse("Id(2)^2") == DirectSum((Idealization(P2, 2),) * 2)
    assert parse("F(2)^2^3") == FieldSum(P2, 6)
    # nested repeats of sums are flattened
    assert parse(" F ( 2 ) + Z(2, 1) ") == DirectSum((FieldSum(P2, 1), ZeroMult(2, 1)))


def test_canonical_text():
    assert format_spec(parse(" Id( 4 , 2 ) ")) == "Id(4)"
    assert format_spec(parse("Id(4,3)")) == "Id(4,3)"
    assert format_spec(parse("F(2)^2^2+M(2,2)")) == "F(2)^4+M(2,2)"
    assert format is format_spec


@pytest.mark.parametrize(
    "text,kind,offset",
    [
        ("", SpecSyntaxError, 0),
        ("F(6)", NotAPrimePower, 2),
        ("M(2,12)", NotAPrimePower, 4),
        ("Q(2)", SpecSyntaxError, 0),
        ("F(2", SpecSyntaxError, 3),
        ("F(2)+", SpecSyntaxError, 5),
        ("F(2)^0", SpecSyntaxError, 5),
        ("M(0,2)", SpecSyntaxError, 2),
        ("A(1,2,3)", SpecMixedCharacteristic, 0),
        ("Z(4,2)", NotAPrimePower, 2),
        ("F(2,3)", SpecSyntaxError, 0),
        ("F(2) F(3)", SpecSyntaxError, 5),
        ("F(" + "1" * 60 + ")", SpecSyntaxError, 2),
    ],
)
def test_errors_carry_offsets(text, kind, offset):
    with pytest.raises(kind) as info:
        parse(text)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_mixed_characteristic_is_both_kinds():
    with pytest.raises(MixedCharacteristic):
        parse("A(1,2,3)")


def test_repeat_limits():
    parse(f"F(2)^{MAX_REPEAT}")
    with pytest.raises(SpecSyntaxError):
        parse(f"F(2)^{MAX_REPEAT + 1}")
    with pytest.raises(SpecSyntaxError):
        parse("F(2)^1000^1000^1000")
    with pytest.raises(SpecSyntaxError):
        parse("M(2,2)^1000^1001")


def test_bytes_input():
    assert parse(b"F(2)^2") == FieldSum(P2, 2)
    with pytest.raises(SpecSyntaxError):
        parse(b"F(\xff)")


def _random_atom(rnd):
    p = rnd.choice([2, 3, 5, 7, 11, 101, 65537])
    q = PrimePower(p, rnd.randint(1, 4))
    kind = rnd.choice("FMIAZ")
    if kind == "F":
        return FieldSum(q, rnd.randint(1, 50))
    if kind == "M":
        return MatrixRing(rnd.randint(1, 30), q)
    if kind == "I":
        return Idealization(q, rnd.randint(1, 9))
    if kind == "A":
        return ARing(rnd.randint(1, 30), q, PrimePower(p, rnd.randint(1, 6)))
    return ZeroMult(p, rnd.randint(1, 40))


def test_round_trip_on_ten_thousand_random_descriptions():
    rnd = random.Random(20240611)
    for _ in range(10_000):
        parts = [_random_atom(rnd) for _ in range(rnd.choice([1, 1, 2, 3, 6]))]
        spec = parts[0] if len(parts) == 1 else DirectSum(tuple(parts))
        text = format_spec(spec)
        assert parse(text) == spec, text
        assert format_spec(parse(text)) == text


@settings(max_examples=500, deadline=None)
@given(specs())
def test_round_trip_generated(spec):
    assert parse(format_spec(spec)) == spec


ALPHABET = st.sampled_from(list("FMIdAZ()+,^0123456789 \t-x") + ["é", "\x00"])


@settings(max_examples=2000, deadline=None)
@given(st.text(ALPHABET, max_size=40))
def test_fuzz_text_only_raises_spec_errors(text):
    try:
        parse(text)
    except SpecError as exc:
        assert isinstance(exc.offset, int) and 0 <= exc.offset <= len(text)


@settings(max_examples=2000, deadline=None)
@given(st.binary(max_size=40))
def test_fuzz_bytes_only_raises_spec_errors(data):
    try:
        parse(data)
    except SpecError as exc:
        assert isinstance(exc.offset, int)


def test_non_text_is_a_type_error():
    with pytest.raises(TypeError):
        parse(12)
