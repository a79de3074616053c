"""Hypothesis strategies for ring descriptions."""

from hypothesis import strategies as st

from ringcover.arith import PrimePower
from ringcover.families import ARing, DirectSum, FieldSum, Idealization, MatrixRing, ZeroMult

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


@st.composite
def prime_powers(draw, p=None, max_d=6):
    p = draw(st.sampled_from(SMALL_PRIMES)) if p is None else p
    return PrimePower(p, draw(st.integers(1, max_d)))


@st.composite
def atoms(draw, p=None, with_zero=True):
    kinds = ["F", "M", "Id", "A"] + (["Z"] if with_zero else [])
    kind = draw(st.sampled_from(kinds))
    q = draw(prime_powers(p))
    if kind == "F":
        return FieldSum(q, draw(st.integers(1, 12)))
    if kind == "M":
        return MatrixRing(draw(st.integers(1, 6)), q)
    if kind == "Id":
        return Idealization(q, draw(st.integers(1, 4)))
    if kind == "A":
        return ARing(draw(st.integers(1, 6)), q, draw(prime_powers(q.p)))
    return ZeroMult(q.p, draw(st.integers(1, 5)))


@st.composite
def specs(draw, p=None, with_zero=True, max_parts=4):
    parts = draw(st.lists(atoms(p, with_zero), min_size=1, max_size=max_parts))
    return parts[0] if len(parts) == 1 else DirectSum(tuple(parts))
