"""Symbolic descriptions of finite rings built from the standard blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .arith import MixedCharacteristic, PrimePower, as_prime_power, is_prime_power


def _pp(obj, name):
    object.__setattr__(obj, name, as_prime_power(getattr(obj, name)))


@dataclass(frozen=True)
class FieldSum:
    """t copies of the field F_q."""

    q: PrimePower
    t: int = 1

    def __post_init__(self):
        _pp(self, "q")
        if self.t < 1:
            raise ValueError("FieldSum needs t >= 1")

    @property
    def p(self):
        return self.q.p


@dataclass(frozen=True)
class Idealization:
    """F_q (+) F_q^lam: pairs (r, m) with (r1, m1)(r2, m2) = (r1 r2, r1 m2 + r2 m1)."""

    q: PrimePower
    lam: int = 2

    def __post_init__(self):
        _pp(self, "q")
        if self.lam < 1:
            raise ValueError("Idealization needs lam >= 1")

    @property
    def p(self):
        return self.q.p


@dataclass(frozen=True)
class MatrixRing:
    n: int
    q: PrimePower

    def __post_init__(self):
        _pp(self, "q")
        if self.n < 1:
            raise ValueError("MatrixRing needs n >= 1")

    @property
    def p(self):
        return self.q.p


@dataclass(frozen=True)
class ARing:
    """Block upper-triangular ring [[M_n(q1), F_q^n], [0, F_q2]] with q = q1 (x) q2."""

    n: int
    q1: PrimePower
    q2: PrimePower

    def __post_init__(self):
        _pp(self, "q1")
        _pp(self, "q2")
        if self.n < 1:
            raise ValueError("ARing needs n >= 1")
        if self.q1.p != self.q2.p:
            raise MixedCharacteristic(f"A({self.n},{self.q1},{self.q2}): q1 and q2 differ in characteristic")

    @property
    def p(self):
        return self.q1.p


@dataclass(frozen=True)
class ZeroMult:
    """F_p^k with every product zero."""

    p: int
    k: int

    def __post_init__(self):
        pp = is_prime_power(self.p)
        if pp is None or pp.d != 1:
            raise ValueError(f"ZeroMult needs a prime, got {self.p}")
        if self.k < 1:
            raise ValueError("ZeroMult needs k >= 1")


@dataclass(frozen=True)
class DirectSum:
    parts: Tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("empty direct sum")


RingFamily = (FieldSum, Idealization, MatrixRing, ARing, ZeroMult, DirectSum)


def flatten(spec) -> list:
    """Atomic summands of a spec, nested direct sums expanded in order."""
    if isinstance(spec, DirectSum):
        out = []
        for part in spec.parts:
            out.extend(flatten(part))
        return out
    return [spec]


def characteristics(spec) -> set:
    return {part.p for part in flatten(spec)}


def is_unital(spec) -> bool:
    return not any(isinstance(part, ZeroMult) for part in flatten(spec))


def ring_order(spec) -> int:
    """|R| as predicted by the block description."""
    if isinstance(spec, DirectSum):
        out = 1
        for part in spec.parts:
            out *= ring_order(part)
        return out
    if isinstance(spec, FieldSum):
        return spec.q.q**spec.t
    if isinstance(spec, Idealization):
        return spec.q.q ** (spec.lam + 1)
    if isinstance(spec, MatrixRing):
        return spec.q.q ** (spec.n * spec.n)
    if isinstance(spec, ARing):
        from .arith import tensor

        q = tensor(spec.q1, spec.q2).q
        return spec.q1.q ** (spec.n * spec.n) * q**spec.n * spec.q2.q
    if isinstance(spec, ZeroMult):
        return spec.p**spec.k
    raise TypeError(f"not a ring family: {spec!r}")
