"""Closed-form covering numbers of the sigma-elementary families and a reducer for direct sums."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .arith import (
    INF,
    ExtNat,
    as_prime_power,
    is_prime_power,
    nu,
    omega,
    qbinom,
    smallest_prime_divisor,
    tau,
    tensor,
)
from .families import ARing, DirectSum, FieldSum, Idealization, MatrixRing, ZeroMult, flatten


class NotCoverable(ValueError):
    """The ring has no cover by proper subrings (sigma is infinite)."""


class Unsupported(ValueError):
    """classify cannot decide this ring; route it to the brute-force oracle."""


class Method(str, Enum):
    CLOSED_FORM = "ClosedForm"
    REDUCTION = "Reduction"
    ORACLE_REQUIRED = "OracleRequired"


@dataclass
class SigmaReport:
    value: Optional[ExtNat]
    unital_value: Optional[ExtNat]
    elementary: bool = False
    u_elementary: bool = False
    method: Method = Method.CLOSED_FORM
    reduction_trail: List[Tuple[object, str]] = field(default_factory=list)
    reason: Optional[str] = None

    def __post_init__(self):
        if self.value is not None and self.unital_value is not None:
            assert self.value <= self.unital_value
        if self.elementary:
            assert self.value is not None and self.value != INF

    def to_dict(self) -> dict:
        from .specparser import format_spec

        def ext(v):
            if v is None:
                return None
            return "Infinity" if v == INF else int(v)

        out = {
            "sigma": ext(self.value),
            "sigma_u": ext(self.unital_value),
            "elementary": self.elementary,
            "u_elementary": self.u_elementary,
            "method": self.method.value,
            "reduction_trail": [[format_spec(s), rule] for s, rule in self.reduction_trail],
        }
        if self.reason:
            out["reason"] = self.reason
        return out


# ------------------------------------------------------------ the four families


def sigma_field_sum(q) -> int:
    """sigma of tau(q) copies of F_q."""
    q = as_prime_power(q)
    t = tau(q)
    return t * nu(q) + q.d * math.comb(t, 2)


def sigma_idealization(q) -> int:
    return as_prime_power(q).q + 1


def matrix_product_term(n: int, q) -> int:
    """(1/a) * prod over 1 <= k <= n-1, a not dividing k, of (q^n - q^k)."""
    q = as_prime_power(q).q
    a = smallest_prime_divisor(n)
    prod = 1
    for k in range(1, n):
        if k % a:
            prod *= q**n - q**k
    quot, rem = divmod(prod, a)
    assert rem == 0, f"product for M({n},{q}) not divisible by {a}"
    return quot


def sigma_matrix(n: int, q) -> int:
    if n < 2:
        raise NotCoverable("M(1,q) is a field")
    q = as_prime_power(q)
    a = smallest_prime_divisor(n)
    tail = sum(qbinom(n, k, q.q) for k in range(1, n // 2 + 1) if k % a)
    return matrix_product_term(n, q) + tail


def a_ring_degree(q1, q2) -> int:
    """d with q1^d = q1 (x) q2."""
    q1 = as_prime_power(q1)
    return tensor(q1, q2).d // q1.d


def sigma_A(n: int, q1, q2) -> SigmaReport:
    q1, q2 = as_prime_power(q1), as_prime_power(q2)
    q = tensor(q1, q2)  # raises MixedCharacteristic
    d = q.d // q1.d
    if n == 1:
        if (q1.q, q2.q) == (2, 2):
            return SigmaReport(3, 3, False, True, Method.REDUCTION,
                               [(FieldSum(2, 2), "quotient by the radical")])
        if (q1.q, q2.q) == (4, 4):
            return SigmaReport(4, 4, False, False, Method.REDUCTION,
                               [(FieldSum(4, 2), "quotient by the radical")])
        v = q.q + 1
        return SigmaReport(v, v, True, True)
    a = smallest_prime_divisor(n)
    if n == 2 or d >= n - n // a:
        v = sigma_matrix(n, q1)
        return SigmaReport(v, v, False, False, Method.REDUCTION,
                           [(MatrixRing(n, q1), "quotient onto the matrix block")])
    if (n, q1.q) == (3, 2):
        v = sigma_matrix(3, 2)
        return SigmaReport(v, v, False, False, Method.REDUCTION,
                           [(MatrixRing(3, 2), "minimum over proper quotients")])
    v = q.q**n + qbinom(n, d, q1.q) + omega(d)
    return SigmaReport(v, v, True, True)


# ------------------------------------------------------------ composite rings


def _normalize(part):
    """Blocks that are really a single field become FieldSum copies."""
    if isinstance(part, Idealization) and part.lam == 1:
        return FieldSum(part.q, 1)
    if isinstance(part, MatrixRing) and part.n == 1:
        return FieldSum(part.q, 1)
    return part


def _simple_components(part) -> list:
    """Simple components of R/J for a non-field block, as (n, q) pairs."""
    if isinstance(part, Idealization):
        return [(1, part.q.q)]
    if isinstance(part, MatrixRing):
        return [(part.n, part.q.q)]
    if isinstance(part, ARing):
        return [(part.n, part.q1.q), (1, part.q2.q)]
    return []


@dataclass
class _Partial:
    value: Optional[ExtNat]
    unital_value: Optional[ExtNat]
    trail: list
    reason: Optional[str] = None
    reduced: bool = False


def _classify_char(parts) -> _Partial:
    parts = [_normalize(x) for x in parts]
    zero = [x for x in parts if isinstance(x, ZeroMult)]
    if zero:
        if len(zero) != len(parts):
            return _Partial(None, None, [], "zero-multiplication block alongside other blocks")
        k = sum(z.k for z in zero)
        p = zero[0].p
        v = p + 1 if k >= 2 else INF
        trail = [] if len(zero) == 1 else [(ZeroMult(p, k), "merge zero-multiplication blocks")]
        return _Partial(v, INF, trail, reduced=bool(trail))

    copies = defaultdict(int)
    others = []
    for x in parts:
        if isinstance(x, FieldSum):
            copies[x.q] += x.t
        else:
            others.append(x)

    seen = {(1, q.q) for q in copies}
    for x in others:
        comps = _simple_components(x)
        if isinstance(x, ARing) and comps[0] == comps[1]:
            comps = comps[:1]
        for c in comps:
            if c in seen:
                return _Partial(None, None, [], f"simple component M({c[0]},{c[1]}) occurs in more than one block")
            seen.add(c)

    cands = []  # (value, unital_value, trail, block)
    for q, t in sorted(copies.items()):
        if t >= tau(q):
            v = sigma_field_sum(q)
            if q.d == 1:
                # exact for every t >= p; unital covers need one more copy
                vu = v if t >= q.p + 1 else INF
                cands.append((v, vu, [], FieldSum(q, t)))
            else:
                trail = []
                if t > tau(q):
                    trail = [(FieldSum(q, tau(q)), "quotient to tau(q) copies; equality not proven for d >= 2")]
                cands.append((v, v, trail, FieldSum(q, t)))
    for x in others:
        if isinstance(x, Idealization):
            v = sigma_idealization(x.q)
            trail = [] if x.lam == 2 else [(Idealization(x.q, 2), "quotient to module length 2")]
            cands.append((v, v, trail, x))
        elif isinstance(x, MatrixRing):
            v = sigma_matrix(x.n, x.q)
            cands.append((v, v, [], x))
        elif isinstance(x, ARing):
            rep = sigma_A(x.n, x.q1, x.q2)
            cands.append((rep.value, rep.unital_value, list(rep.reduction_trail), x))
        else:
            raise TypeError(f"unexpected block {x!r}")

    if not cands:
        return _Partial(INF, INF, [])
    v = min(c[0] for c in cands)
    vu = min(c[1] for c in cands)
    best = next(c for c in cands if c[0] == v)
    trail = list(best[2])
    if len(parts) > 1:
        trail.insert(0, (best[3], "smallest value among the blocks"))
    reduced = len(parts) > 1 or bool(trail)
    return _Partial(v, vu, trail, reduced=reduced)


def _elementary_flags(spec) -> Tuple[bool, bool]:
    parts = flatten(spec)
    if len(parts) != 1:
        return False, False
    x = parts[0]
    if isinstance(x, FieldSum):
        t = tau(x.q)
        if x.q.d == 1:
            return x.t == t, x.t == x.q.p + 1
        return x.t == t, x.t == t
    if isinstance(x, Idealization):
        return x.lam == 2, x.lam == 2
    if isinstance(x, MatrixRing):
        return x.n >= 2, x.n >= 2
    if isinstance(x, ARing):
        rep = sigma_A(x.n, x.q1, x.q2)
        return rep.elementary, rep.u_elementary
    return False, False


def classify(spec, strict: bool = False) -> SigmaReport:
    """sigma and sigma_u of a supported composite ring.

    Parts of coprime characteristic are handled separately and the minimum is
    taken. Within one characteristic the candidates are the formula values of
    the blocks (field copies pooled by q). Blocks sharing a simple component,
    or zero-multiplication blocks mixed with others, are not decided here:
    the report comes back with method OracleRequired (or Unsupported is raised
    when strict=True).
    """
    by_char = defaultdict(list)
    for part in flatten(spec):
        by_char[part.p].append(part)
    partials = [_classify_char(parts) for _, parts in sorted(by_char.items())]
    unresolved = [x for x in partials if x.value is None]
    if unresolved:
        reason = "; ".join(x.reason for x in unresolved)
        if strict:
            raise Unsupported(reason)
        return SigmaReport(None, None, False, False, Method.ORACLE_REQUIRED, [], reason)
    value = min(x.value for x in partials)
    unital_value = min(x.unital_value for x in partials)
    if any(isinstance(x, ZeroMult) for x in flatten(spec)):
        unital_value = INF
    trail = []
    if len(partials) > 1:
        trail.append((spec, "minimum over parts of coprime characteristic"))
    for x in partials:
        if x.value == value:
            trail.extend(x.trail)
            break
    reduced = len(partials) > 1 or any(x.reduced for x in partials)
    el, uel = _elementary_flags(spec)
    method = Method.REDUCTION if (reduced or trail) else Method.CLOSED_FORM
    return SigmaReport(value, unital_value, el, uel, method, trail)


def sigma(spec, unital: bool = False) -> ExtNat:
    rep = classify(spec, strict=True)
    return rep.unital_value if unital else rep.value


# ------------------------------------------------------------ inverse search


def _isqrt_exact(x: int) -> Optional[int]:
    if x < 0:
        return None
    r = math.isqrt(x)
    return r if r * r == x else None


def witnesses(m: int) -> list:
    """One canonical sigma-elementary ring per family parameterization with sigma = m.

    Order: matrix rings, field sums, idealizations, A-rings; ascending
    parameters within a family.
    """
    from . import sieve

    if m < 3:
        return []
    out_m, out_f, out_i, out_a = [], [], [], []

    # matrix rings: n = 2 solves q^2 + q + 2 = 2m, larger n by bounded scan
    r = _isqrt_exact(8 * m - 7)
    if r is not None and (r - 1) % 2 == 0:
        q = (r - 1) // 2
        if is_prime_power(q) and sigma_matrix(2, q) == m:
            out_m.append(MatrixRing(2, q))
    for n, q, v in sieve.matrix_params(m, min_n=3):
        if v == m:
            out_m.append(MatrixRing(n, q))

    # field sums: d = 1 solves (p^2 + p)/2 = m
    r = _isqrt_exact(1 + 8 * m)
    if r is not None and (r - 1) % 2 == 0:
        p = (r - 1) // 2
        pp = is_prime_power(p)
        if pp is not None and pp.d == 1:
            out_f.append(FieldSum(p, tau(p)))
    for q, v in sieve.field_sum_params(m, min_d=2):
        if v == m:
            out_f.append(FieldSum(q, tau(q)))
    out_f.sort(key=lambda x: x.q.q)

    if is_prime_power(m - 1):
        out_i.append(Idealization(m - 1))

    for n, q1, d, v in sieve.a_ring_params(m):
        if v == m:
            out_a.append(ARing(n, q1, q1.q**d))
    return out_m + out_f + out_i + out_a
