"""Explicit covers of the block rings A(n, q1, q2) and their verification.

An element of A(n, q1, q2) is a triple (h, v, beta): h in M_n(F_q1), v in F_q^n,
beta in F_q2, where q = q1 (x) q2. Cover members are kept symbolically:

    conjugate x      {(h, v, beta) : v = h x - x beta}
    stabilizer U     {(h, v, beta) : h U is inside U}     (U a d-dim F_q1-subspace)
    subfield e       {(h, v, beta) : beta in F_(p^e)}
    extra (n = 1)    a maximal subring of F_q1 + F_q2 containing the diagonal
                     copy of F_q1 n F_q2, plus the whole column block

All arithmetic is over F_p on digit vectors, matching the coordinates used by
ringmodel.build_aring.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import primefactors

from .arith import as_prime_power, qbinom, smallest_prime_divisor, tensor
from .fields import field as gf
from .fields import reduce_against, rref
from .oracle import ComplexityCap

RAW_CAP = 1 << 22
REDUCED_CAP = 1 << 24
BATCH = 4096


class UnsupportedParameters(ValueError):
    pass


@dataclass
class ACover:
    n: int
    q1: int
    q2: int
    q: int
    d: int
    conjugates: List[Tuple[int, ...]]  # x as F_q codes
    stabilizers: List[Tuple[Tuple[int, ...], ...]]  # RREF rows as F_q1 codes
    subfields: List[int]  # degrees e of F_(p^e) inside F_q2
    extra: Optional[dict] = None

    @property
    def p(self) -> int:
        return as_prime_power(self.q).p

    @property
    def size(self) -> int:
        return len(self.conjugates) + len(self.stabilizers) + len(self.subfields) + (self.extra is not None)

    def members(self) -> List[tuple]:
        out = [("conjugate", x) for x in self.conjugates]
        out += [("stabilizer", u) for u in self.stabilizers]
        out += [("subfield", e) for e in self.subfields]
        if self.extra is not None:
            out.append(("extra", self.extra))
        return out

    def ring_order(self) -> int:
        return self.q1 ** (self.n * self.n) * self.q**self.n * self.q2

    def to_dict(self) -> dict:
        return {
            "params": {"n": self.n, "q1": self.q1, "q2": self.q2, "q": self.q, "d": self.d},
            "size": self.size,
            "conjugates": [list(x) for x in self.conjugates],
            "stabilizers": [[list(r) for r in u] for u in self.stabilizers],
            "subfields": list(self.subfields),
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ACover":
        pr = doc["params"]
        return cls(
            pr["n"], pr["q1"], pr["q2"], pr["q"], pr["d"],
            [tuple(x) for x in doc["conjugates"]],
            [tuple(tuple(r) for r in u) for u in doc["stabilizers"]],
            list(doc["subfields"]),
            doc.get("extra"),
        )


# ------------------------------------------------------------ construction


def _codes_to_tuples(count: int, base: int, length: int):
    for idx in range(count):
        out = []
        for _ in range(length):
            idx, r = divmod(idx, base)
            out.append(r)
        yield tuple(out)


def echelon_subspaces(n: int, d: int, q: int):
    """d-dim subspaces of F_q^n as RREF row tuples (entries are F_q codes), canonical order."""
    for pivots in itertools.combinations(range(n), d):
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for vals in _codes_to_tuples(q ** len(free), q, len(free)):
            rows = [[0] * n for _ in range(d)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            yield tuple(tuple(r) for r in rows)


def _maximal_subfield_degrees(d_big: int, must_contain: int) -> List[int]:
    """Degrees e of maximal subfields F_(p^e) of F_(p^d_big) with must_contain | e."""
    return sorted(d_big // l for l in primefactors(d_big) if (d_big // l) % must_contain == 0)


def build_A_cover(n: int, q1, q2) -> ACover:
    q1, q2 = as_prime_power(q1), as_prime_power(q2)
    qq = tensor(q1, q2)
    d = qq.d // q1.d
    conj = list(_codes_to_tuples(qq.q**n, qq.q, n))
    if n == 1:
        if (q1.q, q2.q) in ((2, 2), (4, 4)):
            raise UnsupportedParameters(f"A(1,{q1},{q2}) is not covered by this construction")
        g = math.gcd(q1.d, q2.d)
        if q1.d > g:
            extra = {"kind": "pair", "e1": _maximal_subfield_degrees(q1.d, g)[0], "e2": q2.d}
        elif q2.d > q1.d:
            extra = {"kind": "pair", "e1": q1.d, "e2": _maximal_subfield_degrees(q2.d, q1.d)[0]}
        else:
            extra = {"kind": "diagonal"}
        return ACover(1, q1.q, q2.q, qq.q, d, conj, [], [], extra)
    if n < 1:
        raise UnsupportedParameters("n must be positive")
    a = smallest_prime_divisor(n)
    if n == 2 or d >= n - n // a:
        raise UnsupportedParameters(f"A({n},{q1},{q2}) reduces to M({n},{q1}); no construction")
    stabs = list(echelon_subspaces(n, d, q1.q))
    assert len(stabs) == qbinom(n, d, q1.q)
    g = math.gcd(q1.d, q2.d)
    subs = _maximal_subfield_degrees(q2.d, g)
    return ACover(n, q1.q, q2.q, qq.q, d, conj, stabs, subs)


# ------------------------------------------------------------ F_p linear algebra helpers


def _mul_mats(F, digits) -> np.ndarray:
    """Matrices of y -> c y on F_p digit rows, for a batch of c: shape (..., D, D)."""
    return np.einsum("...i,ikd->...kd", digits, F.structure) % F.p


def batch_invertible(mats: np.ndarray, p: int) -> np.ndarray:
    """Which square F_p matrices in a batch (B, m, m) are invertible (Gaussian elimination)."""
    a = np.array(mats, dtype=np.int64) % p
    B, m, _ = a.shape
    ok = np.ones(B, dtype=bool)
    inv_table = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    idx = np.arange(B)
    for c in range(m):
        nz = a[:, c:, c] != 0
        ok &= nz.any(axis=1)
        piv = c + nz.argmax(axis=1)
        row_c = a[idx, c].copy()
        a[idx, c] = a[idx, piv]
        a[idx, piv] = row_c
        a[:, c] = (a[:, c] * inv_table[a[:, c, c]][:, None]) % p
        factors = a[:, :, c].copy()
        factors[:, c] = 0
        a = (a - factors[:, :, None] * a[:, c][:, None, :]) % p
    return ok


class _Geometry:
    """Field data and digit conversions for one parameter tuple."""

    def __init__(self, cover: ACover):
        self.cover = cover
        q1, q2, q = as_prime_power(cover.q1), as_prime_power(cover.q2), as_prime_power(cover.q)
        self.p, self.n = q.p, cover.n
        self.d1, self.d2, self.D = q1.d, q2.d, q.d
        self.F1, self.F2, self.F = gf(q.p, q1.d), gf(q.p, q2.d), gf(q.p, q.d)
        self.emb1 = self.F.embedding_matrix(self.F1)
        self.emb2 = self.F.embedding_matrix(self.F2)
        n, p = self.n, self.p
        self.wq = p ** np.arange(n * self.D, dtype=np.int64)
        self.X = (np.array(cover.conjugates, dtype=np.int64).reshape(-1, n)[..., None] // self.F.weights) % p
        self.X = self.X.reshape(-1, n * self.D)
        self.complete = len(set(cover.conjugates)) == q.q**n
        self.U = [self._expand_subspace(u) for u in cover.stabilizers]
        self.sub_sets = [set(self.F2.subfield_codes(e).tolist()) for e in cover.subfields]

    # -- stabilizers: F_p basis of U inside F_p^(n d1)
    def _expand_subspace(self, rows):
        F1, n, p = self.F1, self.n, self.p
        vecs = []
        for r in rows:
            dig = F1.digits_of(np.array(r, dtype=np.int64))  # (n, d1)
            for k in range(self.d1):
                yk = np.zeros(self.d1, dtype=np.int64)
                yk[k] = 1
                vecs.append(F1.vmul(dig, yk).reshape(-1))
        basis, piv = rref(np.array(vecs), p)
        return basis, piv

    def h_matrices(self, h_dig, F, emb=None):
        """F_p matrices (B, nD, nD) of x -> h x on row vectors; h_dig has shape (B, n, n, d1)."""
        hq = h_dig if emb is None else (h_dig @ emb) % self.p
        Mh = _mul_mats(F, hq)  # (B, a, b, k, e)
        B = h_dig.shape[0]
        Dd = F.d
        return Mh.transpose(0, 2, 3, 1, 4).reshape(B, self.n * Dd, self.n * Dd)

    def stab_flags(self, h_dig) -> np.ndarray:
        """(B, #stabilizers): h U inside U."""
        if not self.U:
            return np.zeros((h_dig.shape[0], 0), dtype=bool)
        H1 = self.h_matrices(h_dig, self.F1)
        out = []
        for basis, piv in self.U:
            img = np.einsum("ur,brs->bus", basis, H1) % self.p
            res = reduce_against(img, basis, piv, self.p)
            out.append(~res.any(axis=(1, 2)))
        return np.stack(out, axis=1)

    def extra_flags(self, h_dig, beta_code: int) -> np.ndarray:
        ex = self.cover.extra
        if ex is None:
            return np.zeros((h_dig.shape[0], 0), dtype=bool)
        hcode = self.F1.encode(h_dig[:, 0, 0, :])
        if ex["kind"] == "diagonal":
            hq = self.F.encode(h_dig[:, 0, 0, :] @ self.emb1)
            bq = int(self.F.encode(self.F2.digits_of(beta_code) @ self.emb2))
            return (hq == bq)[:, None]
        in1 = np.isin(hcode, self.F1.subfield_codes(ex["e1"]))
        in2 = beta_code in set(self.F2.subfield_codes(ex["e2"]).tolist())
        return (in1 & in2)[:, None]

    def other_flags(self, h_dig, stab, beta_code: int) -> np.ndarray:
        sub = np.array([[beta_code in s for s in self.sub_sets]] * h_dig.shape[0], dtype=bool).reshape(h_dig.shape[0], -1)
        return np.concatenate([stab, sub, self.extra_flags(h_dig, beta_code)], axis=1)

    def l_matrices(self, h_dig, beta_code: int) -> np.ndarray:
        """F_p matrices of x -> h x - x beta on F_q^n."""
        Hq = self.h_matrices(h_dig, self.F, self.emb1)
        bq = (self.F2.digits_of(beta_code) @ self.emb2) % self.p
        Mb = _mul_mats(self.F, bq)
        return (Hq - np.kron(np.eye(self.n, dtype=np.int64), Mb)[None]) % self.p

    def pair_batches(self):
        """Yield (h_digits, stabilizer flags, beta code) over all of M_n(q1) x F_q2."""
        n, p, d1 = self.n, self.p, self.d1
        length = n * n * d1
        total = p**length
        w = p ** np.arange(length, dtype=np.int64)
        for start in range(0, total, BATCH):
            idx = np.arange(start, min(total, start + BATCH), dtype=np.int64)
            h = ((idx[:, None] // w) % p).reshape(-1, n, n, d1)
            stab = self.stab_flags(h)
            for beta in range(self.cover.q2):
                yield h, stab, beta


def _row_unique(codes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per row: mask of entries occurring once, and number of distinct entries."""
    order = np.argsort(codes, axis=1, kind="stable")
    sc = np.take_along_axis(codes, order, axis=1)
    if sc.shape[1] == 0:
        return np.zeros_like(codes, dtype=bool), np.zeros(codes.shape[0], dtype=np.int64)
    diff = np.diff(sc, axis=1) != 0
    distinct = 1 + diff.sum(axis=1)
    prev_ne = np.concatenate([np.ones((sc.shape[0], 1), bool), diff], axis=1)
    next_ne = np.concatenate([diff, np.ones((sc.shape[0], 1), bool)], axis=1)
    uniq = np.empty_like(prev_ne)
    np.put_along_axis(uniq, order, prev_ne & next_ne, axis=1)
    return uniq, distinct


# ------------------------------------------------------------ verification


@dataclass
class RawResult:
    covered: bool
    elements: int
    uncovered: int
    first_uncovered: Optional[tuple] = None

    def __bool__(self):
        return self.covered


def verify_cover_raw(cover: ACover, cap: int = RAW_CAP) -> RawResult:
    """Check every ring element against the membership predicates."""
    order = cover.ring_order()
    if order > cap:
        raise ComplexityCap(order, cap)
    g = _Geometry(cover)
    fiber = cover.q**cover.n
    uncovered, first = 0, None
    for h, stab, beta in g.pair_batches():
        other = g.other_flags(h, stab, beta).any(axis=1)
        L = g.l_matrices(h, beta)
        codes = (np.einsum("cr,brs->bcs", g.X, L) % g.p) @ g.wq
        _, distinct = _row_unique(codes)
        missing = np.where(other, 0, fiber - distinct)
        if missing.any() and first is None:
            b = int(np.flatnonzero(missing)[0])
            seen = set(codes[b].tolist())
            v = next(c for c in range(fiber) if c not in seen)
            first = (g.F1.encode(h[b]).tolist(), v, beta)
        uncovered += int(missing.sum())
    return RawResult(uncovered == 0, order, uncovered, first)


def verify_cover_reduced(cover: ACover, cap: int = REDUCED_CAP) -> bool:
    """Check the (h, beta) trichotomy: h - beta I invertible, h fixes a listed U, or beta in a listed subfield.

    An invertible h - beta I makes x -> h x - x beta a bijection, so the whole
    fiber over (h, beta) is covered exactly when every conjugate is present.
    """
    pairs = cover.q1 ** (cover.n * cover.n) * cover.q2
    if pairs > cap:
        raise ComplexityCap(pairs, cap)
    g = _Geometry(cover)
    for h, stab, beta in g.pair_batches():
        other = g.other_flags(h, stab, beta).any(axis=1)
        todo = ~other
        if not todo.any():
            continue
        if not g.complete:
            return False
        inv = batch_invertible(g.l_matrices(h[todo], beta), g.p)
        if not inv.all():
            return False
    return True


@dataclass
class IrredundancyReport:
    irredundant: bool
    witnesses: Dict[int, tuple] = field(default_factory=dict)  # member index -> (h codes, v code, beta)
    missing: List[int] = field(default_factory=list)

    def __bool__(self):
        return self.irredundant

    def to_dict(self) -> dict:
        return {
            "irredundant": self.irredundant,
            "missing": self.missing,
            "witnesses": {str(k): {"h": w[0], "v": w[1], "beta": w[2]} for k, w in sorted(self.witnesses.items())},
        }


def irredundancy(cover: ACover, cap: int = RAW_CAP) -> IrredundancyReport:
    """Find, for every member, an element that no other member contains; re-check each witness."""
    order = cover.ring_order()
    if order > cap:
        raise ComplexityCap(order, cap)
    g = _Geometry(cover)
    nconj = len(cover.conjugates)
    members = cover.members()
    fiber = cover.q**cover.n
    found: Dict[int, tuple] = {}
    for h, stab, beta in g.pair_batches():
        if len(found) == len(members):
            break
        other = g.other_flags(h, stab, beta)
        nother = other.sum(axis=1)
        L = g.l_matrices(h, beta)
        codes = (np.einsum("cr,brs->bcs", g.X, L) % g.p) @ g.wq
        uniq, distinct = _row_unique(codes)
        free = nother == 0
        for j in range(nconj):
            if j in found:
                continue
            rows = np.flatnonzero(free & uniq[:, j])
            if rows.size:
                b = int(rows[0])
                found[j] = (g.F1.encode(h[b]).tolist(), int(codes[b, j]), beta)
        for k in range(other.shape[1]):
            idx = nconj + k
            if idx in found:
                continue
            rows = np.flatnonzero(other[:, k] & (nother == 1) & (distinct < fiber))
            if rows.size:
                b = int(rows[0])
                seen = set(codes[b].tolist())
                v = next(c for c in range(fiber) if c not in seen)
                found[idx] = (g.F1.encode(h[b]).tolist(), v, beta)
    # independent re-check of each witness, one member at a time
    confirmed = {}
    for idx, w in found.items():
        holders = [k for k in range(len(members)) if member_contains(cover, k, *w, geometry=g)]
        if holders == [idx]:
            confirmed[idx] = w
    missing = [k for k in range(len(members)) if k not in confirmed]
    return IrredundancyReport(not missing, confirmed, missing)


def member_contains(cover: ACover, k: int, h_codes, v_code: int, beta: int, geometry=None) -> bool:
    """Does member k contain the element (h, v, beta)? (codes as produced by the verifiers)"""
    g = geometry or _Geometry(cover)
    n, p = cover.n, g.p
    h = g.F1.digits_of(np.asarray(h_codes, dtype=np.int64).reshape(n, n))  # (n, n, d1)
    kind, data = cover.members()[k]
    if kind == "conjugate":
        x = g.F.digits_of(np.asarray(data, dtype=np.int64))  # (n, D)
        hq = (h @ g.emb1) % p
        bq = (g.F2.digits_of(beta) @ g.emb2) % p
        hx = g.F.vmul(hq, x[None, :, :]).sum(axis=1) % p
        xb = g.F.vmul(x, bq[None, :])
        target = (hx - xb) % p
        v = (v_code // g.wq.reshape(n, g.D)) % p
        return bool((target == v).all())
    if kind == "stabilizer":
        basis, piv = g._expand_subspace(data)
        img = []
        for row in np.asarray(data, dtype=np.int64):
            u = g.F1.digits_of(row)
            img.append(g.F1.vmul(h, u[None, :, :]).sum(axis=1) % p)
        res = reduce_against(np.array(img).reshape(len(img), -1), basis, piv, p)
        return not res.any()
    if kind == "subfield":
        return beta in set(g.F2.subfield_codes(data).tolist())
    return bool(g.extra_flags(h[None], beta)[0, 0])


# ------------------------------------------------------------ export and materialization


def export_json(cover: ACover, **kw) -> str:
    return json.dumps(cover.to_dict(), **kw)


def _left_nullspace(K: np.ndarray, p: int) -> np.ndarray:
    """Basis of {a : a K = 0} over F_p."""
    m, c = K.shape
    aug = np.concatenate([K % p, np.eye(m, dtype=np.int64)], axis=1)
    red, piv = rref(aug, p)
    rows = [r for r, pc in zip(red, piv) if pc >= c]
    if not rows:
        return np.zeros((0, m), dtype=np.int64)
    return rref(np.array(rows)[:, c:], p)[0]


def materialize(cover: ACover) -> List[np.ndarray]:
    """Each member as an F_p basis in the coordinates of ringmodel.build_aring."""
    g = _Geometry(cover)
    n, p, d1, D, d2 = g.n, g.p, g.d1, g.D, g.d2
    dim = n * n * d1 + n * D + d2
    E = np.eye(dim, dtype=np.int64)
    h = E[:, : n * n * d1].reshape(dim, n, n, d1)
    v = E[:, n * n * d1 : n * n * d1 + n * D].reshape(dim, n, D)
    b = E[:, dim - d2 :]
    out = []
    for kind, data in cover.members():
        if kind == "conjugate":
            x = g.F.digits_of(np.asarray(data, dtype=np.int64))
            hq = (h @ g.emb1) % p
            bq = (b @ g.emb2) % p
            hx = g.F.vmul(hq, x[None, None, :, :]).sum(axis=2)
            xb = g.F.vmul(x[None, :, :], bq[:, None, :])
            K = (v - hx + xb).reshape(dim, -1) % p
        elif kind == "stabilizer":
            basis, piv = g._expand_subspace(data)
            H1 = g.h_matrices(h, g.F1)
            img = np.einsum("ur,brs->bus", basis, H1) % p
            K = reduce_against(img, basis, piv, p).reshape(dim, -1)
        elif kind == "subfield":
            K = _outside(b, g.F2, [data], p)
        elif data["kind"] == "diagonal":
            K = ((h[:, 0, 0, :] @ g.emb1) - (b @ g.emb2)) % p
        else:
            K = np.concatenate([_outside(h[:, 0, 0, :], g.F1, [data["e1"]], p), _outside(b, g.F2, [data["e2"]], p)], axis=1)
        out.append(_left_nullspace(K, p))
    return out


def _outside(digits, F, degrees, p):
    """Residue of digit rows modulo the subfield F_(p^e), a linear constraint."""
    codes = F.subfield_codes(degrees[0])
    basis, piv = rref(F.digits_of(codes), p)
    return reduce_against(digits, basis, piv, p)


def certificate_json(cover: ACover, **kw) -> str:
    """Cover in the oracle's certificate format (ring model plus member bases)."""
    from .ringmodel import build_aring

    ring = build_aring(cover.n, as_prime_power(cover.q1), as_prime_power(cover.q2))
    members = materialize(cover)
    doc = {"ring": ring.to_dict(), "certificate": {"size": len(members), "members": [m.tolist() for m in members]}}
    return json.dumps(doc, **kw)
