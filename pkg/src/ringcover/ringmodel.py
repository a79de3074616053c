"""Finite rings of prime characteristic p as structure-constant algebras over F_p.

A ring with F_p-basis b_0..b_{m-1} is stored as the tensor ``mult[i, j, k]``:
the k-th coordinate of b_i * b_j. Elements are coefficient vectors in F_p^m;
the *rank* of an element is sum v_i p^i, which indexes bitmask-encoded subsets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import families as fam
from .arith import MixedCharacteristic, tensor
from .fields import GF, field as gf, rref, reduce_against, solve_left

DEFAULT_MAX_ORDER = 1 << 20


class RingError(ValueError):
    pass


class DimensionCap(RingError):
    pass


class NotAssociative(RingError):
    pass


class FiniteRing:
    def __init__(self, p: int, mult, unity=None, labels: Optional[Sequence[str]] = None,
                 spec_origin=None, check: bool = True):
        mult = np.asarray(mult, dtype=np.int64) % p
        if mult.ndim != 3 or len(set(mult.shape)) != 1:
            raise RingError(f"mult must be an m x m x m table, got shape {mult.shape}")
        self.p = int(p)
        self.dim = mult.shape[0]
        self.mult = mult
        self.mult.setflags(write=False)
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(self.dim))
        self.spec_origin = spec_origin
        if check:
            self._check_associative()
        self.unity = None
        if unity is not None:
            u = np.asarray(unity, dtype=np.int64) % p
            if not self.is_identity(u):
                raise RingError("declared unity is not a two-sided identity")
            self.unity = u
            self.unity.setflags(write=False)

    def __repr__(self):
        origin = f" {self.spec_origin}" if self.spec_origin is not None else ""
        return f"<FiniteRing p={self.p} dim={self.dim}{origin}>"

    @property
    def order(self) -> int:
        return self.p**self.dim

    def _check_associative(self):
        t = self.mult
        left = np.einsum("ijl,lkm->ijkm", t, t) % self.p
        right = np.einsum("jkl,ilm->ijkm", t, t) % self.p
        if not np.array_equal(left, right):
            bad = np.argwhere((left != right).any(axis=-1))[0]
            raise NotAssociative(f"(b{bad[0]} b{bad[1]}) b{bad[2]} != b{bad[0]} (b{bad[1]} b{bad[2]})")

    # -- arithmetic on coefficient vectors (batched over leading axes)
    def mul(self, x, y) -> np.ndarray:
        return np.einsum("...i,...j,ijk->...k", np.asarray(x), np.asarray(y), self.mult) % self.p

    def is_identity(self, u) -> bool:
        eye = np.eye(self.dim, dtype=np.int64)
        return bool(np.array_equal(self.mul(u, eye), eye) and np.array_equal(self.mul(eye, u), eye))

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.transpose(1, 0, 2)))

    # -- element indexing
    @property
    def weights(self) -> np.ndarray:
        return self.p ** np.arange(self.dim, dtype=np.int64)

    def rank(self, vecs) -> np.ndarray:
        return (np.asarray(vecs, dtype=np.int64) % self.p) @ self.weights

    def vector(self, rank: int) -> np.ndarray:
        return (int(rank) // self.weights) % self.p

    def elements(self) -> np.ndarray:
        """All p^dim elements as rows, in rank order."""
        return (np.arange(self.order, dtype=np.int64)[:, None] // self.weights) % self.p

    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def mask_of_ranks(self, ranks) -> int:
        flags = np.zeros(self.order, dtype=bool)
        flags[np.asarray(ranks, dtype=np.int64)] = True
        return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")

    def span_elements(self, basis) -> np.ndarray:
        basis = np.asarray(basis, dtype=np.int64).reshape(-1, self.dim)
        k = basis.shape[0]
        if k == 0:
            return np.zeros((1, self.dim), dtype=np.int64)
        coeffs = (np.arange(self.p**k, dtype=np.int64)[:, None] // (self.p ** np.arange(k))) % self.p
        return coeffs @ basis % self.p

    def span_mask(self, basis) -> int:
        return self.mask_of_ranks(self.rank(self.span_elements(basis)))

    # -- interchange
    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "dim": self.dim,
            "mult": self.mult.tolist(),
            "unity": None if self.unity is None else self.unity.tolist(),
            "labels": list(self.labels),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc: dict) -> "FiniteRing":
        mult = np.asarray(doc["mult"], dtype=np.int64)
        if mult.shape != (doc["dim"],) * 3:
            raise RingError("mult shape does not match dim")
        return cls(doc["p"], mult, unity=doc.get("unity"), labels=doc.get("labels"))

    @classmethod
    def from_json(cls, text: str) -> "FiniteRing":
        return cls.from_dict(json.loads(text))


@dataclass(eq=False)
class SubringBasis:
    """An F_p-subspace in reduced row echelon form (canonical: equal spans, equal bases)."""

    basis: np.ndarray
    pivots: tuple
    unital: bool = False
    _mask: Optional[int] = field(default=None, repr=False)

    @property
    def dim_sub(self) -> int:
        return len(self.pivots)

    @property
    def key(self) -> tuple:
        return tuple(map(tuple, self.basis.tolist()))

    def __eq__(self, other):
        return isinstance(other, SubringBasis) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def mask(self, ring: FiniteRing) -> int:
        if self._mask is None:
            self._mask = ring.span_mask(self.basis)
        return self._mask

    def contains(self, ring: FiniteRing, vecs) -> np.ndarray:
        resid = reduce_against(np.atleast_2d(vecs), self.basis, self.pivots, ring.p)
        return ~resid.any(axis=-1)


def span(ring: FiniteRing, vecs) -> SubringBasis:
    vecs = np.asarray(vecs, dtype=np.int64).reshape(-1, ring.dim)
    if vecs.shape[0] == 0:
        basis, piv = np.zeros((0, ring.dim), dtype=np.int64), []
    else:
        basis, piv = rref(vecs, ring.p)
    sub = SubringBasis(basis, tuple(piv))
    if ring.unity is not None:
        sub.unital = bool(sub.contains(ring, ring.unity)[0])
    return sub


def product_residues(ring: FiniteRing, sub: SubringBasis) -> np.ndarray:
    """Pairwise products of basis vectors, reduced modulo the span; all zero iff closed."""
    b = sub.basis
    if b.shape[0] == 0:
        return np.zeros((0, ring.dim), dtype=np.int64)
    prods = ring.mul(b[:, None, :], b[None, :, :]).reshape(-1, ring.dim)
    return reduce_against(prods, b, sub.pivots, ring.p)


def is_subring(ring: FiniteRing, sub: SubringBasis) -> bool:
    return not product_residues(ring, sub).any()


def closure(ring: FiniteRing, gens) -> SubringBasis:
    """Smallest subring (additive subgroup closed under products) containing gens."""
    sub = span(ring, gens)
    while True:
        resid = product_residues(ring, sub)
        new = resid[resid.any(axis=1)]
        if new.shape[0] == 0:
            return sub
        sub = span(ring, np.vstack([sub.basis, new]))


def find_unity(ring: FiniteRing) -> Optional[np.ndarray]:
    """The two-sided identity, found by solving u * b_j = b_j = b_j * u over F_p."""
    m = ring.dim
    if m == 0:
        return None
    # coefficient matrix: row i is the contribution of u_i to all equations
    left = ring.mult.reshape(m, m * m)  # u_i * b_j
    right = ring.mult.transpose(1, 0, 2).reshape(m, m * m)  # b_j * u_i
    system = np.concatenate([left, right], axis=1)
    target = np.concatenate([np.eye(m, dtype=np.int64).reshape(-1)] * 2)
    try:
        basis_rows, row_idx = _independent_rows(system, ring.p)
        coeffs = solve_left(basis_rows, target, ring.p)[0]
    except ValueError:
        return None
    u = np.zeros(m, dtype=np.int64)
    u[row_idx] = coeffs
    return u if ring.is_identity(u) else None


def _independent_rows(mat, p):
    """Indices of a maximal linearly independent set of rows (greedy, in order)."""
    chosen = []
    basis = np.zeros((0, mat.shape[1]), dtype=np.int64)
    piv: list = []
    for i, row in enumerate(np.asarray(mat) % p):
        if reduce_against(row[None, :], basis, piv, p).any():
            chosen.append(i)
            basis, piv = rref(np.vstack([basis, row]), p)
    return np.asarray(mat)[chosen] % p, chosen


def unitalize(ring: FiniteRing, max_order: int = DEFAULT_MAX_ORDER) -> FiniteRing:
    """F_p x R with (n1, r1)(n2, r2) = (n1 n2, n1 r2 + n2 r1 + r1 r2); unity (1, 0)."""
    m = ring.dim
    if ring.p ** (m + 1) > max_order:
        raise DimensionCap(f"unitalization has order {ring.p}^{m + 1} > {max_order}")
    t = np.zeros((m + 1,) * 3, dtype=np.int64)
    t[0, 0, 0] = 1
    for i in range(m):
        t[0, i + 1, i + 1] = 1
        t[i + 1, 0, i + 1] = 1
    t[1:, 1:, 1:] = ring.mult
    unity = np.zeros(m + 1, dtype=np.int64)
    unity[0] = 1
    labels = ("1'",) + ring.labels
    return FiniteRing(ring.p, t, unity=unity, labels=labels, spec_origin=("unitalize", ring.spec_origin))


# ------------------------------------------------------------ constructors


def _matrix_algebra(F: GF, size: int, basis_mats, labels, unity_coords=None, origin=None) -> FiniteRing:
    """Structure constants of an F_p-subalgebra of M_size(F_q) given by a basis.

    basis_mats has shape (m, size, size, D): entries as F_p digit vectors of F_q.
    """
    mats = np.asarray(basis_mats, dtype=np.int64) % F.p
    m = mats.shape[0]
    flat = mats.reshape(m, -1)
    prods = np.einsum("aijx,bjky,xyz->abikz", mats, mats, F.structure) % F.p
    coords = solve_left(flat, prods.reshape(m * m, -1), F.p)
    mult = coords.reshape(m, m, m)
    unity = None
    if unity_coords is not None:
        unity = solve_left(flat, np.asarray(unity_coords).reshape(1, -1), F.p)[0]
    return FiniteRing(F.p, mult, unity=unity, labels=labels, spec_origin=origin)


def _identity_mat(size, D):
    eye = np.zeros((size, size, D), dtype=np.int64)
    for i in range(size):
        eye[i, i, 0] = 1
    return eye


def _unit_digit(D, k):
    v = np.zeros(D, dtype=np.int64)
    v[k] = 1
    return v


def build_field(q) -> FiniteRing:
    F = gf(q.p, q.d)
    mats = [np.array([[_unit_digit(q.d, k)]]) for k in range(q.d)]
    labels = [f"x^{k}" for k in range(q.d)]
    return _matrix_algebra(F, 1, mats, labels, _identity_mat(1, q.d), fam.FieldSum(q, 1))


def build_matrix(n: int, q) -> FiniteRing:
    F = gf(q.p, q.d)
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            for k in range(q.d):
                m = np.zeros((n, n, q.d), dtype=np.int64)
                m[i, j, k] = 1
                mats.append(m)
                labels.append(f"E{i}{j}*x^{k}")
    return _matrix_algebra(F, n, mats, labels, _identity_mat(n, q.d), fam.MatrixRing(n, q))


def build_idealization(q, lam: int = 2) -> FiniteRing:
    F = gf(q.p, q.d)
    size, D = lam + 1, q.d
    mats, labels = [], []
    for k in range(D):
        m = np.zeros((size, size, D), dtype=np.int64)
        for i in range(size):
            m[i, i, k] = 1
        mats.append(m)
        labels.append(f"r*x^{k}")
    for j in range(1, size):
        for k in range(D):
            m = np.zeros((size, size, D), dtype=np.int64)
            m[0, j, k] = 1
            mats.append(m)
            labels.append(f"m{j}*x^{k}")
    return _matrix_algebra(F, size, mats, labels, _identity_mat(size, D), fam.Idealization(q, lam))


def build_aring(n: int, q1, q2) -> FiniteRing:
    """A(n, q1, q2) inside M_{n+1}(F_q); basis order: M_n(q1) block, column block, corner."""
    q = tensor(q1, q2)
    F = gf(q.p, q.d)
    D = q.d
    emb1 = F.embedding_matrix(gf(q1.p, q1.d))
    emb2 = F.embedding_matrix(gf(q2.p, q2.d))
    size = n + 1
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            for k in range(q1.d):
                m = np.zeros((size, size, D), dtype=np.int64)
                m[i, j] = emb1[k]
                mats.append(m)
                labels.append(f"h{i}{j}*y^{k}")
    for i in range(n):
        for k in range(D):
            m = np.zeros((size, size, D), dtype=np.int64)
            m[i, n, k] = 1
            mats.append(m)
            labels.append(f"v{i}*x^{k}")
    for k in range(q2.d):
        m = np.zeros((size, size, D), dtype=np.int64)
        m[n, n] = emb2[k]
        mats.append(m)
        labels.append(f"beta*z^{k}")
    return _matrix_algebra(F, size, mats, labels, _identity_mat(size, D), fam.ARing(n, q1, q2))


def build_zero(p: int, k: int) -> FiniteRing:
    return FiniteRing(p, np.zeros((k, k, k), dtype=np.int64), labels=[f"z{i}" for i in range(k)],
                      spec_origin=fam.ZeroMult(p, k))


def direct_sum(rings: Sequence[FiniteRing], origin=None) -> FiniteRing:
    ps = {r.p for r in rings}
    if len(ps) != 1:
        raise MixedCharacteristic("explicit models need a single characteristic p")
    p = ps.pop()
    m = sum(r.dim for r in rings)
    t = np.zeros((m, m, m), dtype=np.int64)
    labels = []
    unity = np.zeros(m, dtype=np.int64)
    unital = all(r.unity is not None for r in rings)
    off = 0
    for idx, r in enumerate(rings):
        sl = slice(off, off + r.dim)
        t[sl, sl, sl] = r.mult
        labels.extend(f"[{idx}]{lab}" for lab in r.labels)
        if unital:
            unity[sl] = r.unity
        off += r.dim
    return FiniteRing(p, t, unity=unity if unital else None, labels=labels, spec_origin=origin)


def build(spec, max_order: int = DEFAULT_MAX_ORDER) -> FiniteRing:
    """Explicit model of a RingFamily description."""
    order = fam.ring_order(spec)
    if len(fam.characteristics(spec)) > 1:
        raise MixedCharacteristic("explicit models need a single characteristic p")
    if order > max_order:
        raise DimensionCap(f"|R| = {order} exceeds the cap {max_order}")
    return _build(spec)


def _build(spec) -> FiniteRing:
    if isinstance(spec, fam.DirectSum):
        return direct_sum([_build(part) for part in spec.parts], origin=spec)
    if isinstance(spec, fam.FieldSum):
        if spec.t == 1:
            return build_field(spec.q)
        return direct_sum([build_field(spec.q)] * spec.t, origin=spec)
    if isinstance(spec, fam.MatrixRing):
        return build_matrix(spec.n, spec.q)
    if isinstance(spec, fam.Idealization):
        return build_idealization(spec.q, spec.lam)
    if isinstance(spec, fam.ARing):
        return build_aring(spec.n, spec.q1, spec.q2)
    if isinstance(spec, fam.ZeroMult):
        return build_zero(spec.p, spec.k)
    raise TypeError(f"not a ring family: {spec!r}")
