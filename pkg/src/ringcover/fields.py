"""Small finite fields F_{p^d} as lookup tables, plus F_p linear algebra.

Field elements are integer codes: the coefficient vector (c_0, ..., c_{d-1}) of
c_0 + c_1 x + ... in F_p[x]/(m(x)) is stored as sum c_i p^i. The modulus m is
the monic irreducible of degree d whose non-leading coefficients, read as the
same base-p code, are smallest.
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Sequence

import numpy as np

# ------------------------------------------------------------ polynomials over F_p
# Polynomials are tuples of coefficients, lowest degree first, no trailing zeros.


def poly_trim(a: Sequence[int]) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_mul(a, b, p) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return poly_trim(out)


def poly_divmod(a, b, p):
    a = list(a)
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = (a[-1] * inv_lead) % p
        quot[shift] = c
        for i, y in enumerate(b):
            a[i + shift] = (a[i + shift] - c * y) % p
        a = list(poly_trim(a))
    return poly_trim(quot), poly_trim(a)


def monic_polys(p: int, d: int):
    """All monic polynomials of degree d over F_p, in code order."""
    for code in range(p**d):
        yield _code_to_tail(code, p, d) + (1,)


def _code_to_tail(code: int, p: int, d: int) -> tuple:
    out = []
    for _ in range(d):
        code, r = divmod(code, p)
        out.append(r)
    return tuple(out)


def is_irreducible(f, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    f = poly_trim(f)
    deg = len(f) - 1
    if deg < 1:
        return False
    for k in range(1, deg // 2 + 1):
        for code in range(p**k):
            g = _code_to_tail(code, p, k) + (1,)
            if not poly_divmod(f, g, p)[1]:
                return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, d: int) -> tuple:
    for code in range(p**d):
        f = _code_to_tail(code, p, d) + (1,)
        if is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ------------------------------------------------------------ field tables


class GF:
    """The field F_{p^d}.

    Digit-vector arithmetic (`vmul`) works at any size; the integer-code lookup
    tables (`add`, `mul`, `neg`, `sub`, `inv`) are built on first use and only
    for q <= TABLE_LIMIT.
    """

    TABLE_LIMIT = 1 << 12

    def __init__(self, p: int, d: int = 1):
        self.p, self.d = p, d
        self.q = p**d
        self.modulus = smallest_irreducible(p, d)
        self.weights = p ** np.arange(d, dtype=np.int64)
        # structure[i, j] = digits of x^(i+j) mod m
        powers = []
        for k in range(2 * d - 1):
            r = poly_divmod((0,) * k + (1,), self.modulus, p)[1]
            powers.append(list(r) + [0] * (d - len(r)))
        powers = np.array(powers, dtype=np.int64).reshape(2 * d - 1, d)
        idx = np.add.outer(np.arange(d), np.arange(d))
        self.structure = powers[idx]
        self._tables = None

    def __repr__(self):
        return f"GF({self.q})"

    # -- digit vectors
    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of (batches of) digit vectors."""
        return np.einsum("...i,...j,ijk->...k", a, b, self.structure) % self.p

    def digits_of(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self.weights) % self.p

    def encode(self, digit_arr) -> np.ndarray:
        return (np.asarray(digit_arr, dtype=np.int64) % self.p) @ self.weights

    def all_digits(self) -> np.ndarray:
        return self.digits_of(np.arange(self.q))

    # -- code tables
    def _build_tables(self):
        if self.q > self.TABLE_LIMIT:
            raise ValueError(f"lookup tables for GF({self.q}) exceed the size limit")
        dig = self.all_digits()
        add = self.encode(dig[:, None, :] + dig[None, :, :])
        mul = self.encode(self.vmul(dig[:, None, :], dig[None, :, :]))
        neg = self.encode(-dig)
        inv = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        self._tables = dict(add=add, mul=mul, neg=neg, sub=add[:, neg], inv=inv)

    def __getattr__(self, name):
        if name in ("add", "mul", "neg", "sub", "inv"):
            if self._tables is None:
                self._build_tables()
            return self._tables[name]
        raise AttributeError(name)

    def power(self, a: int, k: int) -> int:
        out, base = 1, a
        while k:
            if k & 1:
                out = int(self.mul[out, base])
            base = int(self.mul[base, base])
            k >>= 1
        return out

    def subfield_codes(self, e: int) -> np.ndarray:
        """Codes of the subfield F_{p^e} (e must divide d): fixed points of x -> x^(p^e)."""
        assert self.d % e == 0
        pe = self.p**e
        return np.array([a for a in range(self.q) if self.power(a, pe) == a], dtype=np.int64)

    def embedding_matrix(self, small: "GF") -> np.ndarray:
        """F_p-matrix (small.d x self.d) of a ring embedding small -> self.

        Row i holds the digits of r^i, where r is the smallest-code root here
        of small's modulus.
        """
        assert small.p == self.p and self.d % small.d == 0
        allx = self.all_digits()
        acc = np.zeros_like(allx)
        for c in reversed(small.modulus):
            acc = self.vmul(acc, allx)
            acc[:, 0] = (acc[:, 0] + c) % self.p
        roots = np.flatnonzero(~acc.any(axis=1))
        root = allx[int(roots[0])]
        rows = [np.eye(1, self.d, 0, dtype=np.int64)[0]]
        for _ in range(small.d - 1):
            rows.append(self.vmul(rows[-1], root))
        return np.array(rows, dtype=np.int64).reshape(small.d, self.d)

    def embed_from(self, small: "GF") -> np.ndarray:
        """The same embedding as a code lookup table small.code -> self.code."""
        mat = self.embedding_matrix(small)
        return self.encode(small.all_digits() @ mat)


@lru_cache(maxsize=None)
def field(p: int, d: int = 1) -> GF:
    return GF(p, d)


@lru_cache(maxsize=None)
def embedding(p: int, d_small: int, d_big: int) -> np.ndarray:
    return field(p, d_big).embed_from(field(p, d_small))


# ------------------------------------------------------------ linear algebra over F_p


def rref(mat, p: int):
    """Reduced row echelon form over F_p; returns (rows, pivot_columns) without zero rows."""
    a = np.array(mat, dtype=np.int64) % p
    if a.ndim == 1:
        a = a.reshape(1, -1)
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def reduce_against(vecs: np.ndarray, basis: np.ndarray, pivots: Sequence[int], p: int) -> np.ndarray:
    """Residues of row vectors after elimination by an RREF basis (zero iff in span)."""
    v = np.array(vecs, dtype=np.int64) % p
    if len(pivots) == 0:
        return v
    coeffs = v[..., list(pivots)]
    return (v - coeffs @ basis) % p


def solve_left(basis: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray:
    """Solve X @ basis = targets over F_p for full-row-rank basis; raises if inconsistent."""
    basis = np.asarray(basis, dtype=np.int64) % p
    targets = np.atleast_2d(np.asarray(targets, dtype=np.int64) % p)
    k = basis.shape[0]
    # Row-reduce [basis | I] so that E @ basis = R (rref)
    aug = np.concatenate([basis, np.eye(k, dtype=np.int64)], axis=1)
    red, piv = rref(aug, p)
    ncols = basis.shape[1]
    piv_b = [c for c in piv if c < ncols]
    if len(piv_b) != k:
        raise ValueError("basis is not linearly independent")
    r_part = red[:k, :ncols]
    e_part = red[:k, ncols:]
    coeffs = targets[:, piv_b]
    resid = (targets - coeffs @ r_part) % p
    if resid.any():
        raise ValueError("target not in row space")
    return (coeffs @ e_part) % p
