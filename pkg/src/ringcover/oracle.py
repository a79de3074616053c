"""Brute-force covering numbers of small explicit rings.

sigma(R) is computed directly from the definition: enumerate every subring,
keep the maximal proper ones, and solve minimum set cover exactly over the
ring's elements.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, List, Optional, Sequence

import numpy as np

from .arith import INF, ExtNat, qbinom
from .ringmodel import FiniteRing, SubringBasis, closure, is_subring, span

DEFAULT_CAP = 10**6


class ComplexityCap(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"subspace count {estimate} exceeds the enumeration cap {cap}")
        self.estimate, self.cap = estimate, cap


class MalformedBasis(ValueError):
    pass


def default_cap() -> int:
    env = os.environ.get("SIGMA_ORACLE_CAP")
    return int(env) if env else DEFAULT_CAP


def galois_number(m: int, p: int) -> int:
    """Total number of subspaces of F_p^m."""
    return sum(qbinom(m, k, p) for k in range(m + 1))


# ------------------------------------------------------------ subring enumeration


def _canonical(subs: Iterable[SubringBasis]) -> List[SubringBasis]:
    return sorted(set(subs), key=lambda s: (s.dim_sub, s.key))


def _echelon_batches(dim: int, k: int, p: int, batch: int = 4096):
    """Yield (pivots, bases[B, k, dim]) for every k-dim subspace of F_p^dim in RREF."""
    for pivots in itertools.combinations(range(dim), k):
        pivset = set(pivots)
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, dim) if c not in pivset]
        template = np.zeros((k, dim), dtype=np.int64)
        for r, c in enumerate(pivots):
            template[r, c] = 1
        nfree = len(free)
        total = p**nfree
        rows = np.array([rc[0] for rc in free], dtype=np.int64)
        cols = np.array([rc[1] for rc in free], dtype=np.int64)
        weights = p ** np.arange(nfree, dtype=np.int64)
        for start in range(0, total, batch):
            idx = np.arange(start, min(total, start + batch), dtype=np.int64)
            bases = np.repeat(template[None], idx.size, axis=0)
            if nfree:
                vals = (idx[:, None] // weights) % p
                bases[:, rows, cols] = vals
            yield pivots, bases


def _enumerate_echelon(ring: FiniteRing) -> List[SubringBasis]:
    p, dim = ring.p, ring.dim
    found = [span(ring, np.zeros((0, dim)))]
    for k in range(1, dim + 1):
        for pivots, bases in _echelon_batches(dim, k, p):
            prods = np.einsum("bai,bcj,ijk->back", bases, bases, ring.mult) % p
            prods = prods.reshape(bases.shape[0], k * k, dim)
            coeffs = prods[:, :, list(pivots)]
            resid = (prods - np.einsum("bnk,bkd->bnd", coeffs, bases)) % p
            closed = ~resid.any(axis=(1, 2))
            for b in bases[closed]:
                sub = SubringBasis(b.copy(), tuple(pivots))
                if ring.unity is not None:
                    sub.unital = bool(sub.contains(ring, ring.unity)[0])
                found.append(sub)
    return found


def _enumerate_by_closure(ring: FiniteRing) -> List[SubringBasis]:
    """Every subring arises from {0} by repeatedly adjoining one element and closing."""
    elements = ring.elements()
    zero = span(ring, np.zeros((0, ring.dim)))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for sub in frontier:
            inside = sub.contains(ring, elements)
            for r in elements[~inside]:
                t = closure(ring, np.vstack([sub.basis, r]))
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return list(seen)


def enumerate_subrings(ring: FiniteRing, unital_only: bool = False, cap: Optional[int] = None,
                       method: str = "echelon") -> List[SubringBasis]:
    """All subrings of `ring` (including {0} and ring itself), in canonical order."""
    cap = default_cap() if cap is None else cap
    estimate = galois_number(ring.dim, ring.p)
    if estimate > cap:
        raise ComplexityCap(estimate, cap)
    if unital_only and ring.unity is None:
        raise ValueError("unital_only requested for a ring without unity")
    if method == "echelon":
        subs = _enumerate_echelon(ring)
    elif method == "closure":
        subs = _enumerate_by_closure(ring)
    else:
        raise ValueError(f"unknown enumeration method {method!r}")
    if unital_only:
        subs = [s for s in subs if s.unital]
    return _canonical(subs)


def maximal_subrings(ring: FiniteRing, unital_only: bool = False, cap: Optional[int] = None,
                     subrings: Optional[List[SubringBasis]] = None) -> List[SubringBasis]:
    """Proper subrings not contained in a larger proper one (unital mode: among unital subrings)."""
    if subrings is None:
        subrings = enumerate_subrings(ring, unital_only=unital_only, cap=cap)
    elif unital_only:
        subrings = [s for s in subrings if s.unital]
    proper = [s for s in subrings if s.dim_sub < ring.dim]
    proper.sort(key=lambda s: (-s.dim_sub, s.key))
    maximal: List[SubringBasis] = []
    for s in proper:
        ms = s.mask(ring)
        if not any((ms & m.mask(ring)) == ms for m in maximal):
            # anything containing s would be larger, so would already be listed or be contained in a listed one
            maximal.append(s)
    return _canonical(maximal)


# ------------------------------------------------------------ exact minimum set cover


@dataclass
class CoverSolution:
    indices: List[int]

    @property
    def size(self) -> int:
        return len(self.indices)


def _popcount(x: int) -> int:
    return bin(x).count("1") if not hasattr(int, "bit_count") else x.bit_count()


def min_cover(universe: Iterable[Hashable], sets: Sequence[Iterable[Hashable]]) -> Optional[CoverSolution]:
    """Exact minimum-cardinality subfamily of `sets` whose union contains `universe`.

    Branch and bound: greedy incumbent, branch on the uncovered element lying in
    the fewest sets, prune with the ceil(uncovered / best gain) bound, and drop
    candidate sets dominated by another candidate. Ties follow input order, so
    the returned certificate is reproducible. None if no cover exists.
    """
    universe = list(dict.fromkeys(universe))
    pos = {u: i for i, u in enumerate(universe)}
    masks = []
    for s in sets:
        m = 0
        for e in s:
            i = pos.get(e)
            if i is not None:
                m |= 1 << i
        masks.append(m)
    return min_cover_masks(len(universe), masks)


def min_cover_masks(n: int, masks: Sequence[int]) -> Optional[CoverSolution]:
    full = (1 << n) - 1
    if n == 0:
        return CoverSolution([])
    union = 0
    for m in masks:
        union |= m
    if union & full != full:
        return None
    containing = [[j for j, m in enumerate(masks) if (m >> i) & 1] for i in range(n)]

    # greedy incumbent
    covered, greedy = 0, []
    while covered != full:
        j = max(range(len(masks)), key=lambda j: (_popcount(masks[j] & ~covered), -j))
        greedy.append(j)
        covered |= masks[j]
    best = [sorted(greedy)]

    def search(covered: int, chosen: List[int]):
        uncovered = full & ~covered
        if not uncovered:
            if len(chosen) < len(best[0]):
                best[0] = sorted(chosen)
            return
        gains = [_popcount(m & uncovered) for m in masks]
        top = max(gains)
        if len(chosen) + -(-_popcount(uncovered) // top) >= len(best[0]):
            return
        # element with the fewest covering sets
        pivot, fewest = -1, None
        rest = uncovered
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            c = len(containing[i])
            if fewest is None or c < fewest:
                pivot, fewest = i, c
                if c == 1:
                    break
        cands = sorted(containing[pivot], key=lambda j: (-gains[j], j))
        kept: List[int] = []
        for j in cands:
            mj = masks[j] & uncovered
            if any((mj & (masks[k] & uncovered)) == mj for k in kept):
                continue
            kept.append(j)
        for j in kept:
            chosen.append(j)
            search(covered | masks[j], chosen)
            chosen.pop()

    search(0, [])
    return CoverSolution(best[0])


# ------------------------------------------------------------ covering numbers


@dataclass
class CoverCertificate:
    members: List[SubringBasis]
    proper: bool
    covering: bool
    irredundant: bool

    @property
    def size(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "proper": self.proper,
            "covering": self.covering,
            "irredundant": self.irredundant,
            "members": [m.basis.tolist() for m in self.members],
        }


@dataclass
class OracleResult:
    value: ExtNat
    unital: bool
    certificate: Optional[CoverCertificate]
    n_subrings: int
    n_maximal: int
    universe_size: int = 0
    extra: dict = field(default_factory=dict)


def cyclic_representatives(ring: FiniteRing) -> np.ndarray:
    """One element (smallest rank) per distinct singly generated subring <r>.

    r is covered by a family of subrings iff <r> lies inside one of them, so
    covering the representatives covers every element.
    """
    reps = {}
    for r in ring.elements():
        key = closure(ring, r[None, :]).key
        if key not in reps:
            reps[key] = r
    return np.array(list(reps.values()), dtype=np.int64).reshape(-1, ring.dim)


def oracle_cover(ring: FiniteRing, unital: bool = False, cap: Optional[int] = None,
                 reduce_universe: bool = True) -> OracleResult:
    if unital and ring.unity is None:
        raise ValueError("unital covering number requested for a ring without unity")
    subs = enumerate_subrings(ring, unital_only=unital, cap=cap)
    maxi = maximal_subrings(ring, unital_only=unital, subrings=subs)
    universe = cyclic_representatives(ring) if reduce_universe else ring.elements()
    member_of = np.array([m.contains(ring, universe) for m in maxi], dtype=bool).reshape(len(maxi), -1)
    n = universe.shape[0]
    masks = []
    for row in member_of:
        masks.append(int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little"))
    sol = min_cover_masks(n, masks) if maxi else None
    if sol is None:
        return OracleResult(INF, unital, None, len(subs), len(maxi), n)
    members = [maxi[j] for j in sol.indices]
    cert = verify_certificate(ring, members)
    return OracleResult(sol.size, unital, cert, len(subs), len(maxi), n)


def sigma_brute(ring: FiniteRing, unital: bool = False, cap: Optional[int] = None,
                reduce_universe: bool = True) -> ExtNat:
    """sigma(R) (or sigma_u(R) when unital=True); INF when no cover exists."""
    return oracle_cover(ring, unital, cap, reduce_universe).value


def verify_certificate(ring: FiniteRing, members) -> CoverCertificate:
    """Check a proposed cover: proper subrings, full union, no redundant member.

    Never claims minimality.
    """
    subs = []
    for m in members:
        basis = m.basis if isinstance(m, SubringBasis) else np.asarray(m)
        basis = np.asarray(basis)
        if basis.size and (basis.ndim != 2 or basis.shape[1] != ring.dim):
            raise MalformedBasis(f"basis vectors must have length {ring.dim}")
        if basis.size and (not np.issubdtype(basis.dtype, np.integer) or basis.min() < 0 or basis.max() >= ring.p):
            raise MalformedBasis(f"coordinates must be integers in [0, {ring.p})")
        subs.append(span(ring, basis.reshape(-1, ring.dim)))
    proper = all(is_subring(ring, s) and s.dim_sub < ring.dim for s in subs)
    masks = [s.mask(ring) for s in subs]
    full = ring.full_mask()
    union = 0
    for m in masks:
        union |= m
    covering = union == full
    irredundant = covering
    if covering:
        for i in range(len(masks)):
            rest = 0
            for j, m in enumerate(masks):
                if j != i:
                    rest |= m
            if rest == full:
                irredundant = False
                break
    return CoverCertificate(subs, proper, covering, irredundant)


def certificate_to_json(ring: FiniteRing, cert: CoverCertificate, **kw) -> str:
    return json.dumps({"ring": ring.to_dict(), "certificate": cert.to_dict()}, **kw)


def certificate_from_json(text: str):
    doc = json.loads(text)
    ring = FiniteRing.from_dict(doc["ring"])
    members = [np.asarray(b, dtype=np.int64).reshape(-1, ring.dim) for b in doc["certificate"]["members"]]
    return ring, verify_certificate(ring, members)
