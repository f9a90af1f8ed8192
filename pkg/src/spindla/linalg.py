"""Exact sparse linear algebra over the rationals.

Vectors are ``dict[int, int | Fraction]`` keyed by nonnegative integers.
``Echelon`` keeps a reduced row-echelon form with coprime integer rows
(fraction-free); ``ModEchelon`` does the same over GF(p).
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, Iterable, List, Mapping, Optional

from .pauli import primitive

__all__ = ["Echelon", "ModEchelon", "rank", "nullspace", "rational_reconstruct"]


class Echelon:
    """Reduced row-echelon basis of a growing subspace.

    Every row is a coprime integer vector whose pivot is its smallest key, and
    no pivot key appears in any other row.  The reduced form of a subspace is
    unique, so ``rows`` depends only on the span (up to row order).
    """

    def __init__(self):
        self.rows: List[Dict[int, int]] = []
        self.pivots: Dict[int, int] = {}
        self._cols: Dict[int, set] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[int, object]) -> Dict[int, int]:
        """Primitive integer vector congruent to ``vec`` modulo the span with no
        pivot keys (empty dict iff ``vec`` is in the span)."""
        v = primitive(vec)
        if not v:
            return v
        pivots, rows = self.pivots, self.rows
        for k in [k for k in v if k in pivots]:
            _eliminate(v, rows[pivots[k]], k)
        return primitive(v) if v else v

    def insert(self, vec: Mapping[int, object]) -> Optional[Dict[int, int]]:
        """Add ``vec`` to the span; return its reduced form, or None if dependent."""
        r = self.reduce(vec)
        if not r:
            return None
        p = min(r)
        idx = len(self.rows)
        cols = self._cols
        for i in sorted(cols.pop(p, ())):
            row = self.rows[i]
            before = set(row)
            _eliminate(row, r, p)
            prim = primitive(row)
            row.clear()
            row.update(prim)
            after = set(row)
            for k in before - after:
                if k in cols:
                    cols[k].discard(i)
            for k in after - before:
                cols.setdefault(k, set()).add(i)
        self.pivots[p] = idx
        self.rows.append(r)
        for k in r:
            if k != p:
                cols.setdefault(k, set()).add(idx)
        return dict(r)

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)

    def back_substituted(self) -> List[Dict[int, Fraction]]:
        """Rows scaled to pivot entry 1, ordered by pivot."""
        out = []
        for p in sorted(self.pivots):
            row = self.rows[self.pivots[p]]
            lead = row[p]
            out.append({k: Fraction(c, lead) for k, c in row.items()})
        return out


def _eliminate(v: Dict[int, int], row: Mapping[int, int], k: int) -> None:
    """In place: ``v <- a v - b row`` with the ``k`` entry cancelled."""
    vk = v[k]
    rk = row[k]
    g = gcd(rk, vk)
    a, b = rk // g, vk // g
    if a != 1:
        for key in v:
            v[key] *= a
    for key, c in row.items():
        nv = v.get(key, 0) - b * c
        if nv:
            v[key] = nv
        else:
            v.pop(key, None)


def rank(vectors: Iterable[Mapping[int, object]]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.insert(v)
    return len(ech)


def nullspace(rows: Iterable[Mapping[int, object]], unknowns: Iterable[int],
              method: str = "modular") -> List[Dict[int, Fraction]]:
    """Basis of ``{s : row . s = 0 for every row}`` over the given unknown keys.

    Each basis vector has a 1 at one free unknown and zeros at the other free
    unknowns.  ``method="modular"`` solves over GF(p), reconstructs rationals
    and checks every returned vector exactly against every row; since the
    nullity over GF(p) is never below the rational nullity, a fully verified
    result is the rational null space.  It falls back to ``"exact"``.
    """
    rows = [primitive(r) for r in rows]
    rows = [r for r in rows if r]
    unknowns = sorted(set(unknowns))
    if method == "modular":
        for prime in (MERSENNE_61, (1 << 89) - 1):
            basis = _nullspace_mod(rows, unknowns, prime)
            if basis is not None:
                return basis
    elif method != "exact":
        raise ValueError(f"unknown method {method!r}")
    ech = Echelon()
    for r in rows:
        ech.insert(r)
    return _free_solutions(ech.back_substituted(), unknowns)


def _free_solutions(reduced: List[Mapping[int, object]], unknowns: List[int]) -> List[Dict[int, object]]:
    pivot_of = {min(r): r for r in reduced}
    basis = []
    for f in unknowns:
        if f in pivot_of:
            continue
        sol = {f: 1}
        for piv, r in pivot_of.items():
            c = r.get(f)
            if c:
                sol[piv] = -c
        basis.append(sol)
    return basis


def _nullspace_mod(rows: List[Dict[int, int]], unknowns: List[int], prime: int):
    mod = ModEchelon(prime)
    for r in rows:
        mod.insert(r)
    out = []
    for sol in _free_solutions(mod.rows, unknowns):
        exact = {}
        for k, c in sol.items():
            q = rational_reconstruct(c % prime, prime)
            if q is None:
                return None
            if q:
                exact[k] = q
        out.append(exact)
    for r in rows:
        for s in out:
            if sum(c * s[k] for k, c in r.items() if k in s):
                return None
    return out


MERSENNE_61 = (1 << 61) - 1


class ModEchelon:
    """Reduced row-echelon basis over GF(p); rows are monic at their smallest key."""

    def __init__(self, p: int = MERSENNE_61):
        self.p = p
        self.rows: List[Dict[int, int]] = []
        self.pivots: Dict[int, int] = {}
        self._cols: Dict[int, set] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[int, int]) -> Dict[int, int]:
        p = self.p
        v = {k: c % p for k, c in vec.items() if c % p}
        pivots, rows = self.pivots, self.rows
        for k in [k for k in v if k in pivots]:
            f = v.get(k)
            if not f:
                continue
            for key, c in rows[pivots[k]].items():
                nv = (v.get(key, 0) - f * c) % p
                if nv:
                    v[key] = nv
                else:
                    v.pop(key, None)
        return v

    def insert(self, vec: Mapping[int, int]) -> Optional[Dict[int, int]]:
        r = self.reduce(vec)
        if not r:
            return None
        p = self.p
        piv = min(r)
        inv = pow(r[piv], -1, p)
        r = {k: c * inv % p for k, c in r.items()}
        idx = len(self.rows)
        cols = self._cols
        for i in cols.pop(piv, ()):
            row = self.rows[i]
            f = row.pop(piv)
            for key, c in r.items():
                if key == piv:
                    continue
                nv = (row.get(key, 0) - f * c) % p
                if nv:
                    if key not in row:
                        cols.setdefault(key, set()).add(i)
                    row[key] = nv
                elif key in row:
                    del row[key]
                    cols[key].discard(i)
        self.pivots[piv] = idx
        self.rows.append(r)
        for k in r:
            if k != piv:
                cols.setdefault(k, set()).add(idx)
        return r


def rational_reconstruct(a: int, p: int) -> Optional[Fraction]:
    """Smallest-height rational ``n/d`` with ``n = a d (mod p)``, or None."""
    bound = isqrt(p // 2)
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)
