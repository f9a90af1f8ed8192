"""Brute-force and closed-form cross-checks for the chain results.

Fermionic convention: ``a_m = Z_1 ... Z_{m-1} (X_m + i Y_m) / 2``, so that
``a_m^dag a_m = (I - Z_m) / 2`` and ``Z_m = I - 2 a_m^dag a_m``; a ``1`` in a
basis label is an occupied mode.  Scalar (identity) parts are carried
separately from the one-body matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Tuple

import numpy as np

from .closure import close_algebra
from .linalg import rank
from .pauli import PauliString, PauliVector, _anticommute, vector_commutator, vector_product
from .subspace import GaussianRational
from .validation import max_sites

__all__ = [
    "pair_factors",
    "pair_operators",
    "pair_rank",
    "pair_rank_formula",
    "pair_count_formula",
    "lemma_identity",
    "dla_dimension_formula",
    "FORMULA_TAGS",
    "xxz_graded_rank_formula",
    "FermionQuadratic",
    "jordan_wigner_map",
    "fermion_to_pauli",
    "jw_generators",
    "jw_structure_check",
    "jw_one_body_rank",
    "g_set_rank",
    "check_record",
]


def check_record(check: str, inputs: dict, expected, got) -> dict:
    return {"check": check, "inputs": inputs, "expected": expected, "got": got,
            "pass": expected == got}


def _bound(n: int) -> None:
    limit = max_sites("enumeration")
    if n > limit:
        raise ValueError(f"brute-force enumeration limited to N <= {limit}, got {n}")


# ---------------------------------------------------------------------------
# p-pair operators

def pair_factors(n: int, a: int, b: int) -> Tuple[PauliVector, PauliVector]:
    """``X_a X_b + Y_a Y_b`` and ``X_a Y_b - Y_a X_b``."""
    p = lambda ops: PauliString.from_sites(n, ops).key
    sym = PauliVector(n, {p({a: "X", b: "X"}): 1, p({a: "Y", b: "Y"}): 1})
    anti = PauliVector(n, {p({a: "X", b: "Y"}): 1, p({a: "Y", b: "X"}): -1})
    return sym, anti


def _matchings(sites: Tuple[int, ...], p: int):
    """All sets of ``p`` disjoint unordered pairs from ``sites``."""
    if p == 0:
        yield ()
        return
    for i, a in enumerate(sites):
        for j in range(i + 1, len(sites)):
            b = sites[j]
            rest = tuple(s for s in sites[i + 1:] if s != b)
            for m in _matchings(rest, p - 1):
                yield ((a, b),) + m


def pair_operators(n: int, p: int) -> List[PauliVector]:
    """Every element of the p-pair set: one factor type chosen per disjoint pair."""
    if not (p > 0 and 2 * p <= n):
        raise ValueError(f"need N >= 2p > 0, got N={n}, p={p}")
    _bound(n)
    out = []
    for pairs in _matchings(tuple(range(1, n + 1)), p):
        factor_sets = [pair_factors(n, a, b) for a, b in pairs]
        for choice in itertools.product(*factor_sets):
            v = choice[0]
            for f in choice[1:]:
                v = vector_product(v, f)
            out.append(v)
    return out


def pair_rank(n: int, p: int) -> int:
    return rank(v.coeffs for v in pair_operators(n, p))


def pair_rank_formula(n: int, p: int) -> int:
    if not (p > 0 and 2 * p <= n):
        raise ValueError(f"need N >= 2p > 0, got N={n}, p={p}")
    return comb(n, p) * comb(n - p, p)


def pair_count_formula(n: int, p: int) -> int:
    return factorial(p) * comb(n, p) * comb(n - p, p)


# ---------------------------------------------------------------------------
# closed forms

def lemma_identity(n: int) -> bool:
    if n < 1:
        raise ValueError("n must be positive")
    rhs = sum(Fraction(factorial(n) * 2 ** (n - 2 * p), factorial(p) ** 2 * factorial(n - 2 * p))
              for p in range(n // 2 + 1))
    return rhs == comb(2 * n, n)


FORMULA_TAGS = ("xxz_z1", "xyz_z1", "xx_z1", "xx_z1x1", "xx_z1x2", "full")


def dla_dimension_formula(tag: str, n: int) -> Optional[int]:
    """Predicted DLA dimension for a model tag, or None when no closed form applies."""
    if tag not in FORMULA_TAGS:
        raise ValueError(f"unknown model tag {tag!r}; expected one of {', '.join(FORMULA_TAGS)}")
    if n < 1:
        raise ValueError("n must be positive")
    if tag == "xxz_z1":
        return comb(2 * n, n) - n + 1 if n >= 2 else None
    if tag == "xyz_z1":
        return 2 ** (2 * n - 1) - 2 if n > 2 else None
    if tag == "xx_z1":
        return n * n
    if tag == "xx_z1x1":
        return n * (2 * n + 1)
    if tag == "xx_z1x2":
        if n < 2:
            return None
        half = 2 ** (n - 1)
        return 2 ** (2 * n - 1) - half if n % 4 in (0, 1) else 2 ** (2 * n - 1) + half
    return 4 ** n - 1


def xxz_graded_rank_formula(n: int, ell: int) -> int:
    """Rank of the weight-``ell`` part of the XXZ + Z1 algebra, for 3 <= ell <= N."""
    if not 3 <= ell <= n:
        raise ValueError(f"formula holds for 3 <= l <= N, got l={ell}, N={n}")
    total = sum(pair_rank_formula(n, p) * comb(n - 2 * p, ell - 2 * p)
                for p in range(1, ell // 2 + 1))
    return total + comb(n, ell) - 1


# ---------------------------------------------------------------------------
# Jordan-Wigner

@dataclass(frozen=True)
class FermionQuadratic:
    """``sum_{mn} h[m][n] a_m^dag a_n + scalar`` with a Hermitian ``h`` (0-based indices)."""

    h: Tuple[Tuple[GaussianRational, ...], ...]
    scalar: Fraction = Fraction(0)

    def __post_init__(self):
        n = len(self.h)
        for m in range(n):
            if len(self.h[m]) != n:
                raise ValueError("one-body matrix must be square")
            for k in range(n):
                if self.h[m][k] != self.h[k][m].conjugate():
                    raise ValueError("one-body matrix must be Hermitian")

    @property
    def n_modes(self) -> int:
        return len(self.h)

    def matrix(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.h])

    @classmethod
    def from_entries(cls, n: int, entries: Dict[Tuple[int, int], GaussianRational],
                     scalar=0) -> "FermionQuadratic":
        """Build from 1-based ``{(m, n): value}``; entries are not symmetrised."""
        zero = GaussianRational()
        rows = [[zero] * n for _ in range(n)]
        for (m, k), v in entries.items():
            rows[m - 1][k - 1] = v if isinstance(v, GaussianRational) else GaussianRational(v)
        return cls(tuple(tuple(r) for r in rows), Fraction(scalar))


def _hop_strings(n: int, m: int, k: int) -> Dict[str, int]:
    """Packed keys of X Z..Z X, Y Z..Z Y, X Z..Z Y, Y Z..Z X between sites m < k."""
    mid = {s: "Z" for s in range(m + 1, k)}
    return {ab: PauliString.from_sites(n, {m: ab[0], k: ab[1], **mid}).key
            for ab in ("XX", "YY", "XY", "YX")}


def jordan_wigner_map(v: PauliVector) -> FermionQuadratic:
    """One-body matrix and scalar of an operator quadratic in the fermion modes."""
    n = v.n_sites
    left = dict(v.coeffs)
    scalar = Fraction(left.pop(0, 0))
    entries: Dict[Tuple[int, int], GaussianRational] = {}
    for m in range(1, n + 1):
        c = left.pop(PauliString.from_sites(n, {m: "Z"}).key, 0)
        if c:
            # c Z_m = c I - 2 c a_m^dag a_m
            entries[(m, m)] = GaussianRational(-2 * c)
            scalar += c
    for m in range(1, n + 1):
        for k in range(m + 1, n + 1):
            keys = _hop_strings(n, m, k)
            cxx, cyy = left.pop(keys["XX"], 0), left.pop(keys["YY"], 0)
            cxy, cyx = left.pop(keys["XY"], 0), left.pop(keys["YX"], 0)
            if cxx != cyy or cxy != -cyx:
                raise ValueError("not a quadratic fermionic form")
            if cxx or cxy:
                # alpha (a_m^dag a_k + h.c.) = alpha/2 (XX + YY);
                # i beta (a_m^dag a_k - h.c.) = -beta/2 (XY - YX)
                alpha, beta = 2 * Fraction(cxx), -2 * Fraction(cxy)
                entries[(m, k)] = GaussianRational(alpha, beta)
                entries[(k, m)] = GaussianRational(alpha, -beta)
    if left:
        raise ValueError("not a quadratic fermionic form")
    return FermionQuadratic.from_entries(n, entries, scalar)


def fermion_to_pauli(f: FermionQuadratic) -> PauliVector:
    """Inverse of :func:`jordan_wigner_map`."""
    n = f.n_modes
    out: Dict[int, Fraction] = {}
    if f.scalar:
        out[0] = f.scalar
    for m in range(1, n + 1):
        hmm = f.h[m - 1][m - 1]
        if hmm.im:
            raise ValueError("one-body matrix must be Hermitian")
        if hmm.re:
            out[0] = out.get(0, 0) + hmm.re / 2
            out[PauliString.from_sites(n, {m: "Z"}).key] = -hmm.re / 2
    for m in range(1, n + 1):
        for k in range(m + 1, n + 1):
            v = f.h[m - 1][k - 1]
            if not v:
                continue
            keys = _hop_strings(n, m, k)
            out[keys["XX"]] = v.re / 2
            out[keys["YY"]] = v.re / 2
            out[keys["XY"]] = -v.im / 2
            out[keys["YX"]] = v.im / 2
    return PauliVector(n, out)


def _unit(n: int, entries) -> PauliVector:
    return fermion_to_pauli(FermionQuadratic.from_entries(n, entries))


def jw_generators(n: int, m: int, k: int) -> Dict[str, PauliVector]:
    """Hermitian parts (``element = i * part``) of ``x_mk``, ``y_mk``, ``z_m``, ``z_k``.

    ``x_mk = i (a_m^dag a_k + a_k^dag a_m)``, ``y_mk = a_k^dag a_m - a_m^dag a_k``
    and ``z_m = i a_m^dag a_m``.
    """
    one, i = GaussianRational(1), GaussianRational(0, 1)
    return {
        "x": _unit(n, {(m, k): one, (k, m): one}),
        "y": _unit(n, {(m, k): i, (k, m): -i}),
        "zm": _unit(n, {(m, m): one}),
        "zk": _unit(n, {(k, k): one}),
    }


def _x(n, m, k):
    return jw_generators(n, m, k)["x"]


def _y(n, m, k):
    return jw_generators(n, m, k)["y"]


def _z(n, m):
    return _unit(n, {(m, m): GaussianRational(1)})


def jw_structure_check(n: int, with_closure: bool = True) -> bool:
    """Verify the u(N) commutation relations of the fermionic generators and the
    dimension N**2 of the algebra they generate."""
    if n < 2:
        raise ValueError("need at least two sites")
    br = vector_commutator
    for m, k in itertools.permutations(range(1, n + 1), 2):
        x, y, zk, zm = _x(n, m, k), _y(n, m, k), _z(n, k), _z(n, m)
        if br(x, zk) != y or br(y, zk) != -x or br(x, y) != (zm - zk) * 2:
            return False
    for m, j, k in itertools.permutations(range(1, n + 1), 3):
        if br(_x(n, m, j), _x(n, j, k)) != _y(n, m, k):
            return False
        if br(_x(n, m, j), _y(n, j, k)) != -_x(n, m, k):
            return False
    if with_closure:
        gens = [_x(n, j, j + 1) for j in range(1, n)] + [_y(n, j, j + 1) for j in range(1, n)]
        gens += [_z(n, j) for j in range(1, n + 1)]
        if close_algebra(gens).dimension != n * n:
            return False
    return True


def jw_one_body_rank(basis) -> int:
    """Real rank of the one-body matrices of a list of quadratic PauliVectors."""
    rows = []
    for v in basis:
        f = jordan_wigner_map(v)
        n = f.n_modes
        row = {}
        for a in range(n):
            for b in range(n):
                e = f.h[a][b]
                if e.re:
                    row[2 * (a * n + b)] = e.re
                if e.im:
                    row[2 * (a * n + b) + 1] = e.im
        rows.append(row)
    return rank(rows)


def alternating_string(n: int, start: str = "X") -> PauliString:
    other = "Y" if start == "X" else "X"
    return PauliString.from_sites(n, {s: (start if s % 2 else other) for s in range(1, n + 1)})


def g_set_rank(n: int) -> int:
    """Number of strings M with ``M^T S + S M = 0`` for ``S = X1 Y2 X3 Y4 ...``."""
    if n < 1:
        raise ValueError("n must be positive")
    _bound(n)
    s = alternating_string(n).key
    full = (1 << n) - 1
    count = 0
    for m in range(1 << (2 * n)):
        t = -1 if ((m & full) & (m >> n)).bit_count() & 1 else 1
        eps = -1 if _anticommute(m, s, n) else 1
        # M^T S + S M = (t(M) + eps(M, S)) M S
        if t + eps == 0:
            count += 1
    return count
