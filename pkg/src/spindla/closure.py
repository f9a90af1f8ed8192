"""Dynamical Lie algebra closure with exact independence tests."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import MERSENNE_61, Echelon, ModEchelon, rational_reconstruct
from .pauli import PauliString, PauliVector, commutator_coeffs, primitive

__all__ = [
    "LieBasis",
    "GenerationStep",
    "AlgebraCandidate",
    "close_algebra",
    "contains",
    "graded_dimensions",
    "identify_algebra",
    "UncertifiedBasisError",
]


CERTIFY_PRIMES = (MERSENNE_61, (1 << 89) - 1)


class UncertifiedBasisError(RuntimeError):
    """Raised when an operation needs a closed (certified) basis."""


@dataclass(frozen=True)
class GenerationStep:
    result_pivot: str
    parent_i: Optional[int]
    parent_j: Optional[int]

    def to_dict(self) -> dict:
        return {"result_pivot": self.result_pivot, "parent_i": self.parent_i, "parent_j": self.parent_j}


@dataclass
class LieBasis:
    """Reduced echelon basis of the real Lie algebra spanned by ``i * basis[k]``.

    ``basis`` is sorted by pivot string.  ``log[k]`` is the ``k``-th element
    found during closure, produced as the bracket of the ``parent_i``-th and
    ``parent_j``-th elements found before it (generators have no parents).
    """

    n_sites: int
    basis: List[PauliVector]
    log: List[GenerationStep]
    certified: bool
    _echelon: Echelon = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> List[PauliString]:
        return [b.pivot for b in self.basis]

    def pivot_keys(self) -> frozenset:
        return frozenset(self._echelon.pivots)

    def generation_log_jsonl(self) -> str:
        return "\n".join(json.dumps(s.to_dict(), sort_keys=True) for s in self.log)


def _bracket_rows(u: Dict[int, int], others: Sequence[Dict[int, int]], n: int,
                  pool: Optional[ThreadPoolExecutor]):
    if pool is None:
        return [commutator_coeffs(u, o, n) for o in others]
    return list(pool.map(lambda o: commutator_coeffs(u, o, n), others))


def _worklist(ech, gens: List[PauliVector], n: int, cap: int, strategy: str,
              pool: Optional[ThreadPoolExecutor]) -> Tuple[List[GenerationStep], bool]:
    """Grow ``ech`` to the closure; return the generation log and whether it finished."""
    snapshots: List[Dict[int, int]] = []
    log: List[GenerationStep] = []

    def add(vec, pi, pj) -> bool:
        r = ech.insert(vec)
        if r is None:
            return False
        snapshots.append(dict(r))
        log.append(GenerationStep(str(PauliString.from_key(min(r), n)), pi, pj))
        return True

    for g in gens:
        if g.coeffs:
            add(primitive(g.coeffs), None, None)
            if len(snapshots) > cap:
                return log, False
    n_gen = len(snapshots)
    i = 0
    while i < len(snapshots):
        if strategy == "generators":
            # live reduced row: spans the same as the snapshot together with later rows
            u = dict(ech.rows[i])
            partners = [j for j in range(n_gen) if j != i]
        else:
            u = snapshots[i]
            partners = list(range(i))
        for j, vec in zip(partners, _bracket_rows(u, [snapshots[j] for j in partners], n, pool)):
            if vec and add(vec, i, j) and len(snapshots) > cap:
                return log, False
        i += 1
    return log, True


def _lift(mod: ModEchelon, gens: List[PauliVector], n: int,
          pool: Optional[ThreadPoolExecutor]) -> Optional[Echelon]:
    """Exact rational basis from a GF(p) closure, or None if it cannot be certified.

    Certification: the reconstructed span contains the generators and is
    invariant under every ``ad_g``, so it contains the algebra; its dimension
    equals the GF(p) dimension, which never exceeds the rational one.
    """
    ech = Echelon()
    for piv in sorted(mod.pivots):
        row = {}
        for k, c in mod.rows[mod.pivots[piv]].items():
            q = rational_reconstruct(c, mod.p)
            if q is None:
                return None
            row[k] = q
        if ech.insert(row) is None:
            return None
    gen_rows = [primitive(g.coeffs) for g in gens if g.coeffs]
    if not all(ech.contains(g) for g in gen_rows):
        return None
    for row in list(ech.rows):
        for vec in _bracket_rows(dict(row), gen_rows, n, pool):
            if vec and not ech.contains(vec):
                return None
    return ech


def close_algebra(generators: Iterable[PauliVector], cap: Optional[int] = None,
                  strategy: str = "generators", threads: int = 1,
                  method: str = "modular") -> LieBasis:
    """Smallest real Lie algebra containing ``i * g`` for every generator ``g``.

    ``strategy="generators"`` closes the span under ``ad_g`` for each
    independent generator, which yields the whole algebra because it is
    spanned by right-nested brackets of generators.  ``strategy="pairs"``
    brackets every new element with every earlier one (FIFO).

    ``method="exact"`` runs the worklist over the rationals.  ``method="modular"``
    runs it over GF(p) and then certifies an exactly reconstructed basis over
    the rationals (falling back to ``"exact"`` if certification fails).  Either
    way the returned basis is the unique reduced echelon form of the algebra.

    If the dimension would exceed ``cap`` (default ``4**n``) the partial basis
    is returned with ``certified=False``.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].n_sites
    for g in gens:
        if g.n_sites != n:
            raise ValueError(f"incompatible sizes: {g.n_sites} and {n} sites")
    if strategy not in ("generators", "pairs"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if method not in ("modular", "exact"):
        raise ValueError(f"unknown method {method!r}")
    cap = 4 ** n if cap is None else cap

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        if method == "modular":
            for prime in CERTIFY_PRIMES:
                mod = ModEchelon(prime)
                log, done = _worklist(mod, gens, n, cap, strategy, pool)
                if not done:
                    break
                ech = _lift(mod, gens, n, pool)
                if ech is not None:
                    return _basis(n, ech, log, True)
        ech = Echelon()
        log, done = _worklist(ech, gens, n, cap, strategy, pool)
        return _basis(n, ech, log, done)
    finally:
        if pool is not None:
            pool.shutdown()


def _basis(n: int, ech: Echelon, log: List[GenerationStep], certified: bool) -> LieBasis:
    order = sorted(range(len(ech.rows)), key=lambda i: min(ech.rows[i]))
    basis = [PauliVector(n, dict(ech.rows[i])) for i in order]
    return LieBasis(n, basis, log, certified, ech)


def _require_certified(basis: LieBasis) -> None:
    if not basis.certified:
        raise UncertifiedBasisError("basis is not certified closed (cap reached)")


def contains(basis: LieBasis, v: PauliVector) -> bool:
    """True iff ``i * v`` lies in the algebra."""
    _require_certified(basis)
    if v.n_sites != basis.n_sites:
        raise ValueError(f"incompatible sizes: {v.n_sites} and {basis.n_sites} sites")
    return basis._echelon.contains(v.coeffs)


def _weight_of(key: int, n: int) -> int:
    full = (1 << n) - 1
    return ((key & full) | (key >> n)).bit_count()


def graded_dimensions(basis: LieBasis) -> Dict[int, int]:
    """Rank of the weight-``l`` (l-body) component of the algebra, for l = 1..N."""
    _require_certified(basis)
    n = basis.n_sites
    parts: Dict[int, Echelon] = {w: Echelon() for w in range(0, n + 1)}
    for b in basis.basis:
        split: Dict[int, Dict[int, int]] = {}
        for k, c in b.coeffs.items():
            split.setdefault(_weight_of(k, n), {})[k] = c
        for w, comp in split.items():
            parts[w].insert(comp)
    ranks = {w: len(e) for w, e in parts.items()}
    if sum(ranks.values()) != basis.dimension:
        raise ValueError("mixed-weight basis element: algebra is not graded by weight")
    if ranks.pop(0):
        raise ValueError("identity string in algebra")
    return ranks


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraCandidate:
    family: str
    rank: int
    dimension: int
    supported: bool
    note: str = ""

    @property
    def name(self) -> str:
        return f"{self.family}({self.rank})"

    def to_dict(self) -> dict:
        return {"name": self.name, "family": self.family, "n": self.rank,
                "dimension": self.dimension, "supported": self.supported, "note": self.note}


_FAMILIES = {
    "u": lambda k: k * k,
    "su": lambda k: k * k - 1,
    "so": lambda k: k * (k - 1) // 2,
    "sp": lambda k: k * (2 * k + 1),
}


def _solve(family: str, dim: int) -> Optional[int]:
    if family == "u":
        k = isqrt(dim)
        return k if k * k == dim and k >= 1 else None
    if family == "su":
        k = isqrt(dim + 1)
        return k if k * k == dim + 1 and k >= 2 else None
    if family == "so":
        k = (1 + isqrt(1 + 8 * dim)) // 2
        return k if k * (k - 1) // 2 == dim and k >= 3 else None
    k = (isqrt(1 + 8 * dim) - 1) // 4
    return k if k * (2 * k + 1) == dim and k >= 1 else None


def identify_algebra(dim: int, n_sites: int, internal_class: Optional[str] = None,
                     has_external: bool = False) -> List[AlgebraCandidate]:
    """Classical algebras whose dimension equals ``dim``, annotated with symmetry evidence.

    ``internal_class`` is ``"orthogonal"``, ``"symplectic"`` or None (no internal
    symmetry found).  Dimension matching alone never identifies an algebra; the
    ``supported`` flag says whether the detected symmetries are consistent
    with a simple candidate acting irreducibly on the whole space.
    """
    out = []
    full = 2 ** n_sites
    for family in ("u", "su", "so", "sp"):
        k = _solve(family, dim)
        if k is None:
            continue
        if internal_class == "orthogonal":
            supported = family == "so"
        elif internal_class == "symplectic":
            supported = family == "sp"
        else:
            supported = family in ("u", "su") and not has_external
        note = ""
        if family == "su" and k == full:
            note = "full controllability"
        elif family == "so" and k == full:
            note = "maximal orthogonal subalgebra"
        elif family == "sp" and 2 * k == full:
            note = "maximal symplectic subalgebra; pure-state controllable"
        out.append(AlgebraCandidate(family, k, dim, supported, note))
    return out
