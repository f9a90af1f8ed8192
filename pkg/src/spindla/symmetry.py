"""External, internal and permutation symmetries of a set of Hamiltonians.

Symmetry operators are searched in the real span of Pauli strings.  Both
linear conditions are assembled string by string and solved exactly as a
null space over ``4**N`` unknown coordinates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .hamiltonians import ModelSpec
from .linalg import Echelon, nullspace
from .pauli import (PauliString, PauliVector, _anticommute, _product_phase,
                    primitive, vector_commutator)
from .validation import check_hamiltonians, max_sites

__all__ = [
    "SymmetryRecord",
    "external_symmetry_basis",
    "internal_symmetry_basis",
    "permutation_symmetries",
    "standard_symmetry_report",
    "permute",
    "in_span",
    "internal_residual",
]

Permutation = Tuple[int, ...]


@dataclass(frozen=True)
class SymmetryRecord:
    """One detected symmetry.

    ``operator`` is set for external and internal records, ``permutation``
    (``perm[s - 1]`` is the image of site ``s``) for permutation records.
    ``klass`` is ``"orthogonal"`` or ``"symplectic"`` for internal records.
    """

    kind: str
    operator: Optional[PauliVector] = None
    permutation: Optional[Permutation] = None
    klass: Optional[str] = None
    provenance: Optional[str] = None

    @property
    def operator_text(self) -> str:
        if self.permutation is not None:
            return cycle_notation(self.permutation)
        return str(self.operator)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "operator_text": self.operator_text,
                "class": self.klass, "provenance": self.provenance}


def cycle_notation(perm: Permutation) -> str:
    seen = set()
    cycles = []
    for start in range(1, len(perm) + 1):
        if start in seen or perm[start - 1] == start:
            continue
        cyc = [start]
        seen.add(start)
        s = perm[start - 1]
        while s != start:
            cyc.append(s)
            seen.add(s)
            s = perm[s - 1]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


def _sites(hams: Sequence[PauliVector]) -> int:
    return check_hamiltonians(hams)


def _as_vector(n: int, sol: Dict[int, Fraction]) -> PauliVector:
    return PauliVector(n, primitive(sol))


def _check_bound(n: int, max_n: Optional[int]) -> None:
    bound = max_sites("symmetry") if max_n is None else max_n
    if n > bound:
        raise ValueError(
            f"symmetry solve over 4**{n} unknowns exceeds the bound N <= {bound}; "
            "use standard_symmetry_report for the known families instead")


# ---------------------------------------------------------------------------
# external

def external_symmetry_basis(hams: Sequence[PauliVector], max_n: Optional[int] = None,
                            method: str = "modular") -> List[PauliVector]:
    """Basis of ``{S : [S, H_j] = 0 for all j}`` in the real span of Pauli strings."""
    n = _sites(hams)
    _check_bound(n, max_n)
    size = 1 << (2 * n)
    free = set(range(size))
    rows: Dict[Tuple[int, int], Dict[int, object]] = {}
    # single-string Hamiltonians pin every anticommuting coordinate to zero
    singles = [next(iter(h.coeffs)) for h in hams if len(h.coeffs) == 1]
    if singles:
        free = {p for p in free if not any(_anticommute(p, q, n) for q in singles)}
    for j, h in enumerate(hams):
        if len(h.coeffs) <= 1:
            continue
        for p in free:
            for q, c in h.coeffs.items():
                if not _anticommute(p, q, n):
                    continue
                # [P, Q] = 2 i s PQ with s = +1 iff the product phase is 1
                s = 1 if _product_phase(p, q, n) == 1 else -1
                row = rows.setdefault((j, p ^ q), {})
                v = row.get(p, 0) + s * c
                if v:
                    row[p] = v
                else:
                    row.pop(p, None)
    sols = nullspace(rows.values(), free, method=method)
    out = sorted((_as_vector(n, s) for s in sols), key=lambda v: sorted(v.coeffs))
    for v in out:
        for h in hams:
            if vector_commutator(v, h).coeffs:
                raise AssertionError(f"commutant element {v} fails verification")
    return out


# ---------------------------------------------------------------------------
# internal

def _t(key: int, n: int) -> int:
    full = (1 << n) - 1
    return -1 if ((key & full) & (key >> n)).bit_count() & 1 else 1


def internal_residual(h: PauliVector, s: PauliVector) -> Dict[int, Tuple[Fraction, Fraction]]:
    """``H^T S + S H`` as ``{key: (real, imag)}`` (empty iff S is an internal symmetry of H)."""
    n = h.n_sites
    out: Dict[int, List[Fraction]] = {}
    for q, c in h.coeffs.items():
        tq = _t(q, n)
        for p, sp in s.coeffs.items():
            # H^T S + S H = sum c s (t(Q) eps(Q, P) + 1) P Q
            eps = -1 if _anticommute(p, q, n) else 1
            f = tq * eps + 1
            if not f:
                continue
            phase = _product_phase(p, q, n)
            val = f * c * sp * (1 if phase < 2 else -1)
            acc = out.setdefault(p ^ q, [Fraction(0), Fraction(0)])
            acc[phase & 1] += val
    return {k: (v[0], v[1]) for k, v in out.items() if v[0] or v[1]}


def internal_symmetry_basis(hams: Sequence[PauliVector], max_n: Optional[int] = None,
                            method: str = "modular") -> List[SymmetryRecord]:
    """Basis of ``{S : H_j^T S + S H_j = 0 for all j}``, split by transpose parity.

    Symmetric solutions are labelled orthogonal, antisymmetric ones symplectic.
    """
    n = _sites(hams)
    for h in hams:
        if not h.is_traceless():
            raise ValueError("internal symmetry search needs traceless Hamiltonians")
    _check_bound(n, max_n)
    size = 1 << (2 * n)
    free = set(range(size))
    # a single string Q forces s_P = 0 unless t(Q) eps(Q, P) = -1
    singles = [next(iter(h.coeffs)) for h in hams if len(h.coeffs) == 1]
    for q in singles:
        tq = _t(q, n)
        free = {p for p in free if tq * (-1 if _anticommute(p, q, n) else 1) == -1}
    rows: Dict[Tuple[int, int, int], Dict[int, object]] = {}
    for j, h in enumerate(hams):
        if len(h.coeffs) <= 1:
            continue
        for q, c in h.coeffs.items():
            tq = _t(q, n)
            for p in free:
                eps = -1 if _anticommute(p, q, n) else 1
                if tq * eps != 1:
                    continue
                phase = _product_phase(p, q, n)
                row = rows.setdefault((j, p ^ q, phase & 1), {})
                v = row.get(p, 0) + (c if phase < 2 else -c)
                if v:
                    row[p] = v
                else:
                    row.pop(p, None)
    sols = nullspace(rows.values(), free, method=method)
    records = []
    for parity, klass in ((1, "orthogonal"), (-1, "symplectic")):
        ech = Echelon()
        for sol in sols:
            part = {k: c for k, c in sol.items() if _t(k, n) == parity}
            if part:
                ech.insert(part)
        for row in ech.back_substituted():
            vec = _as_vector(n, row)
            for h in hams:
                if internal_residual(h, vec):
                    raise AssertionError(f"internal symmetry {vec} fails verification")
            records.append(SymmetryRecord("internal", vec, klass=klass,
                                          provenance=_internal_provenance(vec)))
    return records


def _internal_provenance(v: PauliVector) -> Optional[str]:
    if len(v.coeffs) != 1:
        return None
    s = PauliString.from_key(next(iter(v.coeffs)), v.n_sites)
    label = s.dense_label()
    alt = {"XY": "alternating XY", "YX": "alternating YX"}
    for start, name in alt.items():
        if label == "".join(start[k % 2] for k in range(v.n_sites)):
            return name
    return None


# ---------------------------------------------------------------------------
# permutations

def permute(v: PauliVector, perm: Permutation) -> PauliVector:
    """Relabel sites: the letter on site ``s`` moves to site ``perm[s - 1]``."""
    n = v.n_sites
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    full = (1 << n) - 1
    out = {}
    for k, c in v.coeffs.items():
        x, z = k & full, k >> n
        nx = nz = 0
        for s in range(n):
            t = perm[s] - 1
            nx |= (x >> s & 1) << t
            nz |= (z >> s & 1) << t
        out[(nz << n) | nx] = c
    return PauliVector(n, out)


def mirror(n: int) -> Permutation:
    return tuple(range(n, 0, -1))


def permutation_symmetries(hams: Sequence[PauliVector],
                           candidates: Optional[Iterable[Permutation]] = None
                           ) -> List[SymmetryRecord]:
    """Candidate site permutations that map every Hamiltonian onto itself.

    The default candidates are all non-identity permutations for N <= 6 and
    the mirror otherwise.
    """
    n = _sites(hams)
    if candidates is None:
        if n <= 6:
            ident = tuple(range(1, n + 1))
            candidates = [p for p in itertools.permutations(range(1, n + 1)) if p != ident]
        else:
            candidates = [mirror(n)]
    out = []
    for perm in candidates:
        perm = tuple(perm)
        if all(permute(h, perm) == h for h in hams):
            prov = "mirror" if perm == mirror(n) and n > 1 else None
            out.append(SymmetryRecord("permutation", permutation=perm, provenance=prov))
    return out


# ---------------------------------------------------------------------------
# named families

def _family_operators(n: int) -> List[Tuple[str, PauliVector]]:
    full = (1 << n) - 1
    ops = [
        ("parity-X", PauliVector(n, {full: 1})),
        ("parity-Y", PauliVector(n, {(full << n) | full: 1})),
        ("parity-Z", PauliVector(n, {full << n: 1})),
        ("excitation", PauliVector(n, {(1 << s) << n: 1 for s in range(n)})),
    ]
    return ops


def standard_symmetry_report(spec: Union[ModelSpec, Sequence[PauliVector]]) -> List[SymmetryRecord]:
    """Exact checks of the parity strings, the excitation operator and the mirror."""
    hams = spec.hamiltonians() if isinstance(spec, ModelSpec) else list(spec)
    n = _sites(hams)
    out = []
    for name, op in _family_operators(n):
        if n == 1 and name == "excitation":
            continue
        if all(not vector_commutator(op, h).coeffs for h in hams):
            out.append(SymmetryRecord("external", op, provenance=name))
    if n > 1:
        out.extend(permutation_symmetries(hams, [mirror(n)]))
    return out


def in_span(basis: Sequence[PauliVector], v: PauliVector) -> bool:
    """Whether ``v`` is a rational combination of ``basis``."""
    ech = Echelon()
    for b in basis:
        ech.insert(b.coeffs)
    return ech.contains(v.coeffs)


def label_external(basis: Sequence[PauliVector]) -> List[SymmetryRecord]:
    """External records for a commutant basis, tagging exact family matches."""
    if not basis:
        return []
    n = basis[0].n_sites
    fams = {op.primitive(): name for name, op in _family_operators(n)}
    fams[PauliVector(n, {0: 1})] = "identity"
    out = []
    for v in basis:
        out.append(SymmetryRecord("external", v, provenance=fams.get(v.primitive())))
    return out
