"""Invariant subspaces, exact restriction of algebra elements, and verdicts.

Bit convention: in an N-bit basis label site 1 is the most significant bit and
``|0>`` is the Z = +1 eigenstate, so the Hamming weight counts excitations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .closure import LieBasis, _require_certified, identify_algebra
from .linalg import Echelon
from .pauli import PauliString, PauliVector
from .symmetry import SymmetryRecord

__all__ = [
    "GaussianRational",
    "SubspaceBasis",
    "Verdict",
    "excitation_basis",
    "parity_basis",
    "full_basis",
    "decompose",
    "restrict_operator",
    "projected_rank",
    "controllability_verdict",
]


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, o):
        o = _gr(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gr(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _gr(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = _gr(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, o):
        try:
            o = _gr(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def _gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x, 0)
    raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")


@dataclass(frozen=True)
class SubspaceBasis:
    label: str
    states: Tuple[int, ...]
    n_sites: int

    @property
    def dim(self) -> int:
        return len(self.states)

    def bitstrings(self) -> List[str]:
        return [format(s, f"0{self.n_sites}b") for s in self.states]


def excitation_basis(n: int, k: int) -> SubspaceBasis:
    if not 0 <= k <= n:
        raise ValueError(f"excitation number {k} out of range 0..{n}")
    return SubspaceBasis(f"excitation k={k}",
                         tuple(s for s in range(1 << n) if s.bit_count() == k), n)


def parity_basis(n: int, sign: int) -> SubspaceBasis:
    if sign not in (1, -1):
        raise ValueError("parity sign must be +1 or -1")
    odd = sign == -1
    return SubspaceBasis(f"parity {sign:+d}",
                         tuple(s for s in range(1 << n) if (s.bit_count() & 1) == odd), n)


def full_basis(n: int) -> SubspaceBasis:
    return SubspaceBasis("whole space", tuple(range(1 << n)), n)


def _reverse(mask: int, n: int) -> int:
    return int(format(mask, f"0{n}b")[::-1], 2) if n else 0


def _state_masks(key: int, n: int) -> Tuple[int, int, int]:
    """(x, z, y-count) of a packed string in basis-label bit order."""
    full = (1 << n) - 1
    x, z = key & full, key >> n
    return _reverse(x, n), _reverse(z, n), (x & z).bit_count()


_IPOW = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _diagonal_value(op: PauliVector, state: int) -> Fraction:
    n = op.n_sites
    total = Fraction(0)
    for k, c in op.coeffs.items():
        _, z, _ = _state_masks(k, n)
        total += -c if (z & state).bit_count() & 1 else c
    return total


def _operator_of(s: Union[SymmetryRecord, PauliVector]) -> Tuple[PauliVector, Optional[str]]:
    if isinstance(s, PauliVector):
        return s, None
    if s.operator is None:
        raise ValueError("decomposition requires Z-diagonal symmetries")
    return s.operator, s.provenance


def decompose(symmetries: Sequence[Union[SymmetryRecord, PauliVector]], n: int) -> List[SubspaceBasis]:
    """Split the basis states by the joint eigenvalues of Z-diagonal symmetries.

    Parts are ordered by their smallest basis state.
    """
    ops = []
    for s in symmetries:
        op, prov = _operator_of(s)
        if op.n_sites != n:
            raise ValueError(f"incompatible sizes: {op.n_sites} and {n} sites")
        full = (1 << n) - 1
        if any(k & full for k in op.coeffs):
            raise ValueError("decomposition requires Z-diagonal symmetries")
        ops.append((op, prov))
    if not ops:
        return [full_basis(n)]
    parts: Dict[tuple, List[int]] = {}
    for state in range(1 << n):
        sig = tuple(_diagonal_value(op, state) for op, _ in ops)
        parts.setdefault(sig, []).append(state)
    out = []
    for sig, states in sorted(parts.items(), key=lambda kv: kv[1][0]):
        bits = []
        for (op, prov), val in zip(ops, sig):
            if prov == "excitation":
                bits.append(f"excitation k={states[0].bit_count()}")
            elif prov == "parity-Z":
                bits.append(f"parity {int(val):+d}")
            elif prov == "identity" or set(op.coeffs) == {0}:
                continue
            else:
                bits.append(f"[{op}]={val}")
        out.append(SubspaceBasis(", ".join(bits) or "whole space", tuple(states), n))
    return out


def _restrict_parts(v: PauliVector, b: SubspaceBasis) -> Dict[Tuple[int, int], List]:
    """Sparse ``{(row, col): [re, im]}`` of ``v`` restricted to ``b``."""
    n = v.n_sites
    if n != b.n_sites:
        raise ValueError(f"incompatible sizes: {n} and {b.n_sites} sites")
    index = {s: i for i, s in enumerate(b.states)}
    masks = [(k, c) + _state_masks(k, n) for k, c in v.coeffs.items()]
    out: Dict[Tuple[int, int], List] = {}
    leaks: Dict[int, List] = {}
    for col, alpha in enumerate(b.states):
        leak: Dict[int, List] = {}
        for k, c, x, z, y in masks:
            beta = alpha ^ x
            ph = (y + 2 * ((z & alpha).bit_count() & 1)) & 3
            re, im = _IPOW[ph]
            row = index.get(beta)
            if row is None:
                acc = leak.setdefault(beta, [0, 0, []])
                acc[0] += re * c
                acc[1] += im * c
                acc[2].append(k)
                continue
            acc = out.setdefault((row, col), [0, 0])
            acc[0] += re * c
            acc[1] += im * c
        for beta, (re, im, keys) in leak.items():
            if re or im:
                leaks[beta] = keys
    if leaks:
        bad = sorted({k for keys in leaks.values() for k in keys})
        names = ", ".join(str(PauliString.from_key(k, n)) for k in bad[:6])
        raise ValueError(f"operator does not preserve subspace {b.label!r}: offending strings {names}")
    return out


def restrict_operator(v: PauliVector, b: SubspaceBasis) -> np.ndarray:
    """Exact ``d x d`` matrix ``<beta|v|alpha>`` (object array of GaussianRational)."""
    mat = np.empty((b.dim, b.dim), dtype=object)
    zero = GaussianRational()
    mat.fill(zero)
    for (r, c), (re, im) in _restrict_parts(v, b).items():
        mat[r, c] = GaussianRational(re, im)
    return mat


def projected_rank(basis: LieBasis, b: SubspaceBasis) -> int:
    """Real dimension of the algebra restricted to ``b``."""
    _require_certified(basis)
    if b.dim == 1 << basis.n_sites:
        # restriction to the whole space is faithful
        return basis.dimension
    d = b.dim
    ech = Echelon()
    for v in basis.basis:
        row = {}
        for (r, c), (re, im) in _restrict_parts(v, b).items():
            if re:
                row[2 * (r * d + c)] = re
            if im:
                row[2 * (r * d + c) + 1] = im
        if row:
            ech.insert(row)
    return len(ech)


@dataclass
class Verdict:
    label: str
    dimension: int
    projected_rank: int
    status: str
    pure_state_controllable: Optional[bool] = None
    candidates: List = field(default_factory=list)

    @property
    def u_dim(self) -> int:
        return self.dimension ** 2

    @property
    def su_dim(self) -> int:
        return self.dimension ** 2 - 1

    def to_dict(self) -> dict:
        d = {"subspace": self.label, "dimension": self.dimension,
             "projected_rank": self.projected_rank, "u_dim": self.u_dim,
             "su_dim": self.su_dim, "status": self.status}
        if self.pure_state_controllable is not None:
            d["pure_state_controllable"] = self.pure_state_controllable
            d["algebra_candidates"] = [c.to_dict() for c in self.candidates]
        return d


def _status(rank: int, d: int) -> str:
    if rank == d * d:
        return "controllable_u"
    if rank == d * d - 1:
        return "controllable_su"
    return "not_controllable"


def controllability_verdict(basis: LieBasis, decomposition: Sequence[SubspaceBasis],
                            internal: Sequence[SymmetryRecord] = (),
                            external: Sequence = ()) -> List[Verdict]:
    """Per-subspace verdicts followed by a whole-space verdict.

    ``internal`` and ``external`` are the detected symmetries; they only feed
    the algebra candidates and the pure-state flag of the whole-space verdict.
    """
    _require_certified(basis)
    n = basis.n_sites
    out = []
    full = 1 << n
    for b in decomposition:
        if b.dim == full:
            continue
        r = projected_rank(basis, b)
        out.append(Verdict(b.label, b.dim, r, _status(r, b.dim)))
    classes = {r.klass for r in internal if r.kind == "internal"}
    klass = "symplectic" if "symplectic" in classes else ("orthogonal" if classes else None)
    nontrivial_ext = any(set(getattr(e, "operator", e).coeffs) != {0} for e in external)
    cands = identify_algebra(basis.dimension, n, internal_class=klass, has_external=nontrivial_ext)
    half = full // 2
    pure = basis.dimension == half * (2 * half + 1) and "symplectic" in classes
    if basis.dimension >= full * full - 1:
        pure = True
    out.append(Verdict("whole space", full, basis.dimension, _status(basis.dimension, full),
                       pure, cands))
    return out
