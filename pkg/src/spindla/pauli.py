"""Exact algebra of N-qubit Pauli strings and their rational linear combinations.

A Pauli string on ``n`` sites is stored as a pair of bit masks: bit ``k`` of
``x_mask`` is set when site ``k + 1`` carries X or Y, bit ``k`` of ``z_mask``
when it carries Z or Y.  Internally strings are packed into a single integer
``key = (z_mask << n) | x_mask``, so that integer order on keys is the
canonical lexicographic order on ``(z_mask, x_mask)`` and the product of two
strings is, up to phase, ``key_a ^ key_b``.

Coefficients are Python ints or :class:`fractions.Fraction`; there is no
floating point in this module.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

__all__ = [
    "PauliString",
    "PauliVector",
    "pauli_product",
    "pauli_commutator",
    "vector_commutator",
    "vector_product",
    "transpose_parity",
    "anticommutes",
]

Coefficient = Union[int, Fraction]

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_TOKEN = re.compile(r"([IXYZ])(\d+)")


def _check_sizes(n_a: int, n_b: int) -> None:
    if n_a != n_b:
        raise ValueError(f"incompatible sizes: {n_a} and {n_b} sites")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of I/X/Y/Z over ``n_sites`` sites (Hermitian, no phase)."""

    n_sites: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        full = (1 << self.n_sites) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits beyond n_sites")

    # construction -------------------------------------------------------
    @classmethod
    def from_key(cls, key: int, n_sites: int) -> "PauliString":
        full = (1 << n_sites) - 1
        return cls(n_sites, key & full, key >> n_sites)

    @classmethod
    def from_sites(cls, n_sites: int, ops: Mapping[int, str]) -> "PauliString":
        """Build from a ``{site: letter}`` map with 1-based sites."""
        x = z = 0
        for site, letter in ops.items():
            if not 1 <= site <= n_sites:
                raise ValueError(f"site {site} out of range 1..{n_sites}")
            bx, bz = _BITS[letter.upper()]
            x |= bx << (site - 1)
            z |= bz << (site - 1)
        return cls(n_sites, x, z)

    @classmethod
    def from_label(cls, label: str, n_sites: int) -> "PauliString":
        """Parse text like ``"X1 Y2 Z4"`` (or ``"X1Y2"``; ``"I"`` for identity)."""
        text = label.replace(" ", "").replace("*", "")
        if text in ("", "I"):
            return cls(n_sites)
        ops = {}
        pos = 0
        for m in _TOKEN.finditer(text):
            if m.start() != pos:
                raise ValueError(f"cannot parse Pauli label {label!r}")
            pos = m.end()
            site = int(m.group(2))
            if site in ops:
                raise ValueError(f"site {site} repeated in {label!r}")
            if m.group(1) != "I":
                ops[site] = m.group(1)
        if pos != len(text):
            raise ValueError(f"cannot parse Pauli label {label!r}")
        return cls.from_sites(n_sites, ops)

    @classmethod
    def from_dense_label(cls, label: str) -> "PauliString":
        """Parse a per-site string like ``"XIZY"`` (site 1 first)."""
        return cls.from_sites(len(label), {k + 1: c for k, c in enumerate(label) if c != "I"})

    # accessors -----------------------------------------------------------
    @property
    def key(self) -> int:
        return (self.z_mask << self.n_sites) | self.x_mask

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return not (self.x_mask or self.z_mask)

    @property
    def support(self) -> Tuple[int, ...]:
        occ = self.x_mask | self.z_mask
        return tuple(k + 1 for k in range(self.n_sites) if occ >> k & 1)

    def letter(self, site: int) -> str:
        k = site - 1
        return _LETTERS[(self.x_mask >> k & 1, self.z_mask >> k & 1)]

    def dense_label(self) -> str:
        return "".join(self.letter(s) for s in range(1, self.n_sites + 1))

    def sort_key(self) -> Tuple[int, int]:
        return (self.z_mask, self.x_mask)

    def __lt__(self, other: "PauliString") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.is_identity:
            return "I"
        return " ".join(f"{self.letter(s)}{s}" for s in self.support)

    def __repr__(self) -> str:
        return f"PauliString({self.n_sites}, {str(self)!r})"


# ---------------------------------------------------------------------------
# packed-key kernels (hot paths; operate on ints only)

def _product_phase(ka: int, kb: int, n: int) -> int:
    """Power of i in ``P_a P_b = i**phase P_{a^b}`` for packed Hermitian strings."""
    full = (1 << n) - 1
    xa, za = ka & full, ka >> n
    xb, zb = kb & full, kb >> n
    kr = ka ^ kb
    yr = ((kr & full) & (kr >> n)).bit_count()
    return ((xa & za).bit_count() + (xb & zb).bit_count()
            + 2 * (za & xb).bit_count() - yr) & 3


def _anticommute(ka: int, kb: int, n: int) -> bool:
    full = (1 << n) - 1
    return bool((((ka & full) & (kb >> n)) ^ ((ka >> n) & (kb & full))).bit_count() & 1)


def _split(keys: Iterable[int], n: int):
    full = (1 << n) - 1
    return [(k, k & full, k >> n, ((k & full) & (k >> n)).bit_count()) for k in keys]


def commutator_coeffs(a: Mapping[int, Coefficient], b: Mapping[int, Coefficient],
                      n: int) -> Dict[int, Coefficient]:
    """Hermitian part ``u`` of ``[i a, i b] = i u`` on packed-key dictionaries."""
    full = (1 << n) - 1
    out: Dict[int, Coefficient] = {}
    bs = _split(b, n)
    for ka, xa, za, ya in _split(a, n):
        ca = a[ka]
        for kb, xb, zb, yb in bs:
            sym = (xa & zb) ^ (za & xb)
            if not sym.bit_count() & 1:
                continue
            kr = ka ^ kb
            phase = (ya + yb + 2 * (za & xb).bit_count()
                     - ((kr & full) & (kr >> n)).bit_count()) & 3
            # [P,Q] = 2 i s R with s = +1 for phase 1; [iP,iQ] = -[P,Q]
            term = -2 * ca * b[kb] if phase == 1 else 2 * ca * b[kb]
            v = out.get(kr, 0) + term
            if v:
                out[kr] = v
            else:
                out.pop(kr, None)
    return out


def primitive(coeffs: Mapping[int, Coefficient]) -> Dict[int, int]:
    """Scale a nonzero rational vector to coprime integers, first entry positive."""
    if not coeffs:
        return {}
    den = 1
    for c in coeffs.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // gcd(den, c.denominator)
    ints = {k: int(c * den) for k, c in coeffs.items()}
    g = 0
    for c in ints.values():
        g = gcd(g, c)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {k: c // g for k, c in ints.items()}


# ---------------------------------------------------------------------------


class PauliVector:
    """Real-rational linear combination of Pauli strings on ``n_sites`` sites.

    Stored coefficients are always real; when a vector is used as a Lie
    algebra element it stands for ``i`` times itself.
    """

    __slots__ = ("n_sites", "coeffs", "_hash")

    def __init__(self, n_sites: int, coeffs: Optional[Mapping[int, Coefficient]] = None):
        if n_sites < 1:
            raise ValueError("n_sites must be positive")
        self.n_sites = n_sites
        clean = {}
        limit = 1 << (2 * n_sites)
        for k, c in (coeffs or {}).items():
            if not isinstance(c, Rational):
                raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")
            if not 0 <= k < limit:
                raise ValueError(f"key {k} out of range for {n_sites} sites")
            if c:
                clean[k] = c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c
        self.coeffs: Dict[int, Coefficient] = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, n_sites: int,
                   terms: Iterable[Tuple[Union[PauliString, str], Coefficient]]) -> "PauliVector":
        acc: Dict[int, Coefficient] = {}
        for p, c in terms:
            if isinstance(p, str):
                p = PauliString.from_label(p, n_sites)
            _check_sizes(n_sites, p.n_sites)
            acc[p.key] = acc.get(p.key, 0) + c
        return cls(n_sites, acc)

    @classmethod
    def from_string(cls, p: PauliString, coeff: Coefficient = 1) -> "PauliVector":
        return cls(p.n_sites, {p.key: coeff})

    @classmethod
    def parse(cls, text: str, n_sites: int) -> "PauliVector":
        """Parse e.g. ``"X1 X2 + Y1 Y2 - 1/2 Z1"`` (the format produced by ``str``)."""
        body = text.strip()
        if body in ("", "0"):
            return cls(n_sites)
        parts = re.split(r"\s*([+-])\s*", body)
        if parts[0] == "":
            parts = parts[1:]
        else:
            parts = ["+"] + parts
        terms = []
        for sign, chunk in zip(parts[0::2], parts[1::2]):
            m = re.match(r"^(\d+(?:/\d+)?)?\s*\*?\s*(.*)$", chunk)
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            terms.append((PauliString.from_label(m.group(2) or "I", n_sites),
                          coef if sign == "+" else -coef))
        return cls.from_terms(n_sites, terms)

    # views ----------------------------------------------------------------
    @property
    def terms(self) -> Dict[PauliString, Coefficient]:
        return {PauliString.from_key(k, self.n_sites): c for k, c in sorted(self.coeffs.items())}

    def strings(self) -> Iterator[PauliString]:
        for k in sorted(self.coeffs):
            yield PauliString.from_key(k, self.n_sites)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __iter__(self):
        return iter(self.terms.items())

    def weights(self) -> set:
        return {PauliString.from_key(k, self.n_sites).weight for k in self.coeffs}

    @property
    def pivot(self) -> Optional[PauliString]:
        """Smallest string in canonical order (None for the zero vector)."""
        return PauliString.from_key(min(self.coeffs), self.n_sites) if self.coeffs else None

    def is_traceless(self) -> bool:
        return 0 not in self.coeffs

    # arithmetic ---------------------------------------------------------
    def _combine(self, other: "PauliVector", sign: int) -> "PauliVector":
        _check_sizes(self.n_sites, other.n_sites)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + sign * c
        return PauliVector(self.n_sites, out)

    def __add__(self, other: "PauliVector") -> "PauliVector":
        return self._combine(other, 1)

    def __sub__(self, other: "PauliVector") -> "PauliVector":
        return self._combine(other, -1)

    def __neg__(self) -> "PauliVector":
        return PauliVector(self.n_sites, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, scalar: Coefficient) -> "PauliVector":
        if not isinstance(scalar, Rational):
            return NotImplemented
        return PauliVector(self.n_sites, {k: c * scalar for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def primitive(self) -> "PauliVector":
        """Rescaled copy with coprime integer coefficients (leading one positive)."""
        return PauliVector(self.n_sites, primitive(self.coeffs))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliVector):
            return NotImplemented
        return self.n_sites == other.n_sites and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n_sites, frozenset(self.coeffs.items())))
        return self._hash

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        out = []
        for k in sorted(self.coeffs):
            c = Fraction(self.coeffs[k])
            label = str(PauliString.from_key(k, self.n_sites))
            mag = abs(c)
            body = label if mag == 1 else f"{mag} {label}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(("+ " if c > 0 else "- ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"PauliVector({self.n_sites}, {str(self)!r})"


# ---------------------------------------------------------------------------
# public operations

def pauli_product(p: PauliString, q: PauliString) -> Tuple[int, PauliString]:
    """Return ``(phase, r)`` with ``p q = i**phase r``."""
    _check_sizes(p.n_sites, q.n_sites)
    n = p.n_sites
    phase = _product_phase(p.key, q.key, n)
    return phase, PauliString(n, p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask)


def anticommutes(p: PauliString, q: PauliString) -> bool:
    _check_sizes(p.n_sites, q.n_sites)
    return bool(((p.x_mask & q.z_mask).bit_count() + (p.z_mask & q.x_mask).bit_count()) & 1)


def pauli_commutator(p: PauliString, q: PauliString) -> Optional[Tuple[int, PauliString]]:
    """Commutator of two strings.

    Returns None when ``p`` and ``q`` commute, otherwise ``(c, r)`` with
    ``[p, q] = c * i * r`` and ``c`` in ``{2, -2}``.
    """
    _check_sizes(p.n_sites, q.n_sites)
    if not anticommutes(p, q):
        return None
    phase, r = pauli_product(p, q)
    return (2 if phase == 1 else -2), r


def vector_commutator(v: PauliVector, w: PauliVector) -> PauliVector:
    """Hermitian ``u`` such that ``[i v, i w] = i u``.

    Structure constants of the anti-Hermitian algebra are real, so ``u`` has
    real rational coefficients whenever ``v`` and ``w`` do.
    """
    _check_sizes(v.n_sites, w.n_sites)
    return PauliVector(v.n_sites, commutator_coeffs(v.coeffs, w.coeffs, v.n_sites))


def vector_product(v: PauliVector, w: PauliVector) -> PauliVector:
    """Operator product ``v w``; raises if the product is not Hermitian.

    Mostly useful for products of factors on disjoint supports.
    """
    _check_sizes(v.n_sites, w.n_sites)
    n = v.n_sites
    re_part: Dict[int, Coefficient] = {}
    im_part: Dict[int, Coefficient] = {}
    for ka, ca in v.coeffs.items():
        for kb, cb in w.coeffs.items():
            phase = _product_phase(ka, kb, n)
            val = ca * cb if phase < 2 else -ca * cb
            target = re_part if phase % 2 == 0 else im_part
            kr = ka ^ kb
            target[kr] = target.get(kr, 0) + val
    if any(im_part.values()):
        raise ValueError("product is not Hermitian")
    return PauliVector(n, re_part)


def transpose_parity(p: PauliString) -> int:
    """+1 if ``p`` is a symmetric matrix, -1 if antisymmetric (odd number of Y)."""
    return -1 if p.y_count & 1 else 1
