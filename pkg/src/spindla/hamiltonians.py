"""System and control Hamiltonians for spin networks and chains."""
from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .pauli import PauliString, PauliVector

__all__ = [
    "CHAIN_KINDS",
    "CouplingGraph",
    "DisconnectedGraphWarning",
    "LeakageProfile",
    "Control",
    "ModelSpec",
    "build_network",
    "build_chain",
    "chain_graph",
    "build_control",
    "build_leaky_control",
    "first_primes",
    "parse_control_token",
]

CHAIN_KINDS = ("heisenberg", "xxz", "xyz", "xx", "xy", "ising")
AXES = ("X", "Y", "Z")
GAUSSIAN_MAX_DENOMINATOR = 10**6


class DisconnectedGraphWarning(UserWarning):
    pass


def _q(value) -> Fraction:
    """Exact rational from int, Fraction or a string like ``"3/2"``."""
    if isinstance(value, float):
        raise TypeError("float couplings are not exact; pass an int, Fraction or string")
    return Fraction(value)


def first_primes(count: int) -> List[int]:
    primes: List[int] = []
    cand = 2
    while len(primes) < count:
        if all(cand % p for p in primes if p * p <= cand):
            primes.append(cand)
        cand += 1
    return primes


@dataclass(frozen=True)
class CouplingGraph:
    """Weighted interaction graph; edges are ``(m, n, a, b, c)`` with 1-based sites."""

    n_sites: int
    edges: Tuple[Tuple[int, int, Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        clean = []
        for e in self.edges:
            m, n, a, b, c = e
            if m == n:
                raise ValueError(f"self-coupling on site {m}")
            if not (1 <= m <= self.n_sites and 1 <= n <= self.n_sites):
                raise ValueError(f"edge ({m}, {n}) outside 1..{self.n_sites}")
            clean.append((m, n, _q(a), _q(b), _q(c)))
        object.__setattr__(self, "edges", tuple(clean))

    def is_connected(self) -> bool:
        adj: Dict[int, set] = {k: set() for k in range(1, self.n_sites + 1)}
        for m, n, a, b, c in self.edges:
            if a or b or c:
                adj[m].add(n)
                adj[n].add(m)
        seen = {1}
        stack = [1]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_sites

    def model_tag(self) -> str:
        """Coupling class shared by every edge, most specific first."""
        es = self.edges
        if all(a == 0 and b == 0 for _, _, a, b, _ in es):
            return "ising"
        if all(a == b == c for _, _, a, b, c in es):
            return "heisenberg"
        if all(a == b and c == 0 for _, _, a, b, c in es):
            return "xx"
        if all(a == b for _, _, a, b, _ in es):
            return "xxz"
        if all(a != b and c == 0 for _, _, a, b, c in es):
            return "xy"
        return "xyz"


def build_network(graph: CouplingGraph, strict: bool = False) -> PauliVector:
    """Sum of ``a XmXn + b YmYn + c ZmZn`` over the edges of ``graph``."""
    if not graph.is_connected():
        if strict:
            raise ValueError("graph not connected")
        warnings.warn("graph not connected", DisconnectedGraphWarning, stacklevel=2)
    n = graph.n_sites
    terms = []
    for m, k, a, b, c in graph.edges:
        for letter, coef in (("X", a), ("Y", b), ("Z", c)):
            if coef:
                terms.append((PauliString.from_sites(n, {m: letter, k: letter}), coef))
    return PauliVector.from_terms(n, terms)


def _check_bond(kind: str, j: int, a: Fraction, b: Fraction, c: Fraction) -> None:
    rules = {
        "heisenberg": (a == b == c, "a_j = b_j = c_j"),
        "xxz": (a == b, "a_j = b_j"),
        "xx": (a == b and c == 0, "a_j = b_j and c_j = 0"),
        "xy": (a != b and c == 0, "a_j != b_j and c_j = 0"),
        "ising": (a == 0 and b == 0, "a_j = b_j = 0"),
        "xyz": (a != b, "a_j != b_j"),
    }
    ok, text = rules[kind]
    if not ok:
        raise ValueError(f"{kind} chain requires {text} (violated on bond {j}: a={a}, b={b}, c={c})")


def _uniform_bond(kind: str, kappa: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    one = Fraction(1)
    return {
        "heisenberg": (one, one, one),
        "xxz": (one, one, kappa),
        "xx": (one, one, Fraction(0)),
        "xy": (one, Fraction(2), Fraction(0)),
        "ising": (Fraction(0), Fraction(0), one),
        "xyz": (one, Fraction(2), Fraction(3)),
    }[kind]


def _generic_bonds(kind: str, n_bonds: int, kappa: Fraction,
                   seed: Optional[int]) -> List[Tuple[Fraction, Fraction, Fraction]]:
    per_bond = {"heisenberg": 1, "xxz": 1, "xx": 1, "ising": 1, "xy": 2, "xyz": 3}[kind]
    primes = first_primes(per_bond * n_bonds)
    if seed is not None:
        pool = first_primes(3 * per_bond * n_bonds)
        primes = random.Random(seed).sample(pool, len(primes))
    bonds = []
    for j in range(n_bonds):
        p = [Fraction(v) for v in primes[per_bond * j: per_bond * (j + 1)]]
        if kind == "heisenberg":
            bonds.append((p[0], p[0], p[0]))
        elif kind == "xxz":
            bonds.append((p[0], p[0], kappa * p[0]))
        elif kind == "xx":
            bonds.append((p[0], p[0], Fraction(0)))
        elif kind == "ising":
            bonds.append((Fraction(0), Fraction(0), p[0]))
        elif kind == "xy":
            bonds.append((p[0], p[1], Fraction(0)))
        else:
            bonds.append((p[0], p[1], p[2]))
    return bonds


def _explicit_bonds(kind: str, n_bonds: int, values: Sequence,
                    kappa: Fraction) -> List[Tuple[Fraction, Fraction, Fraction]]:
    if len(values) != n_bonds:
        raise ValueError(f"expected {n_bonds} bond couplings, got {len(values)}")
    bonds = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 3:
                raise ValueError("explicit bond coupling must be a scalar or (a, b, c)")
            bonds.append(tuple(_q(x) for x in v))
            continue
        g = _q(v)
        if kind in ("xy", "xyz"):
            raise ValueError(f"{kind} chain needs (a, b, c) triples per bond")
        bonds.append({
            "heisenberg": (g, g, g),
            "xxz": (g, g, kappa * g),
            "xx": (g, g, Fraction(0)),
            "ising": (Fraction(0), Fraction(0), g),
        }[kind])
    return bonds


def chain_graph(kind: str, n: int, couplings: Union[str, Sequence] = "uniform",
                kappa=1, seed: Optional[int] = None) -> CouplingGraph:
    """Nearest-neighbour open chain of the given coupling ``kind``."""
    if kind not in CHAIN_KINDS:
        raise ValueError(f"unknown chain kind {kind!r}; expected one of {CHAIN_KINDS}")
    if n < 2:
        raise ValueError("a chain needs at least 2 sites")
    kappa = _q(kappa)
    if kind == "xxz" and kappa == 0:
        raise ValueError("xxz chain requires kappa != 0 (use kind='xx')")
    n_bonds = n - 1
    if isinstance(couplings, str):
        if couplings == "uniform":
            bonds = [_uniform_bond(kind, kappa)] * n_bonds
        elif couplings == "generic":
            bonds = _generic_bonds(kind, n_bonds, kappa, seed)
        else:
            raise ValueError(f"unknown coupling mode {couplings!r}")
    else:
        bonds = _explicit_bonds(kind, n_bonds, couplings, kappa)
    for j, (a, b, c) in enumerate(bonds, start=1):
        _check_bond(kind, j, a, b, c)
    return CouplingGraph(n, tuple((j, j + 1, a, b, c) for j, (a, b, c) in enumerate(bonds, start=1)))


def build_chain(kind: str, n: int, couplings: Union[str, Sequence] = "uniform",
                kappa=1, seed: Optional[int] = None) -> PauliVector:
    return build_network(chain_graph(kind, n, couplings, kappa, seed))


def build_control(n: int, site: int, axis: str = "Z") -> PauliVector:
    axis = axis.upper()
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    return PauliVector.from_string(PauliString.from_sites(n, {site: axis}))


@dataclass(frozen=True)
class LeakageProfile:
    """Amplitude profile of a control leaking onto the following sites.

    ``linear``: gamma_j = -alpha*j + beta;  ``gaussian``: gamma_j ~ exp(-mu (j-1)^2),
    for j = 1..reach.
    """

    kind: str = "none"
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    mu: Fraction = Fraction(0)
    reach: int = 1

    def __post_init__(self):
        if self.kind not in ("none", "linear", "gaussian"):
            raise ValueError(f"unknown leakage kind {self.kind!r}")
        if self.reach < 1:
            raise ValueError("leakage reach must be >= 1")
        for name in ("alpha", "beta", "mu"):
            object.__setattr__(self, name, _q(getattr(self, name)))

    def amplitudes(self) -> List[Fraction]:
        k = self.reach
        if self.kind == "none" or k == 1:
            return [Fraction(1)]
        if self.kind == "linear":
            gam = [-self.alpha * j + self.beta for j in range(1, k + 1)]
            if any(g <= 0 for g in gam) or any(gam[j] <= gam[j + 1] for j in range(k - 1)):
                raise ValueError("linear leakage must be positive and strictly decreasing over its reach")
            return gam
        gam = [Fraction(math.exp(-float(self.mu) * (j - 1) ** 2)).limit_denominator(GAUSSIAN_MAX_DENOMINATOR)
               for j in range(1, k + 1)]
        nodes = [gam[j] - gam[j + 1] for j in range(k - 1)] + [gam[-1]]
        squares = [d * d for d in nodes]
        if 0 in squares or len(set(squares)) != len(squares):
            raise ValueError("degenerate leakage profile")
        return gam

    def to_dict(self) -> Optional[dict]:
        if self.kind == "none":
            return None
        if self.kind == "linear":
            return {"kind": "linear", "alpha": str(self.alpha), "beta": str(self.beta), "reach": self.reach}
        return {"kind": "gaussian", "mu": str(self.mu), "reach": self.reach}

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "LeakageProfile":
        if not d:
            return cls()
        kind = d.get("kind", "none")
        if kind in ("gauss", "gaussian"):
            return cls("gaussian", mu=d["mu"], reach=int(d["reach"]))
        if kind == "linear":
            return cls("linear", alpha=d["alpha"], beta=d["beta"], reach=int(d["reach"]))
        return cls(kind)


def build_leaky_control(profile: LeakageProfile, n: int, site: int = 1, axis: str = "Z") -> PauliVector:
    """``sum_j gamma_j A_{site+j-1}`` for the profile's amplitudes ``gamma``."""
    axis = axis.upper()
    gam = profile.amplitudes()
    if site + len(gam) - 1 > n:
        raise ValueError(f"leakage reach {len(gam)} from site {site} exceeds chain length {n}")
    terms = [(PauliString.from_sites(n, {site + j: axis}), g) for j, g in enumerate(gam)]
    return PauliVector.from_terms(n, terms)


@dataclass(frozen=True)
class Control:
    site: int
    axis: str = "Z"
    leakage: LeakageProfile = field(default_factory=LeakageProfile)

    def token(self) -> str:
        base = f"{self.axis.lower()}{self.site}"
        lk = self.leakage
        if lk.kind == "linear":
            return f"{base}:linear:{lk.alpha}:{lk.beta}:{lk.reach}"
        if lk.kind == "gaussian":
            return f"{base}:gauss:{lk.mu}:{lk.reach}"
        return base

    def build(self, n: int) -> PauliVector:
        if self.leakage.kind == "none":
            return build_control(n, self.site, self.axis)
        return build_leaky_control(self.leakage, n, self.site, self.axis)

    def to_dict(self) -> dict:
        return {"site": self.site, "axis": self.axis, "leakage": self.leakage.to_dict()}


def parse_control_token(token: str) -> Control:
    """Parse ``"z1"``, ``"x2"``, ``"z1:linear:1:4:3"`` or ``"z1:gauss:1:3"``."""
    parts = token.strip().split(":")
    head = parts[0]
    if len(head) < 2 or head[0].upper() not in AXES or not head[1:].isdigit():
        raise ValueError(f"bad control token {token!r}; expected axis+site like 'z1'")
    axis, site = head[0].upper(), int(head[1:])
    if len(parts) == 1:
        return Control(site, axis)
    kind = parts[1].lower()
    if kind == "linear" and len(parts) == 5:
        return Control(site, axis, LeakageProfile("linear", alpha=parts[2], beta=parts[3], reach=int(parts[4])))
    if kind in ("gauss", "gaussian") and len(parts) == 4:
        return Control(site, axis, LeakageProfile("gaussian", mu=parts[2], reach=int(parts[3])))
    raise ValueError(f"bad leakage in control token {token!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Declarative model: a chain preset or explicit network plus controls."""

    model: str
    n: int
    couplings: Union[str, Tuple] = "uniform"
    kappa: Fraction = Fraction(1)
    controls: Tuple[Control, ...] = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if self.model not in CHAIN_KINDS + ("network",):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        object.__setattr__(self, "kappa", _q(self.kappa))
        if not isinstance(self.couplings, str):
            object.__setattr__(self, "couplings", tuple(
                tuple(c) if isinstance(c, (list, tuple)) else c for c in self.couplings))
        ctrls = tuple(c if isinstance(c, Control) else parse_control_token(c) for c in self.controls)
        for c in ctrls:
            if not 1 <= c.site <= self.n:
                raise ValueError(f"control site {c.site} out of range 1..{self.n}")
        object.__setattr__(self, "controls", ctrls)

    def graph(self) -> CouplingGraph:
        if self.model == "network":
            if isinstance(self.couplings, str):
                raise ValueError("network model needs an explicit edge list in 'couplings'")
            return CouplingGraph(self.n, tuple(tuple(e) for e in self.couplings))
        return chain_graph(self.model, self.n, self.couplings, self.kappa, self.seed)

    def system(self) -> PauliVector:
        return build_network(self.graph())

    def hamiltonians(self) -> List[PauliVector]:
        return [self.system()] + [c.build(self.n) for c in self.controls]

    def coupling_class(self) -> str:
        return self.graph().model_tag() if self.model == "network" else self.model

    def formula_tag(self) -> Optional[str]:
        """Tag of a known closed-form DLA dimension for this model, if any."""
        if self.model == "network":
            return None
        plain = {(c.axis, c.site) for c in self.controls if c.leakage.kind == "none"}
        leaky = [c for c in self.controls if c.leakage.kind != "none"]
        n = self.n
        kind = self.model
        if leaky:
            if len(self.controls) == 1 and leaky[0].axis == "Z" and leaky[0].site == 1:
                return {"xxz": "xxz_z1", "heisenberg": "xxz_z1", "xyz": "xyz_z1"}.get(kind)
            return None
        if len(plain) != len(self.controls):
            return None
        if plain == {("Z", 1)}:
            return {"xxz": "xxz_z1", "heisenberg": "xxz_z1", "xyz": "xyz_z1", "xx": "xx_z1"}.get(kind)
        if kind == "xx" and plain == {("Z", 1), ("X", 1)}:
            return "xx_z1x1"
        if kind == "xx" and plain == {("Z", 1), ("X", 2)} and n >= 2:
            return "xx_z1x2"
        if kind in ("xxz", "heisenberg", "xyz") and len(plain) == 2:
            (a1, s1), (a2, s2) = sorted(plain)
            if a1 == "X" and a2 == "Z" and s1 == s2 and 2 * s1 - 1 != n:
                return "full"
            if a1 == "X" and a2 == "Z" and s2 == 1:
                return "full"
        if kind in ("xx", "xy") and plain == {("Z", 1), ("X", 1), ("X", 2)} and n >= 2:
            return "full"
        return None

    # serialisation ------------------------------------------------------
    def to_dict(self) -> dict:
        if isinstance(self.couplings, str):
            coup = self.couplings
        else:
            coup = [[str(x) for x in c] if isinstance(c, tuple) else str(c) for c in self.couplings]
        d = {"model": self.model, "n": self.n, "couplings": coup, "kappa": str(self.kappa),
             "controls": [c.to_dict() for c in self.controls]}
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        for key in ("model", "n"):
            if key not in d:
                raise ValueError(f"model spec is missing field {key!r}")
        controls = []
        for i, c in enumerate(d.get("controls", [])):
            if isinstance(c, str):
                controls.append(parse_control_token(c))
                continue
            if "site" not in c:
                raise ValueError(f"controls[{i}] is missing field 'site'")
            controls.append(Control(int(c["site"]), str(c.get("axis", "Z")).upper(),
                                    LeakageProfile.from_dict(c.get("leakage"))))
        coup = d.get("couplings", "uniform")
        if isinstance(coup, list):
            coup = tuple(tuple(_q(x) if not isinstance(x, int) else x for x in c)
                         if isinstance(c, list) else _q(c) for c in coup)
        return cls(model=d["model"], n=int(d["n"]), couplings=coup,
                   kappa=_q(d.get("kappa", 1)), controls=tuple(controls), seed=d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))
