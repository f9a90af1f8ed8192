"""Input checks and size bounds shared by the analysis modules."""
from __future__ import annotations

import os
from typing import Sequence

from .pauli import PauliVector

__all__ = ["check_hamiltonians", "max_sites", "check_sites", "DEFAULT_BOUNDS"]

# largest N each kind of computation accepts by default
DEFAULT_BOUNDS = {"closure": 7, "symmetry": 6, "enumeration": 6}


def max_sites(kind: str) -> int:
    """Bound for ``kind``; the environment variable SPINDLA_MAX_N overrides all bounds."""
    env = os.environ.get("SPINDLA_MAX_N")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"SPINDLA_MAX_N must be an integer, got {env!r}") from None
    return DEFAULT_BOUNDS[kind]


def check_sites(n: int, kind: str) -> None:
    bound = max_sites(kind)
    if n > bound:
        raise ValueError(f"N={n} exceeds the {kind} bound N <= {bound} (set SPINDLA_MAX_N to override)")


def check_hamiltonians(hams: Sequence[PauliVector]) -> int:
    """Validate a nonempty list of PauliVectors of one size; return that size."""
    hams = list(hams)
    if not hams:
        raise ValueError("need at least one Hamiltonian")
    for h in hams:
        if not isinstance(h, PauliVector):
            raise TypeError(f"expected PauliVector, got {type(h).__name__}")
    n = hams[0].n_sites
    for h in hams[1:]:
        if h.n_sites != n:
            raise ValueError(f"incompatible sizes: {h.n_sites} and {n} sites")
    return n
