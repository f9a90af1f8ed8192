"""scikit-learn style wrappers around closure, symmetry detection and verdicts.

``X`` is either a :class:`ModelSpec` or a sequence of PauliVectors on a common
number of sites.
"""
from __future__ import annotations

from typing import Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .closure import close_algebra, contains, graded_dimensions
from .hamiltonians import ModelSpec
from .pauli import PauliVector
from .report import _diagonal
from .subspace import controllability_verdict, decompose
from .symmetry import (external_symmetry_basis, in_span, internal_symmetry_basis,
                       permutation_symmetries, standard_symmetry_report)
from .validation import check_hamiltonians

__all__ = ["LieClosure", "SymmetryDetector", "SubspaceControllability", "as_hamiltonians"]

Input = Union[ModelSpec, Sequence[PauliVector]]


def as_hamiltonians(X: Input):
    hams = X.hamiltonians() if isinstance(X, ModelSpec) else list(X)
    check_hamiltonians(hams)
    return hams


def _queries(X, n: int):
    vs = [X] if isinstance(X, PauliVector) else list(X)
    for v in vs:
        if not isinstance(v, PauliVector):
            raise TypeError(f"expected PauliVector, got {type(v).__name__}")
        if v.n_sites != n:
            raise ValueError(f"incompatible sizes: {v.n_sites} and {n} sites")
    return vs


class LieClosure(TransformerMixin, BaseEstimator):
    """Fit the dynamical Lie algebra; ``predict`` tests membership and
    ``transform`` gives coordinates in the fitted basis."""

    def __init__(self, cap: Optional[int] = None, strategy: str = "generators",
                 method: str = "modular", threads: int = 1):
        self.cap = cap
        self.strategy = strategy
        self.method = method
        self.threads = threads

    def fit(self, X: Input, y=None):
        hams = as_hamiltonians(X)
        self.basis_ = close_algebra(hams, cap=self.cap, strategy=self.strategy,
                                    threads=self.threads, method=self.method)
        self.n_sites_ = self.basis_.n_sites
        self.dimension_ = self.basis_.dimension
        self.certified_ = self.basis_.certified
        self._rows = self.basis_._echelon.back_substituted()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "basis_")
        return np.array([contains(self.basis_, v) for v in _queries(X, self.n_sites_)], dtype=bool)

    def transform(self, X) -> np.ndarray:
        """Exact coordinates (object array) of each vector in the basis; raises if outside."""
        check_is_fitted(self, "basis_")
        vs = _queries(X, self.n_sites_)
        out = np.empty((len(vs), len(self._rows)), dtype=object)
        for i, v in enumerate(vs):
            if not contains(self.basis_, v):
                raise ValueError(f"{v} is not in the fitted algebra")
            for j, row in enumerate(self._rows):
                out[i, j] = v.coeffs.get(min(row), 0)
        return out

    def graded_dimensions(self):
        check_is_fitted(self, "basis_")
        return graded_dimensions(self.basis_)


class SymmetryDetector(BaseEstimator):
    """Fit external, internal and permutation symmetries of a Hamiltonian set."""

    def __init__(self, external: bool = True, internal: bool = True,
                 permutations: bool = True, max_n: Optional[int] = None):
        self.external = external
        self.internal = internal
        self.permutations = permutations
        self.max_n = max_n

    def fit(self, X: Input, y=None):
        hams = as_hamiltonians(X)
        self.n_sites_ = hams[0].n_sites
        self.standard_ = standard_symmetry_report(hams)
        self.external_ = external_symmetry_basis(hams, max_n=self.max_n) if self.external else []
        self.internal_ = internal_symmetry_basis(hams, max_n=self.max_n) if self.internal else []
        self.permutations_ = permutation_symmetries(hams) if self.permutations else []
        return self

    def predict(self, X) -> np.ndarray:
        """Whether each vector lies in the fitted commutant."""
        check_is_fitted(self, "standard_")
        return np.array([in_span(self.external_, v) for v in _queries(X, self.n_sites_)], dtype=bool)


class SubspaceControllability(BaseEstimator):
    """Fit per-subspace controllability verdicts; ``predict`` returns the statuses."""

    def __init__(self, cap: Optional[int] = None, threads: int = 1):
        self.cap = cap
        self.threads = threads

    def fit(self, X: Input, y=None):
        hams = as_hamiltonians(X)
        n = hams[0].n_sites
        basis = close_algebra(hams, cap=self.cap, threads=self.threads)
        internal = internal_symmetry_basis(hams) if all(h.is_traceless() for h in hams) else []
        self.decomposition_ = decompose(_diagonal(standard_symmetry_report(hams)), n)
        self.verdicts_ = controllability_verdict(basis, self.decomposition_, internal)
        self.dimension_ = basis.dimension
        return self

    def predict(self, X=None) -> np.ndarray:
        check_is_fitted(self, "verdicts_")
        return np.array([v.status for v in self.verdicts_], dtype=object)
