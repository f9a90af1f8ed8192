"""Exact dynamical Lie algebra, symmetry and controllability analysis of spin networks."""
from .closure import (AlgebraCandidate, LieBasis, UncertifiedBasisError, close_algebra, contains,
                      graded_dimensions, identify_algebra)
from .estimators import LieClosure, SubspaceControllability, SymmetryDetector
from .hamiltonians import (Control, CouplingGraph, LeakageProfile, ModelSpec, build_chain,
                           build_control, build_leaky_control, build_network, chain_graph,
                           parse_control_token)
from .pauli import (PauliString, PauliVector, anticommutes, pauli_commutator, pauli_product,
                    transpose_parity, vector_commutator, vector_product)
from .report import AnalysisReport, run_analysis, verify_suite
from .subspace import (GaussianRational, SubspaceBasis, Verdict, controllability_verdict,
                       decompose, excitation_basis, parity_basis, projected_rank, restrict_operator)
from .symmetry import (SymmetryRecord, external_symmetry_basis, internal_symmetry_basis,
                       permutation_symmetries, standard_symmetry_report)

__version__ = "0.1.0"
