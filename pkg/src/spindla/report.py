"""End-to-end analysis of a model and the closed-form verification suite."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional

from .closure import close_algebra, graded_dimensions
from .hamiltonians import ModelSpec
from .oracles import (check_record, dla_dimension_formula, g_set_rank, jw_structure_check,
                      lemma_identity, pair_count_formula, pair_operators, pair_rank,
                      pair_rank_formula, xxz_graded_rank_formula)
from .subspace import controllability_verdict, decompose
from .symmetry import (external_symmetry_basis, internal_symmetry_basis, label_external,
                       permutation_symmetries, standard_symmetry_report)
from .validation import check_sites, max_sites

__all__ = ["SCHEMA_VERSION", "AnalysisReport", "run_analysis", "verify_suite",
           "EXIT_OK", "EXIT_FORMULA", "EXIT_UNCERTIFIED"]

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_FORMULA, EXIT_UNCERTIFIED = 0, 2, 3

VERDICT_COLUMNS = ("subspace", "dimension", "projected_rank", "u_dim", "su_dim", "status",
                   "pure_state_controllable")


@dataclass
class AnalysisReport:
    spec: dict
    dla_dimension: int
    certified: bool
    graded_dimensions: Optional[Dict[str, int]] = None
    algebra_candidates: List[dict] = field(default_factory=list)
    symmetries: Dict[str, List[dict]] = field(default_factory=dict)
    verdicts: List[dict] = field(default_factory=list)
    formula_checks: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    wall_time: float = 0.0
    schema_version: str = SCHEMA_VERSION

    @property
    def exit_code(self) -> int:
        if not self.certified:
            return EXIT_UNCERTIFIED
        if any(not c["pass"] for c in self.formula_checks):
            return EXIT_FORMULA
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "spec": self.spec,
            "dla_dimension": self.dla_dimension,
            "certified": self.certified,
            "graded_dimensions": self.graded_dimensions,
            "algebra_candidates": self.algebra_candidates,
            "symmetries": self.symmetries,
            "verdicts": self.verdicts,
            "formula_checks": self.formula_checks,
            "notes": self.notes,
            "wall_time": self.wall_time,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {d.get('schema_version')!r}")
        fields = ("spec", "dla_dimension", "certified")
        for f in fields:
            if f not in d:
                raise ValueError(f"report is missing field {f!r}")
        return cls(spec=d["spec"], dla_dimension=d["dla_dimension"], certified=d["certified"],
                   graded_dimensions=d.get("graded_dimensions"),
                   algebra_candidates=d.get("algebra_candidates", []),
                   symmetries=d.get("symmetries", {}), verdicts=d.get("verdicts", []),
                   formula_checks=d.get("formula_checks", []), notes=d.get("notes", []),
                   wall_time=d.get("wall_time", 0.0))

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def verdict_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=VERDICT_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for v in self.verdicts:
            w.writerow({k: v.get(k, "") for k in VERDICT_COLUMNS})
        return buf.getvalue()


def _diagonal(records):
    exc = [r for r in records if r.provenance == "excitation"]
    if exc:
        return exc
    return [r for r in records if r.provenance == "parity-Z"]


def run_analysis(spec: ModelSpec, grade: bool = False, threads: int = 1,
                 max_dim: Optional[int] = None) -> AnalysisReport:
    """Build, detect symmetries, close, decompose, judge and cross-check ``spec``."""
    start = time.perf_counter()
    n = spec.n
    check_sites(n, "closure")
    hams = spec.hamiltonians()
    notes: List[str] = []

    standard = standard_symmetry_report(spec)
    syms: Dict[str, List[dict]] = {"standard": [r.to_dict() for r in standard]}
    internal = []
    external = []
    if n <= max_sites("symmetry"):
        external = label_external(external_symmetry_basis(hams, max_n=n))
        if all(h.is_traceless() for h in hams):
            internal = internal_symmetry_basis(hams, max_n=n)
        else:
            notes.append("internal symmetry search skipped: Hamiltonians are not traceless")
        syms["external"] = [r.to_dict() for r in external]
        syms["internal"] = [r.to_dict() for r in internal]
    else:
        notes.append(f"commutant and internal solves skipped for N > {max_sites('symmetry')}")
    perms = permutation_symmetries(hams)
    syms["permutation"] = [r.to_dict() for r in perms]

    basis = close_algebra(hams, cap=max_dim, threads=threads)
    report = AnalysisReport(spec=spec.to_dict(), dla_dimension=basis.dimension,
                            certified=basis.certified, symmetries=syms, notes=notes)
    if basis.certified:
        if grade:
            try:
                report.graded_dimensions = {str(k): v for k, v in graded_dimensions(basis).items()}
            except ValueError as exc:
                notes.append(f"grading unavailable: {exc}")
        decomposition = decompose(_diagonal(standard), n)
        verdicts = controllability_verdict(basis, decomposition, internal,
                                           [r.operator for r in external])
        report.verdicts = [v.to_dict() for v in verdicts]
        report.algebra_candidates = report.verdicts[-1].get("algebra_candidates", [])
    else:
        notes.append("closure stopped at the dimension cap; basis is not certified")

    tag = spec.formula_tag()
    if tag is not None and basis.certified:
        expected = dla_dimension_formula(tag, n)
        if expected is not None:
            report.formula_checks.append(check_record(
                "dla_dimension", {"tag": tag, "n": n}, expected, basis.dimension))
        if tag == "xxz_z1" and report.graded_dimensions is not None:
            g = report.graded_dimensions
            report.formula_checks.append(check_record("graded_rank", {"tag": tag, "n": n, "l": 1}, n, g["1"]))
            for ell in range(3, n + 1):
                report.formula_checks.append(check_record(
                    "graded_rank", {"tag": tag, "n": n, "l": ell},
                    xxz_graded_rank_formula(n, ell), g[str(ell)]))
    report.wall_time = round(time.perf_counter() - start, 3)
    return report


# ---------------------------------------------------------------------------

def _spec(model: str, n: int, *tokens: str) -> ModelSpec:
    return ModelSpec(model, n, controls=tuple(tokens))


def verify_suite(n_max: int = 6, threads: int = 1,
                 progress: Optional[Callable[[dict], None]] = None) -> List[dict]:
    """Closed-form and brute-force checks for 2 <= N <= n_max."""
    records: List[dict] = []

    def add(rec):
        records.append(rec)
        if progress is not None:
            progress(rec)

    def dim(spec):
        return close_algebra(spec.hamiltonians(), threads=threads).dimension

    for n in range(1, 13):
        add(check_record("lemma_identity", {"n": n}, True, lemma_identity(n)))
    for n in range(2, n_max + 1):
        for p in range(1, n // 2 + 1):
            if n <= max_sites("enumeration"):
                ops = pair_operators(n, p)
                add(check_record("pair_count", {"n": n, "p": p}, pair_count_formula(n, p), len(ops)))
                add(check_record("pair_rank", {"n": n, "p": p}, pair_rank_formula(n, p), pair_rank(n, p)))
        add(check_record("dla_dimension", {"tag": "xxz_z1", "n": n},
                         dla_dimension_formula("xxz_z1", n), dim(_spec("xxz", n, "z1"))))
        if n == 2:
            rep = run_analysis(_spec("xyz", 2, "z1"), threads=threads)
            got = [v["status"] for v in rep.verdicts[:-1]]
            add(check_record("xyz_n2_parity_verdicts", {"n": 2}, ["controllable_u"] * 2, got))
        elif n <= 5:
            add(check_record("dla_dimension", {"tag": "xyz_z1", "n": n},
                             dla_dimension_formula("xyz_z1", n), dim(_spec("xyz", n, "z1"))))
        add(check_record("dla_dimension", {"tag": "xx_z1", "n": n},
                         dla_dimension_formula("xx_z1", n), dim(_spec("xx", n, "z1"))))
        add(check_record("dla_dimension", {"tag": "xx_z1x1", "n": n},
                         dla_dimension_formula("xx_z1x1", n), dim(_spec("xx", n, "z1", "x1"))))
        rep = run_analysis(_spec("xx", n, "z1", "x2"), threads=threads)
        add(check_record("dla_dimension", {"tag": "xx_z1x2", "n": n},
                         dla_dimension_formula("xx_z1x2", n), rep.dla_dimension))
        if n <= max_sites("enumeration"):
            add(check_record("g_set_rank", {"n": n}, dla_dimension_formula("xx_z1x2", n), g_set_rank(n)))
        add(check_record("pure_state_flag", {"tag": "xx_z1x2", "n": n}, n % 4 in (2, 3),
                         rep.verdicts[-1]["pure_state_controllable"]))
        if n <= 5:
            add(check_record("jw_structure", {"n": n}, True, jw_structure_check(n)))
        if 3 <= n <= 4:
            add(check_record("dla_dimension", {"tag": "full", "model": "xxz", "n": n},
                             4 ** n - 1, dim(_spec("xxz", n, "z1", "x1"))))
            add(check_record("dla_dimension", {"tag": "full", "model": "xx", "n": n},
                             4 ** n - 1, dim(_spec("xx", n, "z1", "x1", "x2"))))
        if 4 <= n <= 5:
            basis = close_algebra(_spec("xxz", n, "z1").hamiltonians(), threads=threads)
            g = graded_dimensions(basis)
            for ell in range(3, n + 1):
                add(check_record("graded_rank", {"tag": "xxz_z1", "n": n, "l": ell},
                                 xxz_graded_rank_formula(n, ell), g[ell]))
        if n <= 5:
            rep = run_analysis(_spec("xxz", n, "z1"), threads=threads)
            got = [v["projected_rank"] for v in rep.verdicts[:-1]]
            add(check_record("excitation_ranks", {"tag": "xxz_z1", "n": n},
                             [comb(n, k) ** 2 for k in range(n + 1)], got))
    return records
