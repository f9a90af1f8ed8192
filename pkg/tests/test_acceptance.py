"""Acceptance criteria 1-12; each test records one PASS/FAIL line for the summary."""
import json
import random
from functools import lru_cache
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest

from dense_oracle import dense_closure_dim, string_matrix, vector_matrix
from spindla.cli import main
from spindla.closure import close_algebra, contains, graded_dimensions
from spindla.hamiltonians import ModelSpec
from spindla.oracles import (g_set_rank, jw_structure_check, lemma_identity, pair_operators, pair_rank,
                             xxz_graded_rank_formula)
from spindla.pauli import (PauliString, PauliVector, pauli_commutator, pauli_product,
                           vector_commutator)
from spindla.subspace import (controllability_verdict, decompose, excitation_basis, full_basis,
                              parity_basis, projected_rank)
from spindla.symmetry import external_symmetry_basis, internal_symmetry_basis, permutation_symmetries


def spec(model, n, *controls, **kw):
    return ModelSpec(model, n, controls=controls, **kw)


def dim(s):
    basis = close_algebra(s.hamiltonians())
    assert basis.certified
    return basis.dimension


def record(lines, num, title, results):
    failed = [label for label, ok in results if not ok]
    status = "FAIL" if failed else "PASS"
    line = f"criterion {num:2d} {status}: {title} ({len(results) - len(failed)}/{len(results)} checks)"
    if failed:
        line += "; failing: " + "; ".join(failed)
    lines[num] = line
    print(line)
    assert not failed, line


def alternating(n, first):
    other = "Y" if first == "X" else "X"
    return " ".join(f"{first if s % 2 else other}{s}" for s in range(1, n + 1))


def test_criterion_01_xxz_z1(acceptance_lines):
    res = []
    variants = [("uniform", 1, None), ("uniform", Fraction(1, 2), None),
                ("generic", 1, None), ("generic", Fraction(-3, 2), 11)]
    for n, want in zip(range(3, 7), (18, 67, 248, 919)):
        assert comb(2 * n, n) - n + 1 == want
        for coup, kappa, seed in variants:
            got = dim(spec("xxz", n, "z1", couplings=coup, kappa=kappa, seed=seed))
            res.append((f"N={n} {coup} kappa={kappa} dim {got} != {want}", got == want))
        got = dim(spec("heisenberg", n, "z1"))
        res.append((f"N={n} heisenberg dim {got} != {want}", got == want))
    for n in range(3, 6):
        basis = close_algebra(spec("xxz", n, "z1").hamiltonians())
        for k in range(n + 1):
            r = projected_rank(basis, excitation_basis(n, k))
            res.append((f"N={n} k={k} rank {r} != {comb(n, k) ** 2}", r == comb(n, k) ** 2))
    record(acceptance_lines, 1, "XXZ + Z1 closure dimension and excitation ranks", res)


def test_criterion_02_xyz_z1(acceptance_lines):
    res = []
    for n in range(3, 6):
        want = 2 ** (2 * n - 1) - 2
        for coup in ("uniform", "generic"):
            basis = close_algebra(spec("xyz", n, "z1", couplings=coup).hamiltonians())
            res.append((f"N={n} {coup} dim {basis.dimension} != {want}", basis.dimension == want))
            for sign in (1, -1):
                r = projected_rank(basis, parity_basis(n, sign))
                half = 2 ** (n - 1)
                res.append((f"N={n} {coup} parity {sign:+d} rank {r}", r == half * half - 1))
    basis = close_algebra(spec("xyz", 2, "z1").hamiltonians())
    for sign in (1, -1):
        r = projected_rank(basis, parity_basis(2, sign))
        res.append((f"N=2 parity {sign:+d} rank {r} != 4", r == 4))
    record(acceptance_lines, 2, "XYZ + Z1 closure dimension and parity ranks", res)


@lru_cache(maxsize=None)
def criterion_03_results():
    res = []
    for model in ("xxz", "xyz"):
        for n in (4, 5):
            base = dim(spec(model, n, "z1"))
            for prof in ("linear:1:4:3", "linear:1:5:3", "gauss:1:3", "gauss:1:4"):
                for coup in ("uniform", "generic"):
                    got = dim(spec(model, n, f"z1:{prof}", couplings=coup))
                    res.append((f"{model} N={n} {prof} {coup} dim {got} != {base}", got == base))
    return tuple(res)


@pytest.mark.xfail(strict=True, reason="3 Z1 + 2 Z2 + Z3 on the uniform N=4 XXZ chain is degenerate; see decisions ledger")
def test_criterion_03_leakage(acceptance_lines):
    record(acceptance_lines, 3, "leaky Z control matches the Z1-only closure", criterion_03_results())


def test_criterion_03_failure_is_affine_field():
    failing = [label for label, ok in criterion_03_results() if not ok]
    assert failing == ["xxz N=4 linear:1:4:3 uniform dim 41 != 67"]


def test_affine_field_extra_conserved_operator():
    hams = spec("xxz", 4, "z1:linear:1:4:3").hamiltonians()
    assert len(external_symmetry_basis(hams)) == 6


@pytest.mark.parametrize("n,token,want", [(4, "z1:linear:1:4:3", 41), (4, "z1:linear:2:9:4", 41),
                                          (5, "z1:linear:1:6:5", 125)])
def test_affine_field_on_uniform_chain_is_degenerate(n, token, want):
    # amplitudes affine in the site index over the whole chain, so every
    # Vandermonde node equals alpha; generic couplings lift the degeneracy
    s = spec("xxz", n, token)
    assert dim(s) == want
    assert dim(spec("xxz", n, token, couplings="generic")) == dim(spec("xxz", n, "z1"))


def test_criterion_04_minimal_controls(acceptance_lines):
    res = []
    full_cases = [(3, "z1", "x1"), (4, "z1", "x1"), (4, "z2", "x2"), (5, "z2", "x2"),
                  (4, "z1", "x2"), (4, "z1", "x3"), (4, "z1", "x4")]
    center_cases = [(3, "z2", "x2", "(1 3)"), (5, "z3", "x3", "(1 5)(2 4)")]
    for model in ("xxz", "xyz"):
        for n, a, b in full_cases:
            got = dim(spec(model, n, a, b))
            res.append((f"{model} N={n} {{{a},{b}}} dim {got}", got == 4 ** n - 1))
        for n, a, b, mirror in center_cases:
            s = spec(model, n, a, b)
            got = dim(s)
            perms = [r.operator_text for r in permutation_symmetries(s.hamiltonians())]
            res.append((f"{model} N={n} centre dim {got} not below full", got < 4 ** n - 1))
            res.append((f"{model} N={n} centre mirror {mirror} not in {perms}", mirror in perms))
    record(acceptance_lines, 4, "minimal control sets and the centre-spin exception", res)


@lru_cache(maxsize=None)
def criterion_05_results():
    res = []
    for n in range(3, 7):
        basis = close_algebra(spec("xx", n, "z1").hamiltonians())
        res.append((f"N={n} dim {basis.dimension} != {n * n}", basis.dimension == n * n))
        for k in range(n + 1):
            want = n * n if 1 <= k <= n - 1 else 1
            r = projected_rank(basis, excitation_basis(n, k))
            res.append((f"N={n} k={k} rank {r} != {want}", r == want))
    for n in range(2, 6):
        res.append((f"jw_structure_check({n})", jw_structure_check(n)))
    return tuple(res)


@pytest.mark.xfail(strict=True, reason="at even N the half-filled subspace has rank N^2-1; see decisions ledger")
def test_criterion_05_xx_z1(acceptance_lines):
    record(acceptance_lines, 5, "XX + Z1 dimension, excitation ranks and JW structure", criterion_05_results())


def test_criterion_05_failure_is_only_half_filling():
    failing = [label for label, ok in criterion_05_results() if not ok]
    assert failing == ["N=4 k=2 rank 15 != 16", "N=6 k=3 rank 35 != 36"]


def test_criterion_06_xx_z1x1(acceptance_lines):
    res = []
    for n, want in zip(range(3, 6), (21, 36, 55)):
        s = spec("xx", n, "z1", "x1")
        got = dim(s)
        res.append((f"N={n} dim {got} != {want}", got == want and want == n * (2 * n + 1)))
        target = alternating(n, "Y")
        ys = target.count("Y")
        klass = "orthogonal" if ys % 2 == 0 else "symplectic"
        found = [(r.operator_text, r.klass) for r in internal_symmetry_basis(s.hamiltonians())]
        res.append((f"N={n} internal {target} {klass} not in {found}", (target, klass) in found))
    record(acceptance_lines, 6, "XX + {Z1,X1} dimension and alternating internal symmetry", res)


def test_criterion_07_xx_z1x2(acceptance_lines):
    res = []
    for n, want in zip(range(3, 7), (36, 120, 496, 2080)):
        hams = spec("xx", n, "z1", "x2").hamiltonians()
        basis = close_algebra(hams)
        g = g_set_rank(n)
        res.append((f"N={n} dim {basis.dimension} != {want}", basis.dimension == want))
        res.append((f"N={n} g_set_rank {g} != dim", g == basis.dimension))
        internal = internal_symmetry_basis(hams)
        target = alternating(n, "X")
        found = [r.operator_text for r in internal]
        res.append((f"N={n} internal {target} not in {found}", target in found))
        pure = controllability_verdict(basis, [full_basis(n)], internal)[-1].pure_state_controllable
        res.append((f"N={n} pure flag {pure}", pure == (n in (3, 6))))
    record(acceptance_lines, 7, "XX + {Z1,X2} dimension, G-set rank, symmetry and pure-state flag", res)


def test_criterion_08_xx_xy_full(acceptance_lines):
    res = []
    for model in ("xx", "xy"):
        for n in (3, 4):
            got = dim(spec(model, n, "z1", "x1", "x2"))
            res.append((f"{model} N={n} dim {got}", got == 4 ** n - 1))
    record(acceptance_lines, 8, "XX/XY + {Z1,X1,X2} full controllability", res)


def test_criterion_09_pairs(acceptance_lines):
    res = []
    for n in range(1, 7):
        for p in range(1, n // 2 + 1):
            r, count = pair_rank(n, p), len(pair_operators(n, p))
            res.append((f"N={n} p={p} rank {r}", r == comb(n, p) * comb(n - p, p)))
            res.append((f"N={n} p={p} count {count}", count == factorial(p) * comb(n, p) * comb(n - p, p)))
    record(acceptance_lines, 9, "p-pair operator rank and element counts", res)


def test_criterion_10_lemma(acceptance_lines):
    record(acceptance_lines, 10, "binomial lemma identity for n = 1..12",
           [(f"n={n}", lemma_identity(n)) for n in range(1, 13)])


def test_criterion_11_graded(acceptance_lines):
    res = []
    for n in (4, 5):
        basis = close_algebra(spec("xxz", n, "z1").hamiltonians())
        g = graded_dimensions(basis)
        res.append((f"N={n} M1 rank {g.get(1)}", g.get(1) == n))
        for ell in range(3, n + 1):
            want = xxz_graded_rank_formula(n, ell)
            res.append((f"N={n} l={ell} rank {g.get(ell)} != {want}", g.get(ell) == want))
    basis = close_algebra(spec("xxz", 4, "z1").hamiltonians())
    res.append(("(Z1-Z2)Z3Z4 in L", contains(basis, PauliVector.parse("Z1 Z3 Z4 - Z2 Z3 Z4", 4))))
    res.append(("Z1Z3Z4 not in L", not contains(basis, PauliVector.parse("Z1 Z3 Z4", 4))))
    record(acceptance_lines, 11, "graded ranks of XXZ + Z1 and membership exemplars", res)


def _strings(n):
    return [PauliString.from_key(k, n) for k in range(4 ** n)]


def _random_vector(rng, n, terms=4):
    return PauliVector(n, {rng.randrange(4 ** n): Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                           for _ in range(terms)})


def test_criterion_12_properties(acceptance_lines, capsys):
    res = []
    rng = random.Random(2024)
    # product and commutator against dense matrices
    pairs = [(p, q) for n in (1, 2) for p in _strings(n) for q in _strings(n)]
    strings3 = _strings(3)
    pairs += [(rng.choice(strings3), rng.choice(strings3)) for _ in range(200)]
    prod_ok = comm_ok = True
    for p, q in pairs:
        mp, mq = string_matrix(p), string_matrix(q)
        phase, r = pauli_product(p, q)
        prod_ok &= np.allclose(mp @ mq, 1j ** phase * string_matrix(r))
        c = pauli_commutator(p, q)
        expect = np.zeros_like(mp) if c is None else c[0] * 1j * string_matrix(c[1])
        comm_ok &= np.allclose(mp @ mq - mq @ mp, expect)
    res.append(("dense product", prod_ok))
    res.append(("dense commutator", comm_ok))
    vec_ok = True
    for _ in range(50):
        v, w = _random_vector(rng, 3), _random_vector(rng, 3)
        mv, mw = 1j * vector_matrix(v), 1j * vector_matrix(w)
        vec_ok &= np.allclose(mv @ mw - mw @ mv, 1j * vector_matrix(vector_commutator(v, w)))
    res.append(("dense vector commutator at N=3", vec_ok))
    # closure against brute-force dense nesting
    closure_cases = [spec("xxz", 2, "z1"), spec("xyz", 2, "z1"), spec("xx", 3, "z1"),
                     spec("xyz", 3, "z1"), spec("xx", 3, "z1", "x2"), spec("xxz", 3, "z2", "x2")]
    for _ in range(3):
        closure_cases.append([_random_vector(rng, 3, 2) for _ in range(2)])
    for case in closure_cases:
        hams = case.hamiltonians() if isinstance(case, ModelSpec) else case
        exact, dense = close_algebra(hams).dimension, dense_closure_dim(hams)
        res.append((f"closure {case} exact {exact} dense {dense}", exact == dense))
    # Jacobi identity
    jac_ok = True
    for _ in range(50):
        a, b, c = (_random_vector(rng, 3) for _ in range(3))
        total = (vector_commutator(a, vector_commutator(b, c)) + vector_commutator(b, vector_commutator(c, a))
                 + vector_commutator(c, vector_commutator(a, b)))
        jac_ok &= not total
    res.append(("Jacobi identity", jac_ok))
    # order independence
    gens = spec("xxz", 4, "z1", "x2").hamiltonians() + [PauliVector.parse("Z3", 4)]
    ref = close_algebra(gens)
    for _ in range(5):
        shuffled = gens[:]
        rng.shuffle(shuffled)
        other = close_algebra(shuffled)
        res.append(("closure order independence",
                    other.dimension == ref.dimension and other.pivot_keys() == ref.pivot_keys()))
    # report determinism
    outs = []
    for threads in ("1", "2"):
        main(["--model", "xyz", "--n", "3", "--controls", "z1", "--grade", "--threads", threads])
        d = json.loads(capsys.readouterr().out)
        d.pop("wall_time")
        outs.append(json.dumps(d, sort_keys=True))
    res.append(("report determinism", outs[0] == outs[1]))
    record(acceptance_lines, 12, "dense oracle, Jacobi, order independence, determinism", res)
