from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from spindla.linalg import MERSENNE_61, Echelon, ModEchelon, nullspace, rank, rational_reconstruct

small = st.integers(-4, 4)
matrices = st.lists(st.lists(small, min_size=6, max_size=6), min_size=1, max_size=7)


def as_rows(m):
    return [{j: c for j, c in enumerate(row) if c} for row in m]


@given(matrices)
def test_rank_matches_numpy(m):
    assert rank(as_rows(m)) == np.linalg.matrix_rank(np.array(m, dtype=float))


@given(matrices)
def test_modular_rank_matches(m):
    mod = ModEchelon()
    for r in as_rows(m):
        mod.insert(r)
    assert len(mod) == rank(as_rows(m))


@given(matrices)
def test_nullspace_methods_agree(m):
    rows = as_rows(m)
    a = nullspace(rows, range(6), method="exact")
    b = nullspace(rows, range(6), method="modular")
    norm = lambda sols: sorted(sorted((k, Fraction(c)) for k, c in s.items() if c) for s in sols)
    assert norm(a) == norm(b)
    assert len(a) == 6 - rank(rows)
    for s in a:
        for r in rows:
            assert sum(c * s.get(k, 0) for k, c in r.items()) == 0


@given(matrices)
def test_reduced_form_is_canonical(m):
    rows = as_rows(m)
    e1, e2 = Echelon(), Echelon()
    for r in rows:
        e1.insert(r)
    for r in reversed(rows):
        e2.insert(r)
    assert e1.back_substituted() == e2.back_substituted()
    for row in e1.rows:
        others = set(e1.pivots) - {min(row)}
        assert not others & set(row)


@given(st.fractions(max_denominator=10 ** 6).filter(lambda q: abs(q.numerator) < 10 ** 6))
def test_rational_reconstruction(q):
    p = MERSENNE_61
    a = q.numerator * pow(q.denominator, -1, p) % p
    assert rational_reconstruct(a, p) == q


def test_contains():
    e = Echelon()
    e.insert({0: 1, 1: 2})
    assert e.contains({0: Fraction(1, 2), 1: 1})
    assert not e.contains({1: 1})
    assert e.insert({0: 2, 1: 4}) is None
