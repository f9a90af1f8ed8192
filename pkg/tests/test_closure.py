import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dense_oracle import dense_closure_dim
from spindla.closure import (UncertifiedBasisError, close_algebra, contains, graded_dimensions,
                             identify_algebra)
from spindla.hamiltonians import ModelSpec, build_chain, build_control
from spindla.pauli import PauliVector


def V(text, n):
    return PauliVector.parse(text, n)


def hams(model, n, *controls, **kw):
    return ModelSpec(model, n, controls=controls, **kw).hamiltonians()


def test_ising_abelian():
    assert close_algebra(hams("ising", 3, "z1")).dimension == 2


def test_known_dimensions():
    assert close_algebra(hams("xxz", 4, "z1", couplings="generic")).dimension == 67
    assert close_algebra(hams("xyz", 3, "z1", couplings="generic")).dimension == 30


def test_membership_examples():
    b = close_algebra(hams("xxz", 4, "z1"))
    assert contains(b, V("Z1 Z3 Z4 - Z2 Z3 Z4", 4))
    assert not contains(b, V("Z1 Z3 Z4", 4))
    assert contains(b, b.basis[0])
    assert contains(b, hams("xxz", 4, "z1")[0])


def test_uncertified_cap():
    b = close_algebra(hams("xxz", 4, "z1"), cap=10)
    assert not b.certified and b.dimension > 10
    with pytest.raises(UncertifiedBasisError):
        contains(b, V("Z1", 4))
    with pytest.raises(UncertifiedBasisError):
        graded_dimensions(b)


def test_graded_examples():
    g = graded_dimensions(close_algebra(hams("xxz", 4, "z1")))
    assert g[1] == 4 and sum(g.values()) == 67
    g5 = graded_dimensions(close_algebra(hams("xxz", 5, "z1")))
    assert g5[3] == 69
    gi = graded_dimensions(close_algebra(hams("ising", 3, "z1")))
    assert (gi[1], gi[2], gi[3]) == (1, 1, 0)


def test_mixed_weight_rejected():
    b = close_algebra([V("Z1 + X1 X2", 2)])
    with pytest.raises(ValueError, match="mixed-weight basis element"):
        graded_dimensions(b)


def test_errors():
    with pytest.raises(ValueError):
        close_algebra([])
    with pytest.raises(ValueError, match="incompatible sizes"):
        close_algebra([V("Z1", 1), V("Z1", 2)])
    with pytest.raises(ValueError):
        close_algebra([V("Z1", 1)], strategy="bogus")


@pytest.mark.parametrize("model,n,ctrls", [
    ("xxz", 3, ("z1",)), ("xyz", 3, ("z1",)), ("xx", 3, ("z1",)), ("xx", 3, ("z1", "x1")),
    ("xx", 3, ("z1", "x2")), ("xxz", 3, ("z2",)), ("xxz", 2, ("z1",)), ("xyz", 2, ("z1",)),
    ("ising", 3, ("x1",)), ("heisenberg", 3, ()),
])
def test_dense_oracle(model, n, ctrls):
    h = hams(model, n, *ctrls)
    assert close_algebra(h).dimension == dense_closure_dim(h)


@settings(max_examples=15)
@given(st.lists(st.lists(st.tuples(st.integers(1, 63), st.integers(-3, 3)), min_size=1, max_size=3),
                min_size=1, max_size=3))
def test_dense_oracle_random_n3(spec):
    gens = [PauliVector(3, dict(terms)) for terms in spec]
    gens = [g for g in gens if g.coeffs] or [V("Z1", 3)]
    assert close_algebra(gens).dimension == dense_closure_dim(gens)


@pytest.mark.parametrize("model,n,ctrls", [("xxz", 4, ("z1",)), ("xx", 4, ("z1", "x2")),
                                           ("xyz", 3, ("z1",))])
def test_order_independence(model, n, ctrls):
    h = hams(model, n, *ctrls, couplings="generic")
    ref = close_algebra(h)
    rng = random.Random(0)
    for _ in range(5):
        perm = h[:]
        rng.shuffle(perm)
        b = close_algebra(perm)
        assert b.dimension == ref.dimension
        assert b.pivot_keys() == ref.pivot_keys()
        assert b.basis == ref.basis


@pytest.mark.parametrize("model,n,ctrls", [("xxz", 4, ("z1",)), ("xyz", 3, ("z1",)),
                                           ("xx", 3, ("z1", "x1"))])
def test_methods_and_strategies_agree(model, n, ctrls):
    h = hams(model, n, *ctrls)
    ref = close_algebra(h)
    for kw in ({"method": "exact"}, {"strategy": "pairs"}, {"strategy": "pairs", "method": "exact"},
               {"threads": 4}):
        b = close_algebra(h, **kw)
        assert b.certified and b.basis == ref.basis


def test_idempotent():
    b = close_algebra(hams("xyz", 3, "z1"))
    again = close_algebra(b.basis)
    assert again.dimension == b.dimension and again.basis == b.basis


def test_traceless_basis():
    b = close_algebra(hams("xx", 4, "z1", "x2"))
    assert all(v.is_traceless() for v in b.basis)
    assert 0 not in b.pivot_keys()


def test_generation_log():
    b = close_algebra(hams("xxz", 3, "z1"))
    lines = [json.loads(x) for x in b.generation_log_jsonl().splitlines()]
    assert len(lines) == b.dimension
    assert lines[0] == {"result_pivot": lines[0]["result_pivot"], "parent_i": None, "parent_j": None}
    for k, rec in enumerate(lines[2:], start=2):
        assert rec["parent_i"] < k and rec["parent_j"] < k


def test_identify_examples():
    c = {x.name: x for x in identify_algebra(36, 4, internal_class="orthogonal")}
    assert c["so(9)"].supported and not c["sp(4)"].supported
    c = {x.name: x for x in identify_algebra(36, 3, internal_class="symplectic")}
    assert c["sp(4)"].supported
    assert "pure-state" in identify_algebra(36, 3, internal_class="symplectic")[-1].note or \
        any("pure-state" in x.note for x in identify_algebra(2080, 6, "symplectic"))
    c = {x.name: x for x in identify_algebra(63, 3)}
    assert c["su(8)"].supported and c["su(8)"].note == "full controllability"
    assert identify_algebra(67, 4) == []
