import json

import pytest

from spindla.closure import close_algebra
from spindla.hamiltonians import ModelSpec
from spindla.pauli import PauliString, PauliVector, transpose_parity, vector_commutator
from spindla.symmetry import (external_symmetry_basis, in_span, internal_residual,
                              internal_symmetry_basis, permutation_symmetries, permute,
                              standard_symmetry_report)


def V(text, n):
    return PauliVector.parse(text, n)


def hams(model, n, *controls, **kw):
    return ModelSpec(model, n, controls=controls, **kw).hamiltonians()


def test_commutant_contains_excitation():
    basis = external_symmetry_basis(hams("xxz", 3, "z1"))
    assert in_span(basis, V("Z1 + Z2 + Z3", 3))
    assert in_span(basis, V("I", 3))


def test_xyz_commutant_parity_only():
    basis = external_symmetry_basis(hams("xyz", 3, "z1"))
    assert in_span(basis, V("Z1 Z2 Z3", 3))
    assert not in_span(basis, V("Z1 + Z2 + Z3", 3))


def test_single_z_commutant():
    assert external_symmetry_basis([V("Z1", 1)]) == [V("I", 1), V("Z1", 1)]


def test_external_verified():
    h = hams("xxz", 4, "z2", couplings="generic")
    for s in external_symmetry_basis(h):
        assert all(not vector_commutator(s, x).coeffs for x in h)


def test_exact_and_modular_agree():
    h = hams("xxz", 3, "z2")
    assert external_symmetry_basis(h, method="exact") == external_symmetry_basis(h)
    a = internal_symmetry_basis(h, method="exact")
    b = internal_symmetry_basis(h)
    assert [r.operator for r in a] == [r.operator for r in b]


def test_internal_xx_z1x1():
    recs = internal_symmetry_basis(hams("xx", 4, "z1", "x1"))
    s = V("Y1 X2 Y3 X4", 4)
    assert any(r.operator == s and r.klass == "orthogonal" for r in recs)


def test_internal_xx_z1x2():
    recs = internal_symmetry_basis(hams("xx", 3, "z1", "x2"))
    assert any(r.operator == V("X1 Y2 X3", 3) and r.klass == "symplectic" for r in recs)


def test_internal_empty_when_controllable():
    assert internal_symmetry_basis(hams("xxz", 3, "z1", "x1")) == []
    assert external_symmetry_basis(hams("xxz", 3, "z1", "x1")) == [V("I", 3)]


def test_internal_records_consistent():
    h = hams("xxz", 3, "z2")
    recs = internal_symmetry_basis(h)
    assert recs
    for r in recs:
        assert all(not internal_residual(x, r.operator) for x in h)
        signs = {transpose_parity(p) for p in r.operator.strings()}
        assert signs == {1 if r.klass == "orthogonal" else -1}


def test_internal_rejects_trace():
    with pytest.raises(ValueError, match="traceless"):
        internal_symmetry_basis([V("I + Z1", 2)])


def test_bound(monkeypatch):
    with pytest.raises(ValueError, match="standard_symmetry_report"):
        external_symmetry_basis(hams("xx", 3, "z1"), max_n=2)
    monkeypatch.setenv("SPINDLA_MAX_N", "2")
    with pytest.raises(ValueError, match="exceeds the bound"):
        internal_symmetry_basis(hams("xx", 3, "z1"))


def test_permutations():
    recs = permutation_symmetries(hams("xxz", 3, "z2"))
    assert [r.permutation for r in recs] == [(3, 2, 1)]
    assert recs[0].provenance == "mirror" and recs[0].operator_text == "(1 3)"
    assert permutation_symmetries(hams("xxz", 4, "z2"), [(4, 3, 2, 1)]) == []
    ident = permutation_symmetries(hams("xyz", 4, couplings="generic"), [(1, 2, 3, 4)])
    assert len(ident) == 1 and ident[0].operator_text == "()"


def test_permute():
    assert permute(V("X1 Y2 + Z3", 3), (2, 3, 1)) == V("X2 Y3 + Z1", 3)
    with pytest.raises(ValueError):
        permute(V("X1", 2), (1, 1))


def test_standard_report():
    prov = lambda spec: {r.provenance for r in standard_symmetry_report(spec)}
    assert prov(ModelSpec("xxz", 4, controls=("z1",))) == {"excitation", "parity-Z"}
    assert prov(ModelSpec("xyz", 4, controls=("z1",))) == {"parity-Z"}
    assert prov(ModelSpec("xx", 4, controls=("z1", "x1"))) == set()
    assert "mirror" in prov(ModelSpec("xxz", 3, controls=("z2",)))


def test_excitation_breaks_with_anisotropic_bond():
    ok = ModelSpec("network", 3, couplings=[(1, 2, 1, 1, 2), (2, 3, 1, 1, 3)], controls=("z1",))
    bad = ModelSpec("network", 3, couplings=[(1, 2, 1, 1, 2), (2, 3, 1, 2, 3)], controls=("z1",))
    assert "excitation" in {r.provenance for r in standard_symmetry_report(ok.hamiltonians())}
    assert "excitation" not in {r.provenance for r in standard_symmetry_report(bad.hamiltonians())}
    assert in_span(external_symmetry_basis(ok.hamiltonians()), V("Z1 + Z2 + Z3", 3))
    assert not in_span(external_symmetry_basis(bad.hamiltonians()), V("Z1 + Z2 + Z3", 3))


@pytest.mark.parametrize("model,n,ctrls", [("xxz", 3, ("z1", "x1")), ("xyz", 3, ("z1", "x1")),
                                           ("xx", 3, ("z1", "x1", "x2")), ("xxz", 4, ("z2", "x2"))])
def test_soundness_against_closure(model, n, ctrls):
    h = hams(model, n, *ctrls)
    assert close_algebra(h).dimension == 4 ** n - 1
    assert internal_symmetry_basis(h) == []
    assert external_symmetry_basis(h) == [PauliVector(n, {0: 1})]


def test_record_json():
    rec = internal_symmetry_basis(hams("xx", 4, "z1", "x1"))[0]
    d = json.loads(json.dumps(rec.to_dict()))
    assert d == {"kind": "internal", "operator_text": "Y1 X2 Y3 X4", "class": "orthogonal",
                 "provenance": "alternating YX"}
