"""Quantum Stanley-Reisner presentations and the c1 eigenvalue identity."""

from fractions import Fraction

import numpy as np
import pytest

from lgtoric.errors import UnsupportedModel
from lgtoric.polytope import load_toric
from lgtoric.potential import build_potential
from lgtoric.critsolve import SolverConfig, solve_critical
from lgtoric.qh import (
    blowup_structure,
    c1_eigen_check,
    multiset_match,
    qh_c1_eigenvalues,
    qsr_identity_check,
    qsr_relations,
)

F = Fraction


def test_cpn2_presentation():
    pres = qsr_relations(load_toric("cpn(2)"))
    assert pres.num_vars == 3
    assert len(pres.qsr) == 1
    # linear relations Z1 - Z3 = 0, Z2 - Z3 = 0 from the standard normals
    assert pres.linear == ((1, 0, -1), (0, 1, -1))
    strs = pres.relation_strings()
    assert "Z1*Z2*Z3 = T^(1)" in strs


def test_cpn1_presentation():
    pres = qsr_relations(load_toric("cpn(1)"))
    assert pres.linear == ((1, -1),)
    assert pres.relation_strings()[0] == "Z1*Z2 = T^(1)"


def test_s2xs2_presentation():
    pres = qsr_relations(load_toric("s2xs2(0)"))
    rels = set(pres.relation_strings())
    assert "Z1*Z3 = T^(1)" in rels and "Z2*Z4 = T^(1)" in rels
    assert pres.linear == ((1, 0, -1, 0), (0, 1, 0, -1))


def test_identity_residuals():
    for name in ("cpn(2)", "f2(1/4)", "blowup_cp2"):
        td = load_toric(name)
        po = build_potential(td, kind="leading-order")
        assert qsr_identity_check(td, po, trials=100, seed=0) < 1e-12


def test_identity_negative_control():
    td = load_toric("cpn(2)")
    po = build_potential(td, kind="leading-order")
    res = qsr_identity_check(td, po, trials=20, seed=0,
                             omega_shift=F(1, 100))
    assert res > 1e-3


# --- independent c1 eigenvalue models ---

def test_cpn_eigenvalues_closed_form():
    for n in (1, 2, 3):
        t = 0.1
        eigs = qh_c1_eigenvalues(load_toric(f"cpn({n})"), t)
        refs = [(n + 1) * t ** (1 / (n + 1)) * np.exp(2j * np.pi * k / (n + 1))
                for k in range(n + 1)]
        ok, worst = multiset_match(eigs, refs)
        assert ok, worst


def test_s2xs2_eigenvalues():
    t = 0.07
    eigs = qh_c1_eigenvalues(load_toric("s2xs2(1/4)"), t)
    refs = [s1 * 2 * t ** (3 / 8) + s2 * 2 * t ** (5 / 8)
            for s1 in (1, -1) for s2 in (1, -1)]
    ok, worst = multiset_match(eigs, refs)
    assert ok, worst


def test_blowup_tables_consistent():
    """The hand-derived reduction tables define a commutative associative
    unital algebra, on both monomial bases."""
    t = 0.13
    for basis in ("Z1", "Z4"):
        _, c, _ = blowup_structure(t, basis)
        assert np.abs(c - np.transpose(c, (1, 0, 2))).max() == 0
        left = np.einsum("ijm,mkl->ijkl", c, c)
        right = np.einsum("jkm,iml->ijkl", c, c)
        assert np.abs(left - right).max() < 1e-12
        assert np.abs(c[0] - np.eye(4)).max() == 0


def test_blowup_bases_agree():
    t = 0.08
    a = sorted(np.linalg.eigvals(
        np.einsum("j,jkl->lk", blowup_structure(t, "Z1")[2],
                  blowup_structure(t, "Z1")[1])),
        key=lambda z: (round(z.real, 10), round(z.imag, 10)))
    b = sorted(np.linalg.eigvals(
        np.einsum("j,jkl->lk", blowup_structure(t, "Z4")[2],
                  blowup_structure(t, "Z4")[1])),
        key=lambda z: (round(z.real, 10), round(z.imag, 10)))
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-10


def test_blowup_eigenvalues_vs_critical_values():
    td = load_toric("blowup_cp2")
    for basis in ("Z1", "Z4"):
        t = 0.1
        eigs = qh_c1_eigenvalues(td, t, basis=basis)
        po = build_potential(td)
        pts = solve_critical(po, SolverConfig(seed=0))
        ok, worst = multiset_match(eigs, [p.crit_value[t] for p in pts])
        assert ok, (basis, worst)


@pytest.mark.parametrize("name", [
    "cpn(1)", "cpn(2)", "cpn(3)", "s2xs2(0)", "s2xs2(1/4)",
    "blowup_cp2", "f2(1/4)", "f2(1/3)",
])
@pytest.mark.parametrize("t", [0.05, 0.1])
def test_c1_eigen_check_all_models(name, t):
    td = load_toric(name)
    po = build_potential(td)
    pts = solve_critical(po, SolverConfig(seed=0))
    eigs, crit, ok = c1_eigen_check(td, t, points=pts)
    assert ok
    assert len(eigs) == len(crit) == len(td.vertices)


def test_c1_unsupported_model():
    doc = {"name": "square2", "dim": 2,
           "facets": [{"normal": [1, 0], "lambda": "0"},
                      {"normal": [0, 1], "lambda": "0"},
                      {"normal": [-1, 0], "lambda": "-2"},
                      {"normal": [0, -1], "lambda": "-1"}]}
    td = load_toric(doc)
    with pytest.raises(UnsupportedModel):
        qh_c1_eigenvalues(td, 0.1)


def test_multiset_match_rejects_mismatch():
    ok, worst = multiset_match([1.0, 2.0], [1.0, 2.1])
    assert not ok and worst > 1e-3
    ok, _ = multiset_match([1.0], [1.0, 2.0])
    assert not ok
