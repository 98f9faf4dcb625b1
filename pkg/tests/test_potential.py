"""Potential construction, derivatives, Hessians, coordinate changes."""

from fractions import Fraction

import numpy as np
import pytest

from lgtoric.errors import (
    F2Required,
    Malformed,
    NotInterior,
    OutsideP,
    ZeroCoordinate,
)
from lgtoric.novikov import NovikovSeries
from lgtoric.polytope import load_toric
from lgtoric.potential import (
    build_potential,
    custom_potential,
    custom_potential_from_document,
    log_derivatives,
    monomial_z,
)
from lgtoric.critsolve import SolverConfig, solve_critical

F = Fraction
U3 = (F(1, 3), F(1, 3))


def test_monomial_z_cpn2():
    td = load_toric("cpn(2)")
    z3 = monomial_z(td, 2, U3)
    ((k, c),) = z3.terms
    assert k == (-1, -1) and c.isclose(NovikovSeries.T(F(1, 3)))
    z1 = monomial_z(td, 0, U3)
    ((k, c),) = z1.terms
    assert k == (1, 0) and c.isclose(NovikovSeries.T(F(1, 3)))


def test_monomial_z_zero_at_adjacent_vertex():
    td = load_toric("cpn(2)")
    z1 = monomial_z(td, 0, (F(0), F(1, 2)))  # facet 1 active
    assert z1.terms[0][1].valuation() == 0


def test_monomial_z_outside():
    td = load_toric("cpn(2)")
    with pytest.raises(OutsideP):
        monomial_z(td, 0, (F(2), F(2)))


def test_build_cpn2():
    po = build_potential(load_toric("cpn(2)"), U3)
    assert po.kind == "leading-order"
    assert len(po.poly.terms) == 3
    for _, c in po.poly.terms:
        assert c.isclose(NovikovSeries.T(F(1, 3)))


def test_build_with_bulk_weight():
    w = 0.37 - 0.8j
    po = build_potential(load_toric("cpn(2)"), U3, bulk=[(0, w)])
    coeff = dict(po.poly.terms)[(1, 0)]
    ref = NovikovSeries.monomial(np.exp(w), F(1, 3))
    assert coeff.isclose(ref)
    plain = dict(po.poly.terms)[(0, 1)]
    assert plain.isclose(NovikovSeries.T(F(1, 3)))


def test_build_f2_exact():
    td = load_toric("f2(1/4)")
    po = build_potential(td)
    assert po.kind == "f2-exact"
    coeffs = dict(po.poly.terms)
    # fourth facet carries the (1 + T^{2 alpha}) disc correction
    c4 = coeffs[(0, -1)]
    ref = NovikovSeries([(F(3, 8), 1.0), (F(7, 8), 1.0)])
    assert c4.isclose(ref)
    assert coeffs[(1, 0)].isclose(NovikovSeries.T(F(5, 8)))


def test_f2_exact_requires_f2():
    with pytest.raises(F2Required):
        build_potential(load_toric("cpn(2)"), kind="f2-exact")


def test_build_requires_interior():
    with pytest.raises(NotInterior):
        build_potential(load_toric("cpn(2)"), (F(0), F(0)))


def test_custom_potential_examples():
    po = custom_potential(
        2,
        {(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0,
         (-1, -1): NovikovSeries.T(1)},
    )
    assert po.kind == "custom" and po.toric is None
    single = custom_potential(1, {(1,): 1.0})
    assert len(single.poly.terms) == 1
    with pytest.raises(Malformed):
        custom_potential(1, {})


def test_custom_potential_document():
    po = custom_potential_from_document({
        "dim": 2,
        "terms": [
            {"powers": [1, 0], "coeff": "(1,0)"},
            {"powers": [-1, -1], "coeff": "(1,0)*T^(1)"},
        ],
    })
    assert len(po.poly.terms) == 2


# --- derivatives ---

def test_log_derivative_cp1():
    td = load_toric("cpn(1)")
    po = build_potential(td, (F(1, 2),))
    (d,) = log_derivatives(po)
    coeffs = dict(d.terms)
    assert coeffs[(1,)].isclose(NovikovSeries.T(F(1, 2)))
    assert coeffs[(-1,)].isclose(NovikovSeries.T(F(1, 2)).scale(-1))


def test_log_derivative_cpn2():
    po = build_potential(load_toric("cpn(2)"), U3)
    d1 = log_derivatives(po)[0]
    coeffs = dict(d1.terms)
    assert set(coeffs) == {(1, 0), (-1, -1)}
    assert coeffs[(-1, -1)].isclose(NovikovSeries.T(F(1, 3)).scale(-1))


def test_blowup_critical_equation_matches_divided_form():
    """y1 d/dy1 of the blow-up potential, divided by y1, equals
    1 - y1^-2 y2^-1 - y1^-2 (times the T^(1/3) prefactor)."""
    td = load_toric("blowup_cp2")
    po = build_potential(td)
    d1 = log_derivatives(po)[0]
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = float(rng.uniform(0.05, 0.3))
        y = np.exp(rng.normal(size=2) + 2j * np.pi * rng.random(2))
        got = complex(sum(
            c.eval(t) * np.prod(y ** np.array(k)) for k, c in d1.terms
        )) / y[0]
        ref = t ** (1 / 3) * (1 - y[0] ** -2 * y[1] ** -1 - y[0] ** -2)
        assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_gradient_matches_finite_differences():
    po = build_potential(load_toric("cpn(2)"), U3)
    rng = np.random.default_rng(1)
    t = 0.1
    h = 1e-6
    for _ in range(10):
        x = rng.normal(size=2) * 0.3 + 1j * rng.uniform(0, 2 * np.pi, 2)
        g = po.gradient_log(np.exp(x), t)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (po.value(np.exp(x + e), t) - po.value(np.exp(x - e), t)) / (2 * h)
            assert abs(g[i] - fd) < 1e-7 * max(1.0, abs(g[i]))


def test_hessian_matches_finite_differences():
    po = build_potential(load_toric("cpn(2)"), U3)
    rng = np.random.default_rng(2)
    t = 0.1
    h = 1e-4
    for _ in range(5):
        x = rng.normal(size=2) * 0.3 + 1j * rng.uniform(0, 2 * np.pi, 2)
        H = po.hessian_x(np.exp(x), t)
        assert np.array_equal(H, H.T)  # symmetric by construction
        for i in range(2):
            for j in range(2):
                ei = np.zeros(2); ei[i] = h
                ej = np.zeros(2); ej[j] = h
                fd = (
                    po.value(np.exp(x + ei + ej), t)
                    - po.value(np.exp(x + ei - ej), t)
                    - po.value(np.exp(x - ei + ej), t)
                    + po.value(np.exp(x - ei - ej), t)
                ) / (4 * h * h)
                assert abs(H[i, j] - fd) < 1e-6 * max(1.0, abs(H[i, j]))


# --- evaluation examples ---

def test_eval_cp1_balanced():
    po = build_potential(load_toric("cpn(1)"), (F(1, 2),))
    t = 0.09
    assert abs(po.value(np.array([1.0 + 0j]), t) - 2 * t ** 0.5) < 1e-14


def test_eval_cpn2_critical_value():
    po = build_potential(load_toric("cpn(2)"), U3)
    t = 0.1
    for k in range(3):
        zeta = np.exp(2j * np.pi * k / 3)
        val = po.value(np.array([zeta, zeta]), t)
        assert abs(val - 3 * t ** (1 / 3) * zeta) < 1e-14


def test_eval_linear_in_coefficients():
    po = custom_potential(1, {(1,): 2.0, (-1,): NovikovSeries.T(1)})
    po2 = custom_potential(1, {(1,): 4.0, (-1,): NovikovSeries.T(1).scale(2)})
    y = np.array([0.7 + 0.2j])
    assert abs(po2.value(y, 0.1) - 2 * po.value(y, 0.1)) < 1e-14


def test_zero_coordinate_rejected():
    po = build_potential(load_toric("cpn(1)"), (F(1, 2),))
    with pytest.raises(ZeroCoordinate):
        po.value(np.array([0.0 + 0j]), 0.1)


# --- Hessian closed forms ---

def test_hessian_cpn_critical():
    for n in (1, 2, 3):
        td = load_toric(f"cpn({n})")
        po = build_potential(td)
        t = 0.1
        for k in range(n + 1):
            zeta = np.exp(2j * np.pi * k / (n + 1))
            y = np.full(n, zeta)
            H = po.hessian_x(y, t)
            ref = t ** (1 / (n + 1)) * zeta * (np.eye(n) + 1)
            assert np.abs(H - ref).max() < 1e-12
            det = np.linalg.det(H)
            ref_det = (n + 1) * t ** (n / (n + 1)) * zeta ** n
            assert abs(det - ref_det) < 1e-12


def test_hessian_f2_dets():
    td = load_toric("f2(1/4)")
    po = build_potential(td)
    t = 0.1
    alpha = 0.25
    for s in (1.0, -1.0):
        # case y1 y2 = 1: y2 = +-(1 + t^alpha), determinant +4t either way
        y2 = s * (1 + t ** alpha)
        det = np.linalg.det(po.hessian_x(np.array([1 / y2, y2]), t))
        assert abs(det - 4 * t) < 1e-12
        # case y1 y2 = -1: y2 = +-(1 - t^alpha), determinant -4t
        y2 = s * (1 - t ** alpha)
        det = np.linalg.det(po.hessian_x(np.array([-1 / y2, y2]), t))
        assert abs(det + 4 * t) < 1e-12


# --- basepoint change ---

def test_basepoint_rescales_coefficients():
    td = load_toric("cpn(2)")
    u, u2 = U3, (F(1, 4), F(1, 2))
    po, po2 = build_potential(td, u), build_potential(td, u2)
    for (k, c), (k2, c2) in zip(po.poly.terms, po2.poly.terms):
        assert k == k2
        delta = sum((b - a) * v for a, b, v in zip(u, u2, k))
        assert c2.valuation() - c.valuation() == delta


def test_basepoint_invariance_of_solver_output():
    td = load_toric("cpn(2)")
    po, po2 = build_potential(td, U3), build_potential(td, (F(1, 4), F(1, 2)))
    cfg = SolverConfig(seed=5)
    pts, pts2 = solve_critical(po, cfg), solve_critical(po2, cfg)
    assert len(pts) == len(pts2) == 3
    for p, q in zip(pts, pts2):
        assert p.valuation == q.valuation
        for t in cfg.t_samples:
            assert np.abs(p.samples[t] - q.samples[t]).max() < 1e-8
            assert abs(p.crit_value[t] - q.crit_value[t]) < 1e-10
            assert abs(p.hess_det[t] - q.hess_det[t]) < 1e-10
