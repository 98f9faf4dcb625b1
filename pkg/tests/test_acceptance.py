"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every tolerance is pinned here; the helpers in lgtoric.verify compute the
residuals, and this module owns the assertions and the runtime budgets.
"""

import json
import time
from fractions import Fraction

import numpy as np

from lgtoric.cli import main
from lgtoric.polytope import load_toric, vertices_and_rank
from lgtoric.potential import build_potential
from lgtoric.critsolve import SolverConfig, jacobian_rank, solve_critical
from lgtoric.frobenius import (
    cpn_poincare_check,
    floer_algebra,
    residue_pairings,
    sum_formula_check,
    trace_z,
)
from lgtoric.qh import c1_eigen_check, multiset_match, qsr_identity_check
from lgtoric.verify import (
    BATTERY_MODELS,
    EXPECTED_COUNTS,
    boundary_control_suite,
    clifford_suite,
    novikov_suite,
)

F = Fraction
T_SAMPLES = (0.05, 0.1, 0.2)


def report(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}  acceptance: {name}")
    assert ok, name


def _solve(name, seed=0):
    po = build_potential(load_toric(name))
    return po, solve_critical(po, SolverConfig(t_samples=T_SAMPLES, seed=seed))


def test_criterion_1_cpn_critical_points():
    t0 = time.time()
    ok = True
    for n in (1, 2, 3):
        po, pts = _solve(f"cpn({n})")
        interior = [p for p in pts if p.interior]
        ok &= len(interior) == n + 1
        for k, p in enumerate(interior):
            ok &= p.valuation == tuple([F(1, n + 1)] * n)
            for t in T_SAMPLES:
                ref = t ** (1 / (n + 1)) * np.exp(2j * np.pi * k / (n + 1))
                ok &= bool(np.abs(p.samples[t] - ref).max() <= 1e-8 * abs(ref))
    elapsed = time.time() - t0
    ok &= elapsed < 10.0
    report(f"1 CP^n critical points ({elapsed:.2f}s)", ok)


def test_criterion_2_cpn_residue_pairing():
    ok = True
    t = 0.1
    for n in (1, 2, 3):
        po, pts = _solve(f"cpn({n})")
        for k, p in enumerate(pts):
            simp, _ = residue_pairings(p, po, t)
            ref = (
                t ** (-n / (n + 1))
                * np.exp(-2j * np.pi * k * n / (n + 1)) / (n + 1)
            )
            ok &= abs(simp - ref) <= 1e-8 * abs(ref)
        ok &= cpn_poincare_check(po, pts, t) < 1e-7
    report("2 CP^n residue pairing and Poincare duality", ok)


def test_criterion_3_blowup():
    po, pts = _solve("blowup_cp2")
    interior = [p for p in pts if p.interior]
    ok = len(interior) == 4
    t = 0.1
    for p in interior:
        y2 = p.samples[t][1] / t ** (1 / 3)
        ok &= abs(y2 ** 4 + y2 ** 3 - 1) <= 1e-8
        z = trace_z(floer_algebra(p, po, t))
        ref = (4 - y2 ** 3) / y2
        ok &= abs(z * t ** (-2 / 3) - ref) <= 1e-8 * abs(ref)
    ok &= sum_formula_check(pts, po, t) < 1e-9
    report("3 blow-up of CP^2: quartic, trace, sum formula", ok)


def test_criterion_4_f2():
    po, pts = _solve("f2(1/4)")
    ok = True
    for t in (0.05, 0.1):
        refs = [s1 * 2 * t ** (3 / 8) * (1 + s2 * t ** 0.25)
                for s1 in (1, -1) for s2 in (1, -1)]
        got = [p.crit_value[t] for p in pts]
        match, _ = multiset_match(refs, got, tol=1e-8)
        ok &= match
    for p in pts:
        for t in T_SAMPLES:
            det = p.hess_det[t]
            ok &= min(abs(det - 4 * t), abs(det + 4 * t)) <= 1e-8 * 4 * t
    report("4 F2(1/4): critical values and Hessian determinants", ok)


def test_criterion_5_rank_counts_and_boundary_control():
    ok = True
    for name in BATTERY_MODELS:
        po, pts = _solve(name)
        rank = vertices_and_rank(load_toric(name))[1]
        ok &= jacobian_rank(pts) == rank == EXPECTED_COUNTS[name]
    verdicts = boundary_control_suite(seed=0)
    ok &= all(v.passed for v in verdicts)
    report("5 rank counts {2,3,4,4,4,4} and boundary exclusion", ok)


def test_criterion_6_c1_eigenvalues():
    ok = True
    for name in BATTERY_MODELS:
        td = load_toric(name)
        po = build_potential(td)
        pts = solve_critical(po, SolverConfig(t_samples=T_SAMPLES, seed=0))
        for t in (0.05, 0.1):
            _, _, match = c1_eigen_check(td, t, points=pts, tol=1e-8)
            ok &= match
    report("6 c1 eigenvalues equal critical values", ok)


def test_criterion_7_clifford_trace_oracle():
    t0 = time.time()
    verdicts = clifford_suite(seed=0, trials=50, changes=20)
    elapsed = time.time() - t0
    ok = all(v.passed for v in verdicts) and elapsed < 30.0
    report(f"7 Clifford trace oracle ({elapsed:.2f}s)", ok)


def test_criterion_8_novikov_suite():
    t0 = time.time()
    verdicts = novikov_suite(seed=0, pairs=100)
    elapsed = time.time() - t0
    ok = all(v.passed for v in verdicts) and elapsed < 1.0
    report(f"8 Novikov property suite ({elapsed:.2f}s)", ok)


def test_criterion_9_qsr_identities():
    ok = True
    for name in BATTERY_MODELS:
        td = load_toric(name)
        po = build_potential(td, kind="leading-order")
        ok &= qsr_identity_check(td, po, trials=100, seed=0) < 1e-12
        ok &= qsr_identity_check(td, po, trials=20, seed=0,
                                 omega_shift=F(1, 100)) > 1e-3
    report("9 quantum Stanley-Reisner identities", ok)


def test_criterion_10_determinism(capsys):
    code1 = main(["verify", "--seed", "21"])
    out1 = capsys.readouterr().out
    code2 = main(["verify", "--seed", "21"])
    out2 = capsys.readouterr().out
    code3 = main(["verify", "--seed", "22"])
    out3 = capsys.readouterr().out
    ok = out1 == out2 and code1 == code2 == 0
    rep1, rep3 = json.loads(out1), json.loads(out3)
    v1 = {v["name"]: v["pass"] for v in rep1["verdicts"]}
    v3 = {v["name"]: v["pass"] for v in rep3["verdicts"]}
    ok &= v1 == v3 and code3 == 0
    for model, sec in rep1["sections"].items():
        sec3 = rep3["sections"][model]
        for p1, p3 in zip(sec["points"], sec3["points"]):
            ok &= p1["valuation"] == p3["valuation"]
            for t, y1 in p1["samples"].items():
                y3 = np.array(sec3_sample(p3, t))
                ok &= bool(
                    np.abs(np.array(y1) - y3).max()
                    <= 1e-8 * (np.abs(y3).max() + 1e-300)
                )
    with capsys.disabled():
        report("10 determinism: byte-identical reports, seed-stable values", ok)


def sec3_sample(point, t):
    return point["samples"][t]
