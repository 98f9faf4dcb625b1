"""The verification battery behind the CLI `verify` command.

Each check returns Verdict records carrying the measured residual and the
tolerance it was held to, so reports stay honest about how close a pass was.
The model battery runs the built-in examples whose answers are known in
closed form; the global suites exercise the series arithmetic and the
Frobenius-trace oracle on seeded random data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .critsolve import SolverConfig, gradient_residual, solve_critical
from .frobenius import (
    CliffordSpec,
    basis_change,
    clifford_algebra,
    clifford_closed_form,
    cpn_poincare_check,
    floer_algebra,
    random_degree_preserving_change,
    residue_pairings,
    sum_formula_check,
    trace_z,
)
from .novikov import NovikovSeries, random_series
from .polytope import interior_test, load_toric, vertices_and_rank
from .potential import build_potential, custom_potential
from .qh import c1_eigen_check, multiset_match, qsr_identity_check

BATTERY_MODELS = (
    "cpn(1)",
    "cpn(2)",
    "cpn(3)",
    "s2xs2(0)",
    "blowup_cp2",
    "f2(1/4)",
)

EXPECTED_COUNTS = {
    "cpn(1)": 2,
    "cpn(2)": 3,
    "cpn(3)": 4,
    "s2xs2(0)": 4,
    "blowup_cp2": 4,
    "f2(1/4)": 4,
}


@dataclass
class Verdict:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "pass": bool(self.passed),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
        }
        if self.detail:
            d["detail"] = self.detail
        return d


def _verdict(name, residual, tol, detail="") -> Verdict:
    return Verdict(name, residual <= tol, float(residual), float(tol), detail)


def _bool_verdict(name, ok, detail="") -> Verdict:
    return Verdict(name, bool(ok), 0.0 if ok else 1.0, 0.0, detail)


# ---------------------------------------------------------------------------
# global suites
# ---------------------------------------------------------------------------

def novikov_suite(seed: int = 0, pairs: int = 100) -> list[Verdict]:
    """Valuation axioms, ring laws, inverse/exp identities, eval truncation."""
    rng = np.random.default_rng(seed)
    cut = Fraction(8)
    val_exact = True
    ring_worst = 0.0
    inv_worst = 0.0
    exp_worst = 0.0
    eval_worst = 0.0
    for _ in range(pairs):
        a = random_series(rng, cutoff=cut)
        b = random_series(rng, cutoff=cut)
        c = random_series(rng, cutoff=cut)
        ab = a * b
        if not a.is_zero() and not b.is_zero():
            if ab.valuation() < a.valuation() + b.valuation():
                val_exact = False
            if not ab.is_zero() and ab.valuation() != a.valuation() + b.valuation():
                val_exact = False
        if (a + b).valuation() < min(a.valuation(), b.valuation()):
            val_exact = False
        ring_worst = max(
            ring_worst,
            ab.distance(b * a),
            ((a * b) * c).distance(a * (b * c)),
            (a * (b + c)).distance(a * b + a * c),
        )
        # inverse/exp checked two orders deep: depth times the inverse of the
        # smallest exponent gap bounds the work, not the answer's validity
        nz = random_series(rng, nonzero=True, dominant=True, cutoff=cut)
        inv = nz.inverse(cutoff=-nz.valuation() + 2)
        inv_worst = max(
            inv_worst,
            (nz * inv).distance(NovikovSeries.scalar(1.0)),
        )
        ap = random_series(rng, exp_range=(0, 3), cutoff=cut)
        bp = random_series(rng, exp_range=(0, 3), cutoff=cut)
        exp_worst = max(
            exp_worst,
            (ap + bp).exp(cutoff=Fraction(2)).distance(
                ap.exp(cutoff=Fraction(2)) * bp.exp(cutoff=Fraction(2))
            ),
        )
        kappa = Fraction(2)
        for t in (0.05, 0.1):
            if a.is_zero():
                continue
            if a.valuation() >= kappa:
                continue
            bound = sum(abs(cc) for _, cc in a.terms) * t ** float(kappa)
            err = abs(a.eval(t) - a.truncate(kappa).eval(t))
            if bound > 0:
                eval_worst = max(eval_worst, err / bound)
    return [
        _bool_verdict("novikov.valuation_axioms_exact", val_exact),
        _verdict("novikov.ring_laws", ring_worst, 1e-9),
        _verdict("novikov.inverse_identity", inv_worst, 1e-9),
        _verdict("novikov.exp_homomorphism", exp_worst, 1e-9),
        _verdict("novikov.eval_truncation_bound", eval_worst, 1.0),
    ]


def clifford_suite(seed: int = 0, trials: int = 50, changes: int = 20) -> list[Verdict]:
    """Brute-force trace equals 2^n prod(d); basis-change invariance."""
    rng = np.random.default_rng(seed)
    closed_worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        d = tuple(
            complex(rng.normal(), rng.normal()) for _ in range(n)
        )
        d = tuple(x if abs(x) > 1e-3 else x + 1.0 for x in d)
        alg = clifford_algebra(CliffordSpec(n, d))
        z = trace_z(alg)
        ref = clifford_closed_form(CliffordSpec(n, d))
        closed_worst = max(closed_worst, abs(z - ref) / abs(ref))
    base = clifford_algebra(
        CliffordSpec(3, (1.1 + 0.3j, -0.8 + 0.1j, 0.5 - 0.9j))
    )
    z0 = trace_z(base)
    inv_worst = 0.0
    for _ in range(changes):
        M = random_degree_preserving_change(base, rng)
        z1 = trace_z(basis_change(base, M))
        inv_worst = max(inv_worst, abs(z1 - z0) / abs(z0))
    return [
        _verdict("clifford.closed_form_2n_prod_d", closed_worst, 1e-10),
        _verdict("clifford.basis_change_invariance", inv_worst, 1e-8),
    ]


def boundary_control_suite(seed: int = 0) -> list[Verdict]:
    """The bulk-deformed plane potential with a boundary-valuation family:
    y1 + y2 + y1 y2 + T (y1 y2)^-1 has one family at valuation (0,0),
    excluded from the interior count of 3."""
    po = custom_potential(
        2,
        {
            (1, 0): 1.0,
            (0, 1): 1.0,
            (1, 1): 1.0,
            (-1, -1): NovikovSeries.T(1),
        },
    )
    pts = solve_critical(po, SolverConfig(seed=seed), expected_count=4)
    boundary = [p for p in pts if not p.interior]
    interior = [p for p in pts if p.interior]
    zero_val = [
        p for p in boundary if p.valuation == (Fraction(0), Fraction(0))
    ]
    return [
        _bool_verdict(
            "boundary.family_count",
            len(pts) == 4,
            f"found {len(pts)} families",
        ),
        _bool_verdict(
            "boundary.zero_valuation_excluded",
            len(zero_val) == 1 and len(boundary) == 1,
            f"valuations {[tuple(map(str, p.valuation)) for p in boundary]}",
        ),
        _bool_verdict(
            "boundary.interior_count",
            len(interior) == 3,
            f"interior count {len(interior)}",
        ),
    ]


# ---------------------------------------------------------------------------
# per-model battery
# ---------------------------------------------------------------------------

def model_suite(
    name: str,
    seed: int = 0,
    t_samples: tuple[float, ...] = (0.05, 0.1, 0.2),
    starts: Optional[int] = None,
) -> tuple[list[Verdict], dict]:
    """All checks for one built-in model; returns (verdicts, data sections)."""
    td = load_toric(name)
    cfg = SolverConfig(t_samples=t_samples, seed=seed, starts=starts)
    po = build_potential(td)
    points = solve_critical(po, cfg)
    _, rank = vertices_and_rank(td)
    interior = [p for p in points if p.interior]
    verdicts: list[Verdict] = []
    v = verdicts.append

    v(_bool_verdict(
        f"{name}.count_equals_rank",
        len(interior) == rank,
        f"interior {len(interior)}, rank {rank}",
    ))

    grad_worst = 0.0
    for p in points:
        for t in t_samples:
            resid, scale = gradient_residual(po, p, t)
            grad_worst = max(grad_worst, resid / max(scale, 1e-300))
    v(_verdict(f"{name}.gradient_residual", grad_worst, cfg.grad_tol))

    v(_bool_verdict(
        f"{name}.valuations_interior",
        all(interior_test(td, p.valuation, 1e-6) for p in interior),
    ))

    qsr_po = build_potential(td, kind="leading-order")
    qres = qsr_identity_check(td, qsr_po, trials=100, seed=seed)
    v(_verdict(f"{name}.qsr_identity", qres, 1e-12))
    qneg = qsr_identity_check(td, qsr_po, trials=20, seed=seed,
                              omega_shift=Fraction(1, 100))
    v(_bool_verdict(
        f"{name}.qsr_negative_control", qneg > 1e-3,
        f"perturbed residual {qneg:.3e}",
    ))

    for t in (0.05, 0.1):
        eigs, crit, _ = c1_eigen_check(td, t, points=points)
        _, worst = multiset_match(eigs, crit)
        v(_verdict(f"{name}.c1_eigenvalues(t={t})", worst, 1e-8))

    t_mid = 0.1
    v(_verdict(
        f"{name}.sum_formula", sum_formula_check(points, po, t_mid), 1e-9
    ))

    res_worst = 0.0
    for p in interior:
        simp, zb = residue_pairings(p, po, t_mid)
        res_worst = max(res_worst, abs(simp - zb) / abs(simp))
    v(_verdict(f"{name}.residue_two_routes", res_worst, 1e-8))

    verdicts.extend(_model_specific(name, td, po, points, t_samples))

    sections = {
        "rank": rank,
        "interior_count": len(interior),
        "points": points,
        "potential": po,
    }
    return verdicts, sections


def _model_specific(name, td, po, points, t_samples) -> list[Verdict]:
    interior = [p for p in points if p.interior]
    out = []
    if name.startswith("cpn("):
        n = td.dim
        coord_worst = 0.0
        for k, p in enumerate(interior):
            zeta = np.exp(2j * np.pi * k / (n + 1))
            for t in t_samples:
                ref = t ** (1.0 / (n + 1)) * zeta
                coord_worst = max(
                    coord_worst,
                    float(np.abs(p.samples[t] - ref).max() / abs(ref)),
                )
        out.append(_verdict(f"{name}.coordinates", coord_worst, 1e-8))
        out.append(_bool_verdict(
            f"{name}.valuations_exact",
            all(
                p.valuation == tuple([Fraction(1, n + 1)] * n)
                for p in interior
            ),
        ))
        t = 0.1
        pair_worst = 0.0
        for k, p in enumerate(interior):
            simp, _ = residue_pairings(p, po, t)
            ref = (
                t ** (-n / (n + 1))
                * np.exp(-2j * np.pi * k * n / (n + 1))
                / (n + 1)
            )
            pair_worst = max(pair_worst, abs(simp - ref) / abs(ref))
        out.append(_verdict(f"{name}.residue_closed_form", pair_worst, 1e-8))
        out.append(_verdict(
            f"{name}.poincare_duality",
            cpn_poincare_check(po, points, t),
            1e-7,
        ))
    elif name == "blowup_cp2":
        quartic_worst = 0.0
        z_worst = 0.0
        for p in interior:
            for t in t_samples:
                y2 = p.samples[t][1] / t ** (1.0 / 3.0)
                quartic_worst = max(
                    quartic_worst, abs(y2**4 + y2**3 - 1.0)
                )
            t = 0.1
            y2 = p.samples[t][1] / t ** (1.0 / 3.0)
            z = trace_z(floer_algebra(p, po, t))
            ref = (4.0 - y2**3) / y2
            z_worst = max(
                z_worst, abs(z * t ** (-2.0 / 3.0) - ref) / abs(ref)
            )
        out.append(_verdict(f"{name}.quartic_y2", quartic_worst, 1e-8))
        out.append(_verdict(f"{name}.z_closed_form", z_worst, 1e-8))
    elif name.startswith("f2(") or name.startswith("s2xs2("):
        if td.alpha is not None:
            alpha = float(td.alpha)
        else:
            alpha = 1.0 + float(td.offsets[2])  # rectangle width is 1 - alpha
        cv_worst = 0.0
        for t in (0.05, 0.1):
            refs = [
                s1 * 2 * t ** ((1 - alpha) / 2) * (1 + s2 * t**alpha)
                for s1 in (+1, -1)
                for s2 in (+1, -1)
            ]
            got = [p.crit_value[t] for p in interior]
            _, worst = multiset_match(refs, got)
            cv_worst = max(cv_worst, worst)
        out.append(_verdict(f"{name}.critical_values", cv_worst, 1e-8))
        det_worst = 0.0
        for p in interior:
            for t in t_samples:
                det = p.hess_det[t]
                det_worst = max(
                    det_worst, min(abs(det - 4 * t), abs(det + 4 * t)) / (4 * t)
                )
        out.append(_verdict(f"{name}.hessian_det_pm4t", det_worst, 1e-8))
    return out


def full_battery(
    seed: int = 0,
    t_samples: tuple[float, ...] = (0.05, 0.1, 0.2),
    models: Sequence[str] = BATTERY_MODELS,
) -> tuple[list[Verdict], dict]:
    verdicts: list[Verdict] = []
    sections: dict = {}
    verdicts += novikov_suite(seed)
    verdicts += clifford_suite(seed)
    verdicts += boundary_control_suite(seed)
    for name in models:
        vs, sec = model_suite(name, seed=seed, t_samples=t_samples)
        verdicts += vs
        sections[name] = sec
    return verdicts, sections
