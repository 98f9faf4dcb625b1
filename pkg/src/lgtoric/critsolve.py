"""Critical points of potential functions over the Novikov field.

Strategy: solve the critical equations numerically at a few real samples of
the formal parameter, track solutions between samples, and reconstruct the
non-Archimedean data (rational valuation vectors) from the scaling across
samples.  The subtle step is valuation recovery: a plain log-log slope is
exact when the solution is a T-monomial but biased when subleading Puiseux
terms are significant at the sampled t, so after the slope fit every
candidate valuation vector is screened by the exact tropical balance
condition (each critical equation must attain its minimal term valuation at
least twice).  Nondegenerate points can then be refined into genuine
truncated Novikov series by T-adic Newton iteration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateLeading,
    Malformed,
    NotMorse,
    OrderUnreachable,
    TrackingLost,
    Underresolved,
    ValuationUnstable,
    ZeroSeries,
)
from .novikov import INF, NovikovSeries, rational
from .polytope import _enumerate_vertices, _solve_exact
from .potential import LaurentPolynomial, PotentialFunction

GOLDEN64 = 0x9E3779B97F4A7C15  # seed decorrelation for the verification rerun


@dataclass(frozen=True)
class SolverConfig:
    """Multistart Newton configuration.

    starts = None means 60 x expected critical-point count.  Identical seeds
    give bit-identical results; different seeds must agree on the answer (the
    solver reruns stage one with a decorrelated seed and raises Underresolved
    on mismatch).
    """

    t_samples: tuple[float, ...] = (0.05, 0.1, 0.2)
    starts: Optional[int] = None
    grad_tol: float = 1e-12
    dedupe_tol: float = 1e-6
    max_iter: int = 200
    seed: int = 0
    val_denom_bound: int = 60

    def __post_init__(self):
        ts = tuple(float(t) for t in self.t_samples)
        if len(ts) < 2 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise Malformed("t_samples must be strictly increasing, length >= 2")
        if not all(0.0 < t < 1.0 for t in ts):
            raise Malformed("t_samples must lie in (0,1)")
        if min(self.grad_tol, self.dedupe_tol) <= 0 or self.max_iter <= 0:
            raise Malformed("tolerances and max_iter must be positive")
        object.__setattr__(self, "t_samples", ts)


@dataclass
class CriticalPoint:
    """One tracked critical-point family.

    samples maps each t sample to the absolute torus coordinates; valuation
    is the recovered rational vector of T-valuations; interior says whether
    it lies strictly inside the moment (valuation) polytope; hess_det and
    crit_value are per-sample; lifted holds the T-adic refinement once
    lift_tadic has produced one.
    """

    samples: dict[float, np.ndarray]
    valuation: tuple[Fraction, ...]
    interior: bool
    nondegenerate: bool
    hess_det: dict[float, complex]
    crit_value: dict[float, complex]
    lifted: Optional[list[NovikovSeries]] = None

    def y_at(self, t: float) -> np.ndarray:
        return self.samples[t]


# ---------------------------------------------------------------------------
# numeric Newton stages
# ---------------------------------------------------------------------------

def _newton_batch(K, c, X0, grad_tol, max_iter):
    """Newton iteration on grad_x PO(e^x) for a batch of starts.

    Returns the converged rows of X.  Diverging or singular-Hessian starts
    are dropped silently; convergence is relative to the largest potential
    term magnitude at the iterate.
    """
    Kf = K.astype(float)
    X = np.array(X0, dtype=complex)
    ns = X.shape[0]
    alive = np.ones(ns, dtype=bool)
    done = np.zeros(ns, dtype=bool)
    for _ in range(max_iter):
        act = alive & ~done
        if not act.any():
            break
        Xa = X[act]
        M = np.exp(Xa @ Kf.T) * c[None, :]
        G = M @ Kf
        scale = np.abs(M).max(axis=1)
        resid = np.abs(G).max(axis=1)
        conv = resid <= grad_tol * scale + 1e-300
        H = np.einsum("sk,ki,kj->sij", M, Kf, Kf)
        dets = np.linalg.det(H)
        ok = (~conv) & (np.abs(dets) > 1e-250) & np.isfinite(dets)
        step = np.zeros_like(Xa)
        if ok.any():
            step[ok] = np.linalg.solve(H[ok], G[ok, :, None])[:, :, 0]
        Xa = Xa - step
        bad = (~conv) & (
            ~ok
            | ~np.isfinite(Xa).all(axis=1)
            | (np.abs(Xa.real).max(axis=1) > 400.0)
        )
        idx = np.flatnonzero(act)
        X[idx] = Xa
        done[idx[conv]] = True
        alive[idx[bad]] = False
    return X[done]


def _grad_residual(K, c, y):
    m = c * np.prod(y[None, :] ** K, axis=1)
    g = m @ K.astype(float)
    return np.abs(g).max(), np.abs(m).max()


def _dedupe(Y: np.ndarray, tol: float) -> list[np.ndarray]:
    order = sorted(
        range(Y.shape[0]),
        key=lambda i: tuple(
            (round(math.log(abs(z)), 9), round(np.angle(z), 9))
            for z in Y[i]
        ),
    )
    reps: list[np.ndarray] = []
    for i in order:
        y = Y[i]
        if any(
            np.all(np.abs(y - r) <= tol * (np.abs(r) + 1e-300)) for r in reps
        ):
            continue
        reps.append(y)
    return reps


def _stage_one(po, cfg, nstarts, box, t_ref, seed):
    """Multistart Newton at the reference sample; deduped absolute y's."""
    K, c = po.numeric(t_ref, absolute=True)
    rng = np.random.default_rng(seed)
    n = po.dim
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    u_hat = lo + (hi - lo) * rng.random((nstarts, n))
    theta = 2.0 * np.pi * rng.random((nstarts, n))
    X0 = u_hat * math.log(t_ref) + 1j * theta
    X = _newton_batch(K, c, X0, cfg.grad_tol, cfg.max_iter)
    if X.shape[0] == 0:
        return []
    return _dedupe(np.exp(X), cfg.dedupe_tol)


def _start_box(po: PotentialFunction):
    """Coordinate ranges bracketing all critical valuations."""
    if po.toric is not None:
        return po.toric.bounding_box()
    forms = po.term_forms()
    try:
        verts = _enumerate_vertices(
            [k for _, k in forms], [-a for a, _ in forms], po.dim
        )
    except Exception:
        verts = []
    if verts:
        return [
            (min(v[i] for v in verts), max(v[i] for v in verts))
            for i in range(po.dim)
        ]
    return [(Fraction(0), Fraction(1))] * po.dim


# ---------------------------------------------------------------------------
# valuation recovery
# ---------------------------------------------------------------------------

def _fit_slopes(ts, logy):
    """Per-coordinate least-squares slope of log|y| against log t."""
    lt = np.log(ts)
    A = np.stack([lt, np.ones_like(lt)], axis=1)
    sol, *_ = np.linalg.lstsq(A, logy, rcond=None)
    fit = A @ sol
    resid = np.abs(fit - logy).max(axis=0)
    return sol[0], resid


def _tropically_balanced(forms, equations, w) -> bool:
    """Each critical equation attains its minimal term valuation >= twice."""
    for eq_terms in equations:
        vals = [
            a + sum(ki * wi for ki, wi in zip(k, w)) for a, k in eq_terms
        ]
        m = min(vals)
        if sum(1 for v in vals if v == m) < 2:
            return False
    return True


def _tropical_candidates(forms, equations, dim, budget=100_000):
    """Isolated solutions of the tropical critical system.

    A balanced valuation ties at least two terms of every equation at the
    minimum, so every isolated balanced point solves some square rational
    system built from one tied pair per equation.  Enumerate those systems
    exactly and keep the solutions that pass the full balance check.
    """
    pair_sets = [
        list(itertools.combinations(range(len(eq)), 2)) for eq in equations
    ]
    count = 1
    for p in pair_sets:
        count *= max(len(p), 1)
    if count > budget:
        raise ValuationUnstable(
            f"tropical system too large ({count} pair choices)"
        )
    cands = set()
    for combo in itertools.product(*pair_sets):
        rows, rhs = [], []
        for eq, (i, j) in zip(equations, combo):
            a1, k1 = eq[i]
            a2, k2 = eq[j]
            rows.append([Fraction(x - y) for x, y in zip(k1, k2)])
            rhs.append(a2 - a1)
        w = _solve_exact(rows, rhs)
        if w is not None and _tropically_balanced(forms, equations, w):
            cands.add(w)
    return cands


def _estimate_valuation(po, ts, ys, cfg) -> tuple[Fraction, ...]:
    """Rational valuation vector for one tracked solution.

    Fast path: round the regression slope to the nearest rational with
    denominator <= D and accept it if it satisfies the exact tropical
    balance condition of the critical equations.  When subleading Puiseux
    terms bias the slope at the sampled t (they are not small there), the
    balanced candidates are instead enumerated exactly from the tropical
    critical system and the one nearest the slopes wins.
    """
    D = cfg.val_denom_bound
    logy = np.log(np.abs(np.array(ys)))  # (num samples, n)
    slopes, fit_resid = _fit_slopes(np.array(ts), logy)
    forms = po.term_forms()
    equations = [
        [(a, k) for a, k in forms if k[i] != 0] for i in range(po.dim)
    ]
    if any(len(eq) == 0 for eq in equations):
        raise ValuationUnstable("a critical equation has no terms")
    rounded = tuple(
        Fraction(float(s)).limit_denominator(D) for s in slopes
    )
    close = all(
        abs(float(r) - s) < 1e-3 for r, s in zip(rounded, slopes)
    ) and np.all(fit_resid < 1e-3)
    if close and _tropically_balanced(forms, equations, rounded):
        return rounded
    best, best_dist = None, math.inf
    for w in _tropical_candidates(forms, equations, po.dim):
        if any(x.denominator > D for x in w):
            continue
        dist = max(abs(float(x) - s) for x, s in zip(w, slopes))
        if dist < best_dist:
            best, best_dist = w, dist
    if best is None or best_dist > 0.6:
        raise ValuationUnstable(
            f"no tropically balanced valuation near slopes {slopes} "
            f"(denominator bound {D}); raise starts or add samples"
        )
    return best


# ---------------------------------------------------------------------------
# the solver pipeline
# ---------------------------------------------------------------------------

def solve_critical(
    po: PotentialFunction,
    cfg: Optional[SolverConfig] = None,
    expected_count: Optional[int] = None,
) -> list[CriticalPoint]:
    """All critical-point families of the potential at the configured samples.

    Pipeline: multistart Newton at the largest t, dedupe in y-space,
    continuation to the remaining samples, valuation recovery, interior and
    nondegeneracy classification.  Output is sorted by (valuation vector,
    coordinate arguments) and is bit-reproducible for a fixed seed.
    """
    cfg = cfg or SolverConfig()
    if expected_count is None:
        if po.toric is not None:
            expected_count = len(po.toric.vertices)
        elif cfg.starts is None:
            raise Malformed(
                "custom potential: pass expected_count or cfg.starts"
            )
        else:
            expected_count = max(1, cfg.starts // 60)
    nstarts = cfg.starts if cfg.starts is not None else 60 * expected_count
    box = _start_box(po)
    ts = cfg.t_samples
    t_ref = ts[-1]

    reps = _stage_one(po, cfg, nstarts, box, t_ref, cfg.seed)
    reps2 = _stage_one(
        po, cfg, nstarts, box, t_ref, (cfg.seed + GOLDEN64) % 2**64
    )
    if len(reps) != len(reps2):
        raise Underresolved(
            f"seed {cfg.seed}: {len(reps)} solutions, rerun: {len(reps2)}; "
            "raise starts"
        )
    for y in reps:
        if not any(
            np.all(np.abs(y - y2) <= 1e-8 * (np.abs(y2) + 1e-300))
            for y2 in reps2
        ):
            raise Underresolved("rerun produced a different solution set")
    if not reps:
        return []

    # continuation to the other samples, warm-starting from the neighbour
    K_by_t = {}
    for t in ts:
        K_by_t[t] = po.numeric(t, absolute=True)
    tracked: list[dict[float, np.ndarray]] = [{t_ref: y} for y in reps]
    order = sorted([t for t in ts if t != t_ref], reverse=True)
    for fam in tracked:
        t_prev = t_ref
        for t in order:
            K, c = K_by_t[t]
            x_prev = np.log(fam[t_prev])
            x0 = x_prev.real * (math.log(t) / math.log(t_prev)) \
                + 1j * x_prev.imag
            X = _newton_batch(
                K, c, x0[None, :], cfg.grad_tol, cfg.max_iter
            )
            if X.shape[0] != 1:
                raise TrackingLost(f"continuation diverged at t={t}")
            fam[t] = np.exp(X[0])
            t_prev = t
    for t in ts:
        pts = [fam[t] for fam in tracked]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if np.all(
                    np.abs(pts[i] - pts[j])
                    <= cfg.dedupe_tol * (np.abs(pts[j]) + 1e-300)
                ):
                    raise TrackingLost(
                        f"families {i} and {j} collided at t={t}"
                    )

    out = []
    for fam in tracked:
        ys = [fam[t] for t in ts]
        w = _estimate_valuation(po, ts, ys, cfg)
        hess_det: dict[float, complex] = {}
        crit_value: dict[float, complex] = {}
        nondeg = True
        for t in ts:
            H = po.hessian_x(fam[t], t, absolute=True)
            det = complex(np.linalg.det(H))
            hess_det[t] = det
            crit_value[t] = po.value(fam[t], t, absolute=True)
            if abs(det) <= 1e-9 * max(np.abs(H).max(), 1e-300) ** po.dim:
                nondeg = False
        out.append(
            CriticalPoint(
                samples={t: fam[t] for t in ts},
                valuation=w,
                interior=po.valuation_interior(w),
                nondegenerate=nondeg,
                hess_det=hess_det,
                crit_value=crit_value,
            )
        )
    out.sort(
        key=lambda p: (
            p.valuation,
            tuple(_canonical_angle(z) for z in p.samples[t_ref]),
        )
    )
    return out


def _canonical_angle(z: complex) -> float:
    """Principal argument folded to [0, 2 pi), stable against the +-pi branch
    flip from imaginary rounding noise."""
    a = round(float(np.angle(z)), 10)
    return a + 2.0 * math.pi if a < 0 else a


def gradient_residual(po: PotentialFunction, p: CriticalPoint, t: float):
    """(residual, scale): max |y_i dPO/dy_i| and max term magnitude at p."""
    K, c = po.numeric(t, absolute=True)
    return _grad_residual(K, c, p.samples[t])


def jacobian_rank(points: Sequence[CriticalPoint]) -> int:
    """Rank of the Jacobian ring over the Novikov field in the Morse case:
    the number of interior critical points."""
    interior = [p for p in points if p.interior]
    bad = [p for p in interior if not p.nondegenerate]
    if bad:
        raise NotMorse(
            f"{len(bad)} interior critical point(s) are degenerate; "
            f"interior count {len(interior)} is only a lower bound"
        )
    return len(interior)


# ---------------------------------------------------------------------------
# T-adic Newton lifting
# ---------------------------------------------------------------------------

def _aitken_limit(rs: Sequence[complex]) -> complex:
    """Limit of a geometrically converging sequence; rs ordered with the most
    accurate entry first."""
    if len(rs) < 3:
        return rs[0]
    r0, r1, r2 = rs[0], rs[1], rs[2]
    den = r2 - 2 * r1 + r0
    if abs(den) < 1e-12 * max(abs(r0), 1e-300):
        return r0
    return r0 - (r1 - r0) ** 2 / den


def _leading_coefficients(point: CriticalPoint, ts) -> np.ndarray:
    vals = [float(v) for v in point.valuation]
    rs = {
        t: point.samples[t] / np.power(t, vals) for t in ts
    }
    ordered = sorted(ts)  # smallest t first: closest to the limit
    out = []
    for i in range(len(vals)):
        seq = [rs[t][i] for t in ordered]
        spread = max(abs(a - seq[0]) for a in seq)
        if spread <= 1e-9 * max(abs(seq[0]), 1e-300):
            out.append(seq[0])
        else:
            out.append(_aitken_limit(seq))
    return np.array(out)


def _series_solve(H, rhs):
    """Solve the n x n Novikov-series system H x = rhs by elimination with
    minimal-valuation pivoting."""
    n = len(rhs)
    A = [row[:] + [rhs[i]] for i, row in enumerate(H)]
    for col in range(n):
        piv, piv_val = None, INF
        for r in range(col, n):
            v = A[r][col].valuation()
            if v < piv_val:
                piv, piv_val = r, v
        if piv is None or A[piv][col].is_zero():
            raise DegenerateLeading("series Hessian is singular")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def _absolute_poly(po: PotentialFunction) -> LaurentPolynomial:
    if po.basepoint is None:
        return po.poly
    terms = {}
    for k, c in po.poly.terms:
        shift = -sum(ki * ui for ki, ui in zip(k, po.basepoint))
        terms[k] = c.shift(shift)
    return LaurentPolynomial.make(po.dim, terms)


def _filtered_valuation(s: NovikovSeries, scale: float, tol: float):
    for e, c in s.terms:
        if abs(c) > tol * scale:
            return e
    return INF


def _power_tables(series, polys):
    """Cached powers y_i^k covering every exponent the polys use."""
    n = len(series)
    lo = [0] * n
    hi = [0] * n
    for poly in polys:
        for k, _ in poly.terms:
            for i, ki in enumerate(k):
                lo[i] = min(lo[i], ki)
                hi[i] = max(hi[i], ki)
    tables = []
    for i, s in enumerate(series):
        pows = {0: NovikovSeries.scalar(1.0)}
        for k in range(1, hi[i] + 1):
            pows[k] = pows[k - 1] * s
        if lo[i] < 0:
            inv = s.inverse()
            for k in range(-1, lo[i] - 1, -1):
                pows[k] = pows[k + 1] * inv
        tables.append(pows)
    return tables


def _substitute(poly, tables):
    """(substituted series, largest pre-cancellation monomial magnitude)."""
    total = NovikovSeries.zero()
    scale = 0.0
    for k, c in poly.terms:
        mono = c
        for ki, pows in zip(k, tables):
            mono = mono * pows[ki]
        scale = max(scale, mono.max_abs_coeff())
        total = total + mono
    return total, scale


def residual_valuations(
    po: PotentialFunction,
    series: Sequence[NovikovSeries],
    tol: float = 1e-9,
) -> list:
    """Valuation of each critical equation after substituting the series,
    ignoring float-noise coefficients relative to the monomial scale."""
    fpolys = [_absolute_poly(po).log_derivative(i) for i in range(po.dim)]
    tables = _power_tables(series, fpolys)
    out = []
    for f in fpolys:
        total, scale = _substitute(f, tables)
        out.append(_filtered_valuation(total, max(scale, 1e-300), tol))
    return out


def lift_tadic(
    po: PotentialFunction,
    point: CriticalPoint,
    order,
    noise_tol: float = 1e-9,
) -> list[NovikovSeries]:
    """T-adic Newton refinement of a nondegenerate critical point.

    Starts from the monomial T^(val) * ybar recovered from the samples and
    iterates corrections y <- y (1 + eps) with eps = -H^-1 F until every
    critical equation has residual valuation >= order.  The returned series
    are in absolute coordinates, truncated at val_i + order.
    """
    if not point.nondegenerate:
        raise DegenerateLeading("point is degenerate; lifting needs Morse data")
    order = rational(order)
    ts = sorted(point.samples.keys())
    ybar = _leading_coefficients(point, ts)
    vals = point.valuation
    work = [v + order + 1 for v in vals]
    y = [
        NovikovSeries.monomial(ybar[i], vals[i], cutoff=work[i])
        for i in range(po.dim)
    ]
    abs_poly = _absolute_poly(po)
    fpolys = [abs_poly.log_derivative(i) for i in range(po.dim)]
    hpolys = [
        [f.log_derivative(j) for j in range(po.dim)] for f in fpolys
    ]
    # iterate until the correction reaches the float noise floor; stopping at
    # the first sub-tolerance residual leaves seed noise in the tail
    all_polys = fpolys + [h for row in hpolys for h in row]
    prev_mag = math.inf
    for _ in range(80):
        tables = _power_tables(y, all_polys)
        F = [_substitute(f, tables)[0] for f in fpolys]
        H = [[_substitute(h, tables)[0] for h in row] for row in hpolys]
        try:
            eps = _series_solve(H, [-f for f in F])
        except ZeroSeries as err:
            raise DegenerateLeading(str(err)) from err
        mag = max(e.max_abs_coeff() for e in eps)
        scale = max(yi.max_abs_coeff() for yi in y)
        if mag <= 1e-14 * scale:
            break
        if mag > 0.3 * prev_mag and mag <= 1e-10 * scale:
            break  # stalled at the arithmetic floor
        prev_mag = mag
        y = [
            (yi + yi * ei).truncate(w)
            for yi, ei, w in zip(y, eps, work)
        ]
    else:
        raise OrderUnreachable(f"lift did not converge in 80 steps")
    resvals = residual_valuations(po, y, tol=noise_tol)
    if not all(v >= order for v in resvals):
        if any(
            s.cutoff != INF and s.cutoff < v + order for s, v in zip(y, vals)
        ):
            raise OrderUnreachable(
                f"series cutoffs cannot certify order {order}"
            )
        raise OrderUnreachable(
            f"stalled before order {order}: residuals {resvals}"
        )
    lifted = [yi.truncate(v + order) for yi, v in zip(y, vals)]
    point.lifted = lifted
    return lifted
