"""Quantum Stanley-Reisner presentations and the c1-eigenvalue check.

The presentation of the small quantum cohomology of a smooth compact toric
manifold is generated by one variable Z_j per facet, subject to the linear
relations ``sum_j v_{j,i} Z_j = 0`` and one quantum Stanley-Reisner relation
``Z^P = T^omega Z^P'`` per primitive collection.

The headline verification is that the eigenvalues of quantum multiplication
by c1 = Z_1 + ... + Z_m coincide, with multiplicity, with the critical
values of the potential.  The quantum side is computed from an independent
hand-verifiable presentation per model (companion matrix for projective
space, a tensor product of sphere factors for the product and Hirzebruch
models, an explicit 4-dimensional monomial-basis reduction for the blow-up),
so the two sides share no code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import Malformed, NotMorse, UnsupportedModel
from .critsolve import CriticalPoint, SolverConfig, solve_critical
from .polytope import PrimitiveCollection, ToricData, primitive_collections
from .potential import PotentialFunction, build_potential


@dataclass(frozen=True)
class QHPresentation:
    """Generators and relations of the quantum cohomology presentation."""

    num_vars: int
    qsr: tuple[PrimitiveCollection, ...]
    linear: tuple[tuple[int, ...], ...]  # row i: coefficients of sum_j v_ji Z_j

    def relation_strings(self) -> list[str]:
        out = []
        for pc in self.qsr:
            lhs = "*".join(f"Z{i + 1}" for i in pc.members)
            rhs = f"T^({pc.omega})"
            if pc.cone_support:
                rhs += "*" + "*".join(
                    f"Z{j + 1}" + (f"^{k}" if k != 1 else "")
                    for j, k in zip(pc.cone_support, pc.multipliers)
                )
            out.append(f"{lhs} = {rhs}")
        for row in self.linear:
            parts = [
                f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}Z{j + 1}"
                for j, c in enumerate(row)
                if c != 0
            ]
            out.append(" ".join(parts).lstrip("+") + " = 0")
        return out


def qsr_relations(td: ToricData) -> QHPresentation:
    pcs = primitive_collections(td)
    linear = tuple(
        tuple(td.normals[j][i] for j in range(td.num_facets))
        for i in range(td.dim)
    )
    return QHPresentation(
        num_vars=td.num_facets, qsr=tuple(pcs), linear=linear
    )


def qsr_identity_check(
    td: ToricData,
    po: PotentialFunction,
    trials: int = 100,
    seed: int = 0,
    omega_shift: Fraction = Fraction(0),
) -> float:
    """Max relative residual of z^P - T^omega z^P' over random (y, t).

    The facet monomials z_j satisfy each relation identically; omega_shift
    perturbs the exponent to serve as a negative control.
    """
    pres = qsr_relations(td)
    u = po.basepoint if po.basepoint is not None else td.basepoint
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        t = float(rng.uniform(0.02, 0.3))
        y = np.exp(
            rng.uniform(-0.7, 0.7, td.dim)
            + 1j * rng.uniform(0, 2 * np.pi, td.dim)
        )
        z = np.array(
            [
                (t ** float(td.ell(j, u)))
                * np.prod(y ** np.array(td.normals[j]))
                for j in range(td.num_facets)
            ]
        )
        for pc in pres.qsr:
            lhs = np.prod(z[list(pc.members)])
            rhs = t ** float(pc.omega + omega_shift)
            for j, k in zip(pc.cone_support, pc.multipliers):
                rhs *= z[j] ** k
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return worst


# ---------------------------------------------------------------------------
# independent quantum-cohomology eigenvalue models
# ---------------------------------------------------------------------------

def _eigs_cpn(n: int, t: float) -> np.ndarray:
    """c1 = (n+1) x on C[x]/(x^(n+1) = t): companion-matrix eigenvalues."""
    comp = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(n):
        comp[i + 1, i] = 1.0
    comp[0, n] = t
    return np.linalg.eigvals((n + 1) * comp)


def _sphere_factor(area: Fraction, t: float) -> np.ndarray:
    """Multiplication by c1 = 2x on C[x]/(x^2 = t^area)."""
    return np.array([[0.0, 2.0 * t ** float(area)], [2.0, 0.0]], dtype=complex)


def _eigs_sphere_product(a1: Fraction, a2: Fraction, t: float) -> np.ndarray:
    m1 = _sphere_factor(a1, t)
    m2 = _sphere_factor(a2, t)
    c1 = np.kron(m1, np.eye(2)) + np.kron(np.eye(2), m2)
    return np.linalg.eigvals(c1)


def blowup_structure(t: float, basis: str = "Z1"):
    """Structure tensor and c1 coordinates of the blow-up's 4-dimensional
    quantum cohomology on a monomial basis.

    Derived by hand from the relations Z1 Z4 = T^(2/3), Z2 Z3 = T^(1/3) Z4
    after eliminating Z3 = Z2 and Z4 = Z1 - Z2 (linear relations
    Z1 - Z3 - Z4 = 0, Z2 - Z3 = 0):

    basis "Z1" = {1, Z1, Z2, W=Z1Z2}, c1 = 2 Z1 + Z2, and
        Z1 Z1 = T^(2/3) + W        Z1 Z2 = W
        Z2 Z2 = T^(1/3)(Z1 - Z2)   Z1 W  = T + T^(2/3) Z2
        Z2 W  = T                  W  W  = T Z1

    basis "Z4" = {1, Z2, Z4, V=Z2Z4}, c1 = 3 Z2 + 2 Z4, and
        Z2 Z2 = T^(1/3) Z4         Z2 Z4 = V
        Z4 Z4 = T^(2/3) - V        Z2 V  = T - T^(1/3) V
        Z4 V  = T^(2/3) Z2 - T + T^(1/3) V
        V  V  = T^(4/3) - T Z2 + T Z4 - T^(2/3) V

    Returns (labels, structure[j, k, :], c1 coefficient vector); both tables
    are checked commutative and associative by the test suite.
    """
    s = t ** (1.0 / 3.0)
    one, a, b, ab = np.eye(4, dtype=complex)
    if basis == "Z1":
        labels = ("1", "Z1", "Z2", "Z1Z2")
        prod = {
            (1, 1): s**2 * one + ab,
            (1, 2): ab,
            (2, 2): s * a - s * b,
            (1, 3): t * one + s**2 * b,
            (2, 3): t * one,
            (3, 3): t * a,
        }
        c1 = np.array([0, 2, 1, 0], dtype=complex)
    elif basis == "Z4":
        labels = ("1", "Z2", "Z4", "Z2Z4")
        prod = {
            (1, 1): s * b,
            (1, 2): ab,
            (2, 2): s**2 * one - ab,
            (1, 3): t * one - s * ab,
            (2, 3): s**2 * a - t * one + s * ab,
            (3, 3): s**4 * one - t * a + t * b - s**2 * ab,
        }
        c1 = np.array([0, 3, 2, 0], dtype=complex)
    else:
        raise Malformed(f"unknown blow-up basis {basis!r}")
    structure = np.zeros((4, 4, 4), dtype=complex)
    for j in range(4):
        structure[0, j] = structure[j, 0] = np.eye(4)[j]
    for (j, k), vec in prod.items():
        structure[j, k] = structure[k, j] = vec
    return labels, structure, c1


def blowup_c1_matrix(t: float, basis: str = "Z1") -> np.ndarray:
    """Matrix of quantum multiplication by c1 on the chosen monomial basis."""
    _, structure, c1 = blowup_structure(t, basis)
    return np.einsum("j,jkl->lk", c1, structure)


def _eigs_blowup(t: float, basis: str = "Z1") -> np.ndarray:
    return np.linalg.eigvals(blowup_c1_matrix(t, basis))


def qh_c1_eigenvalues(td: ToricData, t: float, basis: str = "Z1") -> np.ndarray:
    """Eigenvalues of quantum multiplication by c1, from the model's
    independent presentation."""
    name = td.name
    if name.startswith("cpn("):
        return _eigs_cpn(td.dim, t)
    if name.startswith("s2xs2("):
        # factor areas are the widths of the rectangle
        return _eigs_sphere_product(-td.offsets[2], -td.offsets[3], t)
    if name == "blowup_cp2":
        return _eigs_blowup(t, basis)
    if name.startswith("f2("):
        # symplectomorphic to the product of spheres with areas 1 -+ alpha
        return _eigs_sphere_product(1 - td.alpha, 1 + td.alpha, t)
    raise UnsupportedModel(
        f"no independent quantum presentation for {name!r}"
    )


# ---------------------------------------------------------------------------
# the comparison
# ---------------------------------------------------------------------------

def multiset_match(
    a: Sequence[complex], b: Sequence[complex], tol: float = 1e-8
) -> tuple[bool, float]:
    """Compare complex multisets: sort by (re, im) after rounding, then pair
    within a relative tolerance.  Returns (match, worst pair deviation)."""
    if len(a) != len(b):
        return False, math.inf
    key = lambda z: (round(z.real, 10), round(z.imag, 10))
    aa = sorted((complex(z) for z in a), key=key)
    bb = sorted((complex(z) for z in b), key=key)
    scale = max(max((abs(z) for z in aa), default=0.0), 1e-300)
    worst = max(abs(x - y) / scale for x, y in zip(aa, bb))
    return worst <= tol, worst


def c1_eigen_check(
    td: ToricData,
    t: float,
    cfg: Optional[SolverConfig] = None,
    points: Optional[Sequence[CriticalPoint]] = None,
    tol: float = 1e-8,
):
    """(eigenvalues_qh, critical_values, match) at the sample t.

    The critical values are the potential evaluated at its interior critical
    points; the eigenvalues come from the independent presentation.
    """
    if points is None:
        po = build_potential(td)
        points = solve_critical(po, cfg or SolverConfig())
    interior = [p for p in points if p.interior]
    if any(not p.nondegenerate for p in interior):
        raise NotMorse("c1 comparison requires a Morse potential")
    crit_values = [p.crit_value[t] for p in interior]
    eigs = qh_c1_eigenvalues(td, t)
    ok, worst = multiset_match(eigs, crit_values, tol)
    return list(eigs), crit_values, ok
