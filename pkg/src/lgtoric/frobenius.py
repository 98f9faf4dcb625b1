"""Finite-dimensional unital Frobenius algebras and the one-loop trace.

The trace of a unital Frobenius algebra is the double contraction of the
structure constants against the inverse pairing with two unit insertions,

    Z = sum (-1)^(deg e_I1 deg e_J2 + n(n-1)/2)
        g^{I1 J1} g^{I2 J2} g^{I3 0} g^{J3 0}
        <e_I1 e_I2, e_I3> <e_J1 e_J2, e_J3>,

summed over all six basis indices.  It is basis independent, and on the
Clifford algebra Cliff(n; d) with X_i^2 = d_i it evaluates in closed form to
2^n d_1 ... d_n.  The brute-force sum is the oracle here: trace_z computes it
as an exact tensor contraction (grouped but term-identical), trace_z_slow as
six literal nested loops for cross-checking, and the closed form is what the
acceptance suite compares both against.

Floer cohomology at a nondegenerate critical point is modelled by the
Clifford algebra on half the Hessian eigenvalues; its trace reproduces the
Hessian determinant, which ties the two residue-pairing routes together.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import Degenerate, Malformed, NotMorse, SingularPairing, ZeroD
from .critsolve import CriticalPoint
from .potential import PotentialFunction


@dataclass(frozen=True)
class CliffordSpec:
    """Generators X_1..X_n with X_i X_j = -X_j X_i (i != j), X_i^2 = d_i."""

    n: int
    d: tuple[complex, ...]

    def __post_init__(self):
        if self.n < 1:
            raise Malformed("Clifford rank must be positive")
        if len(self.d) != self.n:
            raise Malformed("need one d_i per generator")
        if any(x == 0 for x in self.d):
            raise ZeroD("Clifford parameters d_i must be nonzero")


@dataclass(frozen=True)
class FrobeniusAlgebra:
    """Unital Frobenius algebra in a fixed basis.

    structure[i, j, k] is the coefficient of e_k in e_i * e_j; pairing[i, j]
    is <e_i, e_j>; degrees are mod-2; n is the grading dimension entering the
    trace sign and the pairing parity.  pairing_cond reports the condition
    number seen at validation.
    """

    dim: int
    n: int
    degrees: tuple[int, ...]
    pairing: np.ndarray
    structure: np.ndarray
    unit_index: int = 0
    labels: tuple[str, ...] = ()
    pairing_cond: float = 0.0

    def unit_law_error(self) -> float:
        e0 = self.unit_index
        ident = np.eye(self.dim)
        return max(
            np.abs(self.structure[e0, :, :] - ident).max(),
            np.abs(self.structure[:, e0, :] - ident).max(),
        )

    def associativity_error(self) -> float:
        c = self.structure
        left = np.einsum("ijm,mkl->ijkl", c, c)
        right = np.einsum("jkm,iml->ijkl", c, c)
        scale = max(np.abs(c).max() ** 2, 1e-300)
        return float(np.abs(left - right).max() / scale)

    def frobenius_error(self) -> float:
        """max |<x y, z> - <x, y z>| over basis triples, relative."""
        c, g = self.structure, self.pairing
        lhs = np.einsum("ijm,mk->ijk", c, g)
        rhs = np.einsum("jkm,im->ijk", c, g)
        scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
        return float(np.abs(lhs - rhs).max() / scale)

    def pairing_parity_ok(self) -> bool:
        g = self.pairing
        for i, j in itertools.product(range(self.dim), repeat=2):
            if g[i, j] != 0 and (self.degrees[i] + self.degrees[j] - self.n) % 2:
                return False
        return True


def algebra_from_document(doc: dict) -> FrobeniusAlgebra:
    """User-supplied algebra JSON: {"n": int, "degrees": [0/1, ...],
    "unit_index": int, "pairing": [[ [re,im], ... ], ...],
    "structure": [[i, j, k, re, im], ...]} listing nonzero structure
    constants.  The result is fully validated."""
    try:
        degrees = tuple(int(x) % 2 for x in doc["degrees"])
        dim = len(degrees)
        n = int(doc["n"])
        unit = int(doc.get("unit_index", 0))
        pairing = np.array(
            [[complex(e[0], e[1]) for e in row] for row in doc["pairing"]]
        )
        structure = np.zeros((dim, dim, dim), dtype=complex)
        for i, j, k, re, im in doc["structure"]:
            structure[int(i), int(j), int(k)] = complex(re, im)
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise Malformed(f"bad algebra document: {err}") from err
    alg = FrobeniusAlgebra(
        dim=dim, n=n, degrees=degrees, pairing=pairing,
        structure=structure, unit_index=unit,
    )
    return validate_algebra(alg)


def algebra_to_document(alg: FrobeniusAlgebra) -> dict:
    nz = np.argwhere(alg.structure != 0)
    return {
        "n": alg.n,
        "degrees": list(alg.degrees),
        "unit_index": alg.unit_index,
        "pairing": [
            [[z.real, z.imag] for z in row] for row in alg.pairing
        ],
        "structure": [
            [int(i), int(j), int(k),
             alg.structure[i, j, k].real, alg.structure[i, j, k].imag]
            for i, j, k in nz
        ],
    }


def validate_algebra(alg: FrobeniusAlgebra, tol: float = 1e-9,
                     strict_unit: bool = False) -> FrobeniusAlgebra:
    if alg.structure.shape != (alg.dim,) * 3 or alg.pairing.shape != (alg.dim,) * 2:
        raise Malformed("tensor shapes disagree with dim")
    unit_err = alg.unit_law_error()
    if unit_err > (0.0 if strict_unit else tol):
        raise Malformed(f"unit law violated by {unit_err:.3e}")
    if alg.associativity_error() > tol:
        raise Malformed(f"associativity violated by {alg.associativity_error():.3e}")
    if alg.frobenius_error() > tol:
        raise Malformed(f"Frobenius property violated by {alg.frobenius_error():.3e}")
    if not alg.pairing_parity_ok():
        raise Malformed("pairing does not respect the mod-2 grading")
    cond = float(np.linalg.cond(alg.pairing))
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularPairing(f"pairing condition number {cond:.3e}")
    object.__setattr__(alg, "pairing_cond", cond)
    return alg


# ---------------------------------------------------------------------------
# Clifford model
# ---------------------------------------------------------------------------

def _subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(n + 1):
        out.extend(itertools.combinations(range(1, n + 1), size))
    return out


def _clifford_product(I, J, d):
    """Reduce X_I * X_J to (sign * prod of used d's, sorted index tuple)."""
    seq = list(I) + list(J)
    coeff = 1.0 + 0j
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(seq) - 1:
            a, b = seq[i], seq[i + 1]
            if a == b:
                coeff *= d[a - 1]
                del seq[i : i + 2]
                changed = True
                i = max(i - 1, 0)
            elif a > b:
                seq[i], seq[i + 1] = b, a
                coeff = -coeff
                changed = True
                i += 1
            else:
                i += 1
    return coeff, tuple(seq)


def _star_sign(I, n) -> int:
    comp = [j for j in range(1, n + 1) if j not in I]
    count = sum(1 for i in I for j in comp if j < i)
    return -1 if count % 2 else 1


def clifford_algebra(spec: CliffordSpec) -> FrobeniusAlgebra:
    """The Clifford algebra Cliff(n; d) as a unital Frobenius algebra.

    Basis {X_I : I subset of {1..n}} ordered by (|I|, lex); the pairing is
    <X_I, X_J> = (-1)^*(I) when J is the complement of I and 0 otherwise,
    with *(I) = #{(i,j) in I x I^c : j < i}.
    """
    n = spec.n
    if n > 6:
        raise Malformed("Clifford construction limited to n <= 6")
    basis = _subsets(n)
    index = {I: a for a, I in enumerate(basis)}
    dim = len(basis)
    structure = np.zeros((dim, dim, dim), dtype=complex)
    for a, I in enumerate(basis):
        for b, J in enumerate(basis):
            coeff, K = _clifford_product(I, J, spec.d)
            structure[a, b, index[K]] += coeff
    pairing = np.zeros((dim, dim), dtype=complex)
    for a, I in enumerate(basis):
        comp = tuple(j for j in range(1, n + 1) if j not in I)
        pairing[a, index[comp]] = _star_sign(I, n)
    alg = FrobeniusAlgebra(
        dim=dim,
        n=n,
        degrees=tuple(len(I) % 2 for I in basis),
        pairing=pairing,
        structure=structure,
        unit_index=0,
        labels=tuple(
            "1" if not I else "X" + "".join(map(str, I)) for I in basis
        ),
    )
    return validate_algebra(alg, strict_unit=True)


def clifford_closed_form(spec: CliffordSpec) -> complex:
    """The closed form 2^n d_1 ... d_n of the Clifford trace."""
    return (2 ** spec.n) * complex(np.prod(np.array(spec.d, dtype=complex)))


# ---------------------------------------------------------------------------
# the trace
# ---------------------------------------------------------------------------

def _inverse_pairing(alg: FrobeniusAlgebra) -> np.ndarray:
    cond = np.linalg.cond(alg.pairing)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularPairing(f"pairing condition number {cond:.3e}")
    return np.linalg.inv(alg.pairing)


def trace_z(alg: FrobeniusAlgebra) -> complex:
    """The one-loop trace, as the full six-index brute-force sum.

    The sum is evaluated as an exact tensor contraction: the unit-contracted
    tensors P[I1,I2] and Q[J1,J2] fold the I3/J3 indices first, then the
    remaining quadruple sum is contracted with the parity sign attached to
    (I1, J2).  Term for term this is the defining formula; see trace_z_slow
    for the literal nested-loop version used to cross-check it.
    """
    ginv = _inverse_pairing(alg)
    # A[i,j,k] = <e_i e_j, e_k>
    A = np.einsum("ijm,mk->ijk", alg.structure, alg.pairing)
    u = ginv[:, alg.unit_index]
    P = A @ u
    deg = np.array(alg.degrees)
    sign = np.where((deg[:, None] * deg[None, :]) % 2 == 1, -1.0, 1.0)
    total = np.einsum("ab,cd,ac,bd,ad->", ginv, ginv, P, P, sign)
    pref = -1.0 if (alg.n * (alg.n - 1) // 2) % 2 else 1.0
    return complex(pref * total)


def trace_z_slow(alg: FrobeniusAlgebra) -> complex:
    """Literal six-nested-loop evaluation of the trace formula.

    O(dim^6); intended for cross-checking trace_z on small algebras.
    """
    ginv = _inverse_pairing(alg)
    A = np.einsum("ijm,mk->ijk", alg.structure, alg.pairing)
    rng = range(alg.dim)
    e0 = alg.unit_index
    total = 0j
    for i1 in rng:
        for j1 in rng:
            if ginv[i1, j1] == 0:
                continue
            for i2 in rng:
                for j2 in rng:
                    if ginv[i2, j2] == 0:
                        continue
                    s = -1.0 if (alg.degrees[i1] * alg.degrees[j2]) % 2 else 1.0
                    for i3 in rng:
                        if A[i1, i2, i3] == 0 or ginv[i3, e0] == 0:
                            continue
                        for j3 in rng:
                            total += (
                                s
                                * ginv[i1, j1]
                                * ginv[i2, j2]
                                * ginv[i3, e0]
                                * ginv[j3, e0]
                                * A[i1, i2, i3]
                                * A[j1, j2, j3]
                            )
    pref = -1.0 if (alg.n * (alg.n - 1) // 2) % 2 else 1.0
    return complex(pref * total)


def basis_change(alg: FrobeniusAlgebra, M: np.ndarray) -> FrobeniusAlgebra:
    """Conjugate the algebra data by a degree-preserving change of basis
    fixing the unit (column unit_index of M must be the unit vector)."""
    dim = alg.dim
    if M.shape != (dim, dim):
        raise Malformed("basis-change matrix has wrong shape")
    Minv = np.linalg.inv(M)
    g = M.T @ alg.pairing @ M
    c = np.einsum("Ia,Jb,IJK,cK->abc", M, M, alg.structure, Minv)
    # the unit rows are exact by construction; snap float noise
    e0 = alg.unit_index
    ident = np.eye(dim)
    c[e0, :, :] = ident
    c[:, e0, :] = ident
    return FrobeniusAlgebra(
        dim=dim,
        n=alg.n,
        degrees=alg.degrees,
        pairing=g,
        structure=c,
        unit_index=e0,
        labels=(),
    )


def random_degree_preserving_change(
    alg: FrobeniusAlgebra, rng: np.random.Generator
) -> np.ndarray:
    """Random invertible degree-preserving matrix whose unit column is the
    unit basis vector."""
    dim = alg.dim
    deg = np.array(alg.degrees)
    e0 = alg.unit_index
    while True:
        M = np.zeros((dim, dim), dtype=complex)
        for parity in (0, 1):
            idx = np.flatnonzero(deg == parity)
            if idx.size:
                M[np.ix_(idx, idx)] = rng.normal(
                    size=(idx.size, idx.size)
                ) + 1j * rng.normal(size=(idx.size, idx.size))
        M[:, e0] = 0
        M[e0, e0] = 1
        cond = np.linalg.cond(M)
        if np.isfinite(cond) and cond < 1e6:
            return M


# ---------------------------------------------------------------------------
# Floer model at a critical point and the pairing identities
# ---------------------------------------------------------------------------

def floer_algebra(
    point: CriticalPoint, po: PotentialFunction, t: float
) -> FrobeniusAlgebra:
    """Clifford model of Floer cohomology at a nondegenerate critical point:
    d_i = (Hessian eigenvalues)/2, sorted by magnitude then argument."""
    if not point.nondegenerate:
        raise Degenerate("Floer algebra needs a nondegenerate point")
    H = po.hessian_x(point.samples[t], t, absolute=True)
    eig = np.linalg.eigvals(H)
    order = sorted(
        range(len(eig)), key=lambda i: (abs(eig[i]), np.angle(eig[i]))
    )
    eig = eig[order]
    scale = max(np.abs(H).max(), 1e-300)
    if np.any(np.abs(eig) <= 1e-9 * scale):
        raise Degenerate("Hessian has a (numerically) zero eigenvalue")
    spec = CliffordSpec(n=po.dim, d=tuple(eig / 2.0))
    return clifford_algebra(spec)


def residue_pairings(
    point: CriticalPoint, po: PotentialFunction, t: float
) -> tuple[complex, complex]:
    """(simplified, z_based) self-pairings of the point's unit idempotent:
    reciprocal Hessian determinant and reciprocal Frobenius trace."""
    if not point.nondegenerate:
        raise Degenerate("residue pairing needs a nondegenerate point")
    det = point.hess_det.get(t)
    if det is None:
        H = po.hessian_x(point.samples[t], t, absolute=True)
        det = complex(np.linalg.det(H))
    z = trace_z(floer_algebra(point, po, t))
    return 1.0 / det, 1.0 / z


def sum_formula_check(
    points: Sequence[CriticalPoint], po: PotentialFunction, t: float
) -> float:
    """Relative residual of sum over interior points of 1/Z."""
    interior = [p for p in points if p.interior]
    if any(not p.nondegenerate for p in interior):
        raise NotMorse("sum formula requires a Morse potential")
    if not interior:
        raise NotMorse("no interior critical points")
    inv = [1.0 / trace_z(floer_algebra(p, po, t)) for p in interior]
    return abs(sum(inv)) / max(abs(x) for x in inv)


def ks_matrix(
    po: PotentialFunction, points: Sequence[CriticalPoint], t: float
):
    """Kodaira-Spencer evaluation matrix: rows = unit + one row per facet
    class (the facet monomial e^w_j z_j at each point), columns = interior
    critical points.  Returns (labels, matrix)."""
    td = po.toric
    if td is None:
        raise Malformed("ks_matrix needs a toric potential")
    interior = [p for p in points if p.interior]
    if any(not p.nondegenerate for p in interior):
        raise NotMorse("Kodaira-Spencer evaluation requires Morse data")
    weights = {}
    for j, w in po.bulk:
        weights[j] = weights.get(j, 0j) + w
    rows = [np.ones(len(interior), dtype=complex)]
    labels = ["unit"]
    u = po.basepoint
    for j in range(td.num_facets):
        ell = float(td.ell(j, u))
        vals = []
        for p in interior:
            yu = po.from_absolute(p.samples[t], t)
            mono = np.prod(yu ** np.array(td.normals[j]))
            vals.append(np.exp(weights.get(j, 0j)) * (t ** ell) * mono)
        rows.append(np.array(vals))
        labels.append(f"facet{j + 1}")
    return labels, np.stack(rows)


def cpn_poincare_check(
    po: PotentialFunction, points: Sequence[CriticalPoint], t: float
) -> float:
    """Projective-space Poincare-duality check.

    Pairs the powers of the degree-2 generator against the residue pairing:
    sum over points of ks(f_l) ks(f_l') <1,1>_res must be 1 when l + l' = n
    and 0 otherwise.  Returns the maximal deviation over all (l, l').
    """
    n = po.dim
    interior = [p for p in points if p.interior]
    labels, ks = ks_matrix(po, interior, t)
    f1 = ks[labels.index(f"facet{n}")]  # the z-monomial of y_n
    pair = np.array(
        [residue_pairings(p, po, t)[0] for p in interior]
    )
    worst = 0.0
    for l1 in range(n + 1):
        for l2 in range(n + 1):
            s = np.sum(f1 ** l1 * f1 ** l2 * pair)
            target = 1.0 if l1 + l2 == n else 0.0
            worst = max(worst, abs(s - target))
    return worst
