"""Potential functions: Laurent polynomials over Novikov series.

The polynomial lives in the fiber coordinates attached to a basepoint u in
the open moment polytope, where the facet monomial for facet j is
``T^(l_j(u)) * y^(v_j)`` and every coefficient has valuation >= 0.  The
absolute torus coordinates differ by ``y_abs,i = T^(u_i) * y_i``; numeric
solving happens in absolute coordinates (see critsolve) and the helpers here
can evaluate in either chart.

Three kinds are supported: the leading-order potential ``sum e^(w_j) z_j``
(exact for the Fano built-ins), the closed-form Hirzebruch potential whose
fourth coefficient is ``(1 + T^(2 alpha))``, and custom potentials fed
directly as exponent/coefficient tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    F2Required,
    Malformed,
    NotInterior,
    OutOfRange,
    OutsideP,
    ZeroCoordinate,
)
from .novikov import NovikovSeries, parse_series, rational
from .polytope import ToricData, interior_test

Key = tuple[int, ...]


@dataclass(frozen=True)
class LaurentPolynomial:
    """Laurent polynomial in n torus variables with NovikovSeries coefficients."""

    dim: int
    terms: tuple[tuple[Key, NovikovSeries], ...]

    @staticmethod
    def make(dim: int, terms: Mapping[Key, NovikovSeries]) -> "LaurentPolynomial":
        clean = []
        for k, c in sorted(terms.items()):
            k = tuple(int(x) for x in k)
            if len(k) != dim:
                raise DimensionMismatch(f"exponent {k} has wrong length")
            if not isinstance(c, NovikovSeries):
                c = NovikovSeries.scalar(c)
            if not c.is_zero():
                clean.append((k, c))
        return LaurentPolynomial(dim, tuple(clean))

    def exponent_matrix(self) -> np.ndarray:
        return np.array([k for k, _ in self.terms], dtype=np.int64).reshape(
            len(self.terms), self.dim
        )

    def coeffs_at(self, t: float) -> np.ndarray:
        return np.array([c.eval(t) for _, c in self.terms], dtype=complex)

    def log_derivative(self, i: int) -> "LaurentPolynomial":
        """y_i d/dy_i applied termwise (the x_i-derivative)."""
        out = {}
        for k, c in self.terms:
            if k[i] != 0:
                out[k] = c.scale(k[i])
        return LaurentPolynomial.make(self.dim, out)

    def substitute(self, series: Sequence[NovikovSeries]) -> NovikovSeries:
        """Symbolic substitution y_i -> series_i (series must be invertible
        wherever a negative power occurs)."""
        if len(series) != self.dim:
            raise DimensionMismatch("substitution vector has wrong length")
        total = NovikovSeries.zero()
        for k, c in self.terms:
            mono = c
            for ki, s in zip(k, series):
                mono = mono * (s ** ki)
            total = total + mono
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"[{c}]*{_monomial_str(k)}" for k, c in self.terms
        )


def _monomial_str(k: Key) -> str:
    parts = [
        f"y{i + 1}" + (f"^{e}" if e != 1 else "")
        for i, e in enumerate(k)
        if e != 0
    ]
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class PotentialFunction:
    """A potential with provenance.

    kind is one of "leading-order", "f2-exact", "custom".  ``basepoint`` is
    the fiber the polynomial coordinates are attached to (None for custom
    potentials, which are read in absolute coordinates).  ``bulk`` holds the
    degree-2 weights (facet index, w) baked into the coefficients.
    """

    poly: LaurentPolynomial
    kind: str
    toric: Optional[ToricData] = None
    basepoint: Optional[tuple[Fraction, ...]] = None
    bulk: tuple[tuple[int, complex], ...] = ()

    @property
    def dim(self) -> int:
        return self.poly.dim

    # --- coordinate handling -------------------------------------------------

    def _coeff_vector(self, t: float, absolute: bool) -> np.ndarray:
        c = self.poly.coeffs_at(t)
        if absolute and self.basepoint is not None:
            K = self.poly.exponent_matrix()
            u = np.array([float(x) for x in self.basepoint])
            c = c * np.power(t, -K @ u)
        return c

    def numeric(self, t: float, absolute: bool = False):
        """(exponent matrix, coefficient vector) ready for evaluation at t."""
        if not 0.0 < t < 1.0:
            raise OutOfRange(f"t must lie in (0,1), got {t!r}")
        return self.poly.exponent_matrix(), self._coeff_vector(t, absolute)

    def to_absolute(self, y, t: float) -> np.ndarray:
        """Map basepoint-chart coordinates to absolute torus coordinates."""
        if self.basepoint is None:
            return np.asarray(y, dtype=complex)
        scale = np.array([t ** float(ui) for ui in self.basepoint])
        return np.asarray(y, dtype=complex) * scale

    def from_absolute(self, y, t: float) -> np.ndarray:
        if self.basepoint is None:
            return np.asarray(y, dtype=complex)
        scale = np.array([t ** float(ui) for ui in self.basepoint])
        return np.asarray(y, dtype=complex) / scale

    # --- evaluation ----------------------------------------------------------

    def value(self, y, t: float, absolute: bool = False) -> complex:
        K, c = self.numeric(t, absolute)
        return complex((c * _monomials(K, y)).sum())

    def gradient_log(self, y, t: float, absolute: bool = False) -> np.ndarray:
        """The vector (y_i dPO/dy_i)(y, t)."""
        K, c = self.numeric(t, absolute)
        return (c * _monomials(K, y)) @ K

    def hessian_x(self, y, t: float, absolute: bool = False) -> np.ndarray:
        """Hessian [y_i y_j d^2 PO / dy_i dy_j] = the log-coordinate Hessian."""
        K, c = self.numeric(t, absolute)
        m = c * _monomials(K, y)
        return np.einsum("k,ki,kj->ij", m, K, K)

    # --- valuation polytope ---------------------------------------------------

    def term_forms(self) -> list[tuple[Fraction, tuple[int, ...]]]:
        """Affine forms (a_k, k): the T-valuation of term k at a point with
        absolute valuation vector w is a_k + <k, w>.

        For toric potentials these are exactly the facet functions l_j, so
        the region {w : all forms > 0} is the open moment polytope; for
        custom potentials it is the valuation polytope of the given terms.
        """
        out = []
        for k, c in self.poly.terms:
            a = c.valuation()
            if a == math.inf:
                continue
            if self.basepoint is not None:
                a = a - sum(ki * ui for ki, ui in zip(k, self.basepoint))
            out.append((a, k))
        return out

    def valuation_interior(self, w: Sequence[Union[Fraction, float]],
                           eps: Union[Fraction, float] = 1e-6) -> bool:
        """True iff w lies strictly inside the potential's valuation polytope."""
        if self.toric is not None:
            return interior_test(self.toric, w, eps)
        return all(
            a + sum(ki * wi for ki, wi in zip(k, w)) > eps
            for a, k in self.term_forms()
        )


def _monomials(K: np.ndarray, y) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if y.shape != (K.shape[1],):
        raise DimensionMismatch(
            f"point has shape {y.shape}, expected ({K.shape[1]},)"
        )
    if np.any(y == 0):
        raise ZeroCoordinate("torus coordinates must be nonzero")
    return np.prod(y[None, :] ** K, axis=1)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def monomial_z(td: ToricData, j: int, u: Sequence) -> LaurentPolynomial:
    """The facet monomial T^(l_j(u)) y^(v_j) in the chart at u."""
    u = tuple(rational(x) for x in u)
    for jj in range(td.num_facets):
        if td.ell(jj, u) < 0:
            raise OutsideP(f"l_{jj + 1}(u) = {td.ell(jj, u)} < 0")
    coeff = NovikovSeries.monomial(1.0, td.ell(j, u))
    return LaurentPolynomial.make(td.dim, {tuple(td.normals[j]): coeff})


def build_potential(
    td: ToricData,
    u: Optional[Sequence] = None,
    bulk: Optional[Sequence[tuple[int, complex]]] = None,
    kind: Optional[str] = None,
) -> PotentialFunction:
    """Potential of a toric model at the interior fiber u.

    kind defaults to "f2-exact" on the Hirzebruch model and "leading-order"
    otherwise; requesting "f2-exact" elsewhere raises F2Required.  bulk is a
    sequence of (facet index, w) degree-2 weights contributing e^w factors;
    it defaults to the weights carried by the model.
    """
    if u is None:
        u = td.basepoint
    u = tuple(rational(x) for x in u)
    if not interior_test(td, u, Fraction(0)):
        raise NotInterior(f"basepoint {u} is not in the open polytope")
    if bulk is None:
        bulk = td.bulk
    bulk = tuple((int(j), complex(w)) for j, w in bulk)
    for j, _ in bulk:
        if not 0 <= j < td.num_facets:
            raise Malformed(f"bulk facet index {j} out of range")
    if kind is None:
        kind = "f2-exact" if td.is_f2() else "leading-order"
    if kind == "f2-exact" and not td.is_f2():
        raise F2Required("f2-exact potential requested on a non-F2 model")
    if kind not in ("leading-order", "f2-exact"):
        raise Malformed(f"unknown potential kind {kind!r}")

    weights = {}
    for j, w in bulk:
        weights[j] = weights.get(j, 0j) + w
    terms: dict[Key, NovikovSeries] = {}
    for j in range(td.num_facets):
        coeff = NovikovSeries.monomial(
            np.exp(weights.get(j, 0j)), td.ell(j, u)
        )
        if kind == "f2-exact" and j == 3:
            # the sphere class with vanishing Chern number contributes the
            # extra T^(2 alpha) disc correction
            coeff = coeff * NovikovSeries(
                ((Fraction(0), 1.0), (2 * td.alpha, 1.0))
            )
        k = tuple(td.normals[j])
        terms[k] = terms.get(k, NovikovSeries.zero()) + coeff
    poly = LaurentPolynomial.make(td.dim, terms)
    return PotentialFunction(
        poly=poly, kind=kind, toric=td, basepoint=u, bulk=bulk
    )


def custom_potential(dim: int, terms) -> PotentialFunction:
    """Potential from a raw exponent -> coefficient table.

    Coefficients may be NovikovSeries, complex scalars, or series literals
    like "(1,0)*T^(1/3)".  No toric provenance is attached; coordinates are
    absolute.
    """
    if not terms:
        raise Malformed("custom potential needs at least one term")
    table = {}
    items = terms.items() if isinstance(terms, Mapping) else terms
    for k, c in items:
        k = tuple(int(x) for x in k)
        if isinstance(c, str):
            c = parse_series(c)
        table[k] = c
    poly = LaurentPolynomial.make(dim, table)
    if not poly.terms:
        raise Malformed("custom potential is identically zero")
    return PotentialFunction(poly=poly, kind="custom")


def custom_potential_from_document(doc: dict) -> PotentialFunction:
    """Custom-potential JSON: {"dim": n, "terms": [{"powers": [int],
    "coeff": "<series literal>"}]}."""
    try:
        dim = int(doc["dim"])
        pairs = [
            (tuple(int(x) for x in item["powers"]), str(item["coeff"]))
            for item in doc["terms"]
        ]
    except (KeyError, TypeError, ValueError) as err:
        raise Malformed(f"bad potential document: {err}") from err
    merged: dict[Key, NovikovSeries] = {}
    for k, text in pairs:
        s = parse_series(text)
        merged[k] = merged.get(k, NovikovSeries.zero()) + s
    return custom_potential(dim, merged)


def log_derivatives(po: PotentialFunction) -> list[LaurentPolynomial]:
    """The n critical-equation polynomials y_i dPO/dy_i."""
    return [po.poly.log_derivative(i) for i in range(po.dim)]
