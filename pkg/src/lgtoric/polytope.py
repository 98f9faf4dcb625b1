"""Moment-polytope input data for compact smooth toric manifolds.

A model is a list of facets ``<u, v_j> >= lambda_j`` with primitive integer
normals ``v_j`` and rational offsets.  Loading validates boundedness,
nonempty interior and the Delzant smoothness condition, and enumerates the
vertices by brute force over n-subsets of facets (desk scale: m <= 14,
n <= 4).  Primitive collections carry their quantum Stanley-Reisner data:
the cone decomposition ``sum_{i in P} v_i = sum k_i' v_i'`` and the exponent
``omega = sum_{i in P} l_i(u) - sum k_i' l_i'(u)``, which is checked to be
independent of the vertex u.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    DimensionMismatch,
    EmptyInterior,
    Malformed,
    NoConeDecomposition,
    NotSmooth,
    Unbounded,
    UnsupportedModel,
)
from .novikov import format_rational, rational

Vec = tuple[Fraction, ...]
IVec = tuple[int, ...]


@dataclass(frozen=True)
class ToricData:
    """Validated moment-polytope data.

    ``normals[j]`` and ``offsets[j]`` define the facet ``<u,v_j> >= lambda_j``;
    ``vertices`` are derived.  ``basepoint`` is the canonical interior fiber
    used when no basepoint is supplied (the balanced fiber for built-ins, the
    vertex centroid otherwise).  ``bulk`` holds optional degree-2 bulk weights
    (facet index, complex w) taken from the model document.  ``alpha`` is set
    for the Hirzebruch model only.
    """

    name: str
    dim: int
    normals: tuple[IVec, ...]
    offsets: tuple[Fraction, ...]
    vertices: tuple[Vec, ...]
    basepoint: Vec
    bulk: tuple[tuple[int, complex], ...] = ()
    alpha: Optional[Fraction] = None

    @property
    def num_facets(self) -> int:
        return len(self.normals)

    def ell(self, j: int, u: Sequence[Union[Fraction, float]]):
        """Affine facet function l_j(u) = <u, v_j> - lambda_j."""
        if len(u) != self.dim:
            raise DimensionMismatch(
                f"point has dim {len(u)}, model has dim {self.dim}"
            )
        return sum(ui * vji for ui, vji in zip(u, self.normals[j])) - self.offsets[j]

    def active_facets(self, u: Sequence[Fraction]) -> tuple[int, ...]:
        return tuple(j for j in range(self.num_facets) if self.ell(j, u) == 0)

    def bounding_box(self) -> list[tuple[Fraction, Fraction]]:
        return [
            (min(v[i] for v in self.vertices), max(v[i] for v in self.vertices))
            for i in range(self.dim)
        ]

    def is_f2(self) -> bool:
        return self.alpha is not None


@dataclass(frozen=True)
class PrimitiveCollection:
    """A primitive collection with its quantum Stanley-Reisner data.

    ``members`` is the collection P, ``cone_support`` the index set P' of the
    cone decomposition with positive multipliers ``multipliers`` (parallel to
    ``cone_support``), and ``omega`` the symplectic-area exponent.
    """

    members: tuple[int, ...]
    cone_support: tuple[int, ...]
    multipliers: tuple[int, ...]
    omega: Fraction


# ---------------------------------------------------------------------------
# validation and vertex enumeration
# ---------------------------------------------------------------------------

def _solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve a square rational system by Gaussian elimination; None if singular."""
    n = len(rhs)
    a = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[i][n] for i in range(n))


def _det_int(mat: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free expansion (n <= 4)."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det_int(minor)
    return total


def _nullspace_dim1(rows: Sequence[IVec], n: int) -> Optional[Vec]:
    """A nonzero rational vector orthogonal to all rows, if the nullspace is
    one-dimensional; None otherwise."""
    mat = [list(map(Fraction, r)) for r in rows]
    # reduce to row echelon form
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][col]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    if n - r != 1:
        return None
    free = next(c for c in range(n) if c not in pivots)
    vec = [Fraction(0)] * n
    vec[free] = Fraction(1)
    for i, col in enumerate(pivots):
        vec[col] = -mat[i][free]
    return tuple(vec)


def _check_bounded(normals: Sequence[IVec], n: int) -> None:
    """Raise Unbounded if the recession cone {d : <d,v_j> >= 0} is nontrivial.

    Exact brute force: a nontrivial pointed cone has an extreme ray on which
    n-1 independent constraints are active; a cone containing a line forces a
    common nullspace of all normals.
    """
    full = _nullspace_dim1(normals, n)
    if full is not None or _rank(normals, n) < n:
        raise Unbounded("facet normals do not span the ambient space")
    for subset in itertools.combinations(range(len(normals)), n - 1):
        d = _nullspace_dim1([normals[j] for j in subset], n)
        if d is None:
            continue
        for cand in (d, tuple(-x for x in d)):
            if all(
                sum(ci * vji for ci, vji in zip(cand, v)) >= 0 for v in normals
            ):
                raise Unbounded(
                    f"recession direction {cand} (constraints {list(subset)})"
                )


def _rank(rows: Sequence[IVec], n: int) -> int:
    mat = [list(map(Fraction, r)) for r in rows]
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col] / mat[r][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        r += 1
    return r


def _enumerate_vertices(
    normals: Sequence[IVec], offsets: Sequence[Fraction], n: int
) -> list[Vec]:
    m = len(normals)
    seen: list[Vec] = []
    for subset in itertools.combinations(range(m), n):
        u = _solve_exact(
            [normals[j] for j in subset], [offsets[j] for j in subset]
        )
        if u is None:
            continue
        feasible = all(
            sum(ui * vji for ui, vji in zip(u, normals[j])) >= offsets[j]
            for j in range(m)
        )
        if feasible and u not in seen:
            seen.append(u)
    return sorted(seen)


def _validate(name, dim, normals, offsets, basepoint, bulk, alpha) -> ToricData:
    if dim < 1:
        raise Malformed("dimension must be positive")
    for j, v in enumerate(normals):
        if len(v) != dim:
            raise Malformed(f"facet {j}: normal has wrong length")
        if all(x == 0 for x in v):
            raise Malformed(f"facet {j}: zero normal")
        if math.gcd(*(abs(x) for x in v)) != 1:
            raise Malformed(f"facet {j}: normal {v} is not primitive")
    _check_bounded(normals, dim)
    vertices = _enumerate_vertices(normals, offsets, dim)
    if not vertices:
        raise EmptyInterior("no vertex satisfies all facet inequalities")
    centroid = tuple(
        sum(v[i] for v in vertices) / len(vertices) for i in range(dim)
    )
    ell = lambda j, u: (
        sum(ui * vji for ui, vji in zip(u, normals[j])) - offsets[j]
    )
    if any(ell(j, centroid) <= 0 for j in range(len(normals))):
        bad = [j for j in range(len(normals)) if ell(j, centroid) <= 0]
        raise EmptyInterior(f"polytope has empty interior (facets {bad})")
    for u in vertices:
        active = [j for j in range(len(normals)) if ell(j, u) == 0]
        if len(active) != dim:
            raise NotSmooth(
                f"vertex {u}: {len(active)} active facets {active}, need {dim}"
            )
        det = _det_int([list(normals[j]) for j in active])
        if det not in (1, -1):
            raise NotSmooth(
                f"vertex {u}: facets {active} have determinant {det}"
            )
    if basepoint is None:
        basepoint = centroid
    return ToricData(
        name=name,
        dim=dim,
        normals=tuple(tuple(v) for v in normals),
        offsets=tuple(offsets),
        vertices=tuple(vertices),
        basepoint=tuple(basepoint),
        bulk=tuple(bulk),
        alpha=alpha,
    )


# ---------------------------------------------------------------------------
# built-in catalog and JSON documents
# ---------------------------------------------------------------------------

_BUILTIN_RE = re.compile(r"^([a-z0-9_]+)\s*(?:\(\s*([^)]*)\s*\))?$")


def builtin_names() -> list[str]:
    return ["cpn(n)  n<=3", "s2xs2(alpha)", "blowup_cp2", "f2(alpha)"]


def load_toric(source) -> ToricData:
    """Load a model from a built-in name, a JSON document dict, or JSON text.

    Built-ins: ``cpn(n)`` for n <= 3, ``s2xs2(alpha)``, ``blowup_cp2``,
    ``f2(alpha)``.  Document schema: ``{"name": str, "dim": n, "facets":
    [{"normal": [int], "lambda": "p/q"}], "bulk": [{"facet": j, "w":
    [re, im]}], "alpha": "p/q"}`` with 1-based bulk facet indices.
    """
    if isinstance(source, str):
        s = source.strip()
        if s.startswith("{"):
            try:
                return load_toric(json.loads(s))
            except json.JSONDecodeError as err:
                raise Malformed(f"bad JSON: {err}") from err
        return _load_builtin(s)
    if isinstance(source, dict):
        return _load_document(source)
    raise Malformed(f"cannot load model from {type(source).__name__}")


def _load_builtin(name: str) -> ToricData:
    m = _BUILTIN_RE.match(name)
    if not m:
        raise Malformed(f"bad model name: {name!r}")
    base, arg = m.group(1), m.group(2)
    if base == "cpn":
        if arg is None:
            raise Malformed("cpn needs a dimension, e.g. cpn(2)")
        n = int(arg)
        if not 1 <= n <= 3:
            raise UnsupportedModel("cpn(n) is built in for n <= 3 only")
        return cpn(n)
    if base == "s2xs2":
        return s2xs2(rational(arg) if arg else Fraction(0))
    if base == "blowup_cp2":
        return blowup_cp2()
    if base == "f2":
        if arg is None:
            raise Malformed("f2 needs alpha, e.g. f2(1/4)")
        return f2(rational(arg))
    raise UnsupportedModel(f"unknown built-in model {name!r}")


def _load_document(doc: dict) -> ToricData:
    try:
        name = str(doc.get("name", "custom"))
        dim = int(doc["dim"])
        facets = doc["facets"]
        normals = [tuple(int(x) for x in f["normal"]) for f in facets]
        offsets = [rational(f["lambda"]) for f in facets]
    except (KeyError, TypeError, ValueError) as err:
        raise Malformed(f"bad model document: {err}") from err
    bulk = []
    for b in doc.get("bulk", ()):
        try:
            j = int(b["facet"])
            w = complex(float(b["w"][0]), float(b["w"][1]))
        except (KeyError, TypeError, ValueError, IndexError) as err:
            raise Malformed(f"bad bulk entry {b!r}") from err
        if not 1 <= j <= len(normals):
            raise Malformed(f"bulk facet {j} out of range 1..{len(normals)}")
        bulk.append((j - 1, w))
    alpha = rational(doc["alpha"]) if "alpha" in doc else None
    basepoint = None
    if "u" in doc:
        basepoint = tuple(rational(x) for x in doc["u"])
        if len(basepoint) != dim:
            raise Malformed("basepoint u has wrong length")
    return _validate(name, dim, normals, offsets, basepoint, bulk, alpha)


def cpn(n: int) -> ToricData:
    """Projective space: 0 <= u_i, sum u_i <= 1."""
    normals = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    normals.append(tuple([-1] * n))
    offsets = [Fraction(0)] * n + [Fraction(-1)]
    bp = tuple([Fraction(1, n + 1)] * n)
    return _validate(f"cpn({n})", n, normals, offsets, bp, (), None)


def s2xs2(alpha: Fraction = Fraction(0)) -> ToricData:
    """Product of two spheres with areas 1-alpha and 1+alpha."""
    alpha = rational(alpha)
    if not 0 <= alpha < 1:
        raise Malformed("s2xs2 needs 0 <= alpha < 1")
    normals = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    offsets = [Fraction(0), Fraction(0), -(1 - alpha), -(1 + alpha)]
    bp = ((1 - alpha) / 2, (1 + alpha) / 2)
    return _validate(f"s2xs2({format_rational(alpha)})", 2, normals, offsets,
                     bp, (), None)


def blowup_cp2() -> ToricData:
    """Monotone one-point blow-up of the projective plane."""
    normals = [(1, 0), (0, 1), (-1, -1), (-1, 0)]
    offsets = [Fraction(0), Fraction(0), Fraction(-1), Fraction(-2, 3)]
    bp = (Fraction(1, 3), Fraction(1, 3))
    return _validate("blowup_cp2", 2, normals, offsets, bp, (), None)


def f2(alpha: Fraction) -> ToricData:
    """Hirzebruch surface F2(alpha): 0 <= u1, 0 <= u2, u1 + 2 u2 <= 2,
    u2 <= 1 - alpha."""
    alpha = rational(alpha)
    if not 0 < alpha < 1:
        raise Malformed("f2 needs 0 < alpha < 1")
    normals = [(1, 0), (0, 1), (-1, -2), (0, -1)]
    offsets = [Fraction(0), Fraction(0), Fraction(-2), -(1 - alpha)]
    bp = ((1 + alpha) / 2, (1 - alpha) / 2)
    return _validate(f"f2({format_rational(alpha)})", 2, normals, offsets,
                     bp, (), alpha)


# ---------------------------------------------------------------------------
# derived combinatorics
# ---------------------------------------------------------------------------

def vertices_and_rank(td: ToricData) -> tuple[tuple[Vec, ...], int]:
    """Vertices and the total Betti rank of the toric manifold.

    For smooth projective toric manifolds the total Betti rank equals the
    vertex count of the moment polytope; this is the independent oracle the
    critical-point count is checked against.
    """
    return td.vertices, len(td.vertices)


def primitive_collections(td: ToricData) -> list[PrimitiveCollection]:
    """All primitive collections with cone decompositions and omega exponents.

    A subset is primitive iff it is contained in no vertex's active-facet set
    while every proper subset is.  The decomposition ``sum_{i in P} v_i =
    sum k_i' v_i'`` is solved through the (unimodular) vertex cones, and
    omega is evaluated at every vertex and required to agree.
    """
    m = td.num_facets
    if m > 14:
        raise Malformed("primitive collection enumeration limited to m <= 14")
    cones = [frozenset(td.active_facets(u)) for u in td.vertices]
    in_some_cone = lambda s: any(s <= cone for cone in cones)
    out = []
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            s = frozenset(subset)
            if in_some_cone(s):
                continue
            if not all(
                in_some_cone(s - {i}) for i in subset
            ):
                continue
            out.append(_collection_data(td, subset, cones))
    return out


def _collection_data(
    td: ToricData, members: tuple[int, ...], cones: Sequence[frozenset]
) -> PrimitiveCollection:
    n = td.dim
    w = tuple(
        sum(td.normals[i][k] for i in members) for k in range(n)
    )
    support: Optional[tuple[int, ...]] = None
    mults: Optional[tuple[int, ...]] = None
    if all(x == 0 for x in w):
        support, mults = (), ()
    else:
        for cone in cones:
            idx = sorted(cone)
            coeffs = _solve_exact(
                [[Fraction(td.normals[j][k]) for j in idx] for k in range(n)],
                [Fraction(x) for x in w],
            )
            if coeffs is None:
                continue
            if all(c.denominator == 1 and c >= 0 for c in coeffs):
                pairs = [
                    (j, int(c)) for j, c in zip(idx, coeffs) if c > 0
                ]
                support = tuple(j for j, _ in pairs)
                mults = tuple(k for _, k in pairs)
                break
        if support is None:
            raise NoConeDecomposition(
                f"no nonnegative cone decomposition for {members}"
            )
    omegas = set()
    for u in td.vertices:
        val = sum(td.ell(i, u) for i in members) - sum(
            k * td.ell(j, u) for j, k in zip(support, mults)
        )
        omegas.add(val)
    if len(omegas) != 1:
        raise NoConeDecomposition(
            f"omega for {members} varies across vertices: {sorted(omegas)}"
        )
    return PrimitiveCollection(
        members=tuple(members),
        cone_support=support,
        multipliers=mults,
        omega=omegas.pop(),
    )


def interior_test(
    td: ToricData,
    u: Sequence[Union[Fraction, float]],
    eps: Union[Fraction, float] = 1e-6,
) -> bool:
    """True iff l_j(u) > eps for every facet.

    The default eps guards valuation-rounding noise when u comes from float
    data; pass eps = 0 (a Fraction) for the exact strict test.
    """
    if len(u) != td.dim:
        raise DimensionMismatch(
            f"point has dim {len(u)}, model has dim {td.dim}"
        )
    return all(td.ell(j, u) > eps for j in range(td.num_facets))
