"""Landau-Ginzburg potentials of compact toric manifolds over the Novikov
field: critical points, Jacobian-ring rank, residue pairings, Frobenius
traces, and quantum Stanley-Reisner data, with desk-scale verification of
the mirror-symmetry identities they satisfy."""

from .novikov import NovikovSeries, format_series, parse_series, rational
from .polytope import (
    PrimitiveCollection,
    ToricData,
    interior_test,
    load_toric,
    primitive_collections,
    vertices_and_rank,
)
from .potential import (
    LaurentPolynomial,
    PotentialFunction,
    build_potential,
    custom_potential,
    custom_potential_from_document,
    log_derivatives,
    monomial_z,
)
from .critsolve import (
    CriticalPoint,
    SolverConfig,
    jacobian_rank,
    lift_tadic,
    solve_critical,
)
from .frobenius import (
    CliffordSpec,
    FrobeniusAlgebra,
    clifford_algebra,
    clifford_closed_form,
    floer_algebra,
    ks_matrix,
    residue_pairings,
    sum_formula_check,
    trace_z,
    trace_z_slow,
)
from .qh import (
    QHPresentation,
    c1_eigen_check,
    multiset_match,
    qh_c1_eigenvalues,
    qsr_identity_check,
    qsr_relations,
)

__version__ = "0.1.0"
