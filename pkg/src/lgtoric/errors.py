"""Exception types shared across the package.

Every error raised by the library derives from :class:`LGToricError`, so
callers (and the CLI) can distinguish bad input or failed preconditions from
genuine bugs.
"""


class LGToricError(Exception):
    """Base class for all library errors."""


# --- Novikov series ---

class ZeroSeries(LGToricError):
    """Inversion of the zero series was requested."""


class NegativeValuation(LGToricError):
    """exp() of a series with a negative-exponent term."""


class OutOfRange(LGToricError):
    """Numeric parameter outside its admissible interval (e.g. t not in (0,1))."""


class ExponentOverflow(LGToricError):
    """Rational exponent with numerator or denominator beyond 64 bits."""


# --- polytope / model input ---

class Malformed(LGToricError):
    """Unparseable or structurally invalid input document."""


class Unbounded(LGToricError):
    """Moment polytope has a recession direction."""


class EmptyInterior(LGToricError):
    """Moment polytope has no interior point."""


class NotSmooth(LGToricError):
    """A vertex fails the Delzant condition (wrong facet count or determinant)."""


class NoConeDecomposition(LGToricError):
    """Primitive-collection identity has no nonnegative cone decomposition."""


class DimensionMismatch(LGToricError):
    """Vector length disagrees with the ambient dimension."""


# --- potential construction / evaluation ---

class OutsideP(LGToricError):
    """Requested point lies outside the moment polytope."""


class NotInterior(LGToricError):
    """Basepoint is not in the interior of the moment polytope."""


class F2Required(LGToricError):
    """The closed-form Hirzebruch potential was requested on another model."""


class ZeroCoordinate(LGToricError):
    """Evaluation at a point with a vanishing torus coordinate."""


# --- critical point solving ---

class ValuationUnstable(LGToricError):
    """Valuation regression did not settle on a rational vector."""


class TrackingLost(LGToricError):
    """Continuation to another T sample diverged or collided."""


class Underresolved(LGToricError):
    """Distinct-solution count changed between independently seeded reruns."""


class DegenerateLeading(LGToricError):
    """Leading-order Hessian is singular; lifting cannot start."""


class OrderUnreachable(LGToricError):
    """Requested lifting order exceeds what the series cutoffs support."""


class NotMorse(LGToricError):
    """An interior critical point is degenerate."""


# --- Frobenius algebras ---

class ZeroD(LGToricError):
    """Clifford parameter d_i = 0."""


class SingularPairing(LGToricError):
    """Pairing matrix is not invertible."""


class Degenerate(LGToricError):
    """Operation requires a nondegenerate critical point."""


# --- qh / cli ---

class UnsupportedModel(LGToricError):
    """No independent quantum-cohomology presentation for this model."""
