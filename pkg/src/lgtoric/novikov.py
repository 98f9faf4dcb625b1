"""Truncated Novikov series arithmetic.

A series is a finite formal sum ``sum_i a_i * T^(e_i)`` with complex
coefficients ``a_i`` and strictly increasing rational exponents ``e_i``,
together with an exclusive truncation bound ``cutoff``: the series is exact
for all exponents below ``cutoff`` and says nothing beyond it.  Exponents may
be negative, so nonzero series are invertible.  ``cutoff = math.inf`` marks a
series that is exact at every order (a Laurent polynomial in ``T``).

Products and sums track the largest cutoff that the inputs justify, so a
computation never silently claims more orders than it knows.  Operations that
genuinely produce infinite series (inverse, exponential) truncate at an
explicit or defaulted cutoff; the default keeps ``DEFAULT_ORDERS`` orders
beyond the leading exponent, which is enough for every identity this package
verifies.

Coefficients below ``ZERO_TOL`` relative to the largest coefficient magnitude
are dropped, with an absolute floor of ``ZERO_FLOOR``; the zero series is the
empty term list and has valuation ``+inf``.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from .errors import (
    ExponentOverflow,
    Malformed,
    NegativeValuation,
    OutOfRange,
    ZeroSeries,
)

INF = math.inf
ZERO_TOL = 1e-12
ZERO_FLOOR = 1e-300
DEFAULT_ORDERS = Fraction(4)

# exponent components must fit in 64 bits
_EXP_BOUND = 1 << 63

RationalLike = Union[Fraction, int, str]
Cutoff = Union[Fraction, float]


def rational(x: RationalLike) -> Fraction:
    """Coerce ``x`` (Fraction, int, or a "p/q" string) to a bounded Fraction."""
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, int):
        f = Fraction(x)
    elif isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise Malformed(f"not a rational: {x!r}") from err
    elif isinstance(x, float) and x == math.inf:
        return x  # type: ignore[return-value]  # +inf passes through for cutoffs
    else:
        raise Malformed(f"not a rational: {x!r}")
    if abs(f.numerator) >= _EXP_BOUND or f.denominator >= _EXP_BOUND:
        raise ExponentOverflow(f"exponent components exceed 64 bits: {f}")
    return f


def format_rational(f: Union[Fraction, float]) -> str:
    if f == INF:
        return "inf"
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


class NovikovSeries:
    """Immutable truncated Novikov series."""

    __slots__ = ("terms", "cutoff")

    def __init__(
        self,
        terms: Iterable[tuple[RationalLike, complex]] = (),
        cutoff: Cutoff = INF,
    ):
        if cutoff != INF:
            cutoff = rational(cutoff)
        acc: dict[Fraction, complex] = {}
        for e, c in terms:
            e = rational(e)
            if e >= cutoff:
                continue
            acc[e] = acc.get(e, 0j) + complex(c)
        if acc:
            top = max(abs(c) for c in acc.values())
            tol = max(ZERO_TOL * top, ZERO_FLOOR)
            kept = sorted((e, c) for e, c in acc.items() if abs(c) > tol)
        else:
            kept = []
        object.__setattr__(self, "terms", tuple(kept))
        object.__setattr__(self, "cutoff", cutoff)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("NovikovSeries is immutable")

    # --- constructors ---

    @classmethod
    def zero(cls, cutoff: Cutoff = INF) -> "NovikovSeries":
        return cls((), cutoff)

    @classmethod
    def scalar(cls, c: complex, cutoff: Cutoff = INF) -> "NovikovSeries":
        return cls(((Fraction(0), complex(c)),), cutoff)

    @classmethod
    def monomial(
        cls, c: complex, e: RationalLike, cutoff: Cutoff = INF
    ) -> "NovikovSeries":
        return cls(((rational(e), complex(c)),), cutoff)

    @classmethod
    def T(cls, e: RationalLike = 1) -> "NovikovSeries":
        return cls.monomial(1.0, e)

    # --- basic queries ---

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Union[Fraction, float]:
        """Smallest exponent; +inf for the zero series."""
        return self.terms[0][0] if self.terms else INF

    def is_integral(self) -> bool:
        """Valuation >= 0: lies in the unit-disc subring."""
        return self.valuation() >= 0

    def is_topologically_nilpotent(self) -> bool:
        """Valuation > 0: lies in the maximal ideal of the subring."""
        return self.valuation() > 0

    def leading(self) -> tuple[Fraction, complex]:
        if not self.terms:
            raise ZeroSeries("zero series has no leading term")
        return self.terms[0]

    def coefficient(self, e: RationalLike) -> complex:
        e = rational(e)
        for ee, c in self.terms:
            if ee == e:
                return c
        return 0j

    def max_abs_coeff(self) -> float:
        return max((abs(c) for _, c in self.terms), default=0.0)

    # --- ring operations ---

    def __add__(self, other) -> "NovikovSeries":
        other = _coerce(other)
        return NovikovSeries(
            self.terms + other.terms, min(self.cutoff, other.cutoff)
        )

    __radd__ = __add__

    def __neg__(self) -> "NovikovSeries":
        return NovikovSeries(((e, -c) for e, c in self.terms), self.cutoff)

    def __sub__(self, other) -> "NovikovSeries":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "NovikovSeries":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "NovikovSeries":
        other = _coerce(other)
        # exact up to min(cut_a + v(b), cut_b + v(a))
        cut = min(
            _shifted(self.cutoff, other.valuation()),
            _shifted(other.cutoff, self.valuation()),
        )
        prod = [
            (ea + eb, ca * cb)
            for ea, ca in self.terms
            for eb, cb in other.terms
        ]
        return NovikovSeries(prod, cut)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "NovikovSeries":
        return self * _coerce(other).inverse()

    def __pow__(self, k: int) -> "NovikovSeries":
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k < 0:
            return self.inverse() ** (-k)
        out = NovikovSeries.scalar(1.0)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: complex) -> "NovikovSeries":
        return NovikovSeries(((e, v * c) for e, v in self.terms), self.cutoff)

    def shift(self, delta: RationalLike) -> "NovikovSeries":
        """Multiply by T^delta (exact exponent shift)."""
        delta = rational(delta)
        return NovikovSeries(
            ((e + delta, c) for e, c in self.terms),
            _shifted(self.cutoff, delta),
        )

    def truncate(self, kappa: RationalLike) -> "NovikovSeries":
        """Drop all terms with exponent >= kappa; tightens the cutoff."""
        kappa = rational(kappa)
        return NovikovSeries(self.terms, min(self.cutoff, kappa))

    def inverse(self, cutoff: Cutoff | None = None) -> "NovikovSeries":
        """Geometric-series inverse of a nonzero series.

        Writes ``a = c T^lam (1 + r)`` with v(r) > 0 and sums
        ``c^-1 T^-lam * sum (-r)^k`` up to ``cutoff``.  The default cutoff is
        ``a.cutoff - 2 lam`` (so ``a * a.inverse() = 1`` holds up to
        ``a.cutoff - lam``), or exact/``-lam + DEFAULT_ORDERS`` when ``a`` has
        no truncation bound.
        """
        if not self.terms:
            raise ZeroSeries("cannot invert the zero series")
        lam, c = self.terms[0]
        if cutoff is None:
            if self.cutoff != INF:
                cutoff = self.cutoff - 2 * lam
            elif len(self.terms) == 1:
                cutoff = INF
            else:
                cutoff = -lam + DEFAULT_ORDERS
        elif cutoff != INF:
            cutoff = rational(cutoff)
        r = NovikovSeries(
            ((e - lam, v / c) for e, v in self.terms[1:]),
            _shifted(self.cutoff, -lam),
        )
        work = _shifted(cutoff, lam)  # cutoff for sum (-r)^k
        acc = NovikovSeries.scalar(1.0, work)
        pw = NovikovSeries.scalar(1.0, work)
        neg_r = (-r).truncate(work) if work != INF else -r
        while not pw.is_zero():
            pw = pw * neg_r
            if pw.valuation() >= work:
                break
            acc = acc + pw
        return acc.scale(1.0 / c).shift(-lam).truncate(cutoff) \
            if cutoff != INF else acc.scale(1.0 / c).shift(-lam)

    def exp(self, cutoff: Cutoff | None = None) -> "NovikovSeries":
        """exp of a series with valuation >= 0.

        Splits ``a = c + a_+`` at exponent 0 and returns
        ``e^c * sum a_+^k / k!`` truncated at ``cutoff``.
        """
        if self.terms and self.terms[0][0] < 0:
            raise NegativeValuation(
                f"exp needs valuation >= 0, got {self.terms[0][0]}"
            )
        c = self.coefficient(0)
        plus = NovikovSeries(
            ((e, v) for e, v in self.terms if e != 0), self.cutoff
        )
        if cutoff is None:
            if self.cutoff != INF:
                cutoff = self.cutoff
            elif plus.is_zero():
                cutoff = INF
            else:
                cutoff = DEFAULT_ORDERS
        elif cutoff != INF:
            cutoff = rational(cutoff)
        acc = NovikovSeries.scalar(1.0, cutoff)
        pw = NovikovSeries.scalar(1.0, cutoff)
        k = 0
        fact = 1.0
        while not pw.is_zero():
            k += 1
            fact *= k
            pw = pw * plus
            if pw.valuation() >= cutoff:
                break
            acc = acc + pw.scale(1.0 / fact)
        return acc.scale(cmath.exp(c))

    # --- numeric specialization ---

    def eval(self, t: float) -> complex:
        """Evaluate at a real 0 < t < 1, summing in increasing-exponent order."""
        if not (isinstance(t, (int, float)) and 0.0 < t < 1.0):
            raise OutOfRange(f"t must lie in (0,1), got {t!r}")
        total = 0j
        for e, c in self.terms:
            total += c * (t ** float(e))
        return total

    # --- comparison helpers ---

    def distance(self, other: "NovikovSeries") -> float:
        """Max coefficient difference below the shared cutoff, relative to the
        largest coefficient magnitude of the two series (0 if both are zero)."""
        other = _coerce(other)
        cut = min(self.cutoff, other.cutoff)
        exps = {e for e, _ in self.terms if e < cut}
        exps |= {e for e, _ in other.terms if e < cut}
        if not exps:
            return 0.0
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), ZERO_FLOOR)
        return max(
            abs(self.coefficient(e) - other.coefficient(e)) for e in exps
        ) / scale

    def isclose(self, other, tol: float = 1e-10) -> bool:
        return self.distance(_coerce(other)) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, (NovikovSeries, int, float, complex)):
            return NotImplemented
        other = _coerce(other)
        return self.terms == other.terms and self.cutoff == other.cutoff

    def __hash__(self):
        return hash((self.terms, self.cutoff))

    # --- text form ---

    def __str__(self) -> str:
        return format_series(self)

    def __repr__(self) -> str:
        return f"NovikovSeries({format_series(self)!r})"


def _coerce(x) -> NovikovSeries:
    if isinstance(x, NovikovSeries):
        return x
    if isinstance(x, (int, float, complex)):
        return NovikovSeries.scalar(x)
    raise TypeError(f"cannot coerce {x!r} to NovikovSeries")


def _shifted(cutoff: Cutoff, delta: Union[Fraction, float]) -> Cutoff:
    """cutoff + delta with +inf absorbing (delta = +inf means a zero operand,
    which is exact at every order)."""
    if cutoff == INF or delta == INF:
        return INF
    return cutoff + delta


# --- series literal text form: "(re,im)*T^(p/q) + ..." ---

_TERM_RE = re.compile(
    r"^\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)"     # (re,im)
    r"(?:\s*\*\s*T(?:\^\(\s*(-?\d+(?:/\d+)?)\s*\))?)?$"  # optional *T^(p/q)
)


def parse_series(text: str, cutoff: Cutoff = INF) -> NovikovSeries:
    """Parse the literal form ``(re,im)*T^(p/q) + ...``.

    The exponent part may be omitted for exponent 0; a bare ``*T`` means
    exponent 1.  Whitespace is ignored.
    """
    text = text.strip()
    if not text or text == "0":
        return NovikovSeries.zero(cutoff)
    terms = []
    for chunk in _split_terms(text):
        m = _TERM_RE.match(chunk.strip())
        if not m:
            raise Malformed(f"bad series term: {chunk!r}")
        re_s, im_s, exp_s = m.groups()
        try:
            coeff = complex(float(re_s), float(im_s))
        except ValueError as err:
            raise Malformed(f"bad coefficient in {chunk!r}") from err
        if exp_s is None:
            exp = Fraction(1) if "T" in chunk else Fraction(0)
        else:
            exp = rational(exp_s)
        terms.append((exp, coeff))
    return NovikovSeries(terms, cutoff)


def _split_terms(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [c for c in out if c.strip()]


def format_series(a: NovikovSeries) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        coeff = f"({_fmt_float(c.real)},{_fmt_float(c.imag)})"
        if e == 0:
            parts.append(coeff)
        else:
            parts.append(f"{coeff}*T^({format_rational(e)})")
    return " + ".join(parts)


def _fmt_float(x: float) -> str:
    return repr(x + 0.0)  # +0.0 normalizes -0.0


# --- random series for property suites ---

def random_series(
    rng: np.random.Generator,
    max_terms: int = 5,
    denom_bound: int = 12,
    exp_range: tuple[int, int] = (-3, 6),
    nonzero: bool = False,
    dominant: bool = False,
    cutoff: Cutoff = INF,
) -> NovikovSeries:
    """Random series with rational exponents (denominators <= denom_bound).

    dominant=True scales the leading coefficient above the rest, which keeps
    the inverse well conditioned: a series whose tail dominates its leading
    term has inverse coefficients that grow geometrically with the order, and
    no fixed float tolerance survives that.
    """
    k = int(rng.integers(0 if not nonzero else 1, max_terms + 1))
    terms = []
    for _ in range(k):
        den = int(rng.integers(1, denom_bound + 1))
        num = int(rng.integers(exp_range[0] * den, exp_range[1] * den + 1))
        coeff = complex(rng.normal(), rng.normal())
        terms.append((Fraction(num, den), coeff))
    s = NovikovSeries(terms, cutoff)
    if nonzero and s.is_zero():
        return NovikovSeries.scalar(1.0 + 0j, cutoff)
    if dominant and len(s.terms) > 1:
        lead_e, lead_c = s.terms[0]
        top = max(abs(c) for _, c in s.terms[1:])
        boost = 2.0 * top / abs(lead_c)
        if boost > 1.0:
            s = NovikovSeries(
                ((lead_e, lead_c * boost),) + s.terms[1:], s.cutoff
            )
    return s
