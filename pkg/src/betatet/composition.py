"""Generic evaluator for finite and adaptively-truncated infinite compositions.

A composition of terms H_1, ..., H_n at (s, z0) is the nested value
H_1(s, H_2(s, ... H_n(s, z0))), evaluated innermost-first.  Truncation of the
infinite composition is controlled by the tail sum of |H_j(s, A) - A| around
the attracting value A: once the remaining tail drops below tolerance, adding
terms can no longer move the result by more than a constant multiple of it.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import (
    OVERFLOW_GUARD,
    BudgetExhausted,
    NonFinite,
    ShortCircuit,
)


@dataclass(frozen=True)
class CompositionTerm:
    """One term H_j(s, z); evaluator must be a pure function of (s, z)."""

    index: int
    evaluator: Callable[[complex, complex], complex]

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("term index must be >= 1")


@dataclass(frozen=True)
class CompositionResult:
    value: complex
    terms_used: int
    tail_estimate: float
    short_circuited: bool = False

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")
        if self.tail_estimate < 0:
            raise ValueError("tail_estimate must be >= 0")


def compose_finite(terms, s, z0=0j):
    """Evaluate H_1(s, H_2(s, ... H_n(s, z0))), index n applied first.

    Raises ShortCircuit when an intermediate's real part exceeds the overflow
    guard (the next exponential would leave double range), NonFinite when an
    evaluator returns NaN.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("compose_finite requires at least one term")
    z = complex(z0)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFinite("z0 is not finite")
    applied = 0
    for term in reversed(terms):
        if z.real > OVERFLOW_GUARD and applied > 0:
            raise ShortCircuit(
                f"intermediate Re {z.real:.3g} exceeds guard after {applied} terms",
                last_value=z,
                terms_used=applied,
            )
        z_new = complex(term.evaluator(s, z))
        if cmath.isnan(z_new):
            raise NonFinite(f"term {term.index} returned NaN")
        if cmath.isinf(z_new):
            raise ShortCircuit(
                f"term {term.index} overflowed", last_value=z, terms_used=applied
            )
        z = z_new
        applied += 1
    return z


def _empirical_tail(term_factory, s, attracting, n):
    """Geometric extrapolation of sum_{j>n} |H_j(s, A) - A| from the last ratio."""
    a = complex(attracting)
    h_n = abs(term_factory(n).evaluator(s, a) - a)
    h_prev = abs(term_factory(max(1, n - 1)).evaluator(s, a) - a)
    if h_n == 0.0:
        return 0.0
    if h_prev == 0.0 or h_n >= h_prev:
        return math.inf
    r = h_n / h_prev
    return h_n * r / (1.0 - r)


def compose_adaptive(term_factory, s, z0=0j, tail_tolerance=1e-12, max_terms=512,
                     attracting=0j):
    """Compose factory terms until the tail majorant drops below tolerance.

    term_factory maps an index j >= 1 to a CompositionTerm.  When the factory
    carries a ``tail_bound(n, s) -> float`` attribute (a closed-form bound on
    the remaining sum), it is used directly; otherwise the tail is estimated
    from the observed geometric decay of |H_j(s, A) - A|.

    Raises BudgetExhausted (carrying the partial CompositionResult) when
    max_terms is reached first.  An overflow during the final composition is
    returned in-band via short_circuited=True with the last finite iterate.
    """
    if tail_tolerance <= 0:
        raise ValueError("tail_tolerance must be positive")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    bound = getattr(term_factory, "tail_bound", None)

    n = 1
    tail = math.inf
    while n <= max_terms:
        tail = bound(n, s) if bound is not None else _empirical_tail(term_factory, s, attracting, n)
        if tail < tail_tolerance:
            break
        n += 1
    exhausted = n > max_terms
    if exhausted:
        n = max_terms

    terms = [term_factory(j) for j in range(1, n + 1)]
    try:
        value = compose_finite(terms, s, z0)
        result = CompositionResult(value=value, terms_used=n,
                                   tail_estimate=float(tail), short_circuited=False)
    except ShortCircuit as sc:
        result = CompositionResult(value=sc.last_value if sc.last_value is not None else 0j,
                                   terms_used=max(1, sc.terms_used or 1),
                                   tail_estimate=float(tail), short_circuited=True)
    if exhausted:
        raise BudgetExhausted(
            f"tail {tail:.3g} still above tolerance {tail_tolerance:.3g} "
            f"after {max_terms} terms", result)
    return result
