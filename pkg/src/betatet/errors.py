"""Signal types and per-element status codes.

Numerical failure here is a *signal*, not an exception in the mathematics:
deep exponential towers overflow doubles by design, log pullbacks can land
on the principal branch cut, and the map families have excluded lattice
points.  Scalar APIs raise; grid APIs return a status plane instead.
"""

# status codes used by the grid kernels and grid-level evaluators
OK = 0
SINGULAR = 1
SHORT_CIRCUIT = 2
NONFINITE = 3
BRANCH_CUT = 4
DOMAIN = 5

STATUS_NAMES = {
    OK: "ok",
    SINGULAR: "singular",
    SHORT_CIRCUIT: "short_circuit",
    NONFINITE: "nonfinite",
    BRANCH_CUT: "branch_cut",
    DOMAIN: "domain",
}

# e^x overflows IEEE doubles just past x = 709; the guard trips early so the
# pre-overflow iterate is still representable.
OVERFLOW_GUARD = 700.0

# exclusion radius around the singular lattice, measured in the exponent
# coordinate lambda*(j - s)
SINGULAR_RADIUS = 1e-9


class BetaTetError(Exception):
    """Base class for all evaluation signals."""


class ShortCircuit(BetaTetError):
    """Overflow guard tripped: an intermediate would exceed double range.

    Carries the last finite iterate when one exists.
    """

    def __init__(self, message="overflow guard tripped", last_value=None, terms_used=None):
        super().__init__(message)
        self.last_value = last_value
        self.terms_used = terms_used


# composition-engine name for the same signal
Overflow = ShortCircuit


class SingularPoint(BetaTetError):
    """Evaluation point within the exclusion radius of the singular lattice."""


class NonFinite(BetaTetError):
    """An evaluator produced NaN (or was fed non-finite input)."""


class BudgetExhausted(BetaTetError):
    """Adaptive truncation hit max_terms before reaching tail tolerance.

    The partial result is still available as .result.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class BranchCut(BetaTetError):
    """Evaluation point on (or within 1e-9 of) the cut (-inf, -2]."""


class CalibrationFailed(BetaTetError):
    """No bracket for the normalization shift found in the scan range."""


class NoConvergence(BetaTetError):
    """Newton iteration failed to converge within its step budget."""


class DomainError(BetaTetError):
    """Input outside the implemented domain (e.g. complex slog branch)."""


_STATUS_EXC = {
    SINGULAR: SingularPoint,
    SHORT_CIRCUIT: ShortCircuit,
    NONFINITE: NonFinite,
    BRANCH_CUT: BranchCut,
    DOMAIN: DomainError,
}


def raise_for_status(code, context=""):
    """Raise the signal matching a nonzero grid status code."""
    if code == OK:
        return
    exc = _STATUS_EXC.get(int(code), BetaTetError)
    name = STATUS_NAMES.get(int(code), str(code))
    raise exc(f"{name}{': ' + context if context else ''}")
