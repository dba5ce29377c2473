"""Exception family shared across the library.

Every error raised on a documented failure path derives from EntireLabError,
so callers (and the command line driver) can separate computational failures
from genuine bugs.
"""


class EntireLabError(Exception):
    """Base class for all documented failure modes."""

    code = "EntireLabError"

    def payload(self):
        return {"error": self.code, "message": str(self)}


class OutsideRegionError(EntireLabError):
    """Point lies outside the region a metric or scan is defined on."""

    code = "OutsideRegion"


class OverflowAtPointError(EntireLabError):
    """Evaluation overflowed where a finite value was required."""

    code = "OverflowAtPoint"


class OverflowInChainError(EntireLabError):
    """An intermediate value of a composed evaluation overflowed."""

    code = "OverflowInChain"


class NoSampleSatisfiesConstraintError(EntireLabError):
    """Scan constraint filtered out every sample point."""

    code = "NoSampleSatisfiesConstraint"


class CriticalBasepointError(EntireLabError):
    """Inverse-branch continuation started at a critical point."""

    code = "CriticalBasepoint"


class BudgetExhaustedError(EntireLabError):
    """Iteration or continuation budget ran out before a verdict."""

    code = "BudgetExhausted"


class NotIsolatedSingularValueError(EntireLabError):
    code = "NotIsolatedSingularValue"


class UContainsCriticalValuesError(EntireLabError):
    code = "UContainsCriticalValues"


class NotASingularValueError(EntireLabError):
    code = "NotASingularValue"


class RadiusTooSmallError(EntireLabError):
    """Circle too small to meet a tract's configured inner radius."""

    code = "RadiusTooSmall"


class ContinuationBreakdownError(EntireLabError):
    """Fixed-point path lost its Newton certificate or turned parabolic."""

    code = "ContinuationBreakdown"


class ZeroOnContourError(EntireLabError):
    """Winding-number integrand vanished on the contour."""

    code = "ZeroOnContour"


class StepLimitExceededError(EntireLabError):
    """Adaptive argument tracking refused to refine further."""

    code = "StepLimitExceeded"


class NoRootInDiscError(EntireLabError):
    """Root search found winding number zero on the search disc."""

    code = "NoRootInDisc"
