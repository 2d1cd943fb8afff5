class SolverError(Exception):
    """Raised when a computation fails for numeric reasons."""
    EXIT_CODE = 3


class UnsupportedCaseError(SolverError):
    """Raised when no reduction exists for the requested (set, k, i)."""
    EXIT_CODE = 2


class DomainError(SolverError):
    """Raised when an argument lies outside the domain of a map or formula."""
    EXIT_CODE = 2


class NonMonotoneMapError(DomainError):
    """Raised when a map expected to be strictly decreasing is not."""
    EXIT_CODE = 2


class SizeGuardError(SolverError):
    """Raised when a finite tree exceeds the enumeration size guard."""
    EXIT_CODE = 2


class NumericRangeError(SolverError):
    """Raised when an evaluation overflows or produces non-finite values."""
    EXIT_CODE = 3


class ConvergenceError(SolverError):
    """Raised when a root or fixed point cannot be located."""
    EXIT_CODE = 3


class UsageError(Exception):
    """Raised for malformed command-line usage."""
    EXIT_CODE = 64


class UnknownTheoremError(UsageError):
    """Raised when a verification id is not registered."""
    EXIT_CODE = 64
