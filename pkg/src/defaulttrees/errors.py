"""Exception types shared across the package."""


class DefaultTreeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDiagramError(DefaultTreeError):
    """A diagram failed validation and cannot be used for inference."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid diagram: {lines}")


class SchemaError(DefaultTreeError):
    """A model or tree document does not match the expected schema."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class IllegalAssignmentError(DefaultTreeError):
    """An evidence path names an unknown item or an illegal value."""


class ZeroProbabilityPathError(DefaultTreeError):
    """Conditioning on a path with probability zero."""


class ItemAlreadyObservedError(DefaultTreeError):
    """An evidence item appears twice along one path."""


class ClosedNodeError(DefaultTreeError):
    """Attempted to expand a closed default node."""


class IllegalResponseError(DefaultTreeError):
    """A walk response is not among the current item's values."""


class FingerprintMismatchError(DefaultTreeError):
    """A tree file does not belong to the given model file."""


class BudgetTooLargeError(DefaultTreeError):
    """Exhaustive search space exceeds the hard-coded cap."""


class OracleCapError(DefaultTreeError):
    """Instance exceeds the oracle's desk-scale limits."""


class NoEvidenceItemsWarning(UserWarning):
    """Compilation requested on a diagram without evidence items."""
