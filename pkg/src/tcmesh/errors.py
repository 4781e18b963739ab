"""Exception hierarchy. Each error carries a short machine-readable reason."""


class TcmeshError(ValueError):
    reason = "error"

    def __init__(self, message: str | None = None, reason: str | None = None):
        if reason is not None:
            self.reason = reason
        super().__init__(message or self.reason)


class ParseError(TcmeshError):
    """Raised in strict mode on the first bad row, or on a bad header."""

    reason = "parse-error"

    def __init__(self, message: str, line_no: int | None = None, reason: str | None = None):
        self.line_no = line_no
        super().__init__(message, reason)


class BalanceMissing(TcmeshError):
    reason = "balance-missing"


class NoUsableCustomers(TcmeshError):
    reason = "no-usable-customers"


class DegenerateDenominator(TcmeshError):
    reason = "degenerate-denominator"


class DegenerateVariance(TcmeshError):
    reason = "degenerate-variance"


class InsufficientData(TcmeshError):
    reason = "insufficient-data"


class InvariantViolation(TcmeshError):
    reason = "invariant-violation"
