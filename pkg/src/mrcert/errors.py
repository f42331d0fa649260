"""Exception types raised across the package."""


class MrcertError(Exception):
    """Base class for all errors raised by this package."""


class OccurrenceDeficit(MrcertError):
    def __init__(self, value: int, count: int, required: int):
        self.value = value
        self.count = count
        self.required = required
        super().__init__(f"value {value} occurs {count} times, need at least {required}")


class PrefixViolation(MrcertError):
    def __init__(self, position: int, smaller: int):
        self.position = position
        self.smaller = smaller
        super().__init__(
            f"prefix condition fails at position {position}: "
            f"{smaller} occurs too few times before it"
        )


class ShiftOutOfRange(MrcertError):
    pass


class PreconditionViolated(MrcertError):
    pass


class RowAlreadyDropped(MrcertError):
    def __init__(self, row):
        self.row = tuple(row)
        super().__init__(f"row {self.row} is not among the remaining rows")


class RuleArityMismatch(MrcertError):
    pass


class MNotTwo(MrcertError):
    pass


class StepRejected(MrcertError):
    """A step whose rule conditions do not hold on the current state."""

    def __init__(self, diagnostic: str):
        self.diagnostic = diagnostic
        super().__init__(diagnostic)


class BudgetExhausted(MrcertError):
    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class CoverageGap(MrcertError):
    def __init__(self, column: int, value: int):
        self.column = column
        self.value = value
        super().__init__(f"column {column}: no usable row with a-value {value}")


class ReductionMismatch(MrcertError):
    pass


class NotInjective(MrcertError):
    pass


class NotExtendable(MrcertError):
    pass


class OutOfScope(MrcertError):
    pass


class DistinctnessFailure(MrcertError):
    pass


class HypothesisViolation(MrcertError):
    pass


class UnsupportedRank(MrcertError):
    pass


class InvalidSectionData(MrcertError):
    pass


class CertificateFormatError(MrcertError):
    pass
