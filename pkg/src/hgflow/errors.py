"""Exception hierarchy shared by all hgflow modules."""


class HGFError(Exception):
    """Base class for every error raised by hgflow."""


class ConfigurationError(HGFError):
    pass


class SamplingError(HGFError):
    pass


class InvalidMetricError(HGFError):
    """Conformal factor is zero or negative somewhere."""


class BlowupRangeError(HGFError):
    """A quantity left the representable range (e.g. ``exp(phi)`` overflowed)."""


class NumericFault(HGFError):
    """Non-finite value produced inside the solver."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class NonTerminationError(HGFError):
    pass


class ContractError(HGFError):
    pass


class DomainError(HGFError):
    """Evaluation point outside the validity region of a closed-form solution."""


class BranchFoldError(DomainError):
    pass


class PastBlowupError(HGFError):
    pass


class FitError(HGFError):
    pass


class ExpressionError(HGFError):
    """Parse or evaluation failure; ``offset`` is the byte offset in the source."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)
        self.offset = offset
