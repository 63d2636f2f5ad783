"""Exception types shared across the package."""


class LeadDigitsError(Exception):
    """Base class for all package errors."""


class DomainError(LeadDigitsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EmptyInputError(LeadDigitsError, ValueError):
    """An operation that needs data received none."""


class NormalizationError(LeadDigitsError, ValueError):
    """A density or generating function does not integrate to the required mass."""

    def __init__(self, message, measured=None):
        super().__init__(message)
        self.measured = measured


class TruncationError(LeadDigitsError, ValueError):
    """Decade truncation lost more probability mass than allowed."""

    def __init__(self, message, lost_mass=None):
        super().__init__(message)
        self.lost_mass = lost_mass


class NonDifferentiableError(LeadDigitsError, ValueError):
    """A derivative was requested at a jump or kink."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DegenerateWindowError(LeadDigitsError, ValueError):
    """A decade window carries no probability mass."""


class ValidationError(LeadDigitsError, ValueError):
    """Input data violates a structural precondition (e.g. monotonicity)."""


class ResolutionError(LeadDigitsError, ValueError):
    """A discretization grid is too coarse for a stable solve."""


class ConvergenceError(LeadDigitsError, ArithmeticError):
    """An iterative numerical method failed to meet its tolerance."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state
