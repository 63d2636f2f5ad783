"""Leading-digit analysis: phases, digit-block frequencies, profiles G(s),
their integral representations, inversion, scaling and Weibull fitting."""

__version__ = "0.1.0"

from .digitcore import (
    MAX_BLOCK_LEN,
    BlockFrequencyTable,
    Dataset,
    DigitBlock,
    LogPhase,
    canonicalize,
    empirical_block_freq,
    empirical_profile,
    indicator_V,
    leading_block,
    log_phase,
    window_M,
)
from .errors import (
    ConvergenceError,
    DegenerateWindowError,
    DomainError,
    EmptyInputError,
    LeadDigitsError,
    NonDifferentiableError,
    NormalizationError,
    ResolutionError,
    TruncationError,
    ValidationError,
)
from .profile import CDM, AnalyticProfile, EmpiricalProfile, Profile, TabulatedProfile
from .profiles import (
    PowerLawParams,
    WindowSpec,
    benford_profile,
    powerlaw_profile,
    ratio_uniforms_profile,
    rho_asymptotic,
    rho_from_profile,
    rho_two_term,
)

__all__ = [
    "__version__",
    "MAX_BLOCK_LEN",
    "BlockFrequencyTable",
    "Dataset",
    "DigitBlock",
    "LogPhase",
    "canonicalize",
    "empirical_block_freq",
    "empirical_profile",
    "indicator_V",
    "leading_block",
    "log_phase",
    "window_M",
    "ConvergenceError",
    "DegenerateWindowError",
    "DomainError",
    "EmptyInputError",
    "LeadDigitsError",
    "NonDifferentiableError",
    "NormalizationError",
    "ResolutionError",
    "TruncationError",
    "ValidationError",
    "CDM",
    "AnalyticProfile",
    "EmpiricalProfile",
    "Profile",
    "TabulatedProfile",
    "PowerLawParams",
    "WindowSpec",
    "benford_profile",
    "powerlaw_profile",
    "ratio_uniforms_profile",
    "rho_asymptotic",
    "rho_from_profile",
    "rho_two_term",
]
