"""
Exception hierarchy for the lab.

Every error carries a human-readable ``detail`` string; the CLI logs it and maps
the exception class to an exit code.
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all lab errors"""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ArgumentError(LabError, ValueError):
    """Malformed or inconsistent arguments (dimension mismatch, too few samples, bad config keys)"""


class DomainError(LabError, ValueError):
    """A point or parameter lies outside the domain of the operation"""


class RangeError(LabError, ValueError):
    """A series evaluation was requested beyond its certified range"""


class NumericError(LabError, ArithmeticError):
    """Quadrature or root finding failed to converge"""

    def __init__(self, detail: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.diagnostics = diagnostics or {}


class ConditioningError(NumericError):
    """Gram matrix too ill-conditioned for a stable solve"""

    def __init__(self, detail: str, condition: float):
        super().__init__(detail, {"condition": condition})
        self.condition = condition


class TruncationMarginError(NumericError):
    """The truncated random series never passed its margin test"""


class ContractError(LabError):
    """The caller violated a structural precondition (non-radial statistic, wrong kind)"""


class AdmissibilityError(ContractError):
    """A weight is not integrable or not Bergman-admissible"""


class WindowError(ContractError):
    """A radial profile reaches outside the sampled window"""


class DegenerateConfigurationError(LabError):
    """The configuration carries no Poincaré mass at the evaluation point"""


class ArchiveError(LabError, OSError):
    """Reading or writing an archive failed"""

    def __init__(self, detail: str, path: Optional[str] = None):
        super().__init__(f"{detail} (path: {path})" if path else detail)
        self.path = path
