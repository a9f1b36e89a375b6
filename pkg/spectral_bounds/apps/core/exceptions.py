"""
Exceptions shared by every app of the project.

Each exception carries the process exit code the harness reports for it.
"""

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG_ERROR = 2


class SpectralBoundsException(Exception):
    """Base exception for the project"""

    exit_code = EXIT_CONFIG_ERROR


class InvalidGeometryError(SpectralBoundsException):
    pass


class DecompositionError(SpectralBoundsException):
    def __init__(self, message: str, face_index: int):
        super().__init__(message)
        self.face_index = face_index


class DomainError(SpectralBoundsException, ValueError):
    """Argument outside the mathematical domain of a formula"""


class ResolutionError(SpectralBoundsException):
    pass


class ConvergenceError(SpectralBoundsException):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals if residuals is not None else []


class SpectrumRangeError(SpectralBoundsException):
    pass


class SpectrumMismatchError(SpectralBoundsException):
    pass


class ResourceLimitError(SpectralBoundsException):
    pass


class ConfigError(SpectralBoundsException):
    pass


class PreconditionError(SpectralBoundsException):
    pass


class ConsistencyError(SpectralBoundsException):
    """An internal invariant failed; carries the values that broke it"""

    exit_code = EXIT_VIOLATION

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
