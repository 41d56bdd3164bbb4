"""Exception hierarchy shared by all sandcal modules."""


class SandcalError(Exception):
    """Base class for all errors raised by sandcal."""


class ParameterDomainError(SandcalError):
    """A constitutive parameter is outside its mathematical domain."""


class AdmissibilityError(SandcalError):
    """A soil state violates the admissibility conditions of the model."""


class InfeasibleCandidateError(SandcalError):
    """A candidate cannot be simulated (e.g. no real root of the
    triaxial closure); the caller converts this into a cost penalty."""


class InputDataError(SandcalError):
    """Test data or derived quantities are inconsistent."""


class ConfigError(SandcalError):
    """Invalid optimizer or run configuration."""


class ParseError(InputDataError):
    """A user-facing input-file error carrying file and line context."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
