"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Base class for input-contract violations."""


class LengthMismatchError(ValidationError):
    """Outcome and risk vectors differ in length."""


class EmptySampleError(ValidationError):
    """A sample must contain at least one individual."""


class NonBinaryOutcomeError(ValidationError):
    """An outcome value is neither 0 nor 1."""


class OutOfRangeRiskError(ValidationError):
    """A predicted risk lies outside [0, 1] or is not a number."""


class DegenerateSampleError(ValidationError):
    """All outcomes are identical, so no ROC curve exists."""


class AllZeroRisksError(ValidationError):
    """Every predicted risk is 0; the positive-group weights vanish."""


class AllOneRisksError(ValidationError):
    """Every predicted risk is 1; the negative-group weights vanish."""


class InvalidSimsError(ValidationError):
    """Monte Carlo replicate count below the supported minimum."""


class InvalidScenarioError(ValidationError):
    """Scenario parameters outside their family's domain."""


class DomainError(ValidationError):
    """Argument outside a numeric function's domain."""


class MissingColumnError(ValidationError):
    """A required CSV column is absent."""


class CsvParseError(ValidationError):
    """A CSV cell failed to parse; message carries the 1-based row."""


class NumericError(ArithmeticError):
    """Base class for numeric-procedure failures."""


class SeparationDetectedError(NumericError):
    """Logistic fit diverged (quasi-complete separation)."""


class NonConvergenceError(NumericError):
    """Iterative procedure exhausted its iteration budget."""


class InfiniteLogitError(ValidationError):
    """logit() of a risk equal to 0 or 1 was requested."""


class ConfigError(Exception):
    """Power-study configuration file is malformed; message carries the location."""
