"""Exception and warning types shared across the package."""


class NumericalPrecisionError(ArithmeticError):
    """A computation could not reach its stated accuracy."""


class PrecisionWarning(RuntimeWarning):
    """Significant cancellation or loss of digits was detected."""


class SamplerDiagnosticsError(RuntimeError):
    """A Monte Carlo run failed its tuning or audit checks."""
