"""Exception hierarchy shared by every module of the package."""


class BoussinesqLabError(Exception):
    """Base class for all package errors."""


class NegativeCoefficient(BoussinesqLabError, ValueError):
    """A dissipation coefficient or the stratification slope is negative."""


class AlphaNotZero(BoussinesqLabError, ValueError):
    """A closed form valid only for a homogeneous background was called with alpha != 0."""


class ZeroK(BoussinesqLabError, ValueError):
    """The x-average channel (k = 0) was passed where k != 0 is required."""


class OutOfBranch(BoussinesqLabError, ValueError):
    """The growth-exponent formula left its real branch (alpha > 1/4).

    ``real_part`` carries the real part of the exponent, ``oscillatory`` is
    always True for this error.
    """

    def __init__(self, alpha, real_part=0.25):
        super().__init__(
            f"alpha={alpha!r} > 1/4: exponent is complex, real part {real_part}"
        )
        self.alpha = alpha
        self.real_part = real_part
        self.oscillatory = True


class QuadratureFailure(BoussinesqLabError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance within the budget."""


class StepSizeUnderflow(BoussinesqLabError, RuntimeError):
    """The adaptive step-size controller drove dt below its floor."""


class CflViolation(BoussinesqLabError, RuntimeError):
    """The advective CFL bound failed for the requested time step."""


class NonPositiveValues(BoussinesqLabError, ValueError):
    """A log-space fit received zero or negative samples inside its window."""


class WindowTooSmall(BoussinesqLabError, ValueError):
    """A fit window holds fewer samples than the fit requires."""


class ParseError(BoussinesqLabError, ValueError):
    """A scenario file is not syntactically valid."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(BoussinesqLabError, ValueError):
    """A scenario parsed but is missing a field or holds an invalid value."""

    def __init__(self, message, field=None, reason=None):
        super().__init__(message)
        self.field = field
        self.reason = reason
