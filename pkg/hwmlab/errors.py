"""
Exception hierarchy shared by every hwmlab module
"""


class HwmLabError(Exception):
    """Root of all laboratory errors."""


class MeanNotZero(HwmLabError, ValueError):
    """Negative-order multiplier applied to a field with nonzero mean."""


class ParameterOutOfRange(HwmLabError, ValueError):
    """A parameter violates the hypotheses of the estimate being measured."""


class UnsupportedDimension(HwmLabError, ValueError):
    pass


class SupportTooWide(HwmLabError, ValueError):
    """Oracle inputs are not localized enough to emulate the whole line."""


class GridMismatch(HwmLabError, ValueError):
    pass


class ConstraintViolation(HwmLabError, ValueError):
    """A field meant to be sphere-valued is not unit length."""


class NonFiniteField(HwmLabError, ValueError):
    pass


class StepUnstable(HwmLabError, ArithmeticError):
    """A time step produced non-finite values."""


class DegenerateEnergy(HwmLabError, ArithmeticError):
    """The perturbed pair starts with zero difference energy."""


class ConfigError(HwmLabError, ValueError):
    pass


class FieldFormatError(HwmLabError, ValueError):
    """Malformed HWMF field dump."""
