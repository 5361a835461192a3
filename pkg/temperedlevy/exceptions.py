"""Exception utilities."""
from typing import Optional


class ParsingException(Exception):
    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        if line_number is not None:
            message = f"Line [{line_number}]: {message}"
        super(ParsingException, self).__init__(message)
        self.line_number = line_number


class EnvVariableNotSet(Exception):
    def __init__(self, varname: str) -> None:
        super(EnvVariableNotSet, self).__init__(f"Env variable [{varname}] not set.")


class ParameterError(Exception):
    pass


class NumericToleranceError(Exception):
    pass


class GammaPoleError(ParameterError):
    def __init__(self, x: float) -> None:
        super(GammaPoleError, self).__init__(f"Gamma function has a pole at [{x}].")


class GammaOverflowError(NumericToleranceError):
    def __init__(self, x: float) -> None:
        super(GammaOverflowError, self).__init__(
            f"Gamma function overflows at [{x}]."
        )


class DomainError(ParameterError):
    pass


class GridError(ParameterError):
    pass


class LengthError(ParameterError):
    pass


class UnsupportedSamplerError(ParameterError):
    def __init__(self, driver_name: str) -> None:
        super(UnsupportedSamplerError, self).__init__(
            f"Sampler for driver [{driver_name}] is not supported."
        )


class RegimeError(ParameterError):
    def __init__(self, target: str, d: float) -> None:
        super(RegimeError, self).__init__(
            f"Target [{target}] admits no integrand regime for d=[{d}]."
        )


class RegimeMismatchError(ParameterError):
    def __init__(self, first: str, second: str) -> None:
        super(RegimeMismatchError, self).__init__(
            f"Regimes [{first}] and [{second}] do not match."
        )


class LagMisalignedError(ParameterError):
    def __init__(self, lag: float, step: float) -> None:
        super(LagMisalignedError, self).__init__(
            f"Lag [{lag}] is not a multiple of the grid step [{step}]."
        )


class OffGridBreakpointError(ParameterError):
    def __init__(self, breakpoint: float) -> None:
        super(OffGridBreakpointError, self).__init__(
            f"Breakpoint [{breakpoint}] does not lie on the path grid."
        )


class QuadratureError(NumericToleranceError):
    pass


class TruncationError(NumericToleranceError):
    pass


class GridTooNarrowError(NumericToleranceError):
    def __init__(self, bound: float, tolerance: float) -> None:
        super(GridTooNarrowError, self).__init__(
            f"Truncation bound [{bound:.3e}] exceeds tolerance [{tolerance:.3e}]."
        )


class NonConvergenceError(NumericToleranceError):
    pass


class DegenerateFitError(NumericToleranceError):
    pass


class MissingSettingError(Exception):
    def __init__(self, key: str) -> None:
        super(MissingSettingError, self).__init__(
            f"Setting [{key}] is required, pass it as a flag or in the config file."
        )
