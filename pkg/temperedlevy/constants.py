"""Contants for temperedlevy."""
import os
from typing import Callable, TypeVar

from .exceptions import EnvVariableNotSet

T = TypeVar("T")


def _from_env(varname: str, default: T, cast: Callable[[str], T]) -> T:
    """
    Read a setting from the environment.

    Args:
        varname (str): name of the environment variable.
        default: value used when the variable is not defined.
        cast (Callable[[str], T]): conversion applied to the raw string.

    Returns:
        the converted setting.

    Raises:
        EnvVariableNotSet: when the variable is defined but empty.
    """
    value = os.environ.get(varname)
    if value is None:
        return default
    if not value.strip():
        raise EnvVariableNotSet(varname)
    return cast(value)


DEFAULT_SEED = _from_env("TEMPEREDLEVY_SEED", 42, int)
THREADS = _from_env("TEMPEREDLEVY_THREADS", os.cpu_count() or 1, int)
REFINEMENT = _from_env("TEMPEREDLEVY_REFINEMENT", 8, int)
TRUNCATION_TOLERANCE = _from_env("TEMPEREDLEVY_TRUNCATION_TOLERANCE", 1e-6, float)
CALCULUS_TOLERANCE = _from_env("TEMPEREDLEVY_CALCULUS_TOLERANCE", 1e-8, float)
QUADRATURE_EPSREL = _from_env("TEMPEREDLEVY_QUADRATURE_EPSREL", 1e-10, float)
QUADRATURE_LIMIT = _from_env("TEMPEREDLEVY_QUADRATURE_LIMIT", 500, int)
SMALL_JUMP_EPSILON = _from_env("TEMPEREDLEVY_SMALL_JUMP_EPSILON", 0.05, float)
REJECTION_SHIFT = _from_env("TEMPEREDLEVY_REJECTION_SHIFT", 4.0, float)
BLOCK_SIZE = _from_env("TEMPEREDLEVY_BLOCK_SIZE", 4096, int)
MAX_REFINEMENT_LEVEL = _from_env("TEMPEREDLEVY_MAX_REFINEMENT_LEVEL", 12, int)

# NOTE: stable proposals become inefficient close to the Gaussian limit.
FALLBACK_ALPHA = 1.9
# NOTE: below this value of lambda * |t| the covariance uses its series.
SERIES_THRESHOLD = 1e-3
GRID_ALIGNMENT_TOLERANCE = 1e-9
