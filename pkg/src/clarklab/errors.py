"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: precondition/domain problems exit 2,
inconclusive numerics exit 3, internal consistency failures exit 1.
"""


class ClarkLabError(Exception):
    """Base class for all package errors."""


class DomainError(ClarkLabError, ValueError):
    """A precondition on the inputs is violated (bad point, bad flag, bad shape)."""


class NumericalError(ClarkLabError, RuntimeError):
    """A computation did not converge or is numerically inconclusive."""


class InternalError(ClarkLabError, RuntimeError):
    """An invariant that should hold by theory failed; indicates a bug or a
    badly conditioned input outside the supported class."""
