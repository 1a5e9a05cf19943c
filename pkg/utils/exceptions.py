"""
Exceptions raised by the propagators, the models and the command-line front end.

All of them are raised with the project convention for ``args``::

    raise TailTooLarge('Error@fm_cheb_coeffs.', 'last coefficient ratio 3.1e-01 > 1.0e-01')

so that ``e.args[0]`` names the place of failure and ``e.args[1]`` carries the message.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


class PropagationError(Exception):
    """Base class for numerical failures of a propagation run."""

    @property
    def reason(self) -> str:
        """Short human readable description, used in the report ``status`` column."""
        message = self.args[-1] if self.args else ''
        return f'{type(self).__name__}: {message}'


class TailTooLarge(PropagationError):
    """The Chebyshev expansion of f_m is not resolved by the requested number of terms."""


class NoConvergence(PropagationError):
    """A fixed-point iteration hit its iteration limit."""


class NonFinite(PropagationError, FloatingPointError):
    """A state vector or an input contains ``nan`` or ``inf``."""


class StepUnderflow(PropagationError):
    """The adaptive step size dropped below the round-off level of the current time."""


class ConditioningError(PropagationError, ValueError):
    """The Chebyshev-to-monomial conversion was requested above its conditioning guard."""


class DimensionMismatch(ValueError):
    """A vector does not match the dimension of the operator it is applied to."""


class ConfigError(ValueError):
    """Invalid configuration from the command line or from the YAML files."""
