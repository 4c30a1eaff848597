"""Exception hierarchy shared by every module."""


class RaoDistError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(RaoDistError, ValueError):
    """Coordinates or hyperparameters outside the family's domain."""


class SupportError(RaoDistError, ValueError):
    """Sample point outside the support of the distribution."""


class MismatchError(RaoDistError, ValueError):
    """Two points belong to different families or hyperparameter settings."""


class DimensionError(RaoDistError, ValueError):
    """Arrays of incompatible dimension."""


class NotOnSphereError(RaoDistError, ValueError):
    """Point does not lie on the required half-sphere."""


class UnsupportedError(RaoDistError):
    """Operation not available for this family."""


class UnknownFamilyError(RaoDistError, KeyError):
    """No family registered under the requested name."""

    def __str__(self):
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class UnknownGeneratorError(RaoDistError, KeyError):
    """No elliptical generator registered under the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class QuadratureError(RaoDistError, ArithmeticError):
    """Numerical integration failed to reach the requested tolerance."""


class NonConvergenceError(RaoDistError, ArithmeticError):
    """An iterative solver stalled before reaching its tolerance."""


class DegenerateError(RaoDistError, ValueError):
    """Quantity undefined for coincident inputs."""
