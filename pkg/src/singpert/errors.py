"""Exception types shared across the package."""


class SingpertError(Exception):
    """Base class for package errors."""


class ValidationError(SingpertError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(SingpertError, ArithmeticError):
    """A requested value does not exist at this input."""


class NonUpperHalfPlane(ValidationError):
    pass


class ForbiddenEnergy(NumericalError):
    """The inverse-square moment diverges at this energy."""

    def __init__(self, y, message=None):
        self.y = y
        super().__init__(message or f"energy {y!r} is forbidden: "
                         "inverse-square moment diverges")


class NotUnimodular(ValidationError):
    pass


class ExcludedAngle(ValidationError):
    pass


class SameExtension(NumericalError):
    """theta equals the base angle; eigenvalues are the base atoms.

    ``atoms`` carries the point spectrum of the base extension inside the
    requested window (when known).
    """

    def __init__(self, theta, atoms=None):
        self.theta = theta
        self.atoms = [] if atoms is None else list(atoms)
        super().__init__(f"theta={theta!r} coincides with the base extension")


class NotNormalized(ValidationError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass
