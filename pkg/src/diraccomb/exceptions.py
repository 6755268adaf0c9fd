"""Exception types raised by diraccomb."""


class SingularRepresentationError(ValueError):
    """The boundary condition has no transfer-matrix representation."""


class NoCayleyFormError(ValueError):
    """``I - U`` is singular, so the inverse Cayley transform does not exist."""


class DegenerateDenominatorError(ArithmeticError):
    """The shared denominator of the a(eps), b(eps) coefficients vanished."""


class ResolutionError(ValueError):
    """Too few samples to resolve the requested number of Fourier modes."""


class NonBijectiveShiftError(ValueError):
    """A sampled displacement profile does not induce a bijection of the zone."""
