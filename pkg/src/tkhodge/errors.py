"""Exception types shared across the numeric modules."""


class InvalidStructure(ValueError):
    """A generated structure field violates its defining pointwise identities."""


class NoConvergence(RuntimeError):
    """An iterative solver exhausted its budget before reaching tolerance."""


class AmbiguousNullspace(RuntimeError):
    """Kernel detection could not certify a spectral gap at the requested size."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
