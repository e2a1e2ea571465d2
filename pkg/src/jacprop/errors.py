"""Exception types shared across the package."""


class JacpropError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(JacpropError):
    """Shapes of the supplied operands are incompatible."""


class NonFiniteError(JacpropError):
    """A NaN or infinity appeared where only finite values are allowed."""


class SingularityError(JacpropError):
    """An activation was differentiated at a singular point under the reject policy.

    ``layer`` is the network layer (2..L) when known, ``coordinate`` the
    1-based index of the offending component of the weighted input.
    """

    def __init__(self, message: str, *, layer: int | None = None, coordinate: int | None = None):
        super().__init__(message)
        self.layer = layer
        self.coordinate = coordinate


class FormatError(JacpropError):
    """A text document (model file, CSV vector/matrix) failed to parse."""


class ModelValidationError(JacpropError):
    """A model violated its structural invariants; ``violations`` lists them."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)
