"""Exception types shared across the toolkit.

Every failure mode that callers are expected to handle gets its own class;
plain ValueError is reserved for programming errors (bad argument shapes,
malformed files) that no caller should branch on.
"""


class DiovqaError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(DiovqaError):
    """Operands have incompatible dimensions."""


class NonConvergence(DiovqaError):
    """An iterative decomposition failed within its iteration budget."""


class DegenerateSpectrum(DiovqaError):
    """Eigenvalues too close for the distinct-spectrum expansion to be valid."""


class NonCommutingFamily(DiovqaError):
    """A generator family fails the pairwise commutation check."""


class NotDiagonal(DiovqaError):
    """A matrix required to be diagonal has off-diagonal entries."""


class BudgetExceeded(DiovqaError):
    """An exact integer evaluation would exceed the configured bit budget.

    Carries the offending monomial (exponent vector) when known.
    """

    def __init__(self, message, monomial=None):
        super().__init__(message)
        self.monomial = monomial


class EnumerationCapExceeded(DiovqaError):
    """A digitized search space is larger than the enumeration cap."""


class NumericIntegrityError(DiovqaError):
    """A value that must be real carries a non-negligible imaginary part."""


class DegreeOverflow(DiovqaError):
    """A target polynomial exceeds the degree reachable by the circuit expansion."""


class BudgetExhausted(DiovqaError):
    """All multistarts were spent without reaching a solution or a stationary point."""


class CapExceeded(DiovqaError):
    """A matrix-product enumeration would exceed the configured product cap."""
